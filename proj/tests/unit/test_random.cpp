#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "spacinglab/random.hpp"
#include "spacinglab/stats.hpp"

using namespace spacinglab::rng;
using doctest::Approx;

TEST_SUITE("random") {
  TEST_CASE("Philox4x32-10 known answers") {
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  }

  TEST_CASE("streams are reproducible and distinct") {
    StreamRng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
    std::vector<std::uint32_t> va, vb, vc, vd;
    for (int i = 0; i < 64; ++i) {
      va.push_back(a());
      vb.push_back(b());
      vc.push_back(c());
      vd.push_back(d());
    }
    CHECK(va == vb);
    CHECK(va != vc);
    CHECK(va != vd);
    StreamRng e(7, 3);
    for (int i = 0; i < 10; ++i) e.normal();
    StreamRng f(7, 3);
    for (int i = 0; i < 10; ++i) f.normal();
    CHECK(e.uniform() == f.uniform());
  }

  TEST_CASE("uniform stays in the open interval") {
    StreamRng r(1, 0);
    double lo = 1, hi = 0, sum = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double u = r.uniform();
      lo = std::min(lo, u);
      hi = std::max(hi, u);
      sum += u;
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(sum / n == Approx(0.5).epsilon(0.01));
  }

  TEST_CASE("normal matches N(0, 1)") {
    StreamRng r(2, 0);
    std::vector<double> x(20000);
    for (double& v : x) v = r.normal();
    CHECK(std::abs(spacinglab::stats::mean(x)) < 0.03);
    CHECK(spacinglab::stats::stddev(x) == Approx(1.0).epsilon(0.03));
    const auto ks = spacinglab::stats::ks_one_sample(x, [](double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); });
    CHECK(ks.p_value > 0.001);
  }

  TEST_CASE("gamma and chi moments") {
    StreamRng r(3, 0);
    for (double shape : {0.3, 1.0, 2.5, 40.0}) {
      CAPTURE(shape);
      std::vector<double> x(40000);
      for (double& v : x) v = r.gamma(shape);
      CHECK(spacinglab::stats::mean(x) == Approx(shape).epsilon(0.04));
      CHECK(spacinglab::stats::stddev(x) == Approx(std::sqrt(shape)).epsilon(0.05));
    }
    // E chi_k^2 = k
    for (double dof : {1.0, 2.0, 7.0}) {
      double m2 = 0;
      const int n = 40000;
      for (int i = 0; i < n; ++i) {
        const double c = r.chi(dof);
        m2 += c * c;
      }
      CHECK(m2 / n == Approx(dof).epsilon(0.04));
    }
    CHECK_THROWS_AS(r.gamma(0.0), std::invalid_argument);
  }
}
