#include <cmath>
#include <numbers>

#include "doctest.h"
#include "spacinglab/quadrature.hpp"

using namespace spacinglab::quadrature;
using doctest::Approx;

TEST_SUITE("quadrature") {
  TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    for (int n : {1, 2, 5, 12, 40}) {
      const Rule r = gauss_legendre(n);
      double w = 0.0;
      for (double x : r.weights) w += x;
      CHECK(w == Approx(2.0).epsilon(1e-14));
      // x^(2n-2) integrates to 2 / (2n - 1).
      double m = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) m += r.weights[i] * std::pow(r.nodes[i], 2 * n - 2);
      CHECK(m == Approx(2.0 / (2 * n - 1)).epsilon(1e-12));
      CHECK(std::is_sorted(r.nodes.begin(), r.nodes.end()));
    }
  }

  TEST_CASE("mapped rule") {
    const Rule r = gauss_legendre(20, 0.0, std::numbers::pi);
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::sin(r.nodes[i]);
    CHECK(s == Approx(2.0).epsilon(1e-14));
  }

  TEST_CASE("adaptive Gauss-Kronrod") {
    CHECK(gauss_kronrod([](double x) { return std::exp(x); }, 0.0, 1.0) == Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
    CHECK(gauss_kronrod([](double x) { return std::exp(x); }, 1.0, 0.0) == Approx(1.0 - std::exp(1.0)).epsilon(1e-13));
    CHECK(gauss_kronrod([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
    // Oscillatory integrand over many periods.
    const double v = gauss_kronrod([](double x) { return std::cos(40.0 * x); }, 0.0, 3.0, 1e-12);
    CHECK(v == Approx(std::sin(120.0) / 40.0).epsilon(1e-10));
  }
}
