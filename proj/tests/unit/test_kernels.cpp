#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "generators.hpp"
#include "spacinglab/kernels.hpp"
#include "spacinglab/quadrature.hpp"

using namespace spacinglab;
using namespace spacinglab::kernels;
using doctest::Approx;

namespace {

// Reference values from 30-digit evaluation of sin, Si and the closed-form
// derivative.
struct KernelRef {
  double r, s1, d1, i1, s4, d4, i4;
};
constexpr KernelRef kRefs[] = {
    {0.3, 0.858393691334139785, -0.902028130138888792, -0.214415802605599554, 0.504551152427104683,
     -2.71189382267350690, 0.246727326153964482},
    {0.7, 0.367883010571774250, -1.36524037552035332, 0.0370840699747027696, -0.216236208183044845,
     -0.132543980274146929, 0.266778188134835482},
    {-1.3, -0.198090851846339961, 0.299764923420102340, -0.0544675131789696942, 0.116434881329331828,
     0.327270673618676541, -0.253759186091192949},
};

Eigen::MatrixXd dense(const SkewMatrix& m) {
  Eigen::MatrixXd a(m.size(), m.size());
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) a(i, j) = m(i, j);
  return a;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("sine kernel values") {
    CHECK(sine_kernel({0.5, 0.5}) == 1.0);
    CHECK(std::abs(sine_kernel({1.0, 0.0})) < 1e-16);
    CHECK(sine_kernel({0.25, 0.0}) == Approx(0.900316316157106070).epsilon(1e-15));
    // The series branch and the closed form meet smoothly at the cutoff.
    CHECK(sinc(0.999e-3) == Approx(sinc(1.001e-3)).epsilon(1e-8));
    CHECK(sinc_derivative(0.0) == 0.0);
  }

  TEST_CASE("matrix kernel against reference values") {
    for (const auto& ref : kRefs) {
      CAPTURE(ref.r);
      const auto k1 = matrix_kernel(Beta::Orthogonal, {ref.r + 0.4, 0.4});
      CHECK(k1.s == Approx(ref.s1).epsilon(1e-13));
      CHECK(k1.d == Approx(ref.d1).epsilon(1e-12));
      CHECK(std::abs(k1.i - ref.i1) < 1e-10);
      const auto k4 = matrix_kernel(Beta::Symplectic, {ref.r - 2.0, -2.0});
      CHECK(k4.s == Approx(ref.s4).epsilon(1e-13));
      CHECK(k4.d == Approx(ref.d4).epsilon(1e-12));
      CHECK(std::abs(k4.i - ref.i4) < 1e-10);
    }
  }

  TEST_CASE("matrix kernel diagonal and far field") {
    const auto diag = matrix_kernel(Beta::Symplectic, {1.7, 1.7});
    CHECK(diag.s == 1.0);
    CHECK(diag.d == 0.0);
    CHECK(diag.i == 0.0);
    CHECK(matrix_kernel(Beta::Orthogonal, {3.0, 3.0}).i == 0.0);  // sgn(0) = 0
    CHECK(matrix_kernel(Beta::Symplectic, {50.0, 0.0}).i == Approx(0.25).epsilon(4e-3));
    // Si(x) - pi/2 ~ -cos(x)/x
    CHECK(matrix_kernel(Beta::Orthogonal, {50.0, 0.0}).i == Approx(-1.0 / (50 * std::numbers::pi * std::numbers::pi)).epsilon(1e-3));
    CHECK_THROWS_AS(matrix_kernel(Beta::Unitary, {0.0, 1.0}), std::invalid_argument);
  }

  TEST_CASE("kernel symmetries on random pairs") {
    gen::Gen g(11);
    for (int c = 0; c < 200; ++c) {
      const double x = g.uniform(-6, 6), y = g.uniform(-6, 6);
      for (Beta b : {Beta::Orthogonal, Beta::Symplectic}) {
        const auto a = matrix_kernel(b, {x, y});
        const auto t = matrix_kernel(b, {y, x});
        CHECK(a.s == t.s);
        CHECK(a.d == -t.d);
        CHECK(std::abs(a.i + t.i) < 1e-10);
        CHECK(std::abs(a.s) <= 1.0);
      }
    }
  }

  TEST_CASE("regularized I4") {
    CHECK(regularized_i4(0, 0, {0.3, 0.3}) == 0.25);
    CHECK(std::abs(regularized_i4(0, 0, {50.0, 0.0})) < 1e-3);
    CHECK(std::abs(regularized_i4(0, 0, {-50.0, 0.0})) < 1e-3);
    // Shifts only move the arguments.
    CHECK(regularized_i4(0.2, -0.1, {1.0, 0.5}) ==
          Approx(matrix_kernel(Beta::Symplectic, {1.2, 0.4}).i - 0.25).epsilon(1e-14));
    // Square integrable: the tail decays like 1/x^2, so [-100, 100] already
    // captures all but ~1/(4 pi^2 100) of the mass.
    const double mass =
        quadrature::gauss_kronrod([](double x) { return std::pow(regularized_i4(0, 0, {x, 0.0}), 2); }, -100, 100, 1e-8);
    CHECK(mass > 0.0);
    CHECK(mass < 1.0);
  }

  TEST_CASE("square integrability uniform in y") {
    gen::Gen g(12);
    double worst = 0.0;
    for (int c = 0; c < 5; ++c) {
      const double y = g.uniform(-5, 5);
      for (int f = 0; f < 5; ++f) {
        auto integrand = [&](double x) {
          const auto k1 = matrix_kernel(f < 3 ? Beta::Orthogonal : Beta::Symplectic, {x, y});
          const double v = f == 0 ? k1.s : f == 1 ? k1.d : f == 2 ? k1.i : f == 3 ? k1.s : k1.d;
          return v * v;
        };
        worst = std::max(worst, quadrature::gauss_kronrod(integrand, -100, 100, 1e-6));
      }
    }
    // D_4 = 2 sinc'(2r) has the largest norm; by Plancherel its square
    // integrates to 2 pi^2 / 3 over the whole line.
    CHECK(worst < 2.0 * std::numbers::pi * std::numbers::pi / 3.0 + 1e-3);
    CHECK(worst > 6.0);
  }

  TEST_CASE("skew matrix storage") {
    SkewMatrix m(4);
    m.set(0, 3, 2.5);
    m.set(2, 1, -1.0);
    CHECK(m(0, 3) == 2.5);
    CHECK(m(3, 0) == -2.5);
    CHECK(m(1, 2) == 1.0);
    CHECK(m(2, 2) == 0.0);
    CHECK_THROWS_AS(m.set(1, 1, 1.0), std::invalid_argument);
  }

  TEST_CASE("pfaffian small cases") {
    SkewMatrix two(2);
    two.set(0, 1, 3.0);
    CHECK(pfaffian(two) == 3.0);

    SkewMatrix j(4);
    j.set(0, 1, 1.0);
    j.set(2, 3, 1.0);
    CHECK(pfaffian(j) == 1.0);

    SkewMatrix m(4);
    m.set(0, 1, 1);
    m.set(0, 2, 2);
    m.set(0, 3, 3);
    m.set(1, 2, 4);
    m.set(1, 3, 5);
    m.set(2, 3, 6);
    CHECK(pfaffian(m) == Approx(8.0).epsilon(1e-14));
    CHECK(std::sqrt(dense(m).determinant()) == Approx(8.0).epsilon(1e-12));

    CHECK(pfaffian(SkewMatrix(0)) == 1.0);
    CHECK_THROWS_WITH_AS(pfaffian(SkewMatrix(3)), "odd-dimensional skew matrix", std::invalid_argument);
  }

  TEST_CASE("pfaffian squared equals determinant") {
    gen::Gen g(13);
    int failures = 0;
    for (int c = 0; c < 1000; ++c) {
      const int n = 2 * g.integer(1, 6);
      SkewMatrix m(n);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) m.set(i, j, g.normal());
      const double pf = pfaffian(m);
      const double det = dense(m).determinant();
      if (std::abs(pf * pf - det) > 1e-10 * std::max(1.0, std::abs(det))) ++failures;
    }
    CHECK(failures == 0);
  }

  TEST_CASE("pfaffian sign follows row swaps") {
    // Swapping two indices of A (rows and columns) flips the sign of Pf.
    gen::Gen g(14);
    for (int c = 0; c < 50; ++c) {
      SkewMatrix m(6), p(6);
      for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) m.set(i, j, g.normal());
      auto swap_index = [](int i) { return i == 1 ? 4 : i == 4 ? 1 : i; };
      for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) p.set(swap_index(i), swap_index(j), m(i, j));
      CHECK(pfaffian(p) == Approx(-pfaffian(m)).epsilon(1e-10));
    }
  }

  TEST_CASE("correlation basic values") {
    const double one[] = {0.37};
    CHECK(correlation(Beta::Unitary, one) == 1.0);
    CHECK(correlation(Beta::Orthogonal, one) == Approx(1.0).epsilon(1e-15));
    CHECK(correlation(Beta::Symplectic, one) == Approx(1.0).epsilon(1e-15));
    const double two[] = {0.0, 0.5};
    CHECK(correlation(Beta::Unitary, two) == Approx(1.0 - 4.0 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-14));
    // W_2 = 1 - S^2 + D I for the Pfaffian ensembles.
    for (Beta b : {Beta::Orthogonal, Beta::Symplectic}) {
      const auto kv = matrix_kernel(b, {0.0, 0.5});
      CHECK(correlation(b, two) == Approx(1.0 - kv.s * kv.s + kv.d * kv.i).epsilon(1e-12));
    }
    const std::vector<double> nine(9, 0.0);
    CHECK_THROWS_WITH(correlation(Beta::Unitary, nine), "correlation order too large");
    CHECK_THROWS_WITH(correlation_expansion(Beta::Orthogonal, std::vector<double>(5, 0.0)), "correlation order too large");
  }

  TEST_CASE("Pfaffian correlation matches the cluster expansion") {
    const double pair[] = {0.0, 0.3};
    CHECK(std::abs(correlation(Beta::Symplectic, pair) - correlation_expansion(Beta::Symplectic, pair)) < 1e-12);
    CHECK(correlation_expansion(Beta::Orthogonal, std::vector<double>{1.3}) == Approx(1.0).epsilon(1e-15));
    gen::Gen g(15);
    for (int c = 0; c < 60; ++c) {
      const int k = g.integer(2, 4);
      const auto pts = g.points(k, -2.0, 2.0);
      for (Beta b : {Beta::Orthogonal, Beta::Symplectic}) {
        CAPTURE(k);
        CHECK(std::abs(correlation(b, pts) - correlation_expansion(b, pts)) < 1e-10);
      }
    }
  }

  TEST_CASE("correlation is symmetric and translation invariant") {
    gen::Gen g(16);
    for (int c = 0; c < 100; ++c) {
      const int k = g.integer(1, 4);
      auto pts = g.points(k, -3.0, 3.0);
      const double shift = g.uniform(-10, 10);
      for (Beta b : {Beta::Orthogonal, Beta::Unitary, Beta::Symplectic}) {
        const double w = correlation(b, pts);
        auto perm = pts;
        g.shuffle(perm);
        auto moved = pts;
        for (double& x : moved) x += shift;
        CHECK(std::abs(correlation(b, perm) - w) < 1e-10);
        CHECK(std::abs(correlation(b, moved) - w) < 1e-9);
      }
    }
  }

  TEST_CASE("correlation growth bound C^k k^(k/2)") {
    // Calibrate C on k = 1 .. 8 and random points; the bound must hold with
    // the constant found on the first half of the sample.
    gen::Gen g(17);
    double c_max = 0.0;
    std::vector<std::pair<int, double>> values;
    for (int c = 0; c < 400; ++c) {
      const int k = g.integer(1, 8);
      const auto pts = g.points(k, -4.0, 4.0);
      const Beta b = c % 3 == 0 ? Beta::Orthogonal : c % 3 == 1 ? Beta::Unitary : Beta::Symplectic;
      const double w = std::abs(correlation(b, pts));
      const double c_needed = std::pow(w / std::pow(k, k / 2.0), 1.0 / k);
      if (c < 200) c_max = std::max(c_max, c_needed);
      else values.push_back({k, w});
    }
    CHECK(c_max < 3.0);
    for (auto [k, w] : values) CHECK(w <= std::pow(1.5 * c_max, k) * std::pow(k, k / 2.0));
  }
}
