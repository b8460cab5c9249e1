#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace spacinglab::quadrature {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
Rule gauss_legendre(int n);

// n-point Gauss-Legendre rule mapped to [a, b].
Rule gauss_legendre(int n, double a, double b);

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void kronrod_panel(F& f, double a, double b, double& integral, double& error) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  integral = kronrod * half;
  error = std::abs((kronrod - gauss) * half);
}

template <class F>
double adaptive(F& f, double a, double b, double whole, double err, double tol, int depth) {
  if (err <= tol || depth <= 0) return whole;
  const double mid = 0.5 * (a + b);
  double left = 0.0, left_err = 0.0, right = 0.0, right_err = 0.0;
  kronrod_panel(f, a, mid, left, left_err);
  kronrod_panel(f, mid, b, right, right_err);
  if (left_err + right_err <= tol) return left + right;
  return adaptive(f, a, mid, left, left_err, 0.5 * tol, depth - 1) +
         adaptive(f, mid, b, right, right_err, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Gauss-Kronrod (G7/K15) quadrature of f over [a, b] by recursive
// bisection until the Kronrod-Gauss difference drops below abs_tol.
// Reversed limits give the negated integral.
template <class F>
double gauss_kronrod(F&& f, double a, double b, double abs_tol = 1e-10, int max_depth = 40) {
  if (a == b) return 0.0;
  if (b < a) return -gauss_kronrod(f, b, a, abs_tol, max_depth);
  double whole = 0.0, err = 0.0;
  detail::kronrod_panel(f, a, b, whole, err);
  return detail::adaptive(f, a, b, whole, err, abs_tol, max_depth);
}

}  // namespace spacinglab::quadrature
