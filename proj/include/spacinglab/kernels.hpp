#pragma once

#include <span>
#include <vector>

#include "spacinglab/common.hpp"

namespace spacinglab::kernels {

// Pair of rescaled eigenvalue coordinates.
struct KernelPoint {
  double x = 0.0;
  double y = 0.0;
};

// Entries of the 2x2 limiting matrix kernel [[s, d], [i, s]].
struct MatrixKernelValue {
  double s = 0.0;
  double d = 0.0;
  double i = 0.0;
};

// sin(pi r) / (pi r) and its derivative in r; both regular at r = 0.
double sinc(double r);
double sinc_derivative(double r);

// Integral of sinc(scale * t) over [0, r] by adaptive Gauss-Kronrod.
double sinc_integral(double r, double scale, double abs_tol = 1e-10);

// Limiting unitary kernel sin(pi(x-y)) / (pi(x-y)), equal to 1 on the diagonal.
double sine_kernel(KernelPoint p);

// S, D, I entries of the orthogonal (beta = 1) or symplectic (beta = 4)
// limiting matrix kernel. The sign convention sgn(0) = 0 is used for the
// beta = 1 correction term.
MatrixKernelValue matrix_kernel(Beta beta, KernelPoint p);

// I_4(x+u, y+v) shifted by -1/4 below the diagonal (y < x) and +1/4 on and
// above it; square integrable in x.
double regularized_i4(double u, double v, KernelPoint p);

// Real skew-symmetric matrix; only the strict upper triangle is stored, so
// A = -A^T holds by construction.
class SkewMatrix {
 public:
  explicit SkewMatrix(int n);

  int size() const { return n_; }
  double operator()(int i, int j) const;
  // Sets A(i, j) = value and A(j, i) = -value. Requires i != j.
  void set(int i, int j, double value);

 private:
  int index(int i, int j) const;  // i < j

  int n_;
  std::vector<double> upper_;
};

// Pfaffian by skew-symmetric Parlett-Reid tridiagonalization with partial
// pivoting. Throws std::invalid_argument for odd dimension.
double pfaffian(const SkewMatrix& m);

// Practical caps on the correlation order.
inline constexpr int kMaxCorrelationOrder = 8;
inline constexpr int kMaxExpansionOrder = 4;

// Limiting k-point correlation function W_k at the given points: det of the
// sine kernel matrix for beta = 2, Pf(K_beta J) for beta = 1, 4.
double correlation(Beta beta, std::span<const double> points);

// Same quantity from the cluster expansion: a signed sum over set
// partitions, bijections of each block and 2^k kernel index vectors of
// products of cyclic kernel traces. Only for beta = 1, 4 and k <= 4.
double correlation_expansion(Beta beta, std::span<const double> points);

}  // namespace spacinglab::kernels
