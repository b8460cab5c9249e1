#include "spacinglab/kernels.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spacinglab/quadrature.hpp"

namespace spacinglab::kernels {

namespace {

constexpr double kPi = std::numbers::pi;

// Below this |r| the Taylor series of sinc is used; the closed forms lose
// relative accuracy to cancellation there.
constexpr double kSeriesCutoff = 1e-3;

double sign(double r) { return (r > 0.0) - (r < 0.0); }

void require_pfaffian_beta(Beta beta) {
  if (beta == Beta::Unitary) {
    throw std::invalid_argument("matrix kernel is defined for beta = 1 or 4 only");
  }
}

}  // namespace

double sinc(double r) {
  const double z = kPi * r;
  if (std::abs(r) < kSeriesCutoff) {
    const double z2 = z * z;
    return 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0));
  }
  return std::sin(z) / z;
}

double sinc_derivative(double r) {
  if (std::abs(r) < kSeriesCutoff) {
    // d/dr [1 - (pi r)^2/6 + (pi r)^4/120 - (pi r)^6/5040]
    const double p2 = kPi * kPi;
    const double r2 = r * r;
    return p2 * r * (-1.0 / 3.0 + p2 * r2 / 30.0 * (1.0 - p2 * r2 / 28.0));
  }
  const double z = kPi * r;
  return (z * std::cos(z) - std::sin(z)) / (kPi * r * r);
}

double sinc_integral(double r, double scale, double abs_tol) {
  return quadrature::gauss_kronrod([scale](double t) { return sinc(scale * t); }, 0.0, r,
                                   abs_tol);
}

double sine_kernel(KernelPoint p) { return sinc(p.x - p.y); }

MatrixKernelValue matrix_kernel(Beta beta, KernelPoint p) {
  require_pfaffian_beta(beta);
  const double r = p.x - p.y;
  MatrixKernelValue value;
  if (beta == Beta::Orthogonal) {
    value.s = sinc(r);
    value.d = sinc_derivative(r);
    value.i = sinc_integral(r, 1.0) - 0.5 * sign(r);
  } else {
    value.s = sinc(2.0 * r);
    value.d = 2.0 * sinc_derivative(2.0 * r);
    value.i = sinc_integral(r, 2.0);
  }
  return value;
}

double regularized_i4(double u, double v, KernelPoint p) {
  const double i4 = matrix_kernel(Beta::Symplectic, {p.x + u, p.y + v}).i;
  return p.y < p.x ? i4 - 0.25 : i4 + 0.25;
}

SkewMatrix::SkewMatrix(int n) : n_(n), upper_(n > 1 ? static_cast<std::size_t>(n) * (n - 1) / 2 : 0, 0.0) {
  if (n < 0) throw std::invalid_argument("SkewMatrix: negative dimension");
}

int SkewMatrix::index(int i, int j) const {
  // Row-major packing of the strict upper triangle.
  return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
}

double SkewMatrix::operator()(int i, int j) const {
  if (i == j) return 0.0;
  return i < j ? upper_[index(i, j)] : -upper_[index(j, i)];
}

void SkewMatrix::set(int i, int j, double value) {
  if (i == j) throw std::invalid_argument("SkewMatrix: diagonal is identically zero");
  if (i < j) {
    upper_[index(i, j)] = value;
  } else {
    upper_[index(j, i)] = -value;
  }
}

double correlation(Beta beta, std::span<const double> points) {
  const int k = static_cast<int>(points.size());
  if (k < 1) throw std::invalid_argument("correlation: need at least one point");
  if (k > kMaxCorrelationOrder) throw std::invalid_argument("correlation order too large");

  if (beta == Beta::Unitary) {
    Eigen::MatrixXd kernel(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) kernel(i, j) = sine_kernel({points[i], points[j]});
    }
    return kernel.partialPivLu().determinant();
  }

  // K_beta J with J = diag(sigma, ..., sigma): block (i, j) is
  // [[-D, S], [-S, I]] evaluated at (t_i, t_j).
  SkewMatrix m(2 * k);
  for (int i = 0; i < k; ++i) {
    m.set(2 * i, 2 * i + 1, 1.0);
    for (int j = i + 1; j < k; ++j) {
      const MatrixKernelValue kv = matrix_kernel(beta, {points[i], points[j]});
      m.set(2 * i, 2 * j, -kv.d);
      m.set(2 * i, 2 * j + 1, kv.s);
      m.set(2 * i + 1, 2 * j, -kv.s);
      m.set(2 * i + 1, 2 * j + 1, kv.i);
    }
  }
  return pfaffian(m);
}

}  // namespace spacinglab::kernels

namespace spacinglab::kernels {

namespace {

// Restricted growth strings enumerate every set partition once.
void for_each_partition(int k, const auto& visit) {
  std::vector<int> label(k, 0);
  std::vector<int> max_before(k, 0);
  while (true) {
    int blocks = 0;
    for (int v : label) blocks = std::max(blocks, v + 1);
    std::vector<std::vector<int>> partition(blocks);
    for (int i = 0; i < k; ++i) partition[label[i]].push_back(i);
    visit(partition);

    int i = k - 1;
    while (i > 0 && label[i] == max_before[i] + 1) --i;
    if (i == 0) return;
    ++label[i];
    for (int j = i + 1; j < k; ++j) {
      max_before[j] = std::max(max_before[j - 1], label[j - 1]);
      label[j] = 0;
    }
  }
}

}  // namespace

double correlation_expansion(Beta beta, std::span<const double> points) {
  require_pfaffian_beta(beta);
  const int k = static_cast<int>(points.size());
  if (k < 1) throw std::invalid_argument("correlation_expansion: need at least one point");
  if (k > kMaxExpansionOrder) throw std::invalid_argument("correlation order too large");

  // entry[a][b] = K_beta(t_a, t_b) as a 2x2 array.
  std::vector<std::vector<std::array<std::array<double, 2>, 2>>> entry(
      k, std::vector<std::array<std::array<double, 2>, 2>>(k));
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const MatrixKernelValue kv = matrix_kernel(beta, {points[a], points[b]});
      entry[a][b] = {{{kv.s, kv.d}, {kv.i, kv.s}}};
    }
  }

  double total = 0.0;
  for_each_partition(k, [&](const std::vector<std::vector<int>>& blocks) {
    const int m = static_cast<int>(blocks.size());
    const double sign = ((k - m) % 2 == 0) ? 1.0 : -1.0;

    // Cartesian product of one bijection per block.
    std::vector<std::vector<int>> order(blocks);
    double partition_sum = 0.0;
    while (true) {
      // Sum over every index vector d in {1,2}^k of the product of the
      // cyclic factors; each block reads its own slice of d.
      for (unsigned d = 0; d < (1u << k); ++d) {
        double product = 1.0;
        for (int bi = 0; bi < m; ++bi) {
          const std::vector<int>& block = blocks[bi];
          const std::vector<int>& perm = order[bi];
          const int len = static_cast<int>(block.size());
          double factor = 1.0 / (2.0 * len);
          for (int j = 0; j < len; ++j) {
            const int next = (j + 1) % len;
            const int dj = (d >> block[j]) & 1u;
            const int dn = (d >> block[next]) & 1u;
            factor *= entry[perm[j]][perm[next]][dj][dn];
          }
          product *= factor;
        }
        partition_sum += product;
      }
      int bi = 0;
      while (bi < m && !std::next_permutation(order[bi].begin(), order[bi].end())) ++bi;
      if (bi == m) break;
    }
    total += sign * partition_sum;
  });
  return total;
}

}  // namespace spacinglab::kernels
