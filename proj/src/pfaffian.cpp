#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "spacinglab/kernels.hpp"

namespace spacinglab::kernels {

double pfaffian(const SkewMatrix& m) {
  const int n = m.size();
  if (n % 2 != 0) throw std::invalid_argument("odd-dimensional skew matrix");
  if (n == 0) return 1.0;

  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = m(i, j);
  }

  double result = 1.0;
  for (int k = 0; k < n - 1; k += 2) {
    // Pivot: largest entry of column k below the diagonal moved to row k+1.
    Eigen::Index offset = 0;
    a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&offset);
    const int pivot = k + 1 + static_cast<int>(offset);
    if (pivot != k + 1) {
      a.row(k + 1).swap(a.row(pivot));
      a.col(k + 1).swap(a.col(pivot));
      result = -result;
    }
    const double head = a(k, k + 1);
    if (head == 0.0) return 0.0;
    result *= head;

    if (k + 2 < n) {
      const int rest = n - k - 2;
      // Gauss transform eliminating row/column k beyond k+1; the trailing
      // block stays skew-symmetric.
      const Eigen::VectorXd tau = a.row(k).tail(rest).transpose() / head;
      const Eigen::VectorXd col = a.col(k + 1).tail(rest);
      a.bottomRightCorner(rest, rest) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return result;
}

}  // namespace spacinglab::kernels
