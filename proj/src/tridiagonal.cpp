#include "spacinglab/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spacinglab/common.hpp"

namespace spacinglab::linalg {

std::vector<double> tridiagonal_eigenvalues(std::vector<double> d, std::vector<double> off) {
  const int n = static_cast<int>(d.size());
  if (n == 0) return d;
  if (static_cast<int>(off.size()) != n - 1) {
    throw std::invalid_argument("tridiagonal_eigenvalues: off-diagonal must have n-1 entries");
  }
  std::vector<double> e(off);
  e.push_back(0.0);
  const double eps = std::numeric_limits<double>::epsilon();

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (++iter > 60) throw NumericError("tridiagonal QL: no convergence");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            // Underflow: split the problem and restart.
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace spacinglab::linalg
