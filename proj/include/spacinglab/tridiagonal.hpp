#pragma once

#include <vector>

namespace spacinglab::linalg {

// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
// off-diagonal `off` (off[i] couples i and i+1, off.size() == diag.size() - 1)
// by implicit-shift QL. Returned in ascending order. Throws NumericError if an
// eigenvalue fails to converge in 60 sweeps.
std::vector<double> tridiagonal_eigenvalues(std::vector<double> diag, std::vector<double> off);

}  // namespace spacinglab::linalg
