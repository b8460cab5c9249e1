#pragma once

#include <stdexcept>
#include <string>

namespace spacinglab {

// Dyson index of the ensemble.
enum class Beta : int { Orthogonal = 1, Unitary = 2, Symplectic = 4 };

// Throws std::invalid_argument unless value is 1, 2 or 4.
Beta beta_from_int(int value);

constexpr int to_int(Beta beta) { return static_cast<int>(beta); }

// A numerical procedure failed (ODE branch loss, non-monotone CDF, ...).
// The command line tool maps this to exit code 1.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spacinglab
