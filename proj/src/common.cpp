#include "spacinglab/common.hpp"

namespace spacinglab {

Beta beta_from_int(int value) {
  switch (value) {
    case 1: return Beta::Orthogonal;
    case 2: return Beta::Unitary;
    case 4: return Beta::Symplectic;
    default:
      throw std::invalid_argument("beta must be 1, 2 or 4 (got " + std::to_string(value) + ")");
  }
}

}  // namespace spacinglab
