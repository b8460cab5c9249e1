#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spacinglab/common.hpp"
#include "spacinglab/random.hpp"

namespace spacinglab::ensembles {

// Even polynomial-type confining potential V(x) = sum_k coefficients[k] x^k.
class Potential {
 public:
  // Throws std::invalid_argument unless the degree is even and at least 2
  // and the leading coefficient is positive.
  explicit Potential(std::vector<double> coefficients);

  // V(x) = c x^2.
  static Potential gaussian(double c = 1.0);
  // Gaussian V scaled so the limiting density is the semicircle on [-2, 2]
  // (psi(0) = 1/pi) under the weight e^{-N V} (beta = 1, 2) or e^{-2 N V}
  // (beta = 4): c = 1/4 for beta = 1, c = 1/2 for beta = 2, 4.
  static Potential semicircle(Beta beta);

  double operator()(double x) const;
  const std::vector<double>& coefficients() const { return coefficients_; }
  int degree() const { return static_cast<int>(coefficients_.size()) - 1; }

  // True for c x^2 plus a constant; quadratic_coefficient() is then c.
  bool is_gaussian() const;
  double quadratic_coefficient() const;

  // Radius of the limiting semicircle for a Gaussian potential.
  double semicircle_radius(Beta beta) const;
  // Limiting density at x for a Gaussian potential.
  double semicircle_density(Beta beta, double x) const;

  std::string describe() const;

 private:
  std::vector<double> coefficients_;
};

// Weight exponent factor: w = e^{-factor * N * V}.
inline double weight_factor(Beta beta) { return beta == Beta::Symplectic ? 2.0 : 1.0; }

struct EnsembleSpec {
  Beta beta = Beta::Unitary;
  int n = 2;
  Potential potential = Potential::semicircle(Beta::Unitary);
};

// Sorted eigenvalues of one sample on the raw scale.
struct Spectrum {
  std::vector<double> values;
  std::uint64_t stream = 0;
};

// RNG plus Markov chain state. A state must not be shared between threads.
class SamplerState {
 public:
  SamplerState(std::uint64_t seed, std::uint64_t stream) : rng(seed, stream) {}

  rng::StreamRng rng;
  // MCMC only.
  std::vector<double> configuration;
  std::vector<double> step_scale;
  std::size_t proposals = 0;
  std::size_t accepted = 0;
};

// Tridiagonal beta-Hermite model (Dumitriu-Edelman): diagonal N(0, 2)/sqrt(2),
// off-diagonals chi_{beta (n-1)}, ..., chi_beta over sqrt(2), rescaled to the
// requested Gaussian potential. Throws std::invalid_argument "tridiagonal
// model requires Gaussian V" otherwise. n = 1 is allowed.
Spectrum sample_tridiagonal(const EnsembleSpec& spec, SamplerState& state);

// Dense real symmetric matrix with the GOE law of the requested Gaussian
// potential, Householder tridiagonalisation, then QL. beta = 1, n <= 2000.
// When `matrix_trace` is non-null the trace of the sampled matrix is stored.
Spectrum sample_dense_goe(const EnsembleSpec& spec, SamplerState& state, double* matrix_trace = nullptr);

struct McmcOptions {
  std::size_t steps = 0;    // total sweeps, burn-in included
  std::size_t burn_in = 0;  // adaptive phase
  std::size_t thin = 1;     // emit every thin-th sweep after burn-in
  std::size_t adapt_every = 50;
};

struct McmcReport {
  std::size_t emitted = 0;
  double acceptance = 0.0;  // after burn-in
  std::vector<std::string> warnings;
};

// Log of the joint eigenvalue density up to its normalisation:
// beta sum_{j<k} log|x_k - x_j| - factor N sum_j V(x_j). -inf at coincidence.
double log_density(const EnsembleSpec& spec, const std::vector<double>& x);

// log density(x with x_j -> y) - log density(x). -inf if y hits another
// coordinate.
double log_density_ratio(const EnsembleSpec& spec, const std::vector<double>& x, std::size_t j, double y);

// Metropolis-within-Gibbs on the unordered configuration with single
// coordinate Gaussian proposals; per-coordinate scales adapt toward 0.3-0.5
// acceptance during burn-in and are frozen afterwards. Calls `emit` with a
// sorted copy every `thin` sweeps after burn-in. A warning is recorded if the
// post burn-in acceptance lies outside [0.05, 0.95].
McmcReport sample_mcmc(const EnsembleSpec& spec, SamplerState& state, const McmcOptions& options,
                       const std::function<void(const Spectrum&)>& emit);

}  // namespace spacinglab::ensembles
