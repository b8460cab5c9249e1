#include "spacinglab/ensembles.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "spacinglab/tridiagonal.hpp"

namespace spacinglab::ensembles {

Potential::Potential(std::vector<double> coefficients) : coefficients_(std::move(coefficients)) {
  while (!coefficients_.empty() && coefficients_.back() == 0.0) coefficients_.pop_back();
  const int deg = degree();
  if (deg < 2 || deg % 2 != 0) throw std::invalid_argument("potential degree must be even and at least 2");
  if (!(coefficients_.back() > 0.0)) throw std::invalid_argument("potential leading coefficient must be positive");
  for (double c : coefficients_) {
    if (!std::isfinite(c)) throw std::invalid_argument("potential coefficients must be finite");
  }
}

Potential Potential::gaussian(double c) { return Potential({0.0, 0.0, c}); }

Potential Potential::semicircle(Beta beta) { return gaussian(beta == Beta::Orthogonal ? 0.25 : 0.5); }

double Potential::operator()(double x) const {
  double v = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) v = v * x + *it;
  return v;
}

bool Potential::is_gaussian() const { return degree() == 2 && coefficients_[1] == 0.0; }

double Potential::quadratic_coefficient() const {
  if (!is_gaussian()) throw std::logic_error("potential is not Gaussian");
  return coefficients_[2];
}

double Potential::semicircle_radius(Beta beta) const {
  // Equilibrium measure of |Delta|^beta e^{-f N c sum x^2}: radius^2 = beta / (f c).
  return std::sqrt(to_int(beta) / (weight_factor(beta) * quadratic_coefficient()));
}

double Potential::semicircle_density(Beta beta, double x) const {
  const double r = semicircle_radius(beta);
  if (std::abs(x) >= r) return 0.0;
  return 2.0 / (std::numbers::pi * r * r) * std::sqrt(r * r - x * x);
}

std::string Potential::describe() const {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  bool first = true;
  for (std::size_t k = 0; k < coefficients_.size(); ++k) {
    if (coefficients_[k] == 0.0) continue;
    if (!first) os << " + ";
    os << coefficients_[k];
    if (k > 0) os << " x^" << k;
    first = false;
  }
  return os.str();
}

namespace {

// Eigenvalues of |Delta|^beta e^{-mu^2/2} map to the requested potential by
// lambda = mu * scale with 1 / (2 scale^2) = f N c.
double gaussian_scale(const EnsembleSpec& spec) {
  const double c = spec.potential.quadratic_coefficient();
  return 1.0 / std::sqrt(2.0 * weight_factor(spec.beta) * spec.n * c);
}

void require_gaussian(const EnsembleSpec& spec) {
  if (!spec.potential.is_gaussian()) throw std::invalid_argument("tridiagonal model requires Gaussian V");
}

}  // namespace

Spectrum sample_tridiagonal(const EnsembleSpec& spec, SamplerState& state) {
  require_gaussian(spec);
  if (spec.n < 1) throw std::invalid_argument("sample_tridiagonal: n must be positive");
  const int n = spec.n;
  const double beta = to_int(spec.beta);
  const double scale = gaussian_scale(spec);
  std::vector<double> diag(static_cast<std::size_t>(n));
  std::vector<double> off(static_cast<std::size_t>(n - 1));
  // N(0, 2) / sqrt(2) is a standard normal.
  for (int i = 0; i < n; ++i) diag[i] = state.rng.normal() * scale;
  for (int i = 0; i + 1 < n; ++i) off[i] = state.rng.chi(beta * (n - 1 - i)) / std::numbers::sqrt2 * scale;
  Spectrum out;
  out.values = linalg::tridiagonal_eigenvalues(std::move(diag), std::move(off));
  out.stream = state.rng.stream();
  return out;
}

Spectrum sample_dense_goe(const EnsembleSpec& spec, SamplerState& state, double* matrix_trace) {
  if (spec.beta != Beta::Orthogonal) throw std::invalid_argument("sample_dense_goe: beta must be 1");
  require_gaussian(spec);
  if (spec.n < 1 || spec.n > 2000) throw std::invalid_argument("sample_dense_goe: n must lie in [1, 2000]");
  const int n = spec.n;
  // Off-diagonal variance s2, diagonal 2 s2: density e^{-tr M^2 / (4 s2)} = e^{-N c tr M^2}.
  const double sd = std::sqrt(1.0 / (4.0 * n * spec.potential.quadratic_coefficient()));
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j) {
    m(j, j) = state.rng.normal() * sd * std::numbers::sqrt2;
    for (int i = j + 1; i < n; ++i) {
      const double x = state.rng.normal() * sd;
      m(i, j) = x;
      m(j, i) = x;
    }
  }
  if (matrix_trace) *matrix_trace = m.trace();
  Eigen::Tridiagonalization<Eigen::MatrixXd> tri(m);
  const Eigen::VectorXd d = tri.diagonal();
  const Eigen::VectorXd e = tri.subDiagonal();
  Spectrum out;
  out.values = linalg::tridiagonal_eigenvalues(std::vector<double>(d.data(), d.data() + d.size()),
                                               std::vector<double>(e.data(), e.data() + e.size()));
  out.stream = state.rng.stream();
  return out;
}

double log_density(const EnsembleSpec& spec, const std::vector<double>& x) {
  const double beta = to_int(spec.beta);
  const double confine = weight_factor(spec.beta) * static_cast<double>(x.size());
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    total -= confine * spec.potential(x[j]);
    for (std::size_t k = j + 1; k < x.size(); ++k) {
      const double gap = std::abs(x[k] - x[j]);
      if (gap == 0.0) return -std::numeric_limits<double>::infinity();
      total += beta * std::log(gap);
    }
  }
  return total;
}

double log_density_ratio(const EnsembleSpec& spec, const std::vector<double>& x, std::size_t j, double y) {
  const double xj = x[j];
  // Product of |y - x_k| / |x_j - x_k|, renormalised to stay in range; one
  // log per block instead of one per factor.
  double product = 1.0;
  double log_sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (k == j) continue;
    const double num = std::abs(y - x[k]);
    if (num == 0.0) return -std::numeric_limits<double>::infinity();
    product *= num / std::abs(xj - x[k]);
    if (product > 1e200 || product < 1e-200) {
      log_sum += std::log(product);
      product = 1.0;
    }
  }
  log_sum += std::log(product);
  const double confine = weight_factor(spec.beta) * static_cast<double>(x.size());
  return to_int(spec.beta) * log_sum - confine * (spec.potential(y) - spec.potential(xj));
}

McmcReport sample_mcmc(const EnsembleSpec& spec, SamplerState& state, const McmcOptions& options,
                       const std::function<void(const Spectrum&)>& emit) {
  if (spec.n < 2) throw std::invalid_argument("sample_mcmc: n must be at least 2");
  if (options.steps <= options.burn_in) throw std::invalid_argument("sample_mcmc: steps must exceed burn_in");
  if (options.thin == 0 || options.adapt_every == 0) throw std::invalid_argument("sample_mcmc: thin must be positive");
  const std::size_t n = static_cast<std::size_t>(spec.n);

  if (state.configuration.size() != n) {
    // Start spread over [-1, 1]; burn-in moves it to the equilibrium scale.
    state.configuration.resize(n);
    for (std::size_t j = 0; j < n; ++j) state.configuration[j] = -1.0 + 2.0 * (j + 0.5) / n;
    state.step_scale.assign(n, 1.0 / static_cast<double>(n));
  }
  std::vector<double>& x = state.configuration;
  std::vector<std::size_t> batch_accept(n, 0);
  std::size_t batch_sweeps = 0;
  std::size_t post_proposals = 0, post_accepted = 0;

  McmcReport report;
  for (std::size_t sweep = 0; sweep < options.steps; ++sweep) {
    const bool burning = sweep < options.burn_in;
    for (std::size_t j = 0; j < n; ++j) {
      const double y = x[j] + state.step_scale[j] * state.rng.normal();
      const double log_ratio = log_density_ratio(spec, x, j, y);
      const double u = state.rng.uniform();
      ++state.proposals;
      if (!burning) ++post_proposals;
      if (std::log(u) < log_ratio) {
        x[j] = y;
        ++state.accepted;
        ++batch_accept[j];
        if (!burning) ++post_accepted;
      }
    }
    if (burning && ++batch_sweeps == options.adapt_every) {
      for (std::size_t j = 0; j < n; ++j) {
        const double rate = static_cast<double>(batch_accept[j]) / static_cast<double>(batch_sweeps);
        if (rate > 0.5) state.step_scale[j] *= 1.2;
        else if (rate < 0.3) state.step_scale[j] /= 1.2;
        batch_accept[j] = 0;
      }
      batch_sweeps = 0;
    }
    if (!burning && (sweep - options.burn_in + 1) % options.thin == 0) {
      Spectrum s;
      s.values = x;
      std::sort(s.values.begin(), s.values.end());
      s.stream = state.rng.stream();
      emit(s);
      ++report.emitted;
    }
  }
  report.acceptance = post_proposals ? static_cast<double>(post_accepted) / post_proposals : 0.0;
  if (report.acceptance < 0.05 || report.acceptance > 0.95) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << "MCMC acceptance rate " << report.acceptance << " outside [0.05, 0.95] after burn-in";
    report.warnings.push_back(os.str());
  }
  return report;
}

}  // namespace spacinglab::ensembles
