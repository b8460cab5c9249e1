#include "spacinglab/gap.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spacinglab/kernels.hpp"
#include "spacinglab/quadrature.hpp"

namespace spacinglab::gap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRadicandClamp = 1e-12;

struct LogParts {
  double log_g2 = 0.0;
  double half_root = 0.0;
  double v = 0.0;
  double root = 0.0;  // sqrt(-v')
};

LogParts parts_at(const SigmaTrajectory& traj, double t) {
  if (t == 0.0) return {0.0, 0.0, -1.0 / kPi, 1.0 / kPi};
  const SigmaPoint p = traj.at(t);
  double mvp = p.minus_v_prime;
  if (mvp < 0.0) {
    if (mvp < -kRadicandClamp) throw NumericError("negative radicand in √(−v′) at s=" + std::to_string(t));
    mvp = 0.0;
  }
  return {p.log_g2, p.half_root, p.v, std::sqrt(mvp)};
}

GapValue orthogonal_at(const LogParts& q) {
  const double g = std::exp(0.5 * q.log_g2 - q.half_root);
  return {g, g * 0.5 * kPi * (q.v - q.root)};
}

}  // namespace

double max_gap_length(Beta beta, const SigmaTrajectory& traj) {
  return traj.t_max() / (beta == Beta::Symplectic ? 2.0 * kPi : kPi);
}

GapValue gap_value(Beta beta, const SigmaTrajectory& traj, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("gap_value: s must be non-negative");
  if (s > max_gap_length(beta, traj) * (1.0 + 1e-12)) {
    throw std::out_of_range("gap_value: s beyond the integrated trajectory");
  }
  switch (beta) {
    case Beta::Unitary: {
      const LogParts q = parts_at(traj, std::min(kPi * s, traj.t_max()));
      const double g = std::exp(q.log_g2);
      return {g, kPi * q.v * g};
    }
    case Beta::Orthogonal:
      return orthogonal_at(parts_at(traj, std::min(kPi * s, traj.t_max())));
    case Beta::Symplectic: {
      const LogParts q = parts_at(traj, std::min(2.0 * kPi * s, traj.t_max()));
      const GapValue g1 = orthogonal_at(q);
      const double ratio = std::exp(0.5 * q.log_g2 + q.half_root);  // G2 / G1
      return {0.5 * (g1.g + ratio), g1.gp + 0.5 * kPi * ratio * (q.v + q.root)};
    }
  }
  throw std::invalid_argument("gap_value: bad beta");
}

double gap_probability(Beta beta, const SigmaTrajectory& traj, double s) {
  return gap_value(beta, traj, s).g;
}

GapCurve gap_curve(Beta beta, const SigmaTrajectory& traj, double ds, std::optional<double> s_max) {
  if (!(ds > 0.0)) throw std::invalid_argument("gap_curve: ds must be positive");
  const double cover = max_gap_length(beta, traj);
  const double end = s_max ? *s_max : cover;
  if (end > cover * (1.0 + 1e-12)) {
    throw NumericError("gap_curve: trajectory ends at s=" + std::to_string(traj.t_max()) +
                       ", short of the requested range");
  }
  const auto count = static_cast<std::size_t>(std::floor(end / ds * (1.0 + 1e-12))) + 1;
  GapCurve curve;
  curve.beta = beta;
  curve.s.reserve(count);
  curve.g.reserve(count);
  curve.gp.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double s = static_cast<double>(k) * ds;
    const GapValue v = gap_value(beta, traj, std::min(s, cover));
    curve.s.push_back(s);
    curve.g.push_back(v.g);
    curve.gp.push_back(v.gp);
  }
  return curve;
}

const GapCurve& GapCurves::operator[](Beta beta) const {
  switch (beta) {
    case Beta::Orthogonal: return orthogonal;
    case Beta::Unitary: return unitary;
    case Beta::Symplectic: return symplectic;
  }
  throw std::invalid_argument("GapCurves: bad beta");
}

GapCurves gap_curves(const SigmaTrajectory& traj, double ds) {
  return {gap_curve(Beta::Orthogonal, traj, ds), gap_curve(Beta::Unitary, traj, ds),
          gap_curve(Beta::Symplectic, traj, ds)};
}

const SigmaTrajectory& default_trajectory() {
  static const SigmaTrajectory traj = integrate_sigma(2.0 * kPi * 8.5);
  return traj;
}

// ---------------------------------------------------------------------------

UniversalSpacingCDF universal_cdf(const GapCurve& curve, int M) {
  if (M < 2) throw std::invalid_argument("universal_cdf: M must be at least 2");
  const std::size_t n = curve.s.size();
  if (n < 3) throw std::invalid_argument("universal_cdf: curve too short");

  UniversalSpacingCDF cdf;
  cdf.beta = curve.beta;
  cdf.M = M;
  cdf.s = curve.s;
  cdf.F.resize(n);
  cdf.tail.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    cdf.tail[k] = -curve.gp[k];
    cdf.F[k] = 1.0 + curve.gp[k];
  }
  for (std::size_t k = 1; k < n; ++k) {
    if (cdf.F[k] < cdf.F[k - 1] - 1e-8) {
      throw NumericError("CDF monotonicity violated at s=" + std::to_string(cdf.s[k]));
    }
  }
  double running = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    running = std::max(running, std::clamp(cdf.F[k], 0.0, 1.0));
    cdf.F[k] = running;
    cdf.tail[k] = std::clamp(cdf.tail[k], 0.0, 1.0);
  }
  cdf.F[0] = std::max(0.0, cdf.F[0]);

  // Fritsch-Carlson slopes.
  std::vector<double> secant(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) secant[k] = (cdf.F[k + 1] - cdf.F[k]) / (cdf.s[k + 1] - cdf.s[k]);
  cdf.slopes_.assign(n, 0.0);
  cdf.slopes_[0] = secant[0];
  cdf.slopes_[n - 1] = secant[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (secant[k - 1] * secant[k] <= 0.0) continue;
    const double h0 = cdf.s[k] - cdf.s[k - 1];
    const double h1 = cdf.s[k + 1] - cdf.s[k];
    const double w0 = 2 * h1 + h0, w1 = h1 + 2 * h0;
    cdf.slopes_[k] = (w0 + w1) / (w0 / secant[k - 1] + w1 / secant[k]);
  }
  for (std::size_t k : {std::size_t{0}, n - 1}) {
    const double sec = secant[k == 0 ? 0 : n - 2];
    if (sec <= 0.0) cdf.slopes_[k] = 0.0;
    else cdf.slopes_[k] = std::min(cdf.slopes_[k], 3.0 * sec);
  }

  cdf.nodes.reserve(static_cast<std::size_t>(M - 1));
  for (int i = 1; i < M; ++i) {
    const double p = static_cast<double>(i) / M;
    if (p >= cdf.F.back()) throw NumericError("universal_cdf: grid too short for the requested nodes");
    cdf.nodes.push_back(cdf.quantile(p));
  }
  for (std::size_t i = 1; i < cdf.nodes.size(); ++i) {
    if (!(cdf.nodes[i] > cdf.nodes[i - 1])) throw NumericError("universal_cdf: quantile nodes not increasing");
  }
  return cdf;
}

double UniversalSpacingCDF::operator()(double x) const {
  if (x <= s.front()) return x < s.front() ? 0.0 : F.front();
  if (x >= s.back()) return F.back();
  const auto it = std::upper_bound(s.begin(), s.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - s.begin()) - 1;
  const double h = s[k + 1] - s[k];
  const double t = (x - s[k]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  return h00 * F[k] + h10 * h * slopes_[k] + h01 * F[k + 1] + h11 * h * slopes_[k + 1];
}

double UniversalSpacingCDF::quantile(double p) const {
  if (!(p > 0.0) || !(p < F.back())) throw std::out_of_range("quantile: p outside (0, F_max)");
  const auto it = std::lower_bound(F.begin(), F.end(), p);
  const std::size_t hi = static_cast<std::size_t>(it - F.begin());
  if (F[hi] == p) return s[hi];
  // The interpolant is monotone on [s[hi-1], s[hi]], so bisection is safe.
  double lo_s = s[hi - 1], hi_s = s[hi];
  for (int iter = 0; iter < 200 && hi_s - lo_s > 1e-15 * hi_s; ++iter) {
    const double mid = 0.5 * (lo_s + hi_s);
    if ((*this)(mid) < p) lo_s = mid;
    else hi_s = mid;
  }
  return 0.5 * (lo_s + hi_s);
}

// ---------------------------------------------------------------------------

double fredholm_g2(double s, int n) {
  if (!(s > 0.0)) throw std::invalid_argument("fredholm_g2: s must be positive");
  if (n < 4 || n > 400) throw std::invalid_argument("fredholm_g2: quadrature order must lie in [4, 400]");
  const quadrature::Rule rule = quadrature::gauss_legendre(n, 0.0, s);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double k = kernels::sine_kernel({rule.nodes[i], rule.nodes[j]});
      a(i, j) = (i == j ? 1.0 : 0.0) - std::sqrt(rule.weights[i]) * k * std::sqrt(rule.weights[j]);
    }
  }
  return a.partialPivLu().determinant();
}

double series_gap(Beta beta, double s, int k_max, int nodes_per_dim) {
  if (!(s >= 0.0) || s > 1.0) throw std::invalid_argument("series_gap: requires 0 <= s <= 1");
  if (k_max < 0 || k_max > kernels::kMaxExpansionOrder) {
    throw std::invalid_argument("series_gap: k_max must lie in [0, 4]");
  }
  if (nodes_per_dim < 1) throw std::invalid_argument("series_gap: nodes_per_dim must be positive");
  double total = 1.0;
  if (k_max >= 1) total -= s;  // W_1 = 1
  const quadrature::Rule rule = quadrature::gauss_legendre(nodes_per_dim, 0.0, 1.0);
  const int m = nodes_per_dim;
  for (int k = 2; k <= k_max; ++k) {
    std::vector<int> idx(static_cast<std::size_t>(k), 0);
    std::vector<double> x(static_cast<std::size_t>(k));
    double integral = 0.0;
    for (;;) {
      // x_k = s u_k, x_j = x_{j+1} u_j: the cube maps onto 0 <= x_1 <= ... <= x_k <= s.
      double weight = 1.0;
      double upper = s;
      for (int j = k - 1; j >= 0; --j) {
        x[j] = upper * rule.nodes[idx[j]];
        weight *= upper * rule.weights[idx[j]];
        upper = x[j];
      }
      integral += weight * kernels::correlation(beta, x);
      int d = 0;
      while (d < k && ++idx[d] == m) idx[d++] = 0;
      if (d == k) break;
    }
    total += (k % 2 == 0 ? 1.0 : -1.0) * integral;
  }
  return total;
}

// ---------------------------------------------------------------------------

TailFit tail_fit(const UniversalSpacingCDF& cdf, double s_lo, double s_hi) {
  if (!(s_hi > s_lo)) throw std::invalid_argument("tail_fit: empty window");
  if (cdf.s.back() < s_hi * (1.0 - 1e-12)) {
    throw std::invalid_argument("tail_fit: CDF must cover the fit window");
  }
  TailFit fit;
  fit.s_lo = s_lo;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double last = s_lo;
  bool truncated = false;
  for (std::size_t k = 0; k < cdf.s.size(); ++k) {
    const double s = cdf.s[k];
    if (s < s_lo - 1e-12 || s > s_hi + 1e-12) continue;
    const double t = cdf.tail[k];
    if (!(t > 1e-300)) {
      truncated = true;
      break;
    }
    const double x = s * s, y = std::log(t);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++fit.points;
    last = s;
  }
  if (fit.points < 2) throw NumericError("tail_fit: 1 - F underflows inside the fit window");
  fit.s_hi = truncated ? last : s_hi;
  if (truncated) fit.warning = "1 - F underflows before s=" + std::to_string(s_hi) + "; fit window cut at s=" + std::to_string(last);
  const double n = static_cast<double>(fit.points);
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  fit.A = std::exp(intercept);
  fit.B = -slope;
  for (std::size_t k = 0; k < cdf.s.size() && cdf.s[k] <= fit.s_hi + 1e-12; ++k) {
    const double s = cdf.s[k];
    fit.A_bound = std::max(fit.A_bound, cdf.tail[k] * std::exp(fit.B * s * s));
  }
  return fit;
}

}  // namespace spacinglab::gap
