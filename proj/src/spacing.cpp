#include "spacinglab/spacing.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "spacinglab/random.hpp"
#include "spacinglab/stats.hpp"

namespace spacinglab::spacing {

Window make_window(int n, double psi_a, double a, double exponent) {
  if (n < 1) throw std::invalid_argument("make_window: n must be positive");
  if (!(psi_a > 0.0)) throw std::invalid_argument("make_window: density must be positive");
  Window w{a, std::pow(static_cast<double>(n), -exponent), psi_a, n};
  if (!(w.delta > 0.0)) throw std::invalid_argument("make_window: delta must be positive");
  return w;
}

double estimate_density(const std::vector<ensembles::Spectrum>& spectra, double a, double bandwidth) {
  if (spectra.empty()) throw std::invalid_argument("estimate_density: no spectra");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("estimate_density: bandwidth must be positive");
  double lo = INFINITY, hi = -INFINITY, total = 0.0;
  std::size_t count = 0;
  for (const auto& sp : spectra) {
    for (double x : sp.values) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
      const double u = (x - a) / bandwidth;
      if (std::abs(u) < 1.0) total += 0.75 * (1.0 - u * u);
    }
    count += sp.values.size();
  }
  if (count == 0 || a < lo || a > hi) throw NumericError("bulk point outside spectrum support");
  const double psi = total / (static_cast<double>(count) * bandwidth);
  if (!(psi > 0.0)) throw NumericError("bulk point outside spectrum support");
  return psi;
}

RescaledSpectrum rescale_localize(const ensembles::Spectrum& spectrum, const Window& window) {
  RescaledSpectrum rs;
  rs.window = window;
  const double lo = window.a - window.delta, hi = window.a + window.delta;
  for (double x : spectrum.values) {
    if (x >= lo && x <= hi) rs.inside.push_back(window.to_rescaled(x));
  }
  return rs;
}

std::size_t EmpiricalSpacingCDF::count(double s) const {
  return static_cast<std::size_t>(std::upper_bound(spacings.begin(), spacings.end(), s) - spacings.begin());
}

double EmpiricalSpacingCDF::operator()(double s) const {
  return rescaled_length > 0.0 ? static_cast<double>(count(s)) / rescaled_length : 0.0;
}

EmpiricalSpacingCDF sigma_cdf(const RescaledSpectrum& rs) {
  EmpiricalSpacingCDF cdf;
  cdf.rescaled_length = rs.window.rescaled_length();
  cdf.inside = rs.inside.size();
  for (std::size_t i = 1; i < rs.inside.size(); ++i) cdf.spacings.push_back(rs.inside[i] - rs.inside[i - 1]);
  std::sort(cdf.spacings.begin(), cdf.spacings.end());
  if (cdf.inside < 2) {
    cdf.total_mass = 0.0;
    cdf.warning = "fewer than two eigenvalues in the window; total mass clamped to 0";
  } else {
    cdf.total_mass = static_cast<double>(cdf.inside - 1) / cdf.rescaled_length;
  }
  return cdf;
}

namespace {

// Pascal triangle rows 0 .. n.
std::vector<std::vector<BigInt>> binomials(std::size_t n) {
  std::vector<std::vector<BigInt>> c(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    c[i].assign(i + 1, BigInt(1));
    for (std::size_t j = 1; j < i; ++j) c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
  }
  return c;
}

BigInt choose(const std::vector<std::vector<BigInt>>& c, std::size_t n, std::size_t k) {
  return k > n ? BigInt(0) : c[n][k];
}

struct PairSpan {
  double span;
  std::size_t gap;  // interior points j - i - 1
};

std::vector<PairSpan> pair_spans(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  std::vector<PairSpan> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) out.push_back({x[j] - x[i], j - i - 1});
  }
  std::sort(out.begin(), out.end(), [](const PairSpan& a, const PairSpan& b) { return a.span < b.span; });
  return out;
}

}  // namespace

BigInt GammaCounts::count(double s) const {
  const auto it = std::upper_bound(spans.begin(), spans.end(), s);
  if (it == spans.begin()) return 0;
  return counts[static_cast<std::size_t>(it - spans.begin()) - 1];
}

double GammaCounts::operator()(double s) const {
  return rescaled_length > 0.0 ? count(s).convert_to<double>() / rescaled_length : 0.0;
}

GammaCounts gamma_cdf(int k, const RescaledSpectrum& rs) {
  if (k < 2) throw std::invalid_argument("gamma_cdf: k must be at least 2");
  GammaCounts g;
  g.k = k;
  g.rescaled_length = rs.window.rescaled_length();
  const auto pairs = pair_spans(rs.inside);
  const auto c = binomials(rs.inside.size());
  BigInt running = 0;
  for (const PairSpan& p : pairs) {
    const BigInt add = choose(c, p.gap, static_cast<std::size_t>(k - 2));
    if (add == 0) continue;
    running += add;
    if (!g.spans.empty() && g.spans.back() == p.span) {
      g.counts.back() = running;
    } else {
      g.spans.push_back(p.span);
      g.counts.push_back(running);
    }
  }
  return g;
}

BigInt gamma_count_brute_force(int k, const std::vector<double>& inside, double s) {
  if (k < 2) throw std::invalid_argument("gamma_count_brute_force: k must be at least 2");
  const std::size_t p = inside.size();
  if (p > 12) throw std::invalid_argument("gamma_count_brute_force: at most 12 points");
  BigInt total = 0;
  for (std::uint32_t mask = 0; mask < (1u << p); ++mask) {
    if (std::popcount(mask) != k) continue;
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < p; ++i) {
      if (mask & (1u << i)) {
        lo = std::min(lo, inside[i]);
        hi = std::max(hi, inside[i]);
      }
    }
    if (hi - lo <= s) ++total;
  }
  return total;
}

IdentityReport alternating_identity_check(const RescaledSpectrum& rs) {
  IdentityReport report;
  const std::size_t p = rs.inside.size();
  if (p < 2) return report;

  std::vector<double> consecutive;
  for (std::size_t i = 1; i < p; ++i) consecutive.push_back(rs.inside[i] - rs.inside[i - 1]);
  std::sort(consecutive.begin(), consecutive.end());
  const auto pairs = pair_spans(rs.inside);
  const auto c = binomials(p);

  std::vector<double> jumps;
  for (const auto& q : pairs) jumps.push_back(q.span);
  jumps.insert(jumps.end(), consecutive.begin(), consecutive.end());
  std::sort(jumps.begin(), jumps.end());
  jumps.erase(std::unique(jumps.begin(), jumps.end()), jumps.end());
  report.jump_points = jumps.size();

  // gamma[k] for k = 2 .. p, accumulated while sweeping the jump points.
  std::vector<BigInt> gamma(p + 1, BigInt(0));
  std::size_t next_pair = 0;
  for (double s : jumps) {
    while (next_pair < pairs.size() && pairs[next_pair].span <= s) {
      const std::size_t g = pairs[next_pair].gap;
      for (std::size_t k = 2; k <= g + 2 && k <= p; ++k) gamma[k] += choose(c, g, k - 2);
      ++next_pair;
    }
    const BigInt sigma = static_cast<long long>(
        std::upper_bound(consecutive.begin(), consecutive.end(), s) - consecutive.begin());
    BigInt partial = 0;
    for (std::size_t m = 2; m <= p; ++m) {
      if (m % 2 == 0) partial += gamma[m];
      else partial -= gamma[m];
      const bool holds = (m % 2 == 0) ? sigma <= partial : sigma >= partial;
      if (!holds) report.violations.push_back({s, static_cast<int>(m), sigma, partial});
    }
    if (partial != sigma) report.violations.push_back({s, 0, sigma, partial});
  }
  report.ok = report.violations.empty();
  return report;
}

KSReport ks_node_distance(const EmpiricalSpacingCDF& ecdf, const std::vector<double>& nodes, int M) {
  if (M < 2) throw std::invalid_argument("ks_node_distance: M must be at least 2");
  if (nodes.size() != static_cast<std::size_t>(M - 1)) {
    throw std::invalid_argument("ks_node_distance: expected M-1 nodes");
  }
  KSReport r;
  r.inverse_m = 1.0 / M;
  for (int i = 1; i < M; ++i) {
    const double v = std::abs(ecdf(nodes[static_cast<std::size_t>(i - 1)]) - static_cast<double>(i) / M);
    r.node_values.push_back(v);
    r.node_max = std::max(r.node_max, v);
  }
  r.mass_defect = std::abs(ecdf.total_mass - 1.0);
  r.bound = r.inverse_m + r.node_max + r.mass_defect;
  return r;
}

KSReport ks_node_distance(const EmpiricalSpacingCDF& ecdf, const gap::UniversalSpacingCDF& F) {
  return ks_node_distance(ecdf, F.nodes, F.M);
}

double total_mass_check(const EmpiricalSpacingCDF& ecdf) { return ecdf.total_mass; }

double gamma_statistic(int k, const RescaledSpectrum& rs, double alpha) { return gamma_cdf(k, rs)(alpha); }

namespace {

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  // shifted by v[0]: a constant sample gives exactly 0
  double mean = 0.0;
  for (double x : v) mean += x - v[0];
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - v[0] - mean) * (x - v[0] - mean);
  return ss / static_cast<double>(v.size() - 1);
}

// Slope and intercept of log var against log |A_N|; NaN without two usable sizes.
std::pair<double, double> log_log_fit(const std::vector<double>& lengths, const std::vector<double>& variances) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (variances[i] > 0.0) {
      x.push_back(std::log(lengths[i]));
      y.push_back(std::log(variances[i]));
    }
  }
  if (x.size() < 2) return {NAN, NAN};
  const stats::LinearFit fit = stats::linear_regression(x, y);
  return {fit.slope, fit.intercept};
}

}  // namespace

VarianceReport variance_diagnostic(const std::vector<VarianceSample>& samples, int resamples, std::uint64_t seed) {
  VarianceReport r;
  r.resamples = resamples;
  for (const auto& s : samples) {
    r.rescaled_lengths.push_back(s.rescaled_length);
    r.variances.push_back(sample_variance(s.statistics));
  }
  std::tie(r.slope, r.intercept) = log_log_fit(r.rescaled_lengths, r.variances);
  if (resamples <= 0 || std::isnan(r.slope)) {
    r.ci_low = r.ci_high = r.slope;
    return r;
  }
  rng::StreamRng rng(seed, 0x766172);
  std::vector<double> slopes;
  std::vector<double> boot_var(samples.size());
  for (int b = 0; b < resamples; ++b) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& stat = samples[i].statistics;
      std::vector<double> draw(stat.size());
      for (double& x : draw) x = stat[rng.next_u64() % stat.size()];
      boot_var[i] = sample_variance(draw);
    }
    const double slope = log_log_fit(r.rescaled_lengths, boot_var).first;
    if (!std::isnan(slope)) slopes.push_back(slope);
  }
  if (slopes.empty()) {
    r.ci_low = r.ci_high = r.slope;
    return r;
  }
  std::sort(slopes.begin(), slopes.end());
  r.ci_low = stats::quantile_sorted(slopes, 0.025);
  r.ci_high = stats::quantile_sorted(slopes, 0.975);
  return r;
}

}  // namespace spacinglab::spacing
