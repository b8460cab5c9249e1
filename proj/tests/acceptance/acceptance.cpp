// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "spacinglab/ensembles.hpp"
#include "spacinglab/experiment.hpp"
#include "spacinglab/gap.hpp"
#include "spacinglab/kernels.hpp"
#include "spacinglab/painleve.hpp"
#include "spacinglab/random.hpp"
#include "spacinglab/spacing.hpp"
#include "spacinglab/stats.hpp"

using namespace spacinglab;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kSeed = 20261015;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int worker_count() { return static_cast<int>(std::max(1u, std::min(8u, std::thread::hardware_concurrency()))); }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spacinglab-acceptance-" + name);
  fs::remove_all(p);
  return p;
}

Outcome seed_series() {
  const auto traj = gap::integrate_sigma(0.06);
  double worst = 0.0;  // max of |sigma - cubic| / (10 s^4)
  for (int i = 0; i <= 490; ++i) {
    const double s = 1e-3 + i * 1e-4;
    worst = std::max(worst, std::abs(traj.at(s).sigma - gap::sigma_cubic(s)) / (10 * s * s * s * s));
  }
  return {worst <= 1.0, "max |sigma - cubic| / (10 s^4) = " + fmt("%.3g", worst)};
}

Outcome asymptotics() {
  const auto traj = gap::integrate_sigma(41.0);
  bool ok = true;
  std::string d;
  for (double s : {20.0, 40.0}) {
    const double e = std::abs(traj.at(s).v + s / 4 + 1 / (4 * s));
    ok = ok && e <= 0.5 / (s * s);
    d += "s=" + fmt("%g", s) + ": " + fmt("%.3g", e) + " (limit " + fmt("%.3g", 0.5 / (s * s)) + ")  ";
  }
  return {ok, d};
}

Outcome cross_route() {
  const auto& traj = gap::default_trajectory();
  double worst = 0.0;
  for (double s : {0.1, 0.5, 1.0, 2.0, 3.0, 4.0}) {
    worst = std::max(worst, std::abs(gap::gap_probability(Beta::Unitary, traj, s) - gap::fredholm_g2(s, 40)));
  }
  return {worst <= 1e-6, "max |Painleve - Fredholm| = " + fmt("%.3g", worst)};
}

Outcome small_s_series() {
  const auto& traj = gap::default_trajectory();
  double worst = 0.0;
  for (Beta b : {Beta::Orthogonal, Beta::Symplectic}) {
    for (double s : {0.2, 0.3, 0.5}) {
      worst = std::max(worst, std::abs(gap::series_gap(b, s, 4) - gap::gap_probability(b, traj, s)));
    }
  }
  return {worst <= 1e-3, "max |series - Painleve| = " + fmt("%.3g", worst)};
}

gap::UniversalSpacingCDF cdf_for(Beta b) {
  return gap::universal_cdf(gap::gap_curve(b, gap::default_trajectory(), 1e-3, 8.0), 50);
}

Outcome tail_exponents() {
  const auto f2 = gap::tail_fit(cdf_for(Beta::Unitary));
  const auto f1 = gap::tail_fit(cdf_for(Beta::Orthogonal));
  const double r2 = f2.B / (kPi * kPi / 8) - 1, r1 = f1.B / (kPi * kPi / 16) - 1;
  const bool ok = std::abs(r2) <= 0.10 && std::abs(r1) <= 0.15;
  return {ok, "beta=2 B=" + fmt("%.4f", f2.B) + " (" + fmt("%+.1f", 100 * r2) + "%), beta=1 B=" + fmt("%.4f", f1.B) +
                  " (" + fmt("%+.1f", 100 * r1) + "%)"};
}

Outcome cdf_sanity() {
  bool ok = true;
  std::string d;
  for (Beta b : {Beta::Orthogonal, Beta::Unitary, Beta::Symplectic}) {
    const auto F = cdf_for(b);
    double mean = 0.0;
    for (std::size_t k = 1; k < F.s.size(); ++k) mean += 0.5 * (F.tail[k] + F.tail[k - 1]) * (F.s[k] - F.s[k - 1]);
    const bool monotone = std::is_sorted(F.F.begin(), F.F.end());
    const double tail8 = F.tail.back();
    ok = ok && F(0.0) == 0.0 && monotone && tail8 <= 1e-4 && std::abs(mean - 1) <= 0.01;
    d += "beta=" + std::to_string(to_int(b)) + ": 1-F(8)=" + fmt("%.2g", tail8) + " int=" + fmt("%.6f", mean) +
         (monotone ? "" : " NON-MONOTONE") + "  ";
  }
  return {ok, d};
}

Outcome exact_combinatorics() {
  const ensembles::EnsembleSpec spec{Beta::Unitary, 200, ensembles::Potential::semicircle(Beta::Unitary)};
  std::size_t violations = 0, jumps = 0, max_inside = 0;
  for (std::uint64_t d = 0; d < 1000; ++d) {
    ensembles::SamplerState state(kSeed, d);
    const auto s = ensembles::sample_tridiagonal(spec, state);
    // default window and a wide one (about 45 points) for large counts
    for (double exponent : {0.6, 0.2}) {
      const auto rs = spacing::rescale_localize(s, spacing::make_window(200, 1 / kPi, 0.0, exponent));
      const auto r = spacing::alternating_identity_check(rs);
      violations += r.violations.size();
      jumps += r.jump_points;
      max_inside = std::max(max_inside, rs.inside.size());
    }
  }
  return {violations == 0, std::to_string(violations) + " violations over " + std::to_string(jumps) +
                               " jump points (largest window " + std::to_string(max_inside) + " points)"};
}

Outcome oracle_equivalence() {
  rng::StreamRng r(kSeed, 8);
  double worst = 0.0;
  for (Beta b : {Beta::Orthogonal, Beta::Symplectic}) {
    for (int t = 0; t < 100; ++t) {
      const int k = 1 + t % 3;
      std::vector<double> x(static_cast<std::size_t>(k));
      for (double& v : x) v = 4 * r.uniform() - 2;
      worst = std::max(worst, std::abs(kernels::correlation(b, x) - kernels::correlation_expansion(b, x)));
    }
  }
  double worst_pf = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 * (1 + t % 6);
    kernels::SkewMatrix m(n);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double v = r.normal();
        m.set(i, j, v);
        a(i, j) = v;
        a(j, i) = -v;
      }
    const double pf = kernels::pfaffian(m), det = a.determinant();
    worst_pf = std::max(worst_pf, std::abs(pf * pf - det) / std::max(1.0, std::abs(det)));
  }
  return {worst <= 1e-10 && worst_pf <= 1e-10,
          "max |W_k - expansion| = " + fmt("%.3g", worst) + ", max rel |Pf^2 - det| = " + fmt("%.3g", worst_pf)};
}

Outcome node_bound_decay() {
  bool ok = true;
  std::ostringstream d;
  for (int beta : {2, 1, 4}) {
    experiment::ExperimentConfig c;
    c.beta = beta;
    c.sizes = beta == 2 ? std::vector<int>{100, 400, 1600} : std::vector<int>{100, 400};
    c.draws = 200;
    c.M = 50;
    c.seed = kSeed;
    c.workers = worker_count();
    c.out = scratch("verify").string();
    const auto run = experiment::run_verify(c);
    if (!run.complete) return {false, "beta=" + std::to_string(beta) + " run failed: " + run.error};
    const bool decreasing = run.summary["monotone_decrease"].get<bool>();
    const double last = run.summary["sizes"].back()["mean_bound"].get<double>();
    ok = ok && decreasing && (beta != 2 || last < 0.15);
    d << "beta=" << beta << " mean bound";
    for (const auto& s : run.summary["sizes"]) d << " " << s["mean_bound"].get<double>();
    d << (decreasing ? "" : " (not decreasing)") << "; ";
  }
  return {ok, d.str() + "needs < 0.15 at n=1600 for beta=2"};
}

Outcome variance_scaling() {
  experiment::ExperimentConfig c;
  c.seed = kSeed;
  std::vector<spacing::VarianceSample> samples;
  for (int n : {100, 400, 1600}) {
    const auto w = spacing::make_window(n, 1 / kPi);
    spacing::VarianceSample vs{w.rescaled_length(), {}};
    for (int draw = 0; draw < 500; ++draw) {
      const auto rs = spacing::rescale_localize(experiment::draw_spectrum(c, n, draw), w);
      vs.statistics.push_back(spacing::gamma_statistic(2, rs, 1.0));
    }
    samples.push_back(std::move(vs));
  }
  const auto r = spacing::variance_diagnostic(samples, 200, kSeed);
  std::ostringstream d;
  d << "slope " << fmt("%.3f", r.slope) << " (bootstrap 95% " << fmt("%.3f", r.ci_low) << ".." << fmt("%.3f", r.ci_high)
    << "), variances";
  for (double v : r.variances) d << " " << fmt("%.4g", v);
  return {r.slope >= -1.3 && r.slope <= -0.7, d.str()};
}

Outcome mcmc_validation() {
  const ensembles::EnsembleSpec spec{Beta::Unitary, 50, ensembles::Potential::gaussian(1.0)};
  constexpr std::size_t kSamples = 10000, kThin = 10, kBurn = 5000;
  std::vector<double> chain, exact;
  ensembles::SamplerState state(kSeed, 11);
  const auto report = ensembles::sample_mcmc(spec, state, {kBurn + kSamples * kThin, kBurn, kThin, 50},
                                             [&](const ensembles::Spectrum& s) { chain.push_back(s.values[25] - s.values[24]); });
  for (std::size_t i = 0; i < kSamples; ++i) {
    ensembles::SamplerState st(kSeed, (1ull << 40) + i);
    const auto s = ensembles::sample_tridiagonal(spec, st);
    exact.push_back(s.values[25] - s.values[24]);
  }
  const auto ks = stats::ks_two_sample(chain, exact);
  return {ks.p_value > 0.01, "central spacing KS D=" + fmt("%.4f", ks.statistic) + " p=" + fmt("%.3g", ks.p_value) +
                                 ", acceptance " + fmt("%.3f", report.acceptance) + ", " + std::to_string(chain.size()) +
                                 " samples"};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "sigma seed series", 1, seed_series},
      {2, "sigma asymptotics", 5, asymptotics},
      {3, "beta=2 Painleve vs Fredholm", 10, cross_route},
      {4, "small-s series beta=1,4", 60, small_s_series},
      {5, "tail exponents", 5, tail_exponents},
      {6, "CDF sanity", 5, cdf_sanity},
      {7, "exact alternating identity", 120, exact_combinatorics},
      {8, "correlation oracle and Pfaffian", 120, oracle_equivalence},
      {9, "node bound decreases with n", 1800, node_bound_decay},
      {10, "variance scaling", 1800, variance_scaling},
      {11, "MCMC vs tridiagonal", 1200, mcmc_validation},
  };
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::stoi(argv[i]));
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("criterion %2d %s  %s: %s [%.1fs, limit %.0fs%s]\n", c.id, pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs, c.limit_seconds, in_time ? "" : ", too slow");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
