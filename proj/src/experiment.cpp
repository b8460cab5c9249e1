#include "spacinglab/experiment.hpp"

#include <zlib.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <ctime>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "spacinglab/format.hpp"
#include "spacinglab/stats.hpp"

namespace spacinglab::experiment {

namespace fs = std::filesystem;

namespace {

// Round to 12 significant digits so JSON output matches the CSV text.
double num12(double x) {
  if (!std::isfinite(x)) return x;
  return std::stod(format::number(x));
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  // Write then rename so a crash never leaves a half-written file behind.
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("config: bad value for '") + key + "'");
  }
}

std::string beta_tag(int beta) { return "beta" + std::to_string(beta); }

// Runs fn(i) for i in [0, count) on up to `workers` threads. The first
// exception stops further dispatch and is rethrown after all threads join.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      if (failed) return;
      const std::size_t i = next++;
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (n_threads == 1) {
    body();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(body);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);
}

json stream_table(const ExperimentConfig& config) {
  json streams = json::array();
  for (int n : config.sizes) {
    streams.push_back({{"n", n},
                       {"draws", config.draws},
                       {"seed", config.seed},
                       {"stream_rule", "(n << 32) | draw"},
                       {"first_stream", stream_id(n, 0)},
                       {"last_stream", stream_id(n, config.draws - 1)}});
  }
  return streams;
}

json base_manifest(const ExperimentConfig& config, const std::string& command) {
  return {{"command", command},
          {"config", config_to_json(config)},
          {"config_hash", config_hash(config)},
          {"code_version", SPACINGLAB_VERSION},
          {"started_at", utc_now()},
          {"finished_at", nullptr},
          {"status", "partial"},
          {"streams", stream_table(config)},
          {"warnings", json::array()},
          {"error", nullptr}};
}

void write_manifest(const fs::path& out, const json& manifest) {
  write_text(out / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace

// ---------------------------------------------------------------- config

void validate(const ExperimentConfig& c) {
  beta_from_int(c.beta);
  if (c.sizes.empty()) throw std::invalid_argument("config: sizes must not be empty");
  for (int n : c.sizes) {
    if (n < 8) throw std::invalid_argument("config: every size must be at least 8");
  }
  if (c.draws < 1) throw std::invalid_argument("config: draws must be at least 1");
  if (c.M < 2) throw std::invalid_argument("config: M must be at least 2");
  if (!(c.delta_exponent > 0.0 && c.delta_exponent < 1.0)) {
    throw std::invalid_argument("config: delta_exponent must lie in (0, 1)");
  }
  if (!(c.s_max > 0.0)) throw std::invalid_argument("config: s_max must be positive");
  if (c.sampler != "tridiagonal" && c.sampler != "dense" && c.sampler != "mcmc") {
    throw std::invalid_argument("config: sampler must be tridiagonal, dense or mcmc");
  }
  if (c.sampler == "dense" && c.beta != 1) throw std::invalid_argument("config: dense sampler is GOE only (beta 1)");
  if (c.density != "analytic" && c.density != "estimate") {
    throw std::invalid_argument("config: density must be analytic or estimate");
  }
  if (!(c.bandwidth > 0.0) || c.pilot_draws < 1) {
    throw std::invalid_argument("config: bandwidth and pilot_draws must be positive");
  }
  if (c.mcmc_burn_in < 0 || c.mcmc_thin < 1) throw std::invalid_argument("config: bad MCMC settings");
  if (c.workers < 1) throw std::invalid_argument("config: workers must be at least 1");
  const auto spec = ensemble_spec(c, c.sizes.front());
  if (c.sampler != "mcmc" && !spec.potential.is_gaussian()) {
    throw std::invalid_argument("config: tridiagonal model requires Gaussian V; use the mcmc sampler");
  }
  if (c.density == "analytic" && !spec.potential.is_gaussian()) {
    throw std::invalid_argument("config: analytic density needs a Gaussian potential");
  }
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  static const std::set<std::string> known = {
      "beta", "sizes", "draws", "potential", "sampler", "window_a", "delta_exponent", "density", "bandwidth",
      "pilot_draws", "M", "s_max", "seed", "mcmc_burn_in", "mcmc_thin", "inject_corruption", "out", "workers"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  ExperimentConfig c;
  if (j.contains("beta")) c.beta = get_as<int>(j, "beta");
  if (j.contains("sizes")) c.sizes = get_as<std::vector<int>>(j, "sizes");
  if (j.contains("draws")) c.draws = get_as<int>(j, "draws");
  if (j.contains("potential")) {
    const json& p = j.at("potential");
    if (p.is_string()) {
      c.potential.kind = p.get<std::string>();
    } else if (p.is_object()) {
      for (const auto& [key, value] : p.items()) {
        if (key != "kind" && key != "coefficients") throw std::invalid_argument("config: unknown potential key '" + key + "'");
      }
      if (p.contains("kind")) c.potential.kind = get_as<std::string>(p, "kind");
      if (p.contains("coefficients")) c.potential.coefficients = get_as<std::vector<double>>(p, "coefficients");
    } else {
      throw std::invalid_argument("config: potential must be a string or object");
    }
  }
  if (j.contains("sampler")) c.sampler = get_as<std::string>(j, "sampler");
  if (j.contains("window_a")) c.window_a = get_as<double>(j, "window_a");
  if (j.contains("delta_exponent")) c.delta_exponent = get_as<double>(j, "delta_exponent");
  if (j.contains("density")) c.density = get_as<std::string>(j, "density");
  if (j.contains("bandwidth")) c.bandwidth = get_as<double>(j, "bandwidth");
  if (j.contains("pilot_draws")) c.pilot_draws = get_as<int>(j, "pilot_draws");
  if (j.contains("M")) c.M = get_as<int>(j, "M");
  if (j.contains("s_max")) c.s_max = get_as<double>(j, "s_max");
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("mcmc_burn_in")) c.mcmc_burn_in = get_as<int>(j, "mcmc_burn_in");
  if (j.contains("mcmc_thin")) c.mcmc_thin = get_as<int>(j, "mcmc_thin");
  if (j.contains("inject_corruption")) c.inject_corruption = get_as<bool>(j, "inject_corruption");
  if (j.contains("out")) c.out = get_as<std::string>(j, "out");
  if (j.contains("workers")) c.workers = get_as<int>(j, "workers");
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  return {{"beta", c.beta},
          {"sizes", c.sizes},
          {"draws", c.draws},
          {"potential", {{"kind", c.potential.kind}, {"coefficients", c.potential.coefficients}}},
          {"sampler", c.sampler},
          {"window_a", c.window_a},
          {"delta_exponent", c.delta_exponent},
          {"density", c.density},
          {"bandwidth", c.bandwidth},
          {"pilot_draws", c.pilot_draws},
          {"M", c.M},
          {"s_max", c.s_max},
          {"seed", c.seed},
          {"mcmc_burn_in", c.mcmc_burn_in},
          {"mcmc_thin", c.mcmc_thin},
          {"inject_corruption", c.inject_corruption}};
}

std::string canonical_config(const ExperimentConfig& config) { return config_to_json(config).dump(); }

std::string config_hash(const ExperimentConfig& config) {
  return format::hex64(format::fnv1a64(canonical_config(config)));
}

ensembles::EnsembleSpec ensemble_spec(const ExperimentConfig& config, int n) {
  const Beta beta = beta_from_int(config.beta);
  const auto& p = config.potential;
  ensembles::EnsembleSpec spec{beta, n, ensembles::Potential::semicircle(beta)};
  if (p.kind == "semicircle") {
    if (!p.coefficients.empty()) throw std::invalid_argument("config: semicircle potential takes no coefficients");
  } else if (p.kind == "gaussian") {
    if (p.coefficients.size() > 1) throw std::invalid_argument("config: gaussian potential takes one coefficient");
    spec.potential = ensembles::Potential::gaussian(p.coefficients.empty() ? 1.0 : p.coefficients[0]);
  } else if (p.kind == "polynomial") {
    spec.potential = ensembles::Potential(p.coefficients);
  } else {
    throw std::invalid_argument("config: potential kind must be semicircle, gaussian or polynomial");
  }
  return spec;
}

std::uint64_t stream_id(int n, int draw, bool pilot) {
  const std::uint64_t id = (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint32_t>(draw);
  return pilot ? id | (std::uint64_t{1} << 63) : id;
}

namespace {

ensembles::Spectrum draw_spectrum_impl(const ExperimentConfig& config, int n, int draw, bool pilot,
                                       std::vector<std::string>* warnings) {
  const auto spec = ensemble_spec(config, n);
  ensembles::SamplerState state(config.seed, stream_id(n, draw, pilot));
  if (config.sampler == "tridiagonal") return ensembles::sample_tridiagonal(spec, state);
  if (config.sampler == "dense") return ensembles::sample_dense_goe(spec, state);
  ensembles::McmcOptions opt;
  opt.burn_in = static_cast<std::size_t>(config.mcmc_burn_in);
  opt.thin = static_cast<std::size_t>(config.mcmc_thin);
  opt.steps = opt.burn_in + opt.thin;
  ensembles::Spectrum last;
  const auto report = ensembles::sample_mcmc(spec, state, opt, [&](const ensembles::Spectrum& s) { last = s; });
  if (warnings) {
    for (const auto& w : report.warnings) warnings->push_back("n=" + std::to_string(n) + " draw=" + std::to_string(draw) + ": " + w);
  }
  return last;
}

}  // namespace

ensembles::Spectrum draw_spectrum(const ExperimentConfig& config, int n, int draw, bool pilot) {
  return draw_spectrum_impl(config, n, draw, pilot, nullptr);
}

double window_density(const ExperimentConfig& config, int n) {
  const auto spec = ensemble_spec(config, n);
  if (config.density == "analytic") {
    const double psi = spec.potential.semicircle_density(spec.beta, config.window_a);
    if (!(psi > 0.0)) throw NumericError("bulk point outside spectrum support");
    return psi;
  }
  std::vector<ensembles::Spectrum> pilot;
  for (int d = 0; d < config.pilot_draws; ++d) pilot.push_back(draw_spectrum(config, n, d, true));
  return spacing::estimate_density(pilot, config.window_a, config.bandwidth);
}

// ---------------------------------------------------------------- universal

gap::UniversalSpacingCDF build_universal(Beta beta, double s_max, int M) {
  if (!(s_max > 0.0)) throw std::invalid_argument("universal: s_max must be positive");
  if (M < 2) throw std::invalid_argument("universal: M must be at least 2");
  const double t_needed = std::numbers::pi * s_max * (beta == Beta::Symplectic ? 2.0 : 1.0);
  if (t_needed <= gap::default_trajectory().t_max()) {
    return gap::universal_cdf(gap::gap_curve(beta, gap::default_trajectory(), 1e-3, s_max), M);
  }
  if (t_needed > 200.0) throw std::invalid_argument("universal: s_max too large for the sigma ODE (limit 200)");
  const auto traj = gap::integrate_sigma(t_needed);
  return gap::universal_cdf(gap::gap_curve(beta, traj, 1e-3, s_max), M);
}

UniversalFiles write_universal(const gap::UniversalSpacingCDF& cdf, const fs::path& out) {
  fs::create_directories(out);
  const std::string tag = std::to_string(to_int(cdf.beta));
  UniversalFiles files{out / ("F_beta" + tag + ".csv"), out / ("nodes_beta" + tag + ".csv")};
  std::string text = "s,F\n";
  for (std::size_t k = 0; k < cdf.s.size(); ++k) {
    text += format::number(cdf.s[k]) + "," + format::number(cdf.F[k]) + "\n";
  }
  write_text(files.cdf, text);
  text = "i,p,s\n";
  for (std::size_t i = 0; i < cdf.nodes.size(); ++i) {
    text += std::to_string(i + 1) + "," + format::number(static_cast<double>(i + 1) / cdf.M) + "," +
            format::number(cdf.nodes[i]) + "\n";
  }
  write_text(files.nodes, text);
  return files;
}

// ---------------------------------------------------------------- verify

std::string draw_row(const DrawRecord& r) {
  std::string row = std::to_string(r.beta) + "," + std::to_string(r.n) + "," + std::to_string(r.draw) + "," +
                    format::number(r.window_a) + "," + format::number(r.window_delta) + "," +
                    format::number(r.A_N) + "," + format::number(r.total_mass) + "," +
                    format::number(r.node_max) + "," + format::number(r.bound);
  return row + "," + format::hex64(format::fnv1a64(row));
}

std::optional<DrawRecord> parse_draw_row(const std::string& line) {
  const auto comma = line.rfind(',');
  if (comma == std::string::npos) return std::nullopt;
  const std::string body = line.substr(0, comma);
  if (line.substr(comma + 1) != format::hex64(format::fnv1a64(body))) return std::nullopt;
  std::vector<std::string> f;
  std::stringstream ss(body);
  for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
  if (f.size() != 9) return std::nullopt;
  try {
    DrawRecord r;
    r.beta = std::stoi(f[0]);
    r.n = std::stoi(f[1]);
    r.draw = std::stoi(f[2]);
    r.window_a = std::stod(f[3]);
    r.window_delta = std::stod(f[4]);
    r.A_N = std::stod(f[5]);
    r.total_mass = std::stod(f[6]);
    r.node_max = std::stod(f[7]);
    r.bound = std::stod(f[8]);
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

DrawRecord evaluate_draw(const ExperimentConfig& config, int n, int draw, double psi_a,
                         const gap::UniversalSpacingCDF& F) {
  const auto spectrum = draw_spectrum(config, n, draw);
  const auto window = spacing::make_window(n, psi_a, config.window_a, config.delta_exponent);
  const auto rs = spacing::rescale_localize(spectrum, window);
  const auto ecdf = spacing::sigma_cdf(rs);
  const auto ks = spacing::ks_node_distance(ecdf, F);
  // Round through the text form so a resumed run sees the same numbers.
  DrawRecord r{config.beta, n, draw, window.a, window.delta, window.rescaled_length(), ecdf.total_mass,
               ks.node_max, ks.bound};
  return *parse_draw_row(draw_row(r));
}

json summarize(const ExperimentConfig& config, const std::vector<DrawRecord>& records) {
  json sizes = json::array();
  std::vector<double> means;
  for (int n : config.sizes) {
    std::vector<double> bound, node_max, mass;
    double a_n = 0.0;
    for (const auto& r : records) {
      if (r.n != n) continue;
      bound.push_back(r.bound);
      node_max.push_back(r.node_max);
      mass.push_back(r.total_mass);
      a_n = r.A_N;
    }
    const double mean = stats::mean(bound);
    const double sd = stats::stddev(bound);
    json ci = nullptr;
    if (bound.size() > 1) {
      const double half = 1.96 * sd / std::sqrt(static_cast<double>(bound.size()));
      ci = json::array({num12(mean - half), num12(mean + half)});
    }
    means.push_back(mean);
    sizes.push_back({{"n", n},
                     {"draws", bound.size()},
                     {"A_N", num12(a_n)},
                     {"mean_bound", num12(mean)},
                     {"std_bound", num12(sd)},
                     {"ci95_bound", ci},
                     {"mean_node_max", num12(stats::mean(node_max))},
                     {"mean_total_mass", num12(stats::mean(mass))},
                     {"std_total_mass", num12(stats::stddev(mass))},
                     {"expected_total_mass", a_n > 0 ? json(num12(1.0 - 1.0 / a_n)) : json(nullptr)}});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < means.size(); ++i) decreasing = decreasing && means[i] < means[i - 1];
  return {{"beta", config.beta},
          {"config_hash", config_hash(config)},
          {"M", config.M},
          {"sampler", config.sampler},
          {"sizes", sizes},
          {"monotone_decrease", decreasing}};
}

RunResult run_verify(const ExperimentConfig& config, const Logger& log) {
  validate(config);
  const fs::path out = config.out;
  fs::create_directories(out);
  const Beta beta = beta_from_int(config.beta);
  const std::string tag = beta_tag(config.beta);
  const std::string hash = config_hash(config);

  RunResult result;
  result.manifest = base_manifest(config, "verify");
  write_manifest(out, result.manifest);

  const auto F = build_universal(beta, config.s_max, config.M);
  std::map<int, double> psi;
  for (int n : config.sizes) psi[n] = window_density(config, n);

  // Resume from a journal written under the same configuration.
  const fs::path journal_path = out / ("draws_" + tag + ".partial.csv");
  const std::string journal_head = "# config " + hash;
  std::map<std::pair<int, int>, DrawRecord> done;
  if (fs::exists(journal_path)) {
    std::ifstream in(journal_path);
    std::string line;
    if (std::getline(in, line) && line == journal_head) {
      std::set<int> sizes(config.sizes.begin(), config.sizes.end());
      while (std::getline(in, line)) {
        const auto r = parse_draw_row(line);
        if (r && sizes.count(r->n) && r->draw >= 0 && r->draw < config.draws) done[{r->n, r->draw}] = *r;
      }
    } else {
      in.close();
      fs::remove(journal_path);
    }
  }
  if (log && !done.empty()) log("resuming: " + std::to_string(done.size()) + " draws already in the journal");
  const bool fresh = !fs::exists(journal_path);
  std::ofstream journal(journal_path, std::ios::app | std::ios::binary);
  if (!journal) throw std::runtime_error("cannot open " + journal_path.string());
  if (fresh) journal << journal_head << "\n" << kDrawHeader << "\n" << std::flush;

  std::vector<std::pair<int, int>> tasks;
  for (int n : config.sizes) {
    for (int d = 0; d < config.draws; ++d) {
      if (!done.count({n, d})) tasks.push_back({n, d});
    }
  }

  // Workers compute; this thread is the only writer.
  std::mutex mutex;
  std::condition_variable cv;
  std::deque<DrawRecord> queue;
  std::size_t finished_workers = 0;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::string error;
  const int n_threads = std::max(1, std::min<int>(config.workers, static_cast<int>(tasks.size())));
  std::vector<std::thread> threads;
  for (int t = 0; t < n_threads && !tasks.empty(); ++t) {
    threads.emplace_back([&] {
      for (;;) {
        const std::size_t i = next++;
        if (i >= tasks.size() || abort) break;
        try {
          auto rec = evaluate_draw(config, tasks[i].first, tasks[i].second, psi[tasks[i].first], F);
          std::lock_guard lock(mutex);
          queue.push_back(rec);
        } catch (const std::exception& e) {
          std::lock_guard lock(mutex);
          if (error.empty()) {
            error = "n=" + std::to_string(tasks[i].first) + " draw=" + std::to_string(tasks[i].second) + ": " + e.what();
          }
          abort = true;
        }
        cv.notify_one();
      }
      std::lock_guard lock(mutex);
      ++finished_workers;
      cv.notify_one();
    });
  }
  std::size_t written = 0;
  for (;;) {
    std::unique_lock lock(mutex);
    cv.wait(lock, [&] { return !queue.empty() || finished_workers == threads.size(); });
    while (!queue.empty()) {
      const DrawRecord rec = queue.front();
      queue.pop_front();
      lock.unlock();
      journal << draw_row(rec) << "\n" << std::flush;
      done[{rec.n, rec.draw}] = rec;
      if (log && ++written % 100 == 0) log(std::to_string(written) + "/" + std::to_string(tasks.size()) + " draws");
      lock.lock();
    }
    if (finished_workers == threads.size()) break;
  }
  for (auto& t : threads) t.join();
  journal.close();

  std::size_t thin_windows = 0;
  for (const auto& [key, rec] : done) {
    result.records.push_back(rec);
    if (rec.total_mass <= 0.0) ++thin_windows;
  }
  if (thin_windows > 0) {
    result.warnings.push_back(std::to_string(thin_windows) + " windows held fewer than two eigenvalues; total mass clamped to 0");
  }
  result.manifest["warnings"] = result.warnings;
  if (!error.empty()) {
    result.error = error;
    result.manifest["error"] = error;
    result.manifest["finished_at"] = utc_now();
    write_manifest(out, result.manifest);
    return result;
  }

  std::string text = std::string(kDrawHeader) + "\n";
  for (const auto& r : result.records) text += draw_row(r) + "\n";
  write_text(out / ("draws_" + tag + ".csv"), text);
  result.summary = summarize(config, result.records);
  write_text(out / ("summary_" + tag + ".json"), result.summary.dump(2) + "\n");
  fs::remove(journal_path);
  result.complete = true;
  result.manifest["status"] = "complete";
  result.manifest["finished_at"] = utc_now();
  write_manifest(out, result.manifest);
  return result;
}

// ---------------------------------------------------------------- identity

IdentityRun run_identity(const ExperimentConfig& config, const Logger& log) {
  validate(config);
  const fs::path out = config.out;
  fs::create_directories(out);
  json manifest = base_manifest(config, "identity");
  write_manifest(out, manifest);

  struct Task {
    int n;
    int draw;
  };
  std::vector<Task> tasks;
  for (int n : config.sizes) {
    for (int d = 0; d < config.draws; ++d) tasks.push_back({n, d});
  }
  std::map<int, double> psi;
  for (int n : config.sizes) psi[n] = window_density(config, n);

  // The corrupted draw is fixed up front so the choice does not depend on
  // thread scheduling.
  std::optional<std::size_t> corrupt;
  std::vector<spacing::IdentityReport> reports(tasks.size());
  std::vector<std::size_t> inside(tasks.size(), 0);
  auto window_of = [&](const Task& t) {
    return spacing::make_window(t.n, psi[t.n], config.window_a, config.delta_exponent);
  };
  if (config.inject_corruption) {
    for (std::size_t i = 0; i < tasks.size() && !corrupt; ++i) {
      const auto rs = spacing::rescale_localize(draw_spectrum(config, tasks[i].n, tasks[i].draw), window_of(tasks[i]));
      if (rs.inside.size() >= 2) corrupt = i;
    }
  }
  parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
    auto spectrum = draw_spectrum(config, tasks[i].n, tasks[i].draw);
    const auto window = window_of(tasks[i]);
    if (corrupt && *corrupt == i) {
      // Swap the first two eigenvalues inside the window.
      const double lo = window.a - window.delta, hi = window.a + window.delta;
      std::vector<std::size_t> idx;
      for (std::size_t k = 0; k < spectrum.values.size() && idx.size() < 2; ++k) {
        if (spectrum.values[k] >= lo && spectrum.values[k] <= hi) idx.push_back(k);
      }
      std::swap(spectrum.values[idx[0]], spectrum.values[idx[1]]);
    }
    const auto rs = spacing::rescale_localize(spectrum, window);
    inside[i] = rs.inside.size();
    reports[i] = spacing::alternating_identity_check(rs);
  });

  IdentityRun run;
  run.draws = tasks.size();
  json listed = json::array();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (inside[i] >= 2) ++run.windows_checked;
    for (const auto& v : reports[i].violations) {
      ++run.violations;
      if (listed.size() < 1000) {
        listed.push_back({{"n", tasks[i].n},
                          {"draw", tasks[i].draw},
                          {"s", num12(v.s)},
                          {"cutoff", v.cutoff == 0 ? json("identity") : json(v.cutoff)},
                          {"sigma_count", v.sigma_count.str()},
                          {"alternating_sum", v.alternating_sum.str()}});
      }
    }
  }
  run.report = {{"beta", config.beta},
                {"config_hash", config_hash(config)},
                {"draws", run.draws},
                {"windows_checked", run.windows_checked},
                {"violation_count", run.violations},
                {"violations", listed},
                {"corrupted_draw", corrupt ? json({{"n", tasks[*corrupt].n}, {"draw", tasks[*corrupt].draw}}) : json(nullptr)},
                {"ok", run.violations == 0}};
  write_text(out / ("identity_" + beta_tag(config.beta) + ".json"), run.report.dump(2) + "\n");
  if (log) log(std::to_string(run.violations) + " violations over " + std::to_string(run.draws) + " draws");
  manifest["status"] = "complete";
  manifest["finished_at"] = utc_now();
  write_manifest(out, manifest);
  return run;
}

// ---------------------------------------------------------------- sample

fs::path run_sample(const ExperimentConfig& config, const Logger& log) {
  validate(config);
  const fs::path out = config.out;
  fs::create_directories(out);
  json manifest = base_manifest(config, "sample");
  write_manifest(out, manifest);

  struct Task {
    int n;
    int draw;
  };
  std::vector<Task> tasks;
  std::size_t rows = 0;
  for (int n : config.sizes) {
    for (int d = 0; d < config.draws; ++d) tasks.push_back({n, d});
    rows += static_cast<std::size_t>(n) * static_cast<std::size_t>(config.draws);
  }
  std::vector<ensembles::Spectrum> spectra(tasks.size());
  std::vector<std::vector<std::string>> warnings(tasks.size());
  parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
    spectra[i] = draw_spectrum_impl(config, tasks[i].n, tasks[i].draw, false, &warnings[i]);
  });
  for (const auto& w : warnings) {
    for (const auto& line : w) manifest["warnings"].push_back(line);
  }

  const bool compress = rows > 1000000;
  const fs::path path = out / ("spectra_" + beta_tag(config.beta) + (compress ? ".csv.gz" : ".csv"));
  const fs::path tmp = path.string() + ".tmp";
  auto render = [&](auto&& sink) {
    sink("draw_id,index,eigenvalue\n");
    for (std::size_t i = 0; i < spectra.size(); ++i) {
      std::string chunk;
      for (std::size_t k = 0; k < spectra[i].values.size(); ++k) {
        chunk += std::to_string(i) + "," + std::to_string(k) + "," + format::number(spectra[i].values[k]) + "\n";
      }
      sink(chunk);
    }
  };
  if (compress) {
    gzFile gz = gzopen(tmp.c_str(), "wb9");
    if (!gz) throw std::runtime_error("cannot write " + tmp.string());
    render([&](const std::string& s) {
      if (gzwrite(gz, s.data(), static_cast<unsigned>(s.size())) != static_cast<int>(s.size())) {
        throw std::runtime_error("gzip write failed");
      }
    });
    gzclose(gz);
  } else {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    render([&](const std::string& s) { f << s; });
  }
  fs::rename(tmp, path);
  if (log) log("wrote " + std::to_string(rows) + " eigenvalues to " + path.string());
  manifest["status"] = "complete";
  manifest["finished_at"] = utc_now();
  manifest["draw_ids"] = "sequential over sizes in config order, then draws";
  write_manifest(out, manifest);
  return path;
}

// ---------------------------------------------------------------- gap

GapMethod gap_method_from_string(const std::string& name) {
  if (name == "painleve") return GapMethod::Painleve;
  if (name == "fredholm") return GapMethod::Fredholm;
  if (name == "series") return GapMethod::Series;
  throw std::invalid_argument("unknown method '" + name + "' (painleve, fredholm, series)");
}

double gap_value(Beta beta, double s, GapMethod method) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("gap: s must be a non-negative number");
  switch (method) {
    case GapMethod::Painleve: {
      const auto& traj = gap::default_trajectory();
      if (s <= gap::max_gap_length(beta, traj)) return gap::gap_probability(beta, traj, s);
      const double t = std::numbers::pi * s * (beta == Beta::Symplectic ? 2.0 : 1.0);
      if (t > 200.0) throw std::invalid_argument("gap: s beyond the range of the sigma ODE");
      return gap::gap_probability(beta, gap::integrate_sigma(t), s);
    }
    case GapMethod::Fredholm: {
      if (beta != Beta::Unitary) throw std::invalid_argument("gap: fredholm method is only available for beta 2");
      if (s == 0.0) return 1.0;
      const int n = std::clamp(static_cast<int>(40 + 8 * s), 40, 400);
      return gap::fredholm_g2(s, n);
    }
    case GapMethod::Series:
      if (s > 1.0) throw std::invalid_argument("gap: series method requires s <= 1");
      return gap::series_gap(beta, s, 4);
  }
  throw std::invalid_argument("gap: bad method");
}

}  // namespace spacinglab::experiment
