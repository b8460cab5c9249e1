// spacinglab command line front end.
//
// Exit codes: 0 success, 1 numeric failure (or identity violations),
// 2 usage error.

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "spacinglab/experiment.hpp"
#include "spacinglab/format.hpp"

namespace ex = spacinglab::experiment;
using spacinglab::Beta;

namespace {

constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> workers;
  std::optional<int> beta;
  std::vector<int> sizes;
  std::optional<int> draws;
  std::optional<std::string> sampler;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool run_options) {
  cmd->add_option("--config", o.config_path, "JSON experiment configuration")->envname("SPACINGLAB_CONFIG");
  cmd->add_option("--seed", o.seed, "base seed (u64)")->envname("SPACINGLAB_SEED");
  cmd->add_option("--out", o.out, "output directory")->envname("SPACINGLAB_OUT");
  cmd->add_option("--workers", o.workers, "worker threads")->envname("SPACINGLAB_WORKERS")->check(CLI::PositiveNumber);
  if (run_options) {
    cmd->add_option("--beta", o.beta, "Dyson index 1, 2 or 4")->check(CLI::IsMember({1, 2, 4}));
    cmd->add_option("--sizes", o.sizes, "matrix sizes")->delimiter(',');
    cmd->add_option("--draws", o.draws, "draws per size");
    cmd->add_option("--sampler", o.sampler, "tridiagonal, dense or mcmc");
  }
}

ex::ExperimentConfig load_config(const CommonOptions& o) {
  ex::ExperimentConfig c;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw UsageError("cannot read config file " + o.config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("config is not valid JSON: ") + e.what());
    }
    c = ex::config_from_json(j);
  }
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out = *o.out;
  if (o.workers) c.workers = *o.workers;
  if (o.beta) c.beta = *o.beta;
  if (!o.sizes.empty()) c.sizes = o.sizes;
  if (o.draws) c.draws = *o.draws;
  if (o.sampler) c.sampler = *o.sampler;
  ex::validate(c);
  return c;
}

void log_line(const std::string& msg) { std::cerr << "spacinglab: " << msg << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalue spacing universality toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SPACINGLAB_VERSION);

  // universal
  auto* universal = app.add_subcommand("universal", "tabulate F_beta and its quantile nodes");
  CommonOptions uo;
  int u_beta = 2;
  double u_smax = 8.0;
  int u_m = 100;
  universal->add_option("--beta", u_beta, "Dyson index")->required()->check(CLI::IsMember({1, 2, 4}));
  universal->add_option("--s-max", u_smax, "largest tabulated spacing")->check(CLI::PositiveNumber);
  universal->add_option("-M,--nodes", u_m, "number of quantile cells M")->check(CLI::Range(2, 1000000));
  add_common(universal, uo, false);

  // verify
  auto* verify = app.add_subcommand("verify", "sample, localise and measure the node distance bound");
  CommonOptions vo;
  add_common(verify, vo, true);

  // identity
  auto* identity = app.add_subcommand("identity", "exact check of the alternating spacing identity");
  CommonOptions io;
  bool inject = false;
  add_common(identity, io, true);
  identity->add_flag("--inject-corruption", inject, "negative control: unsort one window");

  // gap
  auto* gap = app.add_subcommand("gap", "print the gap probability G_beta(s)");
  int g_beta = 2;
  double g_s = 0.0;
  std::string g_method = "painleve";
  gap->add_option("--beta", g_beta, "Dyson index")->required()->check(CLI::IsMember({1, 2, 4}));
  gap->add_option("--s", g_s, "interval length")->required();
  gap->add_option("--method", g_method, "painleve, fredholm or series");

  // sample
  auto* sample = app.add_subcommand("sample", "dump sampled spectra as CSV");
  CommonOptions so;
  add_common(sample, so, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*universal) {
      const std::string out = uo.out.value_or(".");
      const auto cdf = ex::build_universal(spacinglab::beta_from_int(u_beta), u_smax, u_m);
      const auto files = ex::write_universal(cdf, out);
      std::cout << files.cdf.string() << "\n" << files.nodes.string() << "\n";
      return 0;
    }
    if (*verify) {
      const auto config = load_config(vo);
      const auto result = ex::run_verify(config, log_line);
      for (const auto& w : result.warnings) log_line("warning: " + w);
      if (!result.complete) {
        log_line("run aborted: " + result.error);
        return kExitNumeric;
      }
      for (const auto& s : result.summary["sizes"]) {
        std::cout << "n=" << s["n"] << " mean_bound=" << s["mean_bound"] << "\n";
      }
      std::cout << "monotone_decrease=" << (result.summary["monotone_decrease"].get<bool>() ? "true" : "false") << "\n";
      return 0;
    }
    if (*identity) {
      auto config = load_config(io);
      config.inject_corruption = config.inject_corruption || inject;
      const auto run = ex::run_identity(config, log_line);
      for (const auto& v : run.report["violations"]) {
        std::cout << "violation n=" << v["n"] << " draw=" << v["draw"] << " s=" << v["s"] << " cutoff=" << v["cutoff"]
                  << "\n";
      }
      std::cout << "violations=" << run.violations << " draws=" << run.draws << "\n";
      return run.violations == 0 ? 0 : kExitNumeric;
    }
    if (*gap) {
      const auto method = ex::gap_method_from_string(g_method);
      const double value = ex::gap_value(spacinglab::beta_from_int(g_beta), g_s, method);
      std::cout << spacinglab::format::number(value, 10) << "\n";
      return 0;
    }
    if (*sample) {
      const auto config = load_config(so);
      std::cout << ex::run_sample(config, log_line).string() << "\n";
      return 0;
    }
  } catch (const spacinglab::NumericError& e) {
    log_line(std::string("numeric failure: ") + e.what());
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    log_line(std::string("usage: ") + e.what());
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    log_line(std::string("usage: ") + e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    log_line(std::string("error: ") + e.what());
    return kExitNumeric;
  }
  return kExitUsage;
}
