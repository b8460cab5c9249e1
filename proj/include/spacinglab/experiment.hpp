#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "spacinglab/common.hpp"
#include "spacinglab/ensembles.hpp"
#include "spacinglab/gap.hpp"
#include "spacinglab/spacing.hpp"

namespace spacinglab::experiment {

using nlohmann::json;

struct PotentialConfig {
  // "semicircle": Gaussian scaled to support [-2, 2]; "gaussian": c x^2 with
  // c = coefficients[0] (default 1); "polynomial": explicit coefficients,
  // constant term first.
  std::string kind = "semicircle";
  std::vector<double> coefficients;
};

struct ExperimentConfig {
  int beta = 2;
  std::vector<int> sizes = {100, 400, 1600};
  int draws = 200;
  PotentialConfig potential;
  std::string sampler = "tridiagonal";  // tridiagonal | dense | mcmc
  double window_a = 0.0;
  double delta_exponent = 0.6;
  std::string density = "analytic";  // analytic | estimate
  double bandwidth = 0.1;
  int pilot_draws = 20;
  int M = 50;
  double s_max = 8.0;
  std::uint64_t seed = 20261015;
  int mcmc_burn_in = 2000;
  int mcmc_thin = 10;
  bool dump_spectra = false;
  bool inject_corruption = false;  // identity negative control
  // Not part of the hash: they do not change any result.
  std::string out = "spacinglab-out";
  int workers = 1;
};

// Throws std::invalid_argument on unknown keys, wrong types or values that
// break the invariants (sizes >= 8, draws >= 1, M >= 2, ...).
ExperimentConfig config_from_json(const json& j);
json config_to_json(const ExperimentConfig& config);  // without out / workers
void validate(const ExperimentConfig& config);

// Sorted keys, compact separators.
std::string canonical_config(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

ensembles::EnsembleSpec ensemble_spec(const ExperimentConfig& config, int n);

// Stream id of draw `draw` at size n; pilot draws for density estimation use
// the high bit.
std::uint64_t stream_id(int n, int draw, bool pilot = false);

ensembles::Spectrum draw_spectrum(const ExperimentConfig& config, int n, int draw, bool pilot = false);

// psi(a) for size n: semicircle value for Gaussian potentials in analytic
// mode, otherwise the pooled Epanechnikov estimate over the pilot draws.
double window_density(const ExperimentConfig& config, int n);

// ---------------------------------------------------------------- universal

// F_beta on s = 0, 1e-3, ..., s_max with M quantile nodes. Throws
// NumericError with the s-location if the sigma ODE fails.
gap::UniversalSpacingCDF build_universal(Beta beta, double s_max, int M);

struct UniversalFiles {
  std::filesystem::path cdf;
  std::filesystem::path nodes;
};
UniversalFiles write_universal(const gap::UniversalSpacingCDF& cdf, const std::filesystem::path& out);

// ---------------------------------------------------------------- verify

struct DrawRecord {
  int beta = 2;
  int n = 0;
  int draw = 0;
  double window_a = 0.0;
  double window_delta = 0.0;
  double A_N = 0.0;
  double total_mass = 0.0;
  double node_max = 0.0;
  double bound = 0.0;
};

inline constexpr const char* kDrawHeader =
    "beta,n,draw,window_a,window_delta,A_N,total_mass,node_max,bound,checksum";

// One CSV row, checksum = FNV-1a of the text before the last comma.
std::string draw_row(const DrawRecord& r);
// Parses a row and verifies its checksum; nullopt if damaged.
std::optional<DrawRecord> parse_draw_row(const std::string& line);

DrawRecord evaluate_draw(const ExperimentConfig& config, int n, int draw, double psi_a,
                         const gap::UniversalSpacingCDF& F);

struct RunResult {
  std::vector<DrawRecord> records;  // sorted by (n, draw)
  json summary;
  json manifest;
  std::vector<std::string> warnings;
  bool complete = false;
  std::string error;
};

// Progress messages go to `log` when given.
using Logger = std::function<void(const std::string&)>;

// Samples, localises and compares every (size, draw) pair on a pool of
// config.workers threads, journaling rows to draws_beta{b}.partial.csv so a
// rerun resumes where it stopped. Writes draws_beta{b}.csv,
// summary_beta{b}.json and manifest.json into config.out.
RunResult run_verify(const ExperimentConfig& config, const Logger& log = {});

// Aggregates records into the summary document.
json summarize(const ExperimentConfig& config, const std::vector<DrawRecord>& records);

// ---------------------------------------------------------------- identity

struct IdentityRun {
  std::size_t draws = 0;
  std::size_t windows_checked = 0;
  std::size_t violations = 0;
  json report;
};

// Runs the exact alternating identity check over every draw; writes
// identity_beta{b}.json. With inject_corruption the first draw with at least
// two window eigenvalues has them swapped.
IdentityRun run_identity(const ExperimentConfig& config, const Logger& log = {});

// ---------------------------------------------------------------- sample

// Writes spectra_beta{b}.csv (draw_id,index,eigenvalue), gzip-compressed as
// .csv.gz above 1e6 rows. Returns the path.
std::filesystem::path run_sample(const ExperimentConfig& config, const Logger& log = {});

// ---------------------------------------------------------------- gap

enum class GapMethod { Painleve, Fredholm, Series };
GapMethod gap_method_from_string(const std::string& name);
// Throws std::invalid_argument for invalid method / beta / s combinations.
double gap_value(Beta beta, double s, GapMethod method);

}  // namespace spacinglab::experiment
