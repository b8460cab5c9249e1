#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spacinglab/ensembles.hpp"
#include "spacinglab/gap.hpp"

namespace spacinglab::spacing {

using BigInt = boost::multiprecision::cpp_int;

// I_N = [a - delta, a + delta] together with the local density used to
// rescale it.
struct Window {
  double a = 0.0;
  double delta = 0.0;
  double psi_a = 0.0;
  int n = 0;

  // |A_N| = 2 n psi(a) delta.
  double rescaled_length() const { return 2.0 * n * psi_a * delta; }
  double to_rescaled(double raw) const { return (raw - a) * n * psi_a; }
  double to_raw(double rescaled) const { return a + rescaled / (n * psi_a); }
};

// a and delta = n^-exponent; validates delta > 0 and psi_a > 0.
Window make_window(int n, double psi_a, double a = 0.0, double exponent = 0.6);

struct RescaledSpectrum {
  std::vector<double> inside;
  Window window;
};

// Pooled Epanechnikov estimate of the level density at a, normalised per
// matrix. Throws std::invalid_argument on empty input or bandwidth <= 0 and
// NumericError "bulk point outside spectrum support" when a lies outside the
// pooled range or the estimate is not positive.
double estimate_density(const std::vector<ensembles::Spectrum>& spectra, double a, double bandwidth);

// Eigenvalues in the closed window, mapped by (x - a) n psi(a), order kept.
RescaledSpectrum rescale_localize(const ensembles::Spectrum& spectrum, const Window& window);

// s -> (number of consecutive spacings <= s) / |A_N|.
struct EmpiricalSpacingCDF {
  std::vector<double> spacings;  // sorted
  double rescaled_length = 0.0;
  std::size_t inside = 0;
  double total_mass = 0.0;  // (inside - 1) / |A_N|, clamped at 0
  std::optional<std::string> warning;

  std::size_t count(double s) const;
  double operator()(double s) const;
};

EmpiricalSpacingCDF sigma_cdf(const RescaledSpectrum& rs);

// s -> (number of k-subsets whose span max - min is <= s) / |A_N|.
struct GammaCounts {
  int k = 2;
  double rescaled_length = 0.0;
  std::vector<double> spans;   // sorted jump points
  std::vector<BigInt> counts;  // cumulative count at each jump

  BigInt count(double s) const;
  double operator()(double s) const;
};

// Each pair i < j contributes C(j - i - 1, k - 2) tuples at span x_j - x_i.
// The values are sorted first (the count is symmetric). Throws for k < 2.
GammaCounts gamma_cdf(int k, const RescaledSpectrum& rs);

// Exhaustive k-subset enumeration; for cross-checks on at most 12 points.
BigInt gamma_count_brute_force(int k, const std::vector<double>& inside, double s);

struct IdentityViolation {
  double s = 0.0;
  int cutoff = 0;  // 0 for the full identity, m for the truncated inequality
  BigInt sigma_count;
  BigInt alternating_sum;
};

struct IdentityReport {
  bool ok = true;
  std::size_t jump_points = 0;
  std::vector<IdentityViolation> violations;
};

// At every jump point s checks, in integer arithmetic on raw counts,
//   sigma(s) = sum_{k=2}^p (-1)^k gamma_k(s)
// and (-1)^m sigma(s) <= (-1)^m sum_{k=2}^m (-1)^k gamma_k(s) for 2 <= m <= p.
// sigma uses consecutive differences of `inside` as given, so an unsorted
// input shows up as a violation.
IdentityReport alternating_identity_check(const RescaledSpectrum& rs);

struct KSReport {
  std::vector<double> node_values;  // |ecdf(s_i) - i/M|, i = 1 .. M-1
  double node_max = 0.0;
  double inverse_m = 0.0;
  double mass_defect = 0.0;  // |total_mass - 1|
  double bound = 0.0;        // inverse_m + node_max + mass_defect
};

// Node-based bound on sup_s |ecdf(s) - F(s)|.
KSReport ks_node_distance(const EmpiricalSpacingCDF& ecdf, const gap::UniversalSpacingCDF& F);
KSReport ks_node_distance(const EmpiricalSpacingCDF& ecdf, const std::vector<double>& nodes, int M);

double total_mass_check(const EmpiricalSpacingCDF& ecdf);

struct VarianceSample {
  double rescaled_length = 0.0;      // |A_N| for this size
  std::vector<double> statistics;    // one value of int_0^alpha d gamma_N(k) per draw
};

struct VarianceReport {
  std::vector<double> rescaled_lengths;
  std::vector<double> variances;
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int resamples = 0;
};

// Sample variance per size, log-log least squares slope against |A_N| and a
// percentile bootstrap interval over `resamples` draws-with-replacement.
// Needs at least two sizes with positive variance for the slope.
VarianceReport variance_diagnostic(const std::vector<VarianceSample>& samples, int resamples = 200,
                                   std::uint64_t seed = 1);

// gamma_N(k) statistic for one draw: gamma_cdf(k, rs)(alpha).
double gamma_statistic(int k, const RescaledSpectrum& rs, double alpha);

}  // namespace spacinglab::spacing
