#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

namespace spacinglab::gap {

// sigma-form Painleve V solution and the quantities derived from it at one
// abscissa t (t = pi * s for a gap of rescaled length s).
struct SigmaPoint {
  double t = 0.0;
  double sigma = 0.0;
  double sigma_prime = 0.0;
  double sigma_second = 0.0;
  double v = 0.0;              // sigma / t
  double minus_v_prime = 0.0;  // -(d/dt)(sigma / t); may be -1e-16 from roundoff
  double log_g2 = 0.0;         // integral of v over [0, t]
  double half_root = 0.0;      // 1/2 integral of sqrt(-v') over [0, t]
};

struct SigmaOptions {
  // The ODE is singular at t = 0; integration starts here from the series.
  double seed_point = 1e-3;
  // Per-step error bound of the embedded 7(8) pair, relative to max(1, |y|).
  double tolerance = 1e-31;
  // Uniform output knots; pi/1000 lines up with a gap grid of step 1e-3 for
  // both t = pi s and t = 2 pi s.
  double knot_spacing = std::numbers::pi * 1e-3;
  // Negative radicands above -clamp are roundoff and set to zero.
  double radicand_clamp = 1e-12;
};

// Integrated trajectory on knots seed_point, h, 2h, ... up to t_max. The
// integration itself runs in quad precision: perturbations of the solution
// grow roughly like e^t, so double precision loses the solution near t = 20.
class SigmaTrajectory {
 public:
  const std::vector<double>& grid() const { return t_; }
  const std::vector<double>& sigma() const { return sigma_; }
  const std::vector<double>& sigma_prime() const { return sigma_prime_; }
  const std::vector<double>& log_g2() const { return log_g2_; }
  const std::vector<double>& half_root() const { return half_root_; }

  double seed_point() const { return t_.front(); }
  double t_max() const { return t_.back(); }
  std::size_t steps_accepted() const { return accepted_; }
  std::size_t steps_rejected() const { return rejected_; }

  // Series below the seed point, cubic Hermite between knots. Throws
  // std::out_of_range beyond t_max.
  SigmaPoint at(double t) const;

 private:
  friend SigmaTrajectory integrate_sigma(double t_max, const SigmaOptions& options);

  std::vector<double> t_;
  std::vector<double> sigma_;
  std::vector<double> sigma_prime_;
  std::vector<double> sigma_second_;
  std::vector<double> log_g2_;
  std::vector<double> half_root_;
  std::vector<double> minus_v_prime_;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
};

// Solves (t s'')^2 + 4 (t s' - s)(t s' - s + s'^2) = 0 on the branch
// s'' = -(2/t) sqrt(-(t s' - s)(t s' - s + s'^2)) selected by the small-t
// behaviour s(t) ~ -t/pi. Requires 0 < t_max <= 200. Throws NumericError
// "σ-ODE branch violation at s=..." when the radicand turns negative
// beyond the clamp, which in practice marks the end of the quad precision
// horizon (t around 56).
SigmaTrajectory integrate_sigma(double t_max, const SigmaOptions& options);
SigmaTrajectory integrate_sigma(double t_max, double tolerance);
inline SigmaTrajectory integrate_sigma(double t_max) { return integrate_sigma(t_max, SigmaOptions{}); }

// Small-t expansion -t/pi - (t/pi)^2 - (t/pi)^3.
double sigma_cubic(double t);

// Taylor series of the same solution through t^14, coefficients obtained
// order by order from the ODE. Accurate to quad precision for t <= 1e-2.
double sigma_series(double t);
double sigma_series_derivative(double t);
double sigma_series_second_derivative(double t);

}  // namespace spacinglab::gap
