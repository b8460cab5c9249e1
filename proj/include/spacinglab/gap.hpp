#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "spacinglab/common.hpp"
#include "spacinglab/painleve.hpp"

namespace spacinglab::gap {

// Gap probability G(s) and its derivative on a uniform grid starting at 0.
struct GapCurve {
  Beta beta = Beta::Unitary;
  std::vector<double> s;
  std::vector<double> g;
  std::vector<double> gp;
};

struct GapValue {
  double g = 1.0;
  double gp = -1.0;
};

// G_beta(s) and G'_beta(s) from the sigma trajectory:
//   G2(s) = exp(int_0^{pi s} v),  G1(s) = sqrt(G2(s)) exp(-1/2 int_0^{pi s} sqrt(-v')),
//   G4(s) = 1/2 (G1(2s) + G2(2s) / G1(2s)).
// Needs pi s (2 pi s for beta = 4) inside the trajectory. Throws NumericError
// "negative radicand in √(−v′)" if -v' < -1e-12.
GapValue gap_value(Beta beta, const SigmaTrajectory& traj, double s);
double gap_probability(Beta beta, const SigmaTrajectory& traj, double s);

// Largest s covered by the trajectory for this beta.
double max_gap_length(Beta beta, const SigmaTrajectory& traj);

// Tabulates G on s = 0, ds, 2 ds, ... up to s_max (default: everything the
// trajectory covers).
GapCurve gap_curve(Beta beta, const SigmaTrajectory& traj, double ds = 1e-3,
                   std::optional<double> s_max = std::nullopt);

struct GapCurves {
  GapCurve orthogonal;
  GapCurve unitary;
  GapCurve symplectic;
  const GapCurve& operator[](Beta beta) const;
};
GapCurves gap_curves(const SigmaTrajectory& traj, double ds = 1e-3);

// Trajectory long enough for all three betas up to s = 8.5, integrated once
// per process.
const SigmaTrajectory& default_trajectory();

// Limiting spacing CDF F = 1 + G' with its quantile nodes F(nodes[i-1]) = i/M,
// i = 1 .. M-1. tail = -G' is kept separately since 1 - F loses all digits
// once F rounds to 1.
class UniversalSpacingCDF {
 public:
  Beta beta = Beta::Unitary;
  std::vector<double> s;
  std::vector<double> F;
  std::vector<double> tail;
  std::vector<double> nodes;
  int M = 0;

  // Monotone piecewise cubic (Fritsch-Carlson) interpolation, 0 below the
  // grid, F.back() above it.
  double operator()(double x) const;
  // s with F(s) = p for 0 < p < F.back().
  double quantile(double p) const;

 private:
  friend UniversalSpacingCDF universal_cdf(const GapCurve&, int);
  std::vector<double> slopes_;
};

// Throws NumericError "CDF monotonicity violated" if F decreases by more than
// 1e-8 anywhere; smaller dips are flattened.
UniversalSpacingCDF universal_cdf(const GapCurve& curve, int M);

// det(1 - K_2) on L^2(0, s) by n-point Gauss-Legendre Nystrom discretisation.
double fredholm_g2(double s, int n = 40);

// 1 + sum_{k <= k_max} (-1)^k int over 0 <= x_1 <= ... <= x_k <= s of W_k,
// tensor Gauss-Legendre on the cube mapped onto the ordered simplex.
double series_gap(Beta beta, double s, int k_max = 4, int nodes_per_dim = 12);

struct TailFit {
  double A = 0.0;        // exp(intercept) of the least squares line
  double B = 0.0;
  double A_bound = 0.0;  // least A with 1 - F <= A e^{-B s^2} on [0, s_hi]; >= 1 as 1 - F(0) = 1
  double s_lo = 2.0;
  double s_hi = 6.0;
  std::size_t points = 0;
  std::optional<std::string> warning;
};

// Least squares of log(1 - F) against s^2 on [s_lo, s_hi]: A = exp(intercept),
// B = -slope. If 1 - F underflows first the window shrinks and a warning is set.
TailFit tail_fit(const UniversalSpacingCDF& cdf, double s_lo = 2.0, double s_hi = 6.0);

}  // namespace spacinglab::gap
