#include "spacinglab/painleve.hpp"

#include <algorithm>
#include <array>
#include <boost/multiprecision/float128.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

#include "spacinglab/common.hpp"
#include "spacinglab/quadrature.hpp"

namespace spacinglab::gap {

namespace {

using quad = boost::multiprecision::float128;

const quad kPiQ = boost::multiprecision::float128(
    "3.14159265358979323846264338327950288419716939937510582097494459");

// Series coefficient a_n of t^n is a polynomial in x = 1/pi with rational
// coefficients; each term is {power of x, numerator, denominator}.
struct SeriesTerm {
  int power;
  long long numerator;
  long long denominator;
};

const std::vector<std::vector<SeriesTerm>>& series_table() {
  static const std::vector<std::vector<SeriesTerm>> table = {
      {{1, -1, 1}},
      {{2, -1, 1}},
      {{3, -1, 1}},
      {{2, 1, 9}, {4, -1, 1}},
      {{3, 5, 36}, {5, -1, 1}},
      {{2, -2, 225}, {4, 1, 6}, {6, -1, 1}},
      {{3, -7, 675}, {5, 7, 36}, {7, -1, 1}},
      {{2, 1, 2205}, {4, -121, 8100}, {6, 2, 9}, {8, -1, 1}},
      {{3, 761, 1587600}, {5, -73, 3600}, {7, 1, 4}, {9, -1, 1}},
      {{2, -2, 127575}, {4, 1349, 1428840}, {6, -19, 720}, {8, 5, 18}, {10, -1, 1}},
      {{3, -671, 44651250}, {5, 21307, 14288400}, {7, -539, 16200}, {9, 11, 36}, {11, -1, 1}},
      {{2, 2, 5145525}, {4, -577, 11907000}, {6, 1261, 571536}, {8, -221, 5400}, {10, 1, 3},
       {12, -1, 1}},
      {{3, 6617, 19450084500}, {5, -1105871, 12859560000}, {7, 59267, 19051200},
       {9, -533, 10800}, {11, 13, 36}, {13, -1, 1}},
      {{2, -4, 553377825}, {4, 1993, 926194500}, {6, -16613, 114817500}, {8, 8627, 2041200},
       {10, -1897, 32400}, {12, 7, 18}, {14, -1, 1}},
  };
  return table;
}

// a_1 .. a_14 in quad precision (index 0 unused).
const std::vector<quad>& series_coefficients() {
  static const std::vector<quad> coefficients = [] {
    const quad x = quad(1) / kPiQ;
    std::vector<quad> a(1, quad(0));
    for (const auto& terms : series_table()) {
      quad value = 0;
      for (const SeriesTerm& term : terms) {
        value += quad(term.numerator) / quad(term.denominator) * pow(x, term.power);
      }
      a.push_back(value);
    }
    return a;
  }();
  return coefficients;
}

quad series_value(quad t) {
  const auto& a = series_coefficients();
  quad sum = 0;
  for (std::size_t n = a.size() - 1; n >= 1; --n) sum = (sum + a[n]) * t;
  return sum;
}

quad series_derivative(quad t) {
  const auto& a = series_coefficients();
  quad sum = 0;
  for (std::size_t n = a.size() - 1; n >= 1; --n) sum = sum * t + quad(static_cast<int>(n)) * a[n];
  return sum;
}

quad series_second_derivative(quad t) {
  const auto& a = series_coefficients();
  quad sum = 0;
  for (std::size_t n = a.size() - 1; n >= 2; --n) {
    sum = sum * t + quad(static_cast<int>(n * (n - 1))) * a[n];
  }
  return sum;
}

// -v'(t) for v = sigma/t from the series: -sum (n-1) a_n t^(n-2).
quad series_minus_v_prime(quad t) {
  const auto& a = series_coefficients();
  quad sum = 0;
  for (std::size_t n = a.size() - 1; n >= 2; --n) sum = sum * t - quad(static_cast<int>(n - 1)) * a[n];
  return sum;
}

// Integral of v = sigma/t over [0, t]: sum a_n t^n / n.
quad series_log_g2(quad t) {
  const auto& a = series_coefficients();
  quad sum = 0;
  for (std::size_t n = a.size() - 1; n >= 1; --n) sum = (sum + a[n] / quad(static_cast<int>(n))) * t;
  return sum;
}

quad series_half_root(quad t) {
  const quadrature::Rule rule = quadrature::gauss_legendre(20, 0.0, 1.0);
  quad sum = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const quad u = t * quad(rule.nodes[i]);
    sum += quad(rule.weights[i]) * sqrt(series_minus_v_prime(u));
  }
  return quad(0.5) * t * sum;
}

using State = std::array<quad, 4>;  // sigma, sigma', integral of v, 1/2 integral of sqrt(-v')

// Right-hand side; returns false when the radicand is negative beyond the
// clamp (the step is then rejected by the caller).
bool rhs(quad t, const State& y, State& dy, quad clamp) {
  const quad a = t * y[1] - y[0];
  const quad b = a + y[1] * y[1];
  quad radicand = -a * b;
  if (radicand < 0) {
    if (radicand < -clamp) return false;
    radicand = 0;
  }
  quad minus_vp = -a / (t * t);
  if (minus_vp < 0) {
    if (minus_vp < -clamp) return false;
    minus_vp = 0;
  }
  dy[0] = y[1];
  dy[1] = -2 * sqrt(radicand) / t;
  dy[2] = y[0] / t;
  dy[3] = sqrt(minus_vp) / 2;
  return true;
}

// Fehlberg 7(8) embedded pair; all coefficients are rational so they are
// exact in any precision.
struct Fehlberg78 {
  static constexpr int kStages = 13;
  std::array<quad, kStages> c;
  std::array<std::array<quad, kStages>, kStages> a{};
  std::array<quad, kStages> b8;
  quad error_weight;

  Fehlberg78() {
    auto r = [](int p, int q) { return quad(p) / quad(q); };
    c = {0, r(2, 27), r(1, 9), r(1, 6), r(5, 12), r(1, 2), r(5, 6), r(1, 6), r(2, 3), r(1, 3), 1, 0, 1};
    a[1] = {r(2, 27)};
    a[2] = {r(1, 36), r(1, 12)};
    a[3] = {r(1, 24), 0, r(1, 8)};
    a[4] = {r(5, 12), 0, r(-25, 16), r(25, 16)};
    a[5] = {r(1, 20), 0, 0, r(1, 4), r(1, 5)};
    a[6] = {r(-25, 108), 0, 0, r(125, 108), r(-65, 27), r(125, 54)};
    a[7] = {r(31, 300), 0, 0, 0, r(61, 225), r(-2, 9), r(13, 900)};
    a[8] = {2, 0, 0, r(-53, 6), r(704, 45), r(-107, 9), r(67, 90), 3};
    a[9] = {r(-91, 108), 0, 0, r(23, 108), r(-976, 135), r(311, 54), r(-19, 60), r(17, 6), r(-1, 12)};
    a[10] = {r(2383, 4100), 0, 0, r(-341, 164), r(4496, 1025), r(-301, 82), r(2133, 4100),
             r(45, 82), r(45, 164), r(18, 41)};
    a[11] = {r(3, 205), 0, 0, 0, 0, r(-6, 41), r(-3, 205), r(-3, 41), r(3, 41), r(6, 41), 0};
    a[12] = {r(-1777, 4100), 0, 0, r(-341, 164), r(4496, 1025), r(-289, 82), r(2193, 4100),
             r(51, 82), r(33, 164), r(12, 41), 0, 1};
    b8 = {0, 0, 0, 0, 0, r(34, 105), r(9, 35), r(9, 35), r(9, 280), r(9, 280), 0, r(41, 840), r(41, 840)};
    // 7th minus 8th order solution: 41/840 (k0 + k10 - k11 - k12).
    error_weight = r(41, 840);
  }

  // One trial step; returns false if a stage left the branch.
  bool step(quad t, const State& y, quad h, quad clamp, State& out, State& err) const {
    std::array<State, kStages> k;
    for (int s = 0; s < kStages; ++s) {
      State ys = y;
      for (int j = 0; j < s; ++j) {
        if (a[s][j] == 0) continue;
        for (int i = 0; i < 4; ++i) ys[i] += h * a[s][j] * k[j][i];
      }
      if (!rhs(t + c[s] * h, ys, k[s], clamp)) return false;
    }
    for (int i = 0; i < 4; ++i) {
      quad sum = 0;
      for (int s = 0; s < kStages; ++s) {
        if (b8[s] != 0) sum += b8[s] * k[s][i];
      }
      out[i] = y[i] + h * sum;
      err[i] = h * error_weight * (k[0][i] + k[10][i] - k[11][i] - k[12][i]);
    }
    return true;
  }
};

std::string location(quad t) { return std::to_string(static_cast<double>(t)); }

}  // namespace

double sigma_cubic(double t) {
  const double u = t / std::numbers::pi;
  return -u - u * u - u * u * u;
}

double sigma_series(double t) { return static_cast<double>(series_value(quad(t))); }

double sigma_series_derivative(double t) { return static_cast<double>(series_derivative(quad(t))); }

double sigma_series_second_derivative(double t) {
  return static_cast<double>(series_second_derivative(quad(t)));
}

SigmaTrajectory integrate_sigma(double t_max, double tolerance) {
  SigmaOptions options;
  options.tolerance = tolerance;
  return integrate_sigma(t_max, options);
}

SigmaTrajectory integrate_sigma(double t_max, const SigmaOptions& options) {
  if (!(t_max > 0.0) || t_max > 200.0) {
    throw std::invalid_argument("integrate_sigma: require 0 < s_max <= 200");
  }
  if (!(options.tolerance > 0.0) || !(options.knot_spacing > 0.0) || !(options.seed_point > 0.0)) {
    throw std::invalid_argument("integrate_sigma: tolerance, knot spacing and seed must be positive");
  }
  if (options.seed_point >= t_max) {
    throw std::invalid_argument("integrate_sigma: s_max must exceed the seed point");
  }

  static const Fehlberg78 scheme;
  const quad tol = options.tolerance;
  const quad clamp = options.radicand_clamp;
  const quad knot_h = options.knot_spacing;

  SigmaTrajectory traj;
  auto record = [&](quad t, const State& y) {
    State dy;
    if (!rhs(t, y, dy, clamp)) throw NumericError("σ-ODE branch violation at s=" + location(t));
    traj.t_.push_back(static_cast<double>(t));
    traj.sigma_.push_back(static_cast<double>(y[0]));
    traj.sigma_prime_.push_back(static_cast<double>(y[1]));
    traj.sigma_second_.push_back(static_cast<double>(dy[1]));
    traj.log_g2_.push_back(static_cast<double>(y[2]));
    traj.half_root_.push_back(static_cast<double>(y[3]));
    traj.minus_v_prime_.push_back(static_cast<double>(4 * dy[3] * dy[3]));
  };

  quad t = options.seed_point;
  State y = {series_value(t), series_derivative(t), series_log_g2(t), series_half_root(t)};
  record(t, y);

  long long next_index = static_cast<long long>(std::floor(options.seed_point / options.knot_spacing)) + 1;
  quad h = quad(1e-4);
  const quad end = t_max;
  const quad min_step = quad(1e-13);

  while (t < end) {
    quad knot = quad(static_cast<double>(next_index)) * knot_h;
    // The final knot is t_max itself; a grid knot within rounding of it is
    // merged so no zero-length interval appears in double precision.
    if (knot >= end * (1 - quad(1e-14))) knot = end;
    const quad room = knot - t;
    const bool lands = h >= room;
    const quad step = lands ? room : h;

    State trial, err;
    if (!scheme.step(t, y, step, clamp, trial, err)) {
      ++traj.rejected_;
      h = step / 4;
      if (h < min_step * std::max(quad(1), t)) throw NumericError("σ-ODE branch violation at s=" + location(t));
      continue;
    }
    quad err_norm = 0;
    for (int i = 0; i < 4; ++i) {
      const quad scale = tol * std::max(quad(1), abs(y[i]));
      err_norm = std::max(err_norm, abs(err[i]) / scale);
    }
    const quad factor =
        err_norm == 0 ? quad(4) : std::min(quad(4), std::max(quad(0.2), quad(0.9) * pow(err_norm, quad(-1) / 8)));
    if (err_norm > 1) {
      ++traj.rejected_;
      h = step * factor;
      if (h < min_step * std::max(quad(1), t)) {
        throw NumericError("σ-ODE branch violation at s=" + location(t));
      }
      continue;
    }
    ++traj.accepted_;
    y = trial;
    if (lands) {
      t = knot;
      record(t, y);
      ++next_index;
      // A clipped step says nothing about the natural step size.
      h = std::max(h, quad(step * factor));
    } else {
      t += step;
      h = step * factor;
    }
  }
  return traj;
}

SigmaPoint SigmaTrajectory::at(double t) const {
  if (!(t > 0.0)) throw std::out_of_range("SigmaTrajectory::at: t must be positive");
  if (t > t_max() * (1.0 + 1e-14)) throw std::out_of_range("SigmaTrajectory::at: t beyond trajectory");
  SigmaPoint p;
  p.t = t;
  if (t <= t_.front()) {
    const quad tq = t;
    p.sigma = static_cast<double>(series_value(tq));
    p.sigma_prime = static_cast<double>(series_derivative(tq));
    p.sigma_second = static_cast<double>(series_second_derivative(tq));
    p.v = static_cast<double>(series_value(tq) / tq);
    p.minus_v_prime = static_cast<double>(series_minus_v_prime(tq));
    p.log_g2 = static_cast<double>(series_log_g2(tq));
    p.half_root = static_cast<double>(series_half_root(tq));
    return p;
  }
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = (it == t_.end()) ? t_.size() - 2 : static_cast<std::size_t>(it - t_.begin()) - 1;
  const double h = t_[i + 1] - t_[i];
  const double th = (t - t_[i]) / h;
  if (th == 0.0) {
    p.sigma = sigma_[i];
    p.sigma_prime = sigma_prime_[i];
    p.sigma_second = sigma_second_[i];
    p.v = sigma_[i] / t;
    p.minus_v_prime = minus_v_prime_[i];
    p.log_g2 = log_g2_[i];
    p.half_root = half_root_[i];
    return p;
  }
  const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
  const double h10 = th * (1 - th) * (1 - th);
  const double h01 = th * th * (3 - 2 * th);
  const double h11 = th * th * (th - 1);
  auto hermite = [&](double y0, double d0, double y1, double d1) {
    return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
  };
  auto half_root_rate = [&](std::size_t j) { return 0.5 * std::sqrt(minus_v_prime_[j]); };
  p.sigma = hermite(sigma_[i], sigma_prime_[i], sigma_[i + 1], sigma_prime_[i + 1]);
  p.sigma_prime = hermite(sigma_prime_[i], sigma_second_[i], sigma_prime_[i + 1], sigma_second_[i + 1]);
  p.sigma_second = (1 - th) * sigma_second_[i] + th * sigma_second_[i + 1];
  p.v = p.sigma / t;
  p.minus_v_prime = (p.sigma - t * p.sigma_prime) / (t * t);
  p.log_g2 = hermite(log_g2_[i], sigma_[i] / t_[i], log_g2_[i + 1], sigma_[i + 1] / t_[i + 1]);
  p.half_root = hermite(half_root_[i], half_root_rate(i), half_root_[i + 1], half_root_rate(i + 1));
  return p;
}

}  // namespace spacinglab::gap
