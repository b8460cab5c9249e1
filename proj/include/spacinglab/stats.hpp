#pragma once

#include <functional>
#include <vector>

namespace spacinglab::stats {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares y = intercept + slope x. Needs two distinct x.
LinearFit linear_regression(const std::vector<double>& x, const std::vector<double>& y);

// Linear interpolation between order statistics (type 7).
double quantile_sorted(const std::vector<double>& sorted, double p);

double mean(const std::vector<double>& v);
// Unbiased sample standard deviation; 0 for fewer than two values.
double stddev(const std::vector<double>& v);

// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

struct KSResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// One-sample test against a continuous CDF, asymptotic p-value with
// Stephens' small-sample correction.
KSResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);
KSResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// P(X > x) for X ~ chi^2(dof).
double chi_square_survival(double x, double dof);

}  // namespace spacinglab::stats
