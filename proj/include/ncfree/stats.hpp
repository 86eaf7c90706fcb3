#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ncfree {

/// Neumaier-compensated sum in index order.
double compensated_sum(std::span<const double> v);
std::complex<double> compensated_sum(std::span<const std::complex<double>> v);

double mean(std::span<const double> v);
std::complex<double> mean(std::span<const std::complex<double>> v);
/// Standard error of the mean; equals the jackknife estimate for the mean.
double stderr_of_mean(std::span<const double> v);
double stderr_of_mean(std::span<const std::complex<double>> v);
/// Delete-one jackknife standard error of an arbitrary statistic.
double jackknife_stderr(std::span<const double> v, double (*statistic)(std::span<const double>));

/// Linear-interpolation quantile (type 7); q in [0, 1].
double quantile(std::vector<double> v, double q);
double median(std::vector<double> v);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Least-squares slope of log(value) against log(N) with a percentile
/// bootstrap 95% interval over resampled points. Throws for fewer than
/// three points or nonpositive values.
SlopeFit fit_decay_slope(const std::vector<std::pair<double, double>>& points, int resamples = 2000,
                         std::uint64_t seed = 1);

struct HighProbResult {
  /// Smallest C with fraction(errors >= C eps) <= target.
  double C = 0.0;
  double target = 0.0;
  double exceedance = 0.0;
};

/// Requires at least 100 samples.
HighProbResult high_prob_check(const std::vector<double>& errors, double eps, double target_fraction);
/// Target fraction N^{-k}.
HighProbResult high_prob_check(const std::vector<double>& errors, double eps, double N, double k);

}  // namespace ncfree
