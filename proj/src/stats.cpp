#include "ncfree/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ncfree/rng.hpp"

namespace ncfree {

double compensated_sum(std::span<const double> v) {
  double s = 0.0, c = 0.0;
  for (double x : v) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x)) {
      c += (s - t) + x;
    } else {
      c += (x - t) + s;
    }
    s = t;
  }
  return s + c;
}

std::complex<double> compensated_sum(std::span<const std::complex<double>> v) {
  std::vector<double> re, im;
  re.reserve(v.size());
  im.reserve(v.size());
  for (const auto& z : v) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return {compensated_sum(re), compensated_sum(im)};
}

double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean of empty sample");
  return compensated_sum(v) / static_cast<double>(v.size());
}

std::complex<double> mean(std::span<const std::complex<double>> v) {
  if (v.empty()) throw std::invalid_argument("mean of empty sample");
  return compensated_sum(v) / static_cast<double>(v.size());
}

double stderr_of_mean(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  std::vector<double> sq;
  sq.reserve(v.size());
  for (double x : v) sq.push_back((x - m) * (x - m));
  const double n = static_cast<double>(v.size());
  return std::sqrt(compensated_sum(sq) / (n - 1.0) / n);
}

double stderr_of_mean(std::span<const std::complex<double>> v) {
  if (v.size() < 2) return 0.0;
  const auto m = mean(v);
  std::vector<double> sq;
  sq.reserve(v.size());
  for (const auto& x : v) sq.push_back(std::norm(x - m));
  const double n = static_cast<double>(v.size());
  return std::sqrt(compensated_sum(sq) / (n - 1.0) / n);
}

double jackknife_stderr(std::span<const double> v, double (*statistic)(std::span<const double>)) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  std::vector<double> loo(n), buf;
  buf.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    buf.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) buf.push_back(v[j]);
    loo[i] = statistic(buf);
  }
  const double m = mean(loo);
  std::vector<double> sq;
  for (double x : loo) sq.push_back((x - m) * (x - m));
  return std::sqrt((static_cast<double>(n) - 1.0) / static_cast<double>(n) * compensated_sum(sq));
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

namespace {

std::pair<double, double> ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) return {std::numeric_limits<double>::quiet_NaN(), my};
  const double b = sxy / sxx;
  return {b, my - b * mx};
}

}  // namespace

SlopeFit fit_decay_slope(const std::vector<std::pair<double, double>>& points, int resamples, std::uint64_t seed) {
  if (points.size() < 3) throw std::invalid_argument("slope fit needs at least three points");
  std::vector<double> lx, ly;
  for (const auto& [n, v] : points) {
    if (!(n > 0.0) || !(v > 0.0)) throw std::invalid_argument("slope fit needs positive N and values");
    lx.push_back(std::log(n));
    ly.push_back(std::log(v));
  }
  const auto [b, a] = ols(lx, ly);
  if (std::isnan(b)) throw std::invalid_argument("slope fit needs at least two distinct N");
  SlopeFit fit{b, a, b, b};
  StreamGenerator g(SeedStream{seed, 0xB007u, 0, 0});
  std::vector<double> slopes;
  std::vector<double> bx(lx.size()), by(ly.size());
  for (int r = 0; r < resamples; ++r) {
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const auto j = static_cast<std::size_t>(g.next_u32() % lx.size());
      bx[i] = lx[j];
      by[i] = ly[j];
    }
    const auto [bb, ba] = ols(bx, by);
    if (!std::isnan(bb)) slopes.push_back(bb);
  }
  if (!slopes.empty()) {
    fit.ci_low = std::min(b, quantile(slopes, 0.025));
    fit.ci_high = std::max(b, quantile(slopes, 0.975));
  }
  return fit;
}

HighProbResult high_prob_check(const std::vector<double>& errors, double eps, double target_fraction) {
  if (errors.size() < 100) throw std::invalid_argument("high-probability check needs at least 100 samples");
  if (!(eps > 0.0)) throw std::invalid_argument("threshold scale must be positive");
  if (!(target_fraction >= 0.0 && target_fraction < 1.0)) throw std::invalid_argument("target fraction outside [0, 1)");
  std::vector<double> e = errors;
  for (double& x : e) x = std::abs(x);
  std::sort(e.begin(), e.end(), std::greater<>());
  const double n = static_cast<double>(e.size());
  // At most m samples may reach C eps: C must exceed the (m+1)-th largest.
  const auto m = static_cast<std::size_t>(std::floor(target_fraction * n + 1e-12));
  const double v = e[m];
  HighProbResult r;
  r.target = target_fraction;
  r.C = v == 0.0 ? 0.0 : std::nextafter(v / eps, std::numeric_limits<double>::infinity());
  std::size_t count = 0;
  for (double x : e)
    if (x != 0.0 && x / eps >= r.C) ++count;
  r.exceedance = static_cast<double>(count) / n;
  return r;
}

HighProbResult high_prob_check(const std::vector<double>& errors, double eps, double N, double k) {
  return high_prob_check(errors, eps, std::pow(N, -k));
}

}  // namespace ncfree
