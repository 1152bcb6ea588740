#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "moralnet/error.hpp"

namespace moralnet::stats {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// 1-based ranks; tied values share the mean of the ranks they span.
inline std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double mean(std::span<const double> xs) {
  if (xs.empty()) return kNaN;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Pearson correlation; NaN when either side has zero variance.
inline double pearson(std::span<const double> xs, std::span<const double> ys) {
  const double mx = mean(xs), my = mean(ys);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) return kNaN;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Two-sided p-value of a correlation coefficient under the t approximation
// with n - 2 degrees of freedom.
inline double correlation_p_value(double r, std::size_t n) {
  if (std::isnan(r) || n < 3) return kNaN;
  if (std::abs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = r * std::sqrt(df / (1.0 - r * r));
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

struct Correlation {
  double rho = kNaN;
  double p = kNaN;
  std::size_t n = 0;

  // False when either input had zero variance.
  bool defined() const { return !std::isnan(rho); }
};

inline Correlation spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ValidationError("spearman: inputs differ in length");
  if (xs.size() < 3) throw ValidationError("spearman: at least 3 pairs required");
  auto rx = average_ranks(xs);
  auto ry = average_ranks(ys);
  Correlation c;
  c.n = xs.size();
  c.rho = pearson(rx, ry);
  c.p = correlation_p_value(c.rho, c.n);
  return c;
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) return kNaN;
  const std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
  const double upper = xs[mid];
  if (xs.size() % 2) return upper;
  const double lower = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

struct MadResult {
  std::vector<double> values;
  double median = 0;
  double mad = 0;
  bool degenerate = false;  // MAD == 0, every output is 0
};

// (x - median) / MAD with MAD = median |x - median|, no consistency constant.
inline MadResult mad_normalize(std::span<const double> xs) {
  if (xs.size() < 2) throw ValidationError("mad_normalize: at least 2 values required");
  MadResult r;
  r.median = median({xs.begin(), xs.end()});
  std::vector<double> dev(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = std::abs(xs[i] - r.median);
  r.mad = median(dev);
  r.values.assign(xs.size(), 0.0);
  if (r.mad == 0) {
    r.degenerate = true;
    return r;
  }
  for (std::size_t i = 0; i < xs.size(); ++i) r.values[i] = (xs[i] - r.median) / r.mad;
  return r;
}

inline double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return kNaN;
  const double m = mean(xs);
  double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

struct TTest {
  double t = kNaN;
  double df = kNaN;
  double p = kNaN;
  bool significant = false;
};

// Welch's unequal-variance two-sample t-test, two-sided.
inline TTest welch_t_test(std::span<const double> a, std::span<const double> b, double alpha = 0.05) {
  TTest r;
  if (a.size() < 2 || b.size() < 2) return r;
  const double va = sample_variance(a) / static_cast<double>(a.size());
  const double vb = sample_variance(b) / static_cast<double>(b.size());
  const double diff = mean(a) - mean(b);
  if (va + vb == 0) {
    if (diff != 0) {
      r.t = diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      r.p = 0.0;
      r.significant = true;
    }
    return r;
  }
  r.t = diff / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) /
         (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
  boost::math::students_t dist(r.df);
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
  r.significant = r.p < alpha;
  return r;
}

}  // namespace moralnet::stats
