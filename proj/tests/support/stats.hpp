#pragma once

// Statistical helpers for the test suites: empirical distribution distances,
// simple hypothesis-test statistics, and moment summaries.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace irsim::testsupport {

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;  // unbiased
  std::size_t count = 0;
  double se_mean() const { return std::sqrt(var / static_cast<double>(count)); }
};

inline MeanVar mean_var(const std::vector<double>& xs) {
  MeanVar mv;
  mv.count = xs.size();
  for (const double x : xs) mv.mean += x;
  mv.mean /= static_cast<double>(xs.size());
  for (const double x : xs) mv.var += (x - mv.mean) * (x - mv.mean);
  mv.var /= static_cast<double>(xs.size() - 1);
  return mv;
}

// sup |F_empirical - F| over the sample points.
inline double ks_distance(std::vector<double> sample,
                          const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    sup = std::max(sup, std::abs(static_cast<double>(i + 1) / n - f));
    sup = std::max(sup, std::abs(static_cast<double>(i) / n - f));
  }
  return sup;
}

inline double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double sup = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    sup = std::max(sup, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
  }
  return sup;
}

// Pearson chi-square statistic for uniformity over [lo, hi).
inline double chi_square_uniform(const std::vector<double>& sample, double lo,
                                 double hi, int bins) {
  std::vector<double> counts(bins, 0.0);
  for (const double x : sample) {
    int bin = static_cast<int>((x - lo) / (hi - lo) * bins);
    if (bin < 0) bin = 0;
    if (bin >= bins) bin = bins - 1;
    counts[bin] += 1.0;
  }
  const double expected = static_cast<double>(sample.size()) / bins;
  double stat = 0.0;
  for (const double c : counts) stat += (c - expected) * (c - expected) / expected;
  return stat;
}

inline double pearson_correlation(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Empirical CDF evaluated at a point, from a pre-sorted sample.
inline double ecdf(const std::vector<double>& sorted, double x) {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) /
         static_cast<double>(sorted.size());
}

}  // namespace irsim::testsupport
