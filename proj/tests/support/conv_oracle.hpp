#pragma once

// Independent numerical oracle for the small-gain channel statistics: the
// per-element product density in its Bessel-K form, K-fold grid convolution,
// and trapezoid CDF integration. Deliberately shares no code with the
// closed-form implementation it cross-checks.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace irsim::testsupport {

struct Grid {
  double step = 0.0;
  std::vector<double> values;  // density or cdf samples at i*step

  std::size_t size() const { return values.size(); }
};

// Density of |A||B| where A, B are unit-power Nakagami magnitudes with
// shapes ms < ml:  4 (ms ml)^((ms+ml)/2) / (G(ms) G(ml)) q^(ms+ml-1)
//                  K_{ml-ms}(2 sqrt(ms ml) q).
inline Grid product_magnitude_density(double ms, double ml, double step,
                                      std::size_t points) {
  Grid g;
  g.step = step;
  g.values.resize(points, 0.0);
  const double scale = 4.0 * std::pow(ms * ml, (ms + ml) / 2.0) /
                       (std::tgamma(ms) * std::tgamma(ml));
  const double order = ml - ms;  // K_v symmetric in v
  for (std::size_t i = 1; i < points; ++i) {
    const double q = static_cast<double>(i) * step;
    g.values[i] = scale * std::pow(q, ms + ml - 1.0) *
                  std::cyl_bessel_k(order, 2.0 * std::sqrt(ms * ml) * q);
  }
  return g;
}

// Unit-power Nakagami magnitude density 2 m^m / G(m) x^(2m-1) e^(-m x^2).
inline Grid nakagami_magnitude_density(double m, double step, std::size_t points) {
  Grid g;
  g.step = step;
  g.values.resize(points, 0.0);
  const double scale = 2.0 * std::pow(m, m) / std::tgamma(m);
  for (std::size_t i = 1; i < points; ++i) {
    const double x = static_cast<double>(i) * step;
    g.values[i] = scale * std::pow(x, 2.0 * m - 1.0) * std::exp(-m * x * x);
  }
  return g;
}

// Trapezoid-weighted convolution of two densities on the shared grid.
inline Grid convolve(const Grid& f, const Grid& g) {
  if (f.step != g.step || f.size() != g.size()) {
    throw std::invalid_argument("convolve: grids must match");
  }
  Grid out;
  out.step = f.step;
  out.values.assign(f.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += f.values[j] * g.values[i - j];
    acc -= 0.5 * (f.values[0] * g.values[i] + f.values[i] * g.values[0]);
    out.values[i] = acc * f.step;
  }
  return out;
}

inline Grid cdf_from_density(const Grid& f) {
  Grid out;
  out.step = f.step;
  out.values.assign(f.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    acc += 0.5 * (f.values[i - 1] + f.values[i]) * f.step;
    out.values[i] = acc;
  }
  return out;
}

inline double grid_value_at(const Grid& g, double x) {
  const double idx = x / g.step;
  const auto lo = static_cast<std::size_t>(idx);
  if (lo + 1 >= g.size()) throw std::out_of_range("grid_value_at: beyond grid");
  const double frac = idx - static_cast<double>(lo);
  return g.values[lo] * (1.0 - frac) + g.values[lo + 1] * frac;
}

// Least-squares slope of log(cdf) against log(q) over [q_lo, q_hi].
inline double loglog_slope(const Grid& cdf, double q_lo, double q_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 1; i < cdf.size(); ++i) {
    const double q = static_cast<double>(i) * cdf.step;
    if (q < q_lo || q > q_hi || cdf.values[i] <= 0.0) continue;
    const double x = std::log(q);
    const double y = std::log(cdf.values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 3) throw std::runtime_error("loglog_slope: not enough grid points");
  const double nn = static_cast<double>(n);
  return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
}

// CDF of the K-fold sum of product magnitudes, optionally convolved with a
// direct-path Nakagami magnitude.
inline Grid cascade_sum_cdf(double ms, double ml, int elements, double step,
                            std::size_t points, double direct_shape = 0.0) {
  const Grid element = product_magnitude_density(ms, ml, step, points);
  Grid density = element;
  for (int k = 1; k < elements; ++k) density = convolve(density, element);
  if (direct_shape > 0.0) {
    density = convolve(density, nakagami_magnitude_density(direct_shape, step, points));
  }
  return cdf_from_density(density);
}

}  // namespace irsim::testsupport
