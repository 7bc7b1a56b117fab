#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "irsim/fading.hpp"
#include "irsim/rng.hpp"
#include "support/stats.hpp"

using namespace irsim;
namespace ts = irsim::testsupport;

namespace {
constexpr std::size_t kBig = 1'000'000;
// chi-square(63) 0.999 quantile; uniformity tests reject above this
constexpr double kChi2Crit63 = 103.45;
}  // namespace

TEST_CASE("identical seed and stream reproduce the identical sequence") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  RngStream c(42, 7), d(42, 7);
  const FadingParam<double> p{1.5, 1.0};
  for (int i = 0; i < 1000; ++i) {
    CHECK(sample_nakagami(p, c) == sample_nakagami(p, d));
  }
}

TEST_CASE("distinct stream ids decorrelate") {
  RngStream a(42, 0), b(42, 1);
  std::vector<double> xs(kBig), ys(kBig);
  for (std::size_t i = 0; i < kBig; ++i) {
    xs[i] = a.uniform();
    ys[i] = b.uniform();
  }
  CHECK(std::abs(ts::pearson_correlation(xs, ys)) < 0.005);
}

TEST_CASE("uniform stays in [0,1), normal has unit moments") {
  RngStream rng(1, 0);
  std::vector<double> zs(kBig);
  for (std::size_t i = 0; i < kBig; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    zs[i] = rng.normal();
  }
  const auto mv = ts::mean_var(zs);
  CHECK(std::abs(mv.mean) < 3.0 * mv.se_mean());
  CHECK(mv.var == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("squared magnitude has mean omega across shapes") {
  for (const double m : {0.5, 1.0, 2.0, 3.5}) {
    const FadingParam<double> p{m, 1.0};
    RngStream rng(9, static_cast<std::uint64_t>(m * 10));
    std::vector<double> sq(kBig);
    for (auto& x : sq) {
      const double mag = sample_nakagami(p, rng);
      x = mag * mag;
    }
    const auto mv = ts::mean_var(sq);
    INFO("m = ", m);
    CHECK(std::abs(mv.mean - 1.0) < 3.0 * mv.se_mean());
  }
}

TEST_CASE("unit-shape squared magnitude is exponential with mean one") {
  const FadingParam<double> p{1.0, 1.0};
  RngStream rng(11, 0);
  double sum = 0.0;
  for (std::size_t i = 0; i < kBig; ++i) {
    const double mag = sample_nakagami(p, rng);
    sum += mag * mag;
  }
  const double mean = sum / kBig;
  CHECK(mean > 0.997);
  CHECK(mean < 1.003);
}

TEST_CASE("shape-two squared magnitude has variance omega^2/m") {
  const FadingParam<double> p{2.0, 1.0};
  RngStream rng(12, 0);
  std::vector<double> sq(kBig);
  for (auto& x : sq) {
    const double mag = sample_nakagami(p, rng);
    x = mag * mag;
  }
  const auto mv = ts::mean_var(sq);
  // se of the sample variance of gamma(2, 1/2): sqrt((mu4 - var^2)/n)
  CHECK(std::abs(mv.var - 0.5) < 0.0035);
}

TEST_CASE("omega scales samples by sqrt(omega) under a matched stream") {
  const double scale = 4.0;
  RngStream a(3, 5), b(3, 5);
  const FadingParam<double> unit{1.7, 1.0};
  const FadingParam<double> scaled{1.7, scale};
  for (int i = 0; i < 1000; ++i) {
    const double x = sample_nakagami(unit, a);
    const double y = sample_nakagami(scaled, b);
    CHECK(y == doctest::Approx(std::sqrt(scale) * x).epsilon(1e-12));
  }
}

TEST_CASE("unit shape reduces to Rayleigh") {
  const FadingParam<double> p{1.0, 1.0};
  RngStream rng(13, 0);
  std::vector<double> mags(kBig);
  for (auto& x : mags) x = sample_nakagami(p, rng);
  const double d = ts::ks_distance(
      std::move(mags), [](double x) { return 1.0 - std::exp(-x * x); });
  CHECK(d < 0.005);
}

TEST_CASE("coefficient phase is uniform and independent of magnitude") {
  const FadingParam<double> p{2.0, 1.0};
  RngStream rng(14, 0);
  std::vector<double> phases(kBig), mags(kBig);
  for (std::size_t i = 0; i < kBig; ++i) {
    const auto c = sample_coefficient(p, rng);
    REQUIRE(c.phase >= 0.0);
    REQUIRE(c.phase < kTwoPi);
    REQUIRE(c.magnitude >= 0.0);
    phases[i] = c.phase;
    mags[i] = c.magnitude;
  }
  CHECK(ts::chi_square_uniform(phases, 0.0, kTwoPi, 64) < kChi2Crit63);
  CHECK(std::abs(ts::pearson_correlation(mags, phases)) < 0.01);
}

TEST_CASE("invalid fading parameters are rejected") {
  RngStream rng(1, 1);
  CHECK_THROWS_AS(sample_nakagami(FadingParam<double>{0.4, 1.0}, rng),
                  InvalidParameterError);
  CHECK_THROWS_AS(sample_nakagami(FadingParam<double>{1.0, 0.0}, rng),
                  InvalidParameterError);
  CHECK_THROWS_AS(sample_nakagami(FadingParam<double>{1.0, -2.0}, rng),
                  InvalidParameterError);
  CHECK_THROWS_AS(rng.gamma(0.0, 1.0), InvalidParameterError);
}

TEST_CASE("sampled link arrays carry matching sizes") {
  RngStream rng(2, 2);
  const auto links = sample_links(FadingParam<double>{2.0, 1.0}, 5, rng);
  CHECK(links.size() == 5);
  CHECK(links.magnitude.size() == 5);
  CHECK(links.phase.size() == 5);
  const auto complex_view = links.value();
  for (Eigen::Index k = 0; k < 5; ++k) {
    CHECK(std::abs(complex_view[k]) == doctest::Approx(links.magnitude[k]));
  }
}
