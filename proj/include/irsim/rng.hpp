#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "irsim/errors.hpp"
#include "irsim/types.hpp"

namespace irsim {

// Counter-keyed random stream. A (seed, stream_id) pair fully determines the
// draw sequence, bit for bit, independent of platform stdlib details: the
// engine is mt19937_64 and all variate transforms are implemented here.
// Distinct stream_ids give statistically independent sequences, so parallel
// workers each own one stream and never share state.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {
    std::seed_seq sequence{
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(stream_id),
        static_cast<std::uint32_t>(stream_id >> 32)};
    engine_.seed(sequence);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = kTwoPi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Gamma variate, Marsaglia-Tsang squeeze; shapes below one use the
  // boosting identity gamma(k) = gamma(k+1) * U^(1/k).
  double gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) {
      throw InvalidParameterError("gamma variate requires shape > 0 and scale > 0");
    }
    if (shape < 1.0) {
      const double boost = std::pow(1.0 - uniform(), 1.0 / shape);
      return gamma_shape_ge_one(shape + 1.0) * boost * scale;
    }
    return gamma_shape_ge_one(shape) * scale;
  }

 private:
  double gamma_shape_ge_one(double shape) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace irsim
