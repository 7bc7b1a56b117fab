#pragma once

#include <cmath>
#include <optional>

#include "irsim/errors.hpp"
#include "irsim/fading.hpp"
#include "irsim/types.hpp"

namespace irsim {

// Uniform 2^b-level codebook over [0, 2*pi); levels sit at cell centers
// (2i+1)*delta/2. A target is mapped to its half-open cell's center, so the
// signed error lies in (-delta/2, delta/2] with the boundary case landing on
// +delta/2.
template <typename Scalar>
struct PhaseCodebook {
  int bits = 0;
  int levels = 0;
  Scalar delta = Scalar(0);

  static PhaseCodebook with_bits(int b) {
    if (b < 1 || b > 30) {
      throw InvalidParameterError("codebook resolution must satisfy 1 <= b <= 30");
    }
    PhaseCodebook cb;
    cb.bits = b;
    cb.levels = 1 << b;
    cb.delta = static_cast<Scalar>(kTwoPi / cb.levels);
    return cb;
  }

  ArrayX<Scalar> level_values() const {
    ArrayX<Scalar> out(levels);
    for (int i = 0; i < levels; ++i) {
      out[i] = delta * (Scalar(i) + Scalar(0.5));
    }
    return out;
  }

  Scalar quantize(Scalar target) const {
    Scalar reduced = std::fmod(target, static_cast<Scalar>(kTwoPi));
    if (reduced < Scalar(0)) reduced += static_cast<Scalar>(kTwoPi);
    Scalar cell = std::floor(reduced / delta);
    if (cell >= Scalar(levels)) cell = Scalar(levels - 1);  // fp seam guard
    return delta * (cell + Scalar(0.5));
  }
};

template <typename Scalar>
Scalar quantize(Scalar target, const PhaseCodebook<Scalar>& cb) {
  return cb.quantize(target);
}

// Continuous mode is the absence of a codebook, not a sentinel bit count.
class PhaseResolution {
 public:
  static PhaseResolution continuous() { return PhaseResolution(std::nullopt); }
  static PhaseResolution bits(int b) {
    if (b < 1) throw InvalidParameterError("resolution bits must be >= 1");
    return PhaseResolution(b);
  }

  bool is_continuous() const noexcept { return !bits_.has_value(); }
  int bit_count() const {
    if (!bits_) throw InvalidParameterError("continuous resolution has no bit count");
    return *bits_;
  }

  bool operator==(const PhaseResolution&) const = default;

 private:
  explicit PhaseResolution(std::optional<int> b) : bits_(b) {}
  std::optional<int> bits_;
};

// Surface configuration actually applied to one user's reflection: common
// amplitude and one phase per element.
template <typename Scalar>
struct IrsSetting {
  Scalar beta = Scalar(1);  // amplitude reflection coefficient, (0, 1]
  ArrayX<Scalar> phases;

  Eigen::Index elements() const { return phases.size(); }
};

namespace detail {

template <typename Scalar>
Scalar wrap_two_pi(Scalar angle) {
  Scalar reduced = std::fmod(angle, static_cast<Scalar>(kTwoPi));
  if (reduced < Scalar(0)) reduced += static_cast<Scalar>(kTwoPi);
  return reduced;
}

}  // namespace detail

// Phase choice without a direct path: rotate every element product
// G_k * g_k onto the common reference angle, then snap to the codebook.
// In continuous mode the reference choice does not change the gain at all;
// in discrete mode it only reshuffles the residuals.
template <typename Scalar>
ArrayX<Scalar> align_phases(const LinkArray<Scalar>& bs_irs,
                            const LinkArray<Scalar>& irs_ud,
                            const PhaseResolution& resolution,
                            Scalar reference_phase = Scalar(0)) {
  if (bs_irs.size() != irs_ud.size()) {
    throw LengthMismatchError("link arrays must have equal element counts");
  }
  const Eigen::Index count = bs_irs.size();
  ArrayX<Scalar> phases(count);
  if (resolution.is_continuous()) {
    for (Eigen::Index k = 0; k < count; ++k) {
      phases[k] = detail::wrap_two_pi(reference_phase - bs_irs.phase[k] -
                                      irs_ud.phase[k]);
    }
    return phases;
  }
  const auto cb = PhaseCodebook<Scalar>::with_bits(resolution.bit_count());
  for (Eigen::Index k = 0; k < count; ++k) {
    phases[k] = cb.quantize(reference_phase - bs_irs.phase[k] - irs_ud.phase[k]);
  }
  return phases;
}

// Phase choice with a direct path: the reference angle is pinned to the
// direct coefficient so reflected terms add on top of it.
template <typename Scalar>
ArrayX<Scalar> align_phases_to_direct(const PolarCoeff<Scalar>& direct,
                                      const LinkArray<Scalar>& bs_irs,
                                      const LinkArray<Scalar>& irs_ud,
                                      const PhaseResolution& resolution) {
  return align_phases(bs_irs, irs_ud, resolution, direct.phase);
}

using IrsSettingd = IrsSetting<double>;
using PhaseCodebookd = PhaseCodebook<double>;

}  // namespace irsim
