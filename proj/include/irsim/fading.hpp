#pragma once

#include <cmath>
#include <complex>

#include "irsim/errors.hpp"
#include "irsim/rng.hpp"
#include "irsim/types.hpp"

namespace irsim {

// Nakagami-m magnitude fading: |X|^2 is gamma with shape m and mean omega.
// m = 1 is Rayleigh, larger m increasingly line-of-sight-like.
template <typename Scalar>
struct FadingParam {
  Scalar m;                        // shape, >= 0.5
  Scalar omega = Scalar(1);        // mean square magnitude, > 0

  void validate() const {
    if (!(m >= Scalar(0.5)) || !(omega > Scalar(0))) {
      throw InvalidParameterError(
          "fading parameter requires m >= 0.5 and omega > 0");
    }
  }
};

// One complex channel coefficient in polar form, phase in [0, 2*pi).
template <typename Scalar>
struct PolarCoeff {
  Scalar magnitude = Scalar(0);
  Scalar phase = Scalar(0);

  std::complex<Scalar> value() const {
    return std::polar(magnitude, phase);
  }
};

// K parallel coefficients kept as magnitude/phase arrays; element products
// and aligned sums only ever need those two pieces.
template <typename Scalar>
struct LinkArray {
  ArrayX<Scalar> magnitude;
  ArrayX<Scalar> phase;

  Eigen::Index size() const { return magnitude.size(); }

  ComplexArrayX<Scalar> value() const {
    ComplexArrayX<Scalar> out(magnitude.size());
    for (Eigen::Index k = 0; k < magnitude.size(); ++k) {
      out[k] = std::polar(magnitude[k], phase[k]);
    }
    return out;
  }
};

template <typename Scalar>
Scalar sample_nakagami(const FadingParam<Scalar>& p, RngStream& rng) {
  p.validate();
  const double power = rng.gamma(static_cast<double>(p.m),
                                 static_cast<double>(p.omega / p.m));
  return static_cast<Scalar>(std::sqrt(power));
}

// Magnitude first, then an independent uniform phase; the draw order is part
// of the reproducibility contract.
template <typename Scalar>
PolarCoeff<Scalar> sample_coefficient(const FadingParam<Scalar>& p,
                                      RngStream& rng) {
  PolarCoeff<Scalar> c;
  c.magnitude = sample_nakagami(p, rng);
  c.phase = static_cast<Scalar>(rng.uniform(0.0, kTwoPi));
  return c;
}

template <typename Scalar>
LinkArray<Scalar> sample_links(const FadingParam<Scalar>& p, Eigen::Index count,
                               RngStream& rng) {
  LinkArray<Scalar> links;
  links.magnitude.resize(count);
  links.phase.resize(count);
  for (Eigen::Index k = 0; k < count; ++k) {
    const PolarCoeff<Scalar> c = sample_coefficient(p, rng);
    links.magnitude[k] = c.magnitude;
    links.phase[k] = c.phase;
  }
  return links;
}

using FadingParamd = FadingParam<double>;
using PolarCoeffd = PolarCoeff<double>;
using LinkArrayd = LinkArray<double>;

}  // namespace irsim
