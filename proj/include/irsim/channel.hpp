#pragma once

#include <algorithm>
#include <complex>
#include <numeric>

#include "irsim/errors.hpp"
#include "irsim/fading.hpp"
#include "irsim/phase.hpp"
#include "irsim/rng.hpp"
#include "irsim/types.hpp"

namespace irsim {

template <typename Scalar>
struct ScenarioParams {
  Scenario scenario = Scenario::kNoDirectLink;
  int num_users = 1;     // one surface per user
  int num_elements = 1;  // reflecting elements per surface
  PhaseResolution resolution = PhaseResolution::bits(3);
  Scalar reflection_amplitude = Scalar(0.9);
  FadingParam<Scalar> bs_irs{Scalar(2), Scalar(1)};
  FadingParam<Scalar> irs_ud{Scalar(1), Scalar(1)};
  FadingParam<Scalar> direct{Scalar(1), Scalar(1)};  // used with direct link only
  Scalar alignment_phase = Scalar(0);  // common reference angle, no-direct-link case

  bool has_direct_link() const { return scenario == Scenario::kWithDirectLink; }

  void validate() const {
    if (num_users < 1) throw InvalidParameterError("need at least one user");
    if (num_elements < 1) throw InvalidParameterError("need at least one element");
    if (!(reflection_amplitude > Scalar(0)) ||
        !(reflection_amplitude <= Scalar(1))) {
      throw InvalidParameterError("reflection amplitude must lie in (0, 1]");
    }
    bs_irs.validate();
    irs_ud.validate();
    if (has_direct_link()) direct.validate();
  }
};

// One user's channel draw; `direct` stays zero without a direct link.
template <typename Scalar>
struct UserChannel {
  LinkArray<Scalar> bs_irs;
  LinkArray<Scalar> irs_ud;
  PolarCoeff<Scalar> direct;
};

template <typename Scalar>
UserChannel<Scalar> sample_user_channel(const ScenarioParams<Scalar>& params,
                                        RngStream& rng) {
  UserChannel<Scalar> ch;
  ch.bs_irs = sample_links(params.bs_irs, params.num_elements, rng);
  ch.irs_ud = sample_links(params.irs_ud, params.num_elements, rng);
  if (params.has_direct_link()) {
    ch.direct = sample_coefficient(params.direct, rng);
  }
  return ch;
}

// |sum_k G_k g_k e^{j theta_k}| scaled by the reflection amplitude.
template <typename Scalar>
Scalar equivalent_gain(const LinkArray<Scalar>& bs_irs,
                       const LinkArray<Scalar>& irs_ud,
                       const IrsSetting<Scalar>& setting) {
  const Eigen::Index count = bs_irs.size();
  if (irs_ud.size() != count || setting.phases.size() != count) {
    throw LengthMismatchError("links and phase setting must have equal sizes");
  }
  std::complex<Scalar> acc{Scalar(0), Scalar(0)};
  for (Eigen::Index k = 0; k < count; ++k) {
    acc += std::polar(bs_irs.magnitude[k] * irs_ud.magnitude[k],
                      bs_irs.phase[k] + irs_ud.phase[k] + setting.phases[k]);
  }
  return setting.beta * std::abs(acc);
}

// Direct-path variant: |h + beta * sum_k G_k g_k e^{j theta_k}|.
template <typename Scalar>
Scalar equivalent_gain(const PolarCoeff<Scalar>& direct,
                       const LinkArray<Scalar>& bs_irs,
                       const LinkArray<Scalar>& irs_ud,
                       const IrsSetting<Scalar>& setting) {
  const Eigen::Index count = bs_irs.size();
  if (irs_ud.size() != count || setting.phases.size() != count) {
    throw LengthMismatchError("links and phase setting must have equal sizes");
  }
  std::complex<Scalar> acc = direct.value();
  for (Eigen::Index k = 0; k < count; ++k) {
    acc += setting.beta *
           std::polar(bs_irs.magnitude[k] * irs_ud.magnitude[k],
                      bs_irs.phase[k] + irs_ud.phase[k] + setting.phases[k]);
  }
  return std::abs(acc);
}

// Gain of one realization under the optimal phase choice for the scenario.
// Continuous resolution aligns perfectly, so the coherent closed form is
// used; discrete resolution quantizes and evaluates the full complex sum.
template <typename Scalar>
Scalar optimal_gain(const ScenarioParams<Scalar>& params,
                    const UserChannel<Scalar>& ch) {
  const Scalar beta = params.reflection_amplitude;
  if (params.resolution.is_continuous()) {
    const Scalar coherent =
        beta * (ch.bs_irs.magnitude * ch.irs_ud.magnitude).sum();
    return params.has_direct_link() ? ch.direct.magnitude + coherent : coherent;
  }
  IrsSetting<Scalar> setting;
  setting.beta = beta;
  if (params.has_direct_link()) {
    setting.phases = align_phases_to_direct(ch.direct, ch.bs_irs, ch.irs_ud,
                                            params.resolution);
    return equivalent_gain(ch.direct, ch.bs_irs, ch.irs_ud, setting);
  }
  setting.phases = align_phases(ch.bs_irs, ch.irs_ud, params.resolution,
                                params.alignment_phase);
  return equivalent_gain(ch.bs_irs, ch.irs_ud, setting);
}

// kFull draws complex coefficients and applies the quantized optimal phases.
// kResidual skips phases entirely and draws the per-element quantization
// residuals uniformly; distributionally equivalent, roughly twice as fast.
enum class GainPath { kFull, kResidual };

template <typename Scalar>
Scalar sample_gain(const ScenarioParams<Scalar>& params, RngStream& rng,
                   GainPath path = GainPath::kFull) {
  const Scalar beta = params.reflection_amplitude;
  if (path == GainPath::kFull) {
    const UserChannel<Scalar> ch = sample_user_channel(params, rng);
    return optimal_gain(params, ch);
  }
  const int count = params.num_elements;
  ArrayX<Scalar> products(count);
  for (int k = 0; k < count; ++k) products[k] = sample_nakagami(params.bs_irs, rng);
  for (int k = 0; k < count; ++k) products[k] *= sample_nakagami(params.irs_ud, rng);
  Scalar direct_mag = Scalar(0);
  if (params.has_direct_link()) direct_mag = sample_nakagami(params.direct, rng);
  if (params.resolution.is_continuous()) {
    const Scalar coherent = beta * products.sum();
    return params.has_direct_link() ? direct_mag + coherent : coherent;
  }
  const double half_cell = kTwoPi / (2.0 * (1 << params.resolution.bit_count()));
  std::complex<Scalar> acc{Scalar(0), Scalar(0)};
  for (int k = 0; k < count; ++k) {
    const Scalar residual = static_cast<Scalar>(rng.uniform(-half_cell, half_cell));
    acc += std::polar(products[k], residual);
  }
  if (params.has_direct_link()) {
    return std::abs(std::complex<Scalar>(direct_mag, Scalar(0)) + beta * acc);
  }
  return beta * std::abs(acc);
}

// Per-trial equivalent gains of all users, ascending. Ties (measure zero for
// continuous fading) break by original user index, so the permutation is
// deterministic.
template <typename Scalar>
struct GainVector {
  ArrayX<Scalar> gains;  // sorted ascending
  ArrayXi order;         // order[i] = original user index of gains[i]
};

template <typename Scalar>
GainVector<Scalar> draw_ordered_gains(const ScenarioParams<Scalar>& params,
                                      RngStream& rng,
                                      GainPath path = GainPath::kFull) {
  params.validate();
  const int n = params.num_users;
  ArrayX<Scalar> unordered(n);
  for (int u = 0; u < n; ++u) unordered[u] = sample_gain(params, rng, path);

  GainVector<Scalar> out;
  out.order.resize(n);
  std::iota(out.order.data(), out.order.data() + n, 0);
  std::stable_sort(out.order.data(), out.order.data() + n,
                   [&](int a, int b) { return unordered[a] < unordered[b]; });
  out.gains.resize(n);
  for (int i = 0; i < n; ++i) out.gains[i] = unordered[out.order[i]];
  return out;
}

using ScenarioParamsd = ScenarioParams<double>;
using UserChanneld = UserChannel<double>;
using GainVectord = GainVector<double>;

}  // namespace irsim
