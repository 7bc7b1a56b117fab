#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "irsim/channel.hpp"
#include "irsim/errors.hpp"
#include "irsim/types.hpp"

namespace irsim {

/// Gamma function on the positive axis (all arguments arising in the
/// closed forms are positive). Relative error is well below 1e-10 on (0, 50].
template <typename Scalar>
Scalar gamma_fn(Scalar x) {
  if (!(x > Scalar(0))) {
    throw InvalidParameterError("gamma_fn requires a positive argument");
  }
  return std::tgamma(x);
}

/// Exact binomial coefficient for n <= 64 (fits 64-bit for all k).
inline std::uint64_t binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) throw InvalidParameterError("binomial: need 0 <= k <= n");
  if (n > 64) throw InvalidParameterError("binomial: n <= 64 supported");
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // running product C(n-k+i, i) is integral; widen to keep the step exact
    const unsigned __int128 numer =
        static_cast<unsigned __int128>(result) * static_cast<std::uint64_t>(n - k + i);
    result = static_cast<std::uint64_t>(numer / static_cast<std::uint64_t>(i));
  }
  return result;
}

/// Ascending-order statistics: CDF of the rank-th smallest of num_users
/// i.i.d. variables with marginal CDF value f, written as the alternating
/// binomial expansion so it matches the closed forms term by term.
template <typename Scalar>
Scalar ordered_cdf_transform(Scalar f, int rank, int num_users) {
  if (rank < 1 || rank > num_users) {
    throw InvalidParameterError("rank must lie in [1, num_users]");
  }
  const Scalar prefactor =
      Scalar(rank) * static_cast<Scalar>(binomial(num_users, rank));
  Scalar sum = Scalar(0);
  for (int i = 0; i <= num_users - rank; ++i) {
    const Scalar term = static_cast<Scalar>(binomial(num_users - rank, i)) /
                        Scalar(rank + i) * std::pow(f, Scalar(rank + i));
    sum += (i % 2 == 0) ? term : -term;
  }
  return prefactor * sum;
}

// Small-gain asymptotic constants of the equivalent channel. The cascade
// part is the sum of num_elements i.i.d. products of the two hop magnitudes;
// its CDF behaves like scale * y^exponent near zero, with the scale depending
// on whether phases are quantized (worst-case coherent floor) or continuous.
template <typename Scalar>
struct AsymptoticConstants {
  Scalar shape_min = Scalar(0);       // smaller of the two hop shapes
  Scalar shape_max = Scalar(0);       // larger of the two hop shapes
  Scalar coherent_floor = Scalar(0);  // beta * cos(pi / 2^b); beta when continuous

  Scalar element_density_scale = Scalar(0);  // per-element small-q density scale
  Scalar cascade_cdf_scale = Scalar(0);      // unit-amplitude cascade-sum CDF scale

  Scalar gain_exponent = Scalar(0);          // 2 * shape_min * num_elements
  Scalar outage_upper_scale = Scalar(0);     // quantized floor (upper bound)
  Scalar outage_lower_scale = Scalar(0);     // coherent continuous (lower bound)

  // Direct-link variants; NaN when the scenario has no direct path.
  Scalar direct_gain_exponent = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar direct_cascade_cdf_scale = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar direct_outage_upper_scale = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar direct_outage_lower_scale = std::numeric_limits<Scalar>::quiet_NaN();
};

template <typename Scalar>
AsymptoticConstants<Scalar> constants(const ScenarioParams<Scalar>& params) {
  params.validate();
  const Scalar m_a = params.bs_irs.m;
  const Scalar m_b = params.irs_ud.m;
  if (m_a == m_b) {
    throw UnsupportedParametersError(
        "closed forms need distinct hop shapes (equal shapes hit a gamma pole)");
  }
  if (!params.resolution.is_continuous() && params.resolution.bit_count() < 2) {
    throw UnsupportedParametersError(
        "closed forms need b >= 2 (b = 1 collapses the coherent floor)");
  }
  if (params.bs_irs.omega != Scalar(1) || params.irs_ud.omega != Scalar(1) ||
      (params.has_direct_link() && params.direct.omega != Scalar(1))) {
    throw UnsupportedParametersError(
        "closed forms assume unit mean-square magnitude on every link");
  }

  AsymptoticConstants<Scalar> c;
  c.shape_min = std::min(m_a, m_b);
  c.shape_max = std::max(m_a, m_b);
  const Scalar beta = params.reflection_amplitude;
  c.coherent_floor =
      params.resolution.is_continuous()
          ? beta
          : beta * std::cos(static_cast<Scalar>(kTwoPi / 2) /
                            Scalar(1 << params.resolution.bit_count()));

  const Scalar k = Scalar(params.num_elements);
  const Scalar ms = c.shape_min, ml = c.shape_max;
  auto lg = [](Scalar x) { return std::lgamma(x); };

  // Work in logs; the element scale is exponentiated K times.
  const Scalar log_element =
      Scalar(0.5) * std::log(Scalar(kTwoPi / 2)) +
      (ms - ml + Scalar(1)) * std::log(Scalar(4)) + ms * std::log(ms * ml) +
      lg(Scalar(2) * ms) + lg(Scalar(2) * (ml - ms)) - lg(ms) - lg(ml) -
      lg(ml - ms + Scalar(0.5));
  c.element_density_scale = std::exp(log_element);

  c.gain_exponent = Scalar(2) * ms * k;
  const Scalar log_cascade =
      k * log_element - std::log(c.gain_exponent) - lg(c.gain_exponent);
  c.cascade_cdf_scale = std::exp(log_cascade);
  c.outage_upper_scale =
      std::exp(log_cascade - c.gain_exponent * std::log(c.coherent_floor));
  c.outage_lower_scale =
      std::exp(log_cascade - c.gain_exponent * std::log(beta));

  if (params.has_direct_link()) {
    const Scalar mh = params.direct.m;
    c.direct_gain_exponent = Scalar(2) * mh + c.gain_exponent;
    const Scalar log_direct = mh * std::log(Scalar(2) * mh) + lg(Scalar(2) * mh) +
                              k * log_element - std::log(c.direct_gain_exponent) -
                              lg(mh) - lg(c.direct_gain_exponent);
    c.direct_cascade_cdf_scale = std::exp(log_direct);
    c.direct_outage_upper_scale =
        std::exp(log_direct - c.gain_exponent * std::log(c.coherent_floor));
    c.direct_outage_lower_scale =
        std::exp(log_direct - c.gain_exponent * std::log(beta));
  }
  return c;
}

// Which asymptotic ordered CDF to evaluate: the quantized case is only
// available as the CDF of the gain's coherent-floor lower bound (an upper
// bound on outage); the continuous case is exact.
enum class CdfMode { kUpperViaLowerBoundCdf, kContinuousExact };

/// Small-argument CDF of the rank-th ordered equivalent gain.
template <typename Scalar>
Scalar ordered_gain_cdf(Scalar gain, int rank,
                        const ScenarioParams<Scalar>& params, CdfMode mode) {
  if (!(gain >= Scalar(0))) throw InvalidParameterError("gain must be >= 0");
  const AsymptoticConstants<Scalar> c = constants(params);
  Scalar scale, exponent;
  if (params.has_direct_link()) {
    scale = (mode == CdfMode::kUpperViaLowerBoundCdf) ? c.direct_outage_upper_scale
                                                      : c.direct_outage_lower_scale;
    exponent = c.direct_gain_exponent;
  } else {
    scale = (mode == CdfMode::kUpperViaLowerBoundCdf) ? c.outage_upper_scale
                                                      : c.outage_lower_scale;
    exponent = c.gain_exponent;
  }
  const Scalar marginal = scale * std::pow(gain, exponent);
  return ordered_cdf_transform(marginal, rank, params.num_users);
}

template <typename Scalar>
struct NomaConfig {
  ArrayX<Scalar> power_fractions;  // descending, sums to one
  ArrayX<Scalar> target_rates;     // bps/Hz per user

  int num_users() const { return static_cast<int>(power_fractions.size()); }

  void validate() const {
    const Eigen::Index n = power_fractions.size();
    if (n < 1 || target_rates.size() != n) {
      throw InvalidParameterError("need matching non-empty fractions and rates");
    }
    if (std::abs(power_fractions.sum() - Scalar(1)) > Scalar(1e-12)) {
      throw InvalidParameterError("power fractions must sum to 1");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(power_fractions[i] > Scalar(0))) {
        throw InvalidParameterError("power fractions must be positive");
      }
      if (i + 1 < n && !(power_fractions[i] > power_fractions[i + 1])) {
        throw InvalidParameterError("power fractions must be strictly descending");
      }
      if (!(target_rates[i] > Scalar(0))) {
        throw InvalidParameterError("target rates must be positive");
      }
    }
  }
};

// Squared-gain decoding requirements. Entry (n, l), l <= n, is the squared
// equivalent gain user n+1 needs to decode message l+1 through interference
// cancellation; max_threshold is the binding one per user. All entries scale
// as 1/snr.
template <typename Scalar>
struct NomaThresholds {
  Scalar snr = Scalar(0);                                    // linear
  ArrayX<Scalar> target_sinr;                                // 2^rate - 1
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> message_threshold;
  ArrayX<Scalar> max_threshold;
};

template <typename Scalar>
NomaThresholds<Scalar> noma_thresholds(const ArrayX<Scalar>& power_fractions,
                                       const ArrayX<Scalar>& target_rates,
                                       Scalar snr) {
  NomaConfig<Scalar> cfg{power_fractions, target_rates};
  cfg.validate();
  if (!(snr > Scalar(0))) throw InvalidParameterError("snr must be positive");
  const int n = cfg.num_users();

  NomaThresholds<Scalar> t;
  t.snr = snr;
  t.target_sinr.resize(n);
  for (int i = 0; i < n; ++i) t.target_sinr[i] = std::exp2(target_rates[i]) - Scalar(1);

  ArrayX<Scalar> suffix(n);  // suffix[l] = sum of fractions after l
  Scalar acc = Scalar(0);
  for (int l = n - 1; l >= 0; --l) {
    suffix[l] = acc;
    acc += power_fractions[l];
  }

  const Scalar nan = std::numeric_limits<Scalar>::quiet_NaN();
  t.message_threshold.setConstant(n, n, nan);
  t.max_threshold.resize(n);
  for (int user = 0; user < n; ++user) {
    Scalar worst = Scalar(0);
    for (int l = 0; l <= user; ++l) {
      const Scalar denom = power_fractions[l] - t.target_sinr[l] * suffix[l];
      if (l < n - 1 && !(denom > Scalar(0))) {
        throw InfeasibleAllocationError(
            "interference cancellation infeasible: fraction " +
            std::to_string(l + 1) + " cannot clear its target");
      }
      const Scalar threshold = t.target_sinr[l] / (snr * denom);
      t.message_threshold(user, l) = threshold;
      worst = std::max(worst, threshold);
    }
    t.max_threshold[user] = worst;
  }
  return t;
}

template <typename Scalar>
NomaThresholds<Scalar> noma_thresholds(const NomaConfig<Scalar>& cfg, Scalar snr) {
  return noma_thresholds(cfg.power_fractions, cfg.target_rates, snr);
}

/// Shared-block target SINR when every user gets a 1/N slice: 2^(N*rate) - 1.
template <typename Scalar>
Scalar oma_target_sinr(int num_users, Scalar rate) {
  if (num_users < 1 || !(rate > Scalar(0))) {
    throw InvalidParameterError("oma target needs num_users >= 1 and rate > 0");
  }
  return std::exp2(Scalar(num_users) * rate) - Scalar(1);
}

template <typename Scalar>
struct BoundSet {
  Scalar upper = Scalar(0);
  Scalar lower = Scalar(0);
  Scalar diversity = Scalar(0);
  MultipleAccess scheme = MultipleAccess::kNoma;
  Scenario scenario = Scenario::kNoDirectLink;
  int rank = 1;  // ordered user index, 1-based
};

/// High-SNR asymptotic outage bounds for the rank-th ordered user under
/// interference cancellation. Lower bound doubles as the continuous-phase
/// asymptote.
template <typename Scalar>
BoundSet<Scalar> outage_bounds_noma(int rank, const ScenarioParams<Scalar>& params,
                                    const NomaThresholds<Scalar>& thresholds) {
  const int n = params.num_users;
  if (rank < 1 || rank > n) throw InvalidParameterError("rank must lie in [1, N]");
  if (thresholds.max_threshold.size() != n) {
    throw LengthMismatchError("thresholds sized for a different user count");
  }
  const AsymptoticConstants<Scalar> c = constants(params);
  const bool direct = params.has_direct_link();
  const Scalar upper_scale = direct ? c.direct_outage_upper_scale : c.outage_upper_scale;
  const Scalar lower_scale = direct ? c.direct_outage_lower_scale : c.outage_lower_scale;
  const Scalar order = (direct ? c.direct_gain_exponent : c.gain_exponent) / Scalar(2);

  const Scalar binding = thresholds.max_threshold[rank - 1];
  const Scalar combinations = static_cast<Scalar>(binomial(n, rank));
  const Scalar threshold_power = std::pow(binding, Scalar(rank) * order);

  BoundSet<Scalar> b;
  b.scheme = MultipleAccess::kNoma;
  b.scenario = params.scenario;
  b.rank = rank;
  b.diversity = Scalar(rank) * order;
  b.upper = combinations * std::pow(upper_scale, Scalar(rank)) * threshold_power;
  b.lower = combinations * std::pow(lower_scale, Scalar(rank)) * threshold_power;
  return b;
}

/// Same-rate orthogonal access baseline; every user sees the same bounds.
template <typename Scalar>
BoundSet<Scalar> outage_bounds_oma(const ScenarioParams<Scalar>& params,
                                   Scalar rate, Scalar snr) {
  if (!(snr > Scalar(0))) throw InvalidParameterError("snr must be positive");
  const AsymptoticConstants<Scalar> c = constants(params);
  const bool direct = params.has_direct_link();
  const Scalar upper_scale = direct ? c.direct_outage_upper_scale : c.outage_upper_scale;
  const Scalar lower_scale = direct ? c.direct_outage_lower_scale : c.outage_lower_scale;
  const Scalar order = (direct ? c.direct_gain_exponent : c.gain_exponent) / Scalar(2);

  const Scalar target = oma_target_sinr(params.num_users, rate);
  const Scalar factor = std::pow(target / snr, order);

  BoundSet<Scalar> b;
  b.scheme = MultipleAccess::kOma;
  b.scenario = params.scenario;
  b.rank = 1;
  b.diversity = order;
  b.upper = upper_scale * factor;
  b.lower = lower_scale * factor;
  return b;
}

/// High-SNR log-log outage slope. Identical for quantized and continuous
/// phases and independent of the reflection amplitude.
template <typename Scalar>
Scalar diversity_order(MultipleAccess scheme, Scenario scenario, int rank,
                       const ScenarioParams<Scalar>& params) {
  params.validate();
  if (rank < 1 || rank > params.num_users) {
    throw InvalidParameterError("rank must lie in [1, N]");
  }
  const Scalar shape_min = std::min(params.bs_irs.m, params.irs_ud.m);
  Scalar base = shape_min * Scalar(params.num_elements);
  if (scenario == Scenario::kWithDirectLink) base += params.direct.m;
  return scheme == MultipleAccess::kNoma ? Scalar(rank) * base : base;
}

using AsymptoticConstantsd = AsymptoticConstants<double>;
using NomaConfigd = NomaConfig<double>;
using NomaThresholdsd = NomaThresholds<double>;
using BoundSetd = BoundSet<double>;

}  // namespace irsim
