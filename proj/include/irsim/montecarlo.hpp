#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "irsim/analytic.hpp"
#include "irsim/channel.hpp"
#include "irsim/errors.hpp"
#include "irsim/rng.hpp"

namespace irsim {

// Below this many observed failures an estimate is flagged as unreliable
// rather than reported as a meaningful probability.
inline constexpr std::uint64_t kMinFailures = 20;

// 95% Wilson score interval; stays sane at zero or few failures where the
// plain normal interval collapses.
inline std::pair<double, double> wilson_interval(std::uint64_t failures,
                                                 std::uint64_t trials) {
  if (trials == 0) throw InvalidParameterError("interval needs trials >= 1");
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(failures) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct OutageEstimate {
  double p_hat = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int user_rank = 1;   // ordered index under SIC, plain index otherwise
  double rho_db = 0.0;

  bool sufficient_failures() const { return failures >= kMinFailures; }
};

inline OutageEstimate make_estimate(std::uint64_t failures, std::uint64_t trials,
                                    int user_rank, double rho_db) {
  OutageEstimate e;
  e.failures = failures;
  e.trials = trials;
  e.p_hat = static_cast<double>(failures) / static_cast<double>(trials);
  std::tie(e.ci_low, e.ci_high) = wilson_interval(failures, trials);
  e.user_rank = user_rank;
  e.rho_db = rho_db;
  return e;
}

struct MonteCarloOptions {
  std::uint64_t seed = 1;
  std::uint64_t stream_block = 0;  // disjoint blocks keep sweep points independent
  GainPath path = GainPath::kFull;
};

namespace detail {

inline constexpr std::uint64_t kBatchTrials = std::uint64_t(1) << 16;
inline constexpr std::uint64_t kBatchStride = std::uint64_t(1) << 20;

inline int worker_count() {
  if (const char* env = std::getenv("SIM_WORKERS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1 && parsed <= 256) return static_cast<int>(parsed);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

// Fixed-size batches, each owning stream (seed, block*stride + index).
// States are reduced in batch order afterwards, so the result is a pure
// function of (seed, block, trials) regardless of the worker count.
template <typename State, typename BatchFn>
std::vector<State> run_batches(std::uint64_t trials, const MonteCarloOptions& opts,
                               const State& init, BatchFn&& fn) {
  if (trials == 0) throw InvalidParameterError("need trials >= 1");
  const std::uint64_t batches = (trials + kBatchTrials - 1) / kBatchTrials;
  if (batches > kBatchStride) {
    throw InvalidParameterError("trial count exceeds the stream block capacity");
  }
  std::vector<State> states(batches, init);
  std::atomic<std::uint64_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= batches) break;
      const std::uint64_t lo = i * kBatchTrials;
      const std::uint64_t count = std::min(kBatchTrials, trials - lo);
      RngStream rng(opts.seed, opts.stream_block * kBatchStride + i);
      fn(rng, count, states[i]);
    }
  };
  const int workers = std::min<std::uint64_t>(worker_count(), batches);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return states;
}

inline std::vector<OutageEstimate> reduce_failures(
    const std::vector<std::vector<std::uint64_t>>& per_batch, std::uint64_t trials,
    int num_users, double rho_db) {
  std::vector<std::uint64_t> totals(num_users, 0);
  for (const auto& batch : per_batch) {
    for (int u = 0; u < num_users; ++u) totals[u] += batch[u];
  }
  std::vector<OutageEstimate> out;
  out.reserve(num_users);
  for (int u = 0; u < num_users; ++u) {
    out.push_back(make_estimate(totals[u], trials, u + 1, rho_db));
  }
  return out;
}

}  // namespace detail

// Outage of every ordered user against explicit squared-gain thresholds.
// Exposed separately so degenerate thresholds can be exercised directly.
inline std::vector<OutageEstimate> estimate_outage_noma(
    const ScenarioParams<double>& params, const NomaThresholds<double>& thresholds,
    std::uint64_t trials, const MonteCarloOptions& opts = {}) {
  params.validate();
  const int n = params.num_users;
  if (thresholds.max_threshold.size() != n) {
    throw LengthMismatchError("thresholds sized for a different user count");
  }
  auto states = detail::run_batches(
      trials, opts, std::vector<std::uint64_t>(n, 0),
      [&](RngStream& rng, std::uint64_t count, std::vector<std::uint64_t>& fails) {
        for (std::uint64_t t = 0; t < count; ++t) {
          const GainVector<double> gv = draw_ordered_gains(params, rng, opts.path);
          for (int u = 0; u < n; ++u) {
            const double g = gv.gains[u];
            if (g * g < thresholds.max_threshold[u]) ++fails[u];
          }
        }
      });
  return detail::reduce_failures(states, trials, n,
                                 10.0 * std::log10(thresholds.snr));
}

// Orthogonal baseline: unordered per-user gains against the shared target.
inline std::vector<OutageEstimate> estimate_outage_oma(
    const ScenarioParams<double>& params, double target_sinr, double snr,
    std::uint64_t trials, const MonteCarloOptions& opts = {}) {
  params.validate();
  if (!(snr > 0.0) || !(target_sinr > 0.0)) {
    throw InvalidParameterError("snr and target must be positive");
  }
  const int n = params.num_users;
  const double threshold = target_sinr / snr;
  auto states = detail::run_batches(
      trials, opts, std::vector<std::uint64_t>(n, 0),
      [&](RngStream& rng, std::uint64_t count, std::vector<std::uint64_t>& fails) {
        for (std::uint64_t t = 0; t < count; ++t) {
          for (int u = 0; u < n; ++u) {
            const double g = sample_gain(params, rng, opts.path);
            if (g * g < threshold) ++fails[u];
          }
        }
      });
  return detail::reduce_failures(states, trials, n, 10.0 * std::log10(snr));
}

inline std::vector<OutageEstimate> estimate_outage(
    const ScenarioParams<double>& params, const NomaConfig<double>& noma,
    MultipleAccess scheme, double snr, std::uint64_t trials,
    const MonteCarloOptions& opts = {}) {
  noma.validate();
  if (noma.num_users() != params.num_users) {
    throw LengthMismatchError("allocation sized for a different user count");
  }
  if (scheme == MultipleAccess::kNoma) {
    return estimate_outage_noma(params, noma_thresholds(noma, snr), trials, opts);
  }
  const double rate = noma.target_rates[0];
  for (Eigen::Index i = 1; i < noma.target_rates.size(); ++i) {
    if (noma.target_rates[i] != rate) {
      throw InvalidParameterError("orthogonal baseline assumes equal target rates");
    }
  }
  return estimate_outage_oma(params, oma_target_sinr(params.num_users, rate), snr,
                             trials, opts);
}

// Mean quantized gain over mean continuous gain, both evaluated on the same
// channel draws. Continuous resolution trivially gives exactly 1.
inline double quantization_gain_ratio(const ScenarioParams<double>& params,
                                      std::uint64_t trials,
                                      const MonteCarloOptions& opts = {}) {
  params.validate();
  struct Sums {
    double quantized = 0.0;
    double continuous = 0.0;
  };
  ScenarioParams<double> continuous_params = params;
  continuous_params.resolution = PhaseResolution::continuous();
  auto states = detail::run_batches(
      trials, opts, Sums{},
      [&](RngStream& rng, std::uint64_t count, Sums& sums) {
        for (std::uint64_t t = 0; t < count; ++t) {
          if (opts.path == GainPath::kFull) {
            const UserChannel<double> ch = sample_user_channel(params, rng);
            sums.quantized += optimal_gain(params, ch);
            sums.continuous += optimal_gain(continuous_params, ch);
          } else {
            // residual shortcut: coherent sum plus uniform per-element errors
            const int k = params.num_elements;
            double coherent = 0.0;
            ArrayX<double> products(k);
            for (int i = 0; i < k; ++i) products[i] = sample_nakagami(params.bs_irs, rng);
            for (int i = 0; i < k; ++i) products[i] *= sample_nakagami(params.irs_ud, rng);
            coherent = products.sum();
            double direct_mag = 0.0;
            if (params.has_direct_link()) direct_mag = sample_nakagami(params.direct, rng);
            const double beta = params.reflection_amplitude;
            if (params.resolution.is_continuous()) {
              const double g = params.has_direct_link()
                                   ? direct_mag + beta * coherent
                                   : beta * coherent;
              sums.quantized += g;
              sums.continuous += g;
            } else {
              const double half_cell =
                  kTwoPi / (2.0 * (1 << params.resolution.bit_count()));
              std::complex<double> acc{0.0, 0.0};
              for (int i = 0; i < k; ++i) {
                acc += std::polar(products[i], rng.uniform(-half_cell, half_cell));
              }
              if (params.has_direct_link()) {
                sums.quantized += std::abs(std::complex<double>(direct_mag, 0.0) +
                                           beta * acc);
                sums.continuous += direct_mag + beta * coherent;
              } else {
                sums.quantized += beta * std::abs(acc);
                sums.continuous += beta * coherent;
              }
            }
          }
        }
      });
  double quantized = 0.0, continuous = 0.0;
  for (const auto& s : states) {
    quantized += s.quantized;
    continuous += s.continuous;
  }
  return quantized / continuous;
}

// Full-duplex decode-and-forward relay baseline. Each user is served by its
// own relay; the relay re-transmits in the same slot, so its receiver sees a
// residual self-interference channel scaled by the relay transmit power.
// A message is delivered only if both hops clear its target.
struct FdrParams {
  double power_split = 0.5;  // relay's share of the total power budget
  std::optional<FadingParam<double>> self_interference =
      FadingParam<double>{1.0, 0.01};
  FadingParam<double> bs_relay{2.0, 1.0};
  FadingParam<double> relay_ud{1.0, 1.0};

  void validate() const {
    if (!(power_split > 0.0) || !(power_split < 1.0)) {
      throw InvalidParameterError("power split must lie in (0, 1)");
    }
    bs_relay.validate();
    relay_ud.validate();
    if (self_interference) self_interference->validate();
  }
};

inline std::vector<OutageEstimate> estimate_outage_fdr(
    const ScenarioParams<double>& params, const NomaConfig<double>& noma,
    const FdrParams& fdr, double snr, std::uint64_t trials,
    const MonteCarloOptions& opts = {}) {
  noma.validate();
  fdr.validate();
  if (!(snr > 0.0)) throw InvalidParameterError("snr must be positive");
  const int n = noma.num_users();
  if (n != params.num_users) {
    throw LengthMismatchError("allocation sized for a different user count");
  }

  ArrayX<double> target(n), suffix(n);
  double acc = 0.0;
  for (int l = n - 1; l >= 0; --l) {
    target[l] = std::exp2(noma.target_rates[l]) - 1.0;
    suffix[l] = acc;
    acc += noma.power_fractions[l];
  }
  const double bs_power = (1.0 - fdr.power_split) * snr;
  const double relay_power = fdr.power_split * snr;

  auto states = detail::run_batches(
      trials, opts, std::vector<std::uint64_t>(n, 0),
      [&](RngStream& rng, std::uint64_t count, std::vector<std::uint64_t>& fails) {
        for (std::uint64_t t = 0; t < count; ++t) {
          for (int u = 0; u < n; ++u) {
            const double g_br = sample_nakagami(fdr.bs_relay, rng);
            const double g_ru = sample_nakagami(fdr.relay_ud, rng);
            double interference = 0.0;
            if (fdr.self_interference) {
              const double g_si = sample_nakagami(*fdr.self_interference, rng);
              interference = g_si * g_si * relay_power;
            }
            const double relay_rx = g_br * g_br * bs_power;
            const double ud_rx = g_ru * g_ru * relay_power;
            bool outage = false;
            for (int l = 0; l <= u; ++l) {
              const double relay_sinr = relay_rx * noma.power_fractions[l] /
                                        (relay_rx * suffix[l] + interference + 1.0);
              const double ud_sinr = ud_rx * noma.power_fractions[l] /
                                     (ud_rx * suffix[l] + 1.0);
              if (relay_sinr < target[l] || ud_sinr < target[l]) {
                outage = true;
                break;
              }
            }
            if (outage) ++fails[u];
          }
        }
      });
  return detail::reduce_failures(states, trials, n, 10.0 * std::log10(snr));
}

}  // namespace irsim
