#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "mcvd/diffusion.hpp"
#include "mcvd/modulation.hpp"
#include "mcvd/rng.hpp"
#include "mcvd/ser.hpp"

namespace mcvd {

struct NoiseModel {
  double sigma = 0.0;  // molecule-count units
};

/// One point-to-point Monte Carlo run.
struct LinkConfig {
  ChannelSpec channel;
  QcskScheme scheme;
  Thresholds thresholds;
  double symbol_duration = 0.15;    // s
  double sampling_duration = 0.15;  // s, <= symbol_duration
  long n_symbols = 50000;
  std::optional<double> snr_db;  // nullopt = noiseless
  std::uint64_t rng_seed = 1;
  int isi_length = 0;  // 0 = auto (default_isi_length)
  int workers = 1;

  void validate() const;
};

/// Noise std-dev from SNR in dB. Signal power is the mean expected
/// first-slot arrival count over equiprobable symbols.
double noise_sigma_from_snr(double snr_db, const QcskScheme& scheme, double p1);

/// Sum of independent Binomial(emission_history[k], slot_probs[k]) draws.
/// History is most-recent-first; the current slot's emission is element 0.
long sample_arrivals(std::span<const long> emission_history,
                     std::span<const double> slot_probs, Rng& rng);

/// Arrival count plus one Gaussian noise draw; may be negative.
double observe(long arrivals, const NoiseModel& noise, Rng& rng);

/// Per-slot arrival probabilities with a sampling window that may be shorter
/// than the slot: p_k = F((k-1) t_s + t_samp) - F((k-1) t_s). Equals
/// slot_hit_probabilities when t_samp == t_s.
std::vector<double> sampling_slot_probabilities(const ChannelSpec& channel,
                                                double symbol_duration,
                                                double sampling_duration,
                                                int isi_length);

SerEstimate simulate_link(const LinkConfig& config);

namespace detail {

/// Symbols are simulated in fixed-size blocks with per-block RNG substreams
/// so results are identical for any worker count. Each block re-runs its own
/// warm-up (excluded from counting).
constexpr long kBlockSize = 5000;

/// fn(block_index, block_symbols, out_estimate); merged by addition.
template <typename Fn>
SerEstimate run_blocks(long n_symbols, int workers, Fn&& fn);

}  // namespace detail

}  // namespace mcvd

#include "mcvd/link_sim_impl.hpp"
