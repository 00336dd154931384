#include "mcvd/link_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcvd {

void LinkConfig::validate() const {
  channel.validate();
  scheme.validate();
  thresholds.validate(scheme.levels);
  if (!(symbol_duration > 0.0)) throw std::domain_error("symbol_duration must be > 0");
  if (!(sampling_duration > 0.0 && sampling_duration <= symbol_duration))
    throw std::domain_error("sampling_duration must be in (0, symbol_duration]");
  if (n_symbols < 1) throw std::domain_error("n_symbols must be >= 1");
  if (isi_length < 0) throw std::domain_error("isi_length must be >= 0");
}

double noise_sigma_from_snr(double snr_db, const QcskScheme& scheme, double p1) {
  scheme.validate();
  if (!(p1 > 0.0 && p1 <= 1.0)) throw std::domain_error("p1 must be in (0,1]");
  const double mean_symbol = 0.5 * (scheme.levels - 1);  // mean of {0..levels-1}
  const double signal_power =
      mean_symbol * static_cast<double>(scheme.base_concentration) * p1;
  return std::sqrt(signal_power / std::pow(10.0, snr_db / 10.0));
}

long sample_arrivals(std::span<const long> emission_history,
                     std::span<const double> slot_probs, Rng& rng) {
  const std::size_t n = std::min(emission_history.size(), slot_probs.size());
  long total = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(slot_probs[k] >= 0.0 && slot_probs[k] <= 1.0))
      throw std::domain_error("slot probability out of [0,1]");
    total += rng.binomial(emission_history[k], slot_probs[k]);
  }
  return total;
}

double observe(long arrivals, const NoiseModel& noise, Rng& rng) {
  return rng.gaussian(static_cast<double>(arrivals), noise.sigma);
}

std::vector<double> sampling_slot_probabilities(const ChannelSpec& channel,
                                                double symbol_duration,
                                                double sampling_duration,
                                                int isi_length) {
  if (sampling_duration == symbol_duration)
    return slot_hit_probabilities(channel, symbol_duration, isi_length);
  channel.validate();
  if (channel.reception_mode != ReceptionMode::Absorbing)
    throw std::domain_error("sampling_slot_probabilities requires Absorbing mode");
  if (isi_length < 1) throw std::domain_error("isi_length must be >= 1");
  std::vector<double> probs(isi_length);
  for (int k = 0; k < isi_length; ++k) {
    const double start = k * symbol_duration;
    probs[static_cast<std::size_t>(k)] =
        hit_cdf(start + sampling_duration, channel) - hit_cdf(start, channel);
  }
  return probs;
}

namespace {

/// Fixed-capacity most-recent-first emission history.
class EmissionHistory {
 public:
  explicit EmissionHistory(int length) : slots_(static_cast<std::size_t>(length), 0) {}
  void push(long emission) {
    for (std::size_t k = slots_.size() - 1; k > 0; --k) slots_[k] = slots_[k - 1];
    slots_[0] = emission;
  }
  std::span<const long> view() const { return slots_; }

 private:
  std::vector<long> slots_;
};

}  // namespace

SerEstimate simulate_link(const LinkConfig& config) {
  config.validate();
  const int isi = config.isi_length > 0
                      ? config.isi_length
                      : default_isi_length(config.channel, config.symbol_duration);
  const std::vector<double> probs = sampling_slot_probabilities(
      config.channel, config.symbol_duration, config.sampling_duration, isi);
  NoiseModel noise;
  if (config.snr_db)
    noise.sigma = noise_sigma_from_snr(*config.snr_db, config.scheme, probs[0]);

  return detail::run_blocks(
      config.n_symbols, config.workers,
      [&](long block, long count, SerEstimate& out) {
        Rng rng = Rng::substream(config.rng_seed, static_cast<std::uint64_t>(block));
        EmissionHistory history(isi);
        for (long i = 0; i < count + isi; ++i) {
          const int symbol =
              static_cast<int>(rng.uniform() * config.scheme.levels);
          history.push(emit_count(config.scheme, symbol));
          const long arrivals = sample_arrivals(history.view(), probs, rng);
          const double obs = observe(arrivals, noise, rng);
          const int decoded = detect(obs, config.thresholds, config.scheme.levels);
          if (i >= isi) out.record(symbol, decoded);  // warm-up excluded
        }
      });
}

}  // namespace mcvd
