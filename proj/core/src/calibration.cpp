#include "mcvd/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcvd {

void CalibrationConfig::validate() const {
  channel.validate();
  scheme.validate();
  if (!(symbol_duration > 0.0)) throw std::domain_error("symbol_duration must be > 0");
  if (!(sampling_duration > 0.0 && sampling_duration <= symbol_duration))
    throw std::domain_error("sampling_duration must be in (0, symbol_duration]");
  if (isi_length < 0) throw std::domain_error("isi_length must be >= 0");
}

namespace detail {

std::vector<LabeledObservation> simulate_observations(const CalibrationConfig& config,
                                                      long n_observations,
                                                      std::uint64_t stream_index) {
  const int isi = config.isi_length > 0
                      ? config.isi_length
                      : default_isi_length(config.channel, config.symbol_duration);
  const std::vector<double> probs = sampling_slot_probabilities(
      config.channel, config.symbol_duration, config.sampling_duration, isi);
  NoiseModel noise;
  if (config.snr_db)
    noise.sigma = noise_sigma_from_snr(*config.snr_db, config.scheme, probs[0]);

  Rng rng = Rng::substream(config.rng_seed, stream_index);
  std::vector<long> history(static_cast<std::size_t>(isi), 0);
  std::vector<LabeledObservation> out;
  out.reserve(static_cast<std::size_t>(n_observations));
  for (long i = 0; i < n_observations + isi; ++i) {
    const int symbol = static_cast<int>(rng.uniform() * config.scheme.levels);
    for (std::size_t k = history.size() - 1; k > 0; --k) history[k] = history[k - 1];
    history[0] = emit_count(config.scheme, symbol);
    const long arrivals = sample_arrivals(history, probs, rng);
    const double obs = observe(arrivals, noise, rng);
    if (i >= isi) out.push_back({symbol, obs});
  }
  return out;
}

Thresholds grid_search_thresholds(std::span<const LabeledObservation> samples,
                                  double grid_resolution) {
  if (!(grid_resolution > 0.0)) throw std::domain_error("grid_resolution must be > 0");
  if (samples.size() < 4) throw std::domain_error("too few samples for grid search");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& o : samples) {
    lo = std::min(lo, o.value);
    hi = std::max(hi, o.value);
  }
  const double grid_min = std::max(lo, grid_resolution);  // tau1 must be > 0
  const long n_grid =
      std::max<long>(3, static_cast<long>(std::ceil((hi - grid_min) / grid_resolution)) + 2);

  std::array<std::vector<double>, 4> per_symbol;
  for (const auto& o : samples)
    per_symbol[static_cast<std::size_t>(o.symbol)].push_back(o.value);
  for (auto& v : per_symbol) std::sort(v.begin(), v.end());
  auto count_below = [&](int s, double x) -> long long {
    const auto& v = per_symbol[static_cast<std::size_t>(s)];
    return std::lower_bound(v.begin(), v.end(), x) - v.begin();
  };

  std::vector<long long> g1(static_cast<std::size_t>(n_grid), 0);
  std::vector<long long> g2(static_cast<std::size_t>(n_grid), 0);
  std::vector<long long> g3(static_cast<std::size_t>(n_grid), 0);
  for (long j = 0; j < n_grid; ++j) {
    const double x = grid_min + j * grid_resolution;
    const auto sj = static_cast<std::size_t>(j);
    g1[sj] = count_below(0, x) - count_below(1, x);
    g2[sj] = count_below(1, x) - count_below(2, x);
    g3[sj] = count_below(2, x) - count_below(3, x);
  }

  const long long kNegInf = std::numeric_limits<long long>::min() / 4;
  std::vector<long long> best3(static_cast<std::size_t>(n_grid) + 1, kNegInf);
  std::vector<long long> best23(static_cast<std::size_t>(n_grid) + 1, kNegInf);
  for (long j = n_grid - 1; j >= 0; --j) {
    const auto sj = static_cast<std::size_t>(j);
    best3[sj] = std::max(best3[sj + 1], g3[sj]);
  }
  for (long j = n_grid - 2; j >= 0; --j) {
    const auto sj = static_cast<std::size_t>(j);
    best23[sj] = std::max(best23[sj + 1], g2[sj] + best3[sj + 1]);
  }

  long long best_total = kNegInf;
  for (long j = 0; j + 2 < n_grid; ++j)
    best_total = std::max(best_total, g1[static_cast<std::size_t>(j)] +
                                          best23[static_cast<std::size_t>(j) + 1]);

  long i1 = -1, i2 = -1, i3 = -1;
  for (long j = 0; j + 2 < n_grid; ++j) {
    if (g1[static_cast<std::size_t>(j)] + best23[static_cast<std::size_t>(j) + 1] ==
        best_total) {
      i1 = j;
      break;
    }
  }
  const long long rem23 = best_total - g1[static_cast<std::size_t>(i1)];
  for (long j = i1 + 1; j + 1 < n_grid; ++j) {
    if (g2[static_cast<std::size_t>(j)] + best3[static_cast<std::size_t>(j) + 1] == rem23) {
      i2 = j;
      break;
    }
  }
  const long long rem3 = rem23 - g2[static_cast<std::size_t>(i2)];
  for (long j = i2 + 1; j < n_grid; ++j) {
    if (g3[static_cast<std::size_t>(j)] == rem3) {
      i3 = j;
      break;
    }
  }
  return {grid_min + i1 * grid_resolution, grid_min + i2 * grid_resolution,
          grid_min + i3 * grid_resolution};
}

}  // namespace detail

namespace {

std::vector<double> moving_average5(const std::vector<double>& h) {
  std::vector<double> out(h.size(), 0.0);
  const long n = static_cast<long>(h.size());
  for (long i = 0; i < n; ++i) {
    double sum = 0.0;
    int cnt = 0;
    for (long j = i - 2; j <= i + 2; ++j) {
      if (j >= 0 && j < n) {
        sum += h[static_cast<std::size_t>(j)];
        ++cnt;
      }
    }
    out[static_cast<std::size_t>(i)] = sum / cnt;
  }
  return out;
}

}  // namespace

ConditionalHistograms estimate_conditional_pdfs(const CalibrationConfig& config,
                                                long n_per_symbol) {
  config.validate();
  if (n_per_symbol < 1) throw std::domain_error("n_per_symbol must be >= 1");

  const long total = n_per_symbol * config.scheme.levels;
  const auto obs = detail::simulate_observations(config, total, 0);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& o : obs) {
    lo = std::min(lo, o.value);
    hi = std::max(hi, o.value);
  }
  ConditionalHistograms h;
  h.bin_width = 1.0;
  h.first_bin = static_cast<long>(std::floor(lo));
  const std::size_t n_bins =
      static_cast<std::size_t>(static_cast<long>(std::floor(hi)) - h.first_bin + 1);

  std::array<long long, 4> counts{};
  std::array<double, 4> sums{};
  for (auto& f : h.freq) f.assign(n_bins, 0.0);
  for (const auto& o : obs) {
    const auto bin =
        static_cast<std::size_t>(static_cast<long>(std::floor(o.value)) - h.first_bin);
    h.freq[static_cast<std::size_t>(o.symbol)][bin] += 1.0;
    counts[static_cast<std::size_t>(o.symbol)] += 1;
    sums[static_cast<std::size_t>(o.symbol)] += o.value;
  }
  for (int s = 0; s < config.scheme.levels; ++s) {
    const auto si = static_cast<std::size_t>(s);
    if (counts[si] == 0) continue;
    for (auto& v : h.freq[si]) v /= static_cast<double>(counts[si]);
    h.mean[si] = sums[si] / static_cast<double>(counts[si]);
  }
  return h;
}

ThresholdResult thresholds_from_pdf_intersections(const ConditionalHistograms& h) {
  ThresholdResult result;
  const std::size_t n_bins = h.freq[0].size();
  if (n_bins == 0) throw std::domain_error("empty histograms");

  std::array<std::vector<double>, 4> smooth;
  for (int s = 0; s < 4; ++s)
    smooth[static_cast<std::size_t>(s)] =
        moving_average5(h.freq[static_cast<std::size_t>(s)]);

  double taus[3];
  for (int i = 1; i <= 3; ++i) {
    const auto& f = smooth[static_cast<std::size_t>(i - 1)];
    const auto& g = smooth[static_cast<std::size_t>(i)];
    const double midpoint = 0.5 * (h.mean[static_cast<std::size_t>(i - 1)] +
                                   h.mean[static_cast<std::size_t>(i)]);

    // descending crossings of f - g, within the overlap mass
    double best_x = std::numeric_limits<double>::quiet_NaN();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < n_bins; ++k) {
      const double d0 = f[k] - g[k];
      const double d1 = f[k + 1] - g[k + 1];
      // a genuine crossing needs both densities present; otherwise the edge
      // of the lower symbol's empirical support masquerades as one
      if (f[k] <= 0.0 || (g[k] <= 0.0 && g[k + 1] <= 0.0)) continue;
      if (d0 > 0.0 && d1 <= 0.0) {
        const double frac = d0 / (d0 - d1);
        const double x = h.bin_center(k) + frac * h.bin_width;
        const double dist = std::abs(x - midpoint);
        if (dist < best_dist) {
          best_dist = dist;
          best_x = x;
        }
      }
    }
    if (std::isnan(best_x)) {
      // disjoint supports: no crossing exists; the conditional means are the
      // stable statistics and the equal-variance crossing is their midpoint
      best_x = midpoint;
      result.gap_fallback[static_cast<std::size_t>(i - 1)] = true;
    }
    taus[i - 1] = best_x;
  }
  if (taus[0] <= 0.0) taus[0] = h.bin_width;
  for (int i = 1; i < 3; ++i)
    if (taus[i] <= taus[i - 1]) taus[i] = taus[i - 1] + h.bin_width;
  result.thresholds = {taus[0], taus[1], taus[2]};
  return result;
}

Thresholds thresholds_by_grid_search(const CalibrationConfig& config,
                                     double grid_resolution, long n_symbols) {
  config.validate();
  if (n_symbols < 4) throw std::domain_error("n_symbols too small");
  const auto obs = detail::simulate_observations(config, n_symbols, 1);
  return detail::grid_search_thresholds(obs, grid_resolution);
}

ConcentrationResult optimal_concentration(std::span<const long> candidates,
                                          const CalibrationConfig& base,
                                          long n_symbols, int workers) {
  base.validate();
  if (candidates.empty()) throw std::domain_error("candidates must be nonempty");

  std::vector<long> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());

  ConcentrationResult result;
  result.curve.parameter = "concentration";
  double best_ser = std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < sorted.size(); ++idx) {
    const long n = sorted[idx];
    CalibrationConfig calib = base;
    calib.scheme.base_concentration = n;
    calib.snr_db.reset();  // thresholds calibrated on the noiseless channel
    calib.rng_seed = splitmix64(base.rng_seed + 2 * idx);
    const ConditionalHistograms h =
        estimate_conditional_pdfs(calib, n_symbols / calib.scheme.levels);
    const Thresholds thresholds = thresholds_from_pdf_intersections(h).thresholds;

    LinkConfig link;
    link.channel = base.channel;
    link.scheme = calib.scheme;
    link.thresholds = thresholds;
    link.symbol_duration = base.symbol_duration;
    link.sampling_duration = base.sampling_duration;
    link.n_symbols = n_symbols;
    link.snr_db = base.snr_db;
    link.rng_seed = splitmix64(base.rng_seed + 2 * idx + 1);
    link.isi_length = base.isi_length;
    link.workers = workers;
    const SerEstimate est = simulate_link(link);
    result.curve.add(static_cast<double>(n), est);
    if (est.ser() < best_ser) {  // strict: ties keep the smaller N
      best_ser = est.ser();
      result.best = n;
    }
  }
  return result;
}

}  // namespace mcvd
