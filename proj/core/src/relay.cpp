#include "mcvd/relay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace mcvd {

void Topology::validate() const {
  if (!(d_tx_rx > 0.0 && d_tx_relay > 0.0 && d_relay_rx > 0.0))
    throw std::domain_error("all distances must be > 0");
  if (std::abs(d_tx_relay + d_relay_rx - d_tx_rx) > 1e-9 * d_tx_rx)
    throw std::domain_error("relay must be collinear: d13 + d32 = d12");
  if (!(relay_radius > 0.0 && receiver_radius > 0.0))
    throw std::domain_error("radii must be > 0");
}

void RelayConfig::validate() const {
  topology.validate();
  env.validate();
  if (n_tx < 0 || n_relay < 0) throw std::domain_error("concentrations must be >= 0");
  if (levels != 2 && levels != 4) throw std::domain_error("levels must be 2 or 4");
  if (!(symbol_duration > 0.0)) throw std::domain_error("symbol_duration must be > 0");
  if (!(sampling_duration > 0.0 && sampling_duration <= symbol_duration))
    throw std::domain_error("sampling_duration must be in (0, symbol_duration]");
  if (n_symbols < 1) throw std::domain_error("n_symbols must be >= 1");
}

ChannelSpec RelayConfig::tx_relay_channel() const {
  return {env, topology.d_tx_relay, topology.relay_radius, ReceptionMode::Absorbing};
}
ChannelSpec RelayConfig::tx_rx_channel() const {
  return {env, topology.d_tx_rx, topology.receiver_radius, ReceptionMode::Absorbing};
}
ChannelSpec RelayConfig::relay_rx_channel() const {
  return {env, topology.d_relay_rx, topology.receiver_radius, ReceptionMode::Absorbing};
}

double RelayConfig::noise_sigma() const {
  if (!snr_db) return 0.0;
  const ChannelSpec direct = tx_rx_channel();
  const int isi = isi_length > 0 ? isi_length : default_isi_length(direct, symbol_duration);
  const auto probs =
      sampling_slot_probabilities(direct, symbol_duration, sampling_duration, isi);
  QcskScheme scheme{n_tx, levels, MoleculeType::TypeI};
  return noise_sigma_from_snr(*snr_db, scheme, probs[0]);
}

namespace {

struct HopProbs {
  std::vector<double> to_relay;  // type I at the relay
  std::vector<double> to_rx;     // type I at the receiver (direct path)
  std::vector<double> relay_rx;  // type II at the receiver
  int isi;
};

HopProbs hop_probabilities(const RelayConfig& c) {
  HopProbs h;
  const ChannelSpec relay_in = c.tx_relay_channel();
  const ChannelSpec direct = c.tx_rx_channel();
  const ChannelSpec relay_out = c.relay_rx_channel();
  // one shared memory length keeps the three histories aligned
  h.isi = c.isi_length > 0
              ? c.isi_length
              : std::max({default_isi_length(relay_in, c.symbol_duration),
                          default_isi_length(direct, c.symbol_duration),
                          default_isi_length(relay_out, c.symbol_duration)});
  h.to_relay = sampling_slot_probabilities(relay_in, c.symbol_duration,
                                           c.sampling_duration, h.isi);
  h.to_rx =
      sampling_slot_probabilities(direct, c.symbol_duration, c.sampling_duration, h.isi);
  h.relay_rx = sampling_slot_probabilities(relay_out, c.symbol_duration,
                                           c.sampling_duration, h.isi);
  return h;
}

class History {
 public:
  explicit History(int length) : slots_(static_cast<std::size_t>(length), 0) {}
  void push(long emission) {
    for (std::size_t k = slots_.size() - 1; k > 0; --k) slots_[k] = slots_[k - 1];
    slots_[0] = emission;
  }
  std::span<const long> view() const { return slots_; }

 private:
  std::vector<long> slots_;
};

}  // namespace

SerEstimate simulate_scheme1(const RelayConfig& config) {
  config.validate();
  config.relay_thresholds.validate(config.levels);
  config.rx_thresholds.validate(config.levels);
  const HopProbs probs = hop_probabilities(config);
  const NoiseModel noise{config.noise_sigma()};
  const QcskScheme tx_scheme{config.n_tx, config.levels, MoleculeType::TypeI};
  const QcskScheme relay_scheme{config.n_relay, config.levels, MoleculeType::TypeII};
  const int warmup = probs.isi + 1;  // +1 for the relay latency slot

  return detail::run_blocks(
      config.n_symbols, config.workers,
      [&](long block, long count, SerEstimate& out) {
        Rng rng = Rng::substream(config.rng_seed, static_cast<std::uint64_t>(block));
        History tx_hist(probs.isi), relay_hist(probs.isi);
        long pending_relay_emission = 0;
        int truth_prev = -1;
        for (long i = 0; i < count + warmup; ++i) {
          relay_hist.push(pending_relay_emission);
          const int symbol = static_cast<int>(rng.uniform() * config.levels);
          tx_hist.push(emit_count(tx_scheme, symbol));

          // relay detects the current symbol from type I
          const long relay_arrivals = sample_arrivals(tx_hist.view(), probs.to_relay, rng);
          const double relay_obs = observe(relay_arrivals, noise, rng);
          const int relay_decision =
              config.perfect_relay ? symbol
                                   : detect(relay_obs, config.relay_thresholds, config.levels);
          pending_relay_emission = emit_count(relay_scheme, relay_decision);

          // receiver decodes the previous symbol from type II
          const long rx_arrivals = sample_arrivals(relay_hist.view(), probs.relay_rx, rng);
          const double rx_obs = observe(rx_arrivals, noise, rng);
          const int decoded = detect(rx_obs, config.rx_thresholds, config.levels);
          if (truth_prev >= 0 && i >= warmup) out.record(truth_prev, decoded);
          truth_prev = symbol;
        }
      });
}

bool DecisionRegionMap::total() const {
  return std::all_of(labels.begin(), labels.end(), [](std::int8_t l) { return l >= 0; });
}

int DecisionRegionMap::lookup(double type1, double type2) const {
  if (width <= 0 || height <= 0) throw std::domain_error("empty decision region map");
  long x = std::lround(type1);
  long y = std::lround(type2);
  x = std::clamp<long>(x, 0, width - 1);
  y = std::clamp<long>(y, 0, height - 1);
  const std::int8_t label = at(static_cast<int>(x), static_cast<int>(y));
  if (label < 0) throw std::domain_error("lookup hit an unlabeled cell; expand first");
  return label;
}

DecisionRegionMap estimate_decision_regions(const RelayConfig& config, long n_training) {
  config.validate();
  config.relay_thresholds.validate(config.levels);
  if (n_training < 1) throw std::domain_error("n_training must be >= 1");

  RelayConfig train = config;
  train.snr_db.reset();  // regions are trained on the noiseless channel
  const HopProbs probs = hop_probabilities(train);
  const NoiseModel noise{0.0};
  const QcskScheme tx_scheme{train.n_tx, train.levels, MoleculeType::TypeI};
  const QcskScheme relay_scheme{train.n_relay, train.levels, MoleculeType::TypeII};
  const int warmup = probs.isi + 1;

  struct CellCounts {
    std::array<std::uint32_t, 4> per_symbol{};
  };
  std::unordered_map<std::uint64_t, CellCounts> cells;
  std::array<long long, 4> symbol_totals{};
  long max_x = 0, max_y = 0;

  Rng rng = Rng::substream(train.rng_seed, 0x7261696eull);  // training stream
  History tx_relay_hist(probs.isi), tx_rx_hist(probs.isi), relay_hist(probs.isi);
  long pending_relay_emission = 0;
  int truth_prev = -1;
  long prev_type1 = 0;
  for (long i = 0; i < n_training + warmup; ++i) {
    relay_hist.push(pending_relay_emission);
    const int symbol = static_cast<int>(rng.uniform() * train.levels);
    const long emission = emit_count(tx_scheme, symbol);
    tx_relay_hist.push(emission);
    tx_rx_hist.push(emission);

    const long relay_arrivals = sample_arrivals(tx_relay_hist.view(), probs.to_relay, rng);
    const int relay_decision =
        train.perfect_relay
            ? symbol
            : detect(observe(relay_arrivals, noise, rng), train.relay_thresholds,
                     train.levels);
    pending_relay_emission = emit_count(relay_scheme, relay_decision);

    const long type1 = sample_arrivals(tx_rx_hist.view(), probs.to_rx, rng);
    const long type2 = sample_arrivals(relay_hist.view(), probs.relay_rx, rng);

    if (truth_prev >= 0 && i >= warmup) {
      const auto key = (static_cast<std::uint64_t>(prev_type1) << 32) |
                       static_cast<std::uint64_t>(type2);
      cells[key].per_symbol[static_cast<std::size_t>(truth_prev)] += 1;
      symbol_totals[static_cast<std::size_t>(truth_prev)] += 1;
      max_x = std::max(max_x, prev_type1);
      max_y = std::max(max_y, type2);
    }
    prev_type1 = type1;
    truth_prev = symbol;
  }

  for (int s = 0; s < train.levels; ++s)
    if (symbol_totals[static_cast<std::size_t>(s)] == 0)
      throw std::runtime_error("decision-region training starved symbol " +
                               std::to_string(s));

  DecisionRegionMap map;
  map.width = static_cast<int>(std::ceil(1.25 * static_cast<double>(max_x))) + 1;
  map.height = static_cast<int>(std::ceil(1.25 * static_cast<double>(max_y))) + 1;
  map.labels.assign(static_cast<std::size_t>(map.width) * map.height, -1);
  map.estimated.assign(map.labels.size(), 0);
  for (const auto& [key, counts] : cells) {
    const int x = static_cast<int>(key >> 32);
    const int y = static_cast<int>(key & 0xffffffffull);
    int best = 0;
    for (int s = 1; s < train.levels; ++s)
      if (counts.per_symbol[static_cast<std::size_t>(s)] >
          counts.per_symbol[static_cast<std::size_t>(best)])
        best = s;  // ties keep the smaller symbol
    map.at(x, y) = static_cast<std::int8_t>(best);
    map.estimated[static_cast<std::size_t>(y) * map.width + x] = 1;
  }
  return map;
}

DecisionRegionMap expand_regions(const DecisionRegionMap& map) {
  if (map.width <= 0 || map.height <= 0 || map.labels.empty())
    throw std::domain_error("cannot expand an empty map");
  bool any_labeled = false;
  for (std::int8_t l : map.labels)
    if (l >= 0) {
      any_labeled = true;
      break;
    }
  if (!any_labeled) throw std::domain_error("cannot expand a map with no labeled cell");

  // labeled cells per row, sorted by x, for exact nearest-site queries
  std::vector<std::vector<std::pair<int, std::int8_t>>> rows(
      static_cast<std::size_t>(map.height));
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      if (map.at(x, y) >= 0) rows[static_cast<std::size_t>(y)].emplace_back(x, map.at(x, y));

  DecisionRegionMap out = map;
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      if (map.at(x, y) >= 0) continue;
      long best_d2 = std::numeric_limits<long>::max();
      int best_label = std::numeric_limits<int>::max();
      // scan rows outward; stop once dy^2 alone exceeds the best distance
      for (int dy = 0; dy < map.height; ++dy) {
        const long dy2 = static_cast<long>(dy) * dy;
        if (dy2 > best_d2) break;
        for (int sign = 0; sign < 2; ++sign) {
          if (dy == 0 && sign == 1) break;
          const int yy = sign == 0 ? y - dy : y + dy;
          if (yy < 0 || yy >= map.height) continue;
          const auto& row = rows[static_cast<std::size_t>(yy)];
          if (row.empty()) continue;
          auto it = std::lower_bound(
              row.begin(), row.end(), std::make_pair(x, std::int8_t(-1)));
          // walk both directions from the insertion point
          for (auto fwd = it; fwd != row.end(); ++fwd) {
            const long dx = fwd->first - x;
            const long d2 = dy2 + dx * dx;
            if (d2 > best_d2) break;
            if (d2 < best_d2 || (d2 == best_d2 && fwd->second < best_label)) {
              best_d2 = d2;
              best_label = fwd->second;
            }
          }
          for (auto bwd = it; bwd != row.begin();) {
            --bwd;
            const long dx = x - bwd->first;
            const long d2 = dy2 + dx * dx;
            if (d2 > best_d2) break;
            if (d2 < best_d2 || (d2 == best_d2 && bwd->second < best_label)) {
              best_d2 = d2;
              best_label = bwd->second;
            }
          }
        }
      }
      out.at(x, y) = static_cast<std::int8_t>(best_label);
    }
  }
  return out;
}

SerEstimate simulate_scheme2(const RelayConfig& config, const DecisionRegionMap& regions) {
  config.validate();
  config.relay_thresholds.validate(config.levels);
  if (!regions.total())
    throw std::domain_error("scheme 2 requires a total (expanded) region map");
  const HopProbs probs = hop_probabilities(config);
  const NoiseModel noise{config.noise_sigma()};
  const QcskScheme tx_scheme{config.n_tx, config.levels, MoleculeType::TypeI};
  const QcskScheme relay_scheme{config.n_relay, config.levels, MoleculeType::TypeII};
  const int warmup = probs.isi + 1;

  return detail::run_blocks(
      config.n_symbols, config.workers,
      [&](long block, long count, SerEstimate& out) {
        Rng rng = Rng::substream(config.rng_seed, static_cast<std::uint64_t>(block));
        History tx_relay_hist(probs.isi), tx_rx_hist(probs.isi), relay_hist(probs.isi);
        long pending_relay_emission = 0;
        int truth_prev = -1;
        double prev_type1 = 0.0;
        for (long i = 0; i < count + warmup; ++i) {
          relay_hist.push(pending_relay_emission);
          const int symbol = static_cast<int>(rng.uniform() * config.levels);
          const long emission = emit_count(tx_scheme, symbol);
          tx_relay_hist.push(emission);
          tx_rx_hist.push(emission);

          const long relay_arrivals =
              sample_arrivals(tx_relay_hist.view(), probs.to_relay, rng);
          const double relay_obs = observe(relay_arrivals, noise, rng);
          const int relay_decision =
              config.perfect_relay
                  ? symbol
                  : detect(relay_obs, config.relay_thresholds, config.levels);
          pending_relay_emission = emit_count(relay_scheme, relay_decision);

          // joint observation: type I for slot i, type II for slot i+1
          const double type1 =
              observe(sample_arrivals(tx_rx_hist.view(), probs.to_rx, rng), noise, rng);
          const double type2 =
              observe(sample_arrivals(relay_hist.view(), probs.relay_rx, rng), noise, rng);
          if (truth_prev >= 0 && i >= warmup)
            out.record(truth_prev, regions.lookup(prev_type1, type2));
          prev_type1 = type1;
          truth_prev = symbol;
        }
      });
}

long relay_af_step(double observed, double amplification) {
  if (!(amplification > 0.0)) throw std::domain_error("amplification must be > 0");
  return std::lround(amplification * std::max(observed, 0.0));
}

namespace {

/// Per-slot AF kernel shared by calibration and simulation. emit(truth_prev,
/// rx_observation) is called once per counted slot.
template <typename Sink>
void run_af_stream(const RelayConfig& config, double amplification, long n_symbols,
                   std::uint64_t block, bool noiseless, Sink&& sink) {
  const HopProbs probs = hop_probabilities(config);
  const NoiseModel noise{noiseless ? 0.0 : config.noise_sigma()};
  const QcskScheme tx_scheme{config.n_tx, config.levels, MoleculeType::TypeI};
  const int warmup = probs.isi + 1;

  Rng rng = Rng::substream(config.rng_seed, block);
  History tx_hist(probs.isi), relay_hist(probs.isi);
  long pending_relay_emission = 0;
  int truth_prev = -1;
  for (long i = 0; i < n_symbols + warmup; ++i) {
    relay_hist.push(pending_relay_emission);
    const int symbol = static_cast<int>(rng.uniform() * config.levels);
    tx_hist.push(emit_count(tx_scheme, symbol));

    const long relay_arrivals = sample_arrivals(tx_hist.view(), probs.to_relay, rng);
    const double relay_obs = observe(relay_arrivals, noise, rng);
    pending_relay_emission = relay_af_step(relay_obs, amplification);

    const long rx_arrivals = sample_arrivals(relay_hist.view(), probs.relay_rx, rng);
    const double rx_obs = observe(rx_arrivals, noise, rng);
    if (truth_prev >= 0 && i >= warmup) sink(truth_prev, rx_obs);
    truth_prev = symbol;
  }
}

}  // namespace

Thresholds calibrate_af_thresholds(const RelayConfig& config, double amplification,
                                   long n_symbols, double grid_resolution) {
  config.validate();
  std::vector<detail::LabeledObservation> samples;
  samples.reserve(static_cast<std::size_t>(n_symbols));
  run_af_stream(config, amplification, n_symbols, 0x6166ull, /*noiseless=*/true,
                [&](int truth, double obs) { samples.push_back({truth, obs}); });
  return detail::grid_search_thresholds(samples, grid_resolution);
}

SerEstimate simulate_af(const RelayConfig& config, double amplification,
                        const Thresholds& rx_af_thresholds) {
  config.validate();
  rx_af_thresholds.validate(config.levels);
  return detail::run_blocks(
      config.n_symbols, config.workers, [&](long block, long count, SerEstimate& out) {
        run_af_stream(config, amplification, count, static_cast<std::uint64_t>(block),
                      /*noiseless=*/false, [&](int truth, double obs) {
                        out.record(truth, detect(obs, rx_af_thresholds, config.levels));
                      });
      });
}

Thresholds calibrate_hop_thresholds(const RelayConfig& base, double distance,
                                    double radius, long n, long n_symbols) {
  CalibrationConfig calib;
  calib.channel = {base.env, distance, radius, ReceptionMode::Absorbing};
  calib.scheme = {n, base.levels, MoleculeType::TypeI};
  calib.symbol_duration = base.symbol_duration;
  calib.sampling_duration = base.sampling_duration;
  calib.rng_seed = splitmix64(base.rng_seed ^ std::hash<double>{}(distance));
  calib.isi_length = base.isi_length;
  const ConditionalHistograms h =
      estimate_conditional_pdfs(calib, n_symbols / base.levels);
  return thresholds_from_pdf_intersections(h).thresholds;
}

LocationSweep relay_location_sweep(RelayScheme scheme, std::span<const double> locations,
                                   std::span<const double> snr_grid,
                                   const RelayConfig& base, double af_amplification) {
  base.validate();
  if (locations.empty()) throw std::domain_error("locations must be nonempty");
  if (snr_grid.empty()) throw std::domain_error("snr_grid must be nonempty");
  for (double loc : locations)
    if (!(loc > 0.0 && loc < base.topology.d_tx_rx))
      throw std::domain_error("relay location must lie strictly between tx and rx");

  std::vector<double> locs(locations.begin(), locations.end());
  std::sort(locs.begin(), locs.end());

  LocationSweep sweep;
  std::map<double, std::pair<long long, long long>> totals;  // loc -> (errors, trials)
  for (double loc : locs) {
    RelayConfig config = base;
    config.topology.d_tx_relay = loc;
    config.topology.d_relay_rx = base.topology.d_tx_rx - loc;
    config.relay_thresholds = calibrate_hop_thresholds(
        base, config.topology.d_tx_relay, base.topology.relay_radius, base.n_tx,
        base.n_symbols);
    config.rx_thresholds = calibrate_hop_thresholds(
        base, config.topology.d_relay_rx, base.topology.receiver_radius, base.n_relay,
        base.n_symbols);

    DecisionRegionMap regions;
    Thresholds af_thresholds;
    if (scheme == RelayScheme::Scheme2)
      // the joint (type I, type II) grid has ~10^5 cells, so per-cell frequency
      // estimates need far more training symbols than one SER run
      regions = expand_regions(estimate_decision_regions(config, 8 * base.n_symbols));
    else if (scheme == RelayScheme::AmplifyForward)
      af_thresholds = calibrate_af_thresholds(config, af_amplification, base.n_symbols);

    LocationSweep::Entry entry;
    entry.location = loc;
    entry.curve.parameter = "snr_db";
    entry.curve.series = std::to_string(loc);
    for (std::size_t si = 0; si < snr_grid.size(); ++si) {
      RelayConfig point = config;
      point.snr_db = snr_grid[si];
      point.rng_seed = splitmix64(base.rng_seed + 1000 + si);  // paired across locations
      SerEstimate est;
      switch (scheme) {
        case RelayScheme::Scheme1:
          est = simulate_scheme1(point);
          break;
        case RelayScheme::Scheme2:
          est = simulate_scheme2(point, regions);
          break;
        case RelayScheme::AmplifyForward:
          est = simulate_af(point, af_amplification, af_thresholds);
          break;
      }
      entry.curve.add(snr_grid[si], est);
      auto& tot = totals[loc];
      tot.first += est.errors;
      tot.second += est.trials;
    }
    sweep.entries.push_back(std::move(entry));
  }

  for (std::size_t si = 0; si < snr_grid.size(); ++si) {
    double best_loc = locs.front();
    double best_ser = std::numeric_limits<double>::infinity();
    for (const auto& entry : sweep.entries) {
      const double ser = entry.curve.points[si].estimate.ser();
      if (ser < best_ser) {
        best_ser = ser;
        best_loc = entry.location;
      }
    }
    sweep.best_location_per_snr[snr_grid[si]] = best_loc;
  }
  double best_overall_ser = std::numeric_limits<double>::infinity();
  for (const auto& [loc, tot] : totals) {
    const double ser = tot.second == 0 ? 0.0 : double(tot.first) / double(tot.second);
    if (ser < best_overall_ser) {
      best_overall_ser = ser;
      sweep.best_location_overall = loc;
    }
  }
  return sweep;
}

}  // namespace mcvd
