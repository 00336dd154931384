#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "mcvd/calibration.hpp"
#include "mcvd/link_sim.hpp"

namespace mcvd {

/// Collinear transmitter - relay - receiver placement.
struct Topology {
  double d_tx_rx = 6.0;     // d12, um
  double d_tx_relay = 3.0;  // d13, um
  double d_relay_rx = 3.0;  // d32, um
  double relay_radius = 4.0;
  double receiver_radius = 4.0;

  void validate() const;
};

/// One three-node experiment. Noise sigma is shared by every counting node
/// and derives from the direct tx->rx link, so SNR means the same thing for
/// all schemes and relay locations.
struct RelayConfig {
  Topology topology;
  DiffusionEnv env;
  long n_tx = 150;     // transmitter base concentration (type I)
  long n_relay = 150;  // relay base concentration (type II)
  int levels = 4;
  Thresholds relay_thresholds;  // calibrated for d_tx_relay
  Thresholds rx_thresholds;     // calibrated for d_relay_rx
  double symbol_duration = 0.15;
  double sampling_duration = 0.15;
  long n_symbols = 50000;
  std::optional<double> snr_db;
  std::uint64_t rng_seed = 1;
  int isi_length = 0;  // 0 = auto, per link
  int workers = 1;
  bool perfect_relay = false;  // test hook: relay forwards the true symbol

  void validate() const;
  ChannelSpec tx_relay_channel() const;
  ChannelSpec tx_rx_channel() const;
  ChannelSpec relay_rx_channel() const;
  double noise_sigma() const;  // from snr_db and the tx->rx link, 0 if noiseless
};

/// Decode-and-forward; the receiver reads type II molecules only.
SerEstimate simulate_scheme1(const RelayConfig& config);

/// Grid over joint (type-I count, type-II count) observations -> symbol.
struct DecisionRegionMap {
  int width = 0, height = 0;  // type-I axis x, type-II axis y
  std::vector<std::int8_t> labels;       // -1 = unlabeled
  std::vector<std::uint8_t> estimated;   // 1 = labeled from training data

  std::int8_t& at(int x, int y) { return labels[std::size_t(y) * width + x]; }
  std::int8_t at(int x, int y) const { return labels[std::size_t(y) * width + x]; }
  bool total() const;

  /// Label for a (possibly noisy) observation pair; clamps to the grid.
  int lookup(double type1, double type2) const;
};

/// Noiseless training run labelling visited cells by conditional-frequency
/// argmax (uniform priors, so MAP = maximum likelihood).
DecisionRegionMap estimate_decision_regions(const RelayConfig& config, long n_training);

/// Nearest-labeled-cell fill (Euclidean in count space; ties -> smaller symbol).
DecisionRegionMap expand_regions(const DecisionRegionMap& map);

/// Joint MAP detection over both molecule types with an expanded region map.
SerEstimate simulate_scheme2(const RelayConfig& config, const DecisionRegionMap& regions);

/// Amplify-and-forward emission rule: round(K * max(observed, 0)).
long relay_af_step(double observed, double amplification);

/// AF baseline: relay re-emits scaled raw observations; receiver thresholds
/// calibrated for the AF link by grid search.
SerEstimate simulate_af(const RelayConfig& config, double amplification,
                        const Thresholds& rx_af_thresholds);

Thresholds calibrate_af_thresholds(const RelayConfig& config, double amplification,
                                   long n_symbols, double grid_resolution = 1.0);

enum class RelayScheme { Scheme1, Scheme2, AmplifyForward };

struct LocationSweep {
  struct Entry {
    double location = 0.0;
    SerCurve curve;  // SER vs SNR
  };
  std::vector<Entry> entries;
  std::map<double, double> best_location_per_snr;
  double best_location_overall = 0.0;
};

/// Cross-product of (relay location, SNR) with per-location recalibrated
/// thresholds / decision regions.
LocationSweep relay_location_sweep(RelayScheme scheme, std::span<const double> locations,
                                   std::span<const double> snr_grid,
                                   const RelayConfig& base,
                                   double af_amplification = 50.0);

/// Thresholds for a single hop at the given distance, via the intersection
/// method on a noiseless calibration run (cacheable by distance).
Thresholds calibrate_hop_thresholds(const RelayConfig& base, double distance,
                                    double radius, long n, long n_symbols);

}  // namespace mcvd
