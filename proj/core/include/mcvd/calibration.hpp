#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mcvd/link_sim.hpp"
#include "mcvd/ser.hpp"

namespace mcvd {

/// LinkConfig without thresholds: everything needed to observe the channel.
struct CalibrationConfig {
  ChannelSpec channel;
  QcskScheme scheme;
  double symbol_duration = 0.15;
  double sampling_duration = 0.15;
  std::optional<double> snr_db;  // calibration is normally noiseless
  std::uint64_t rng_seed = 1;
  int isi_length = 0;  // 0 = auto

  void validate() const;
};

/// Per-symbol histograms of observed counts on a shared integer binning.
struct ConditionalHistograms {
  double bin_width = 1.0;
  long first_bin = 0;  // observation value of bin 0 (after flooring)
  std::array<std::vector<double>, 4> freq;  // normalized per symbol
  std::array<double, 4> mean{};

  double bin_center(std::size_t bin) const {
    return (static_cast<double>(first_bin) + static_cast<double>(bin) + 0.5) * bin_width;
  }
};

ConditionalHistograms estimate_conditional_pdfs(const CalibrationConfig& config,
                                                long n_per_symbol);

struct ThresholdResult {
  Thresholds thresholds;
  std::array<bool, 3> gap_fallback{};  // tau_i from a support gap, not a crossing
};

/// Thresholds from crossings of adjacent smoothed conditional histograms.
ThresholdResult thresholds_from_pdf_intersections(const ConditionalHistograms& h);

/// Exhaustive SER minimization over ordered threshold triples on the
/// observation grid; ties break toward the lexicographically smallest triple.
Thresholds thresholds_by_grid_search(const CalibrationConfig& config,
                                     double grid_resolution, long n_symbols);

namespace detail {

struct LabeledObservation {
  int symbol;
  double value;
};

/// Exact SER-minimizing ordered triple on a uniform grid over the sample
/// range. Correct decisions decompose into one term per threshold, so the
/// search is separable under the ordering constraint; ties resolve to the
/// lexicographically smallest triple.
Thresholds grid_search_thresholds(std::span<const LabeledObservation> samples,
                                  double grid_resolution);

/// Random-symbol stream with steady-state ISI; observations after warm-up.
std::vector<LabeledObservation> simulate_observations(const CalibrationConfig& config,
                                                      long n_observations,
                                                      std::uint64_t stream_index);

}  // namespace detail

struct ConcentrationResult {
  long best = 0;
  SerCurve curve;  // SER per candidate N
};

/// Argmin of SER over candidate base concentrations, thresholds recalibrated
/// per candidate; ties break toward smaller N.
ConcentrationResult optimal_concentration(std::span<const long> candidates,
                                          const CalibrationConfig& base,
                                          long n_symbols, int workers = 1);

}  // namespace mcvd
