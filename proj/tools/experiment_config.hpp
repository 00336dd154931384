#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcvd/calibration.hpp"
#include "mcvd/relay.hpp"

namespace mcvd::tool {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Resolved experiment parameters. Defaults reproduce the reference setup:
/// D = 100 um^2/s, radii 4 um, 0.15 s slots, 50000 symbols, d = 6 um.
struct ExperimentConfig {
  double diffusion_coefficient = 100.0;
  int dimension = 1;  // hit statistics default to the 1-D CDF (see README)
  double distance = 6.0;
  double receiver_radius = 4.0;
  double relay_radius = 4.0;
  long base_concentration = 150;
  long relay_concentration = 150;
  int levels = 4;
  double symbol_duration = 0.15;
  double sampling_duration = 0.15;
  long n_symbols = 50000;
  std::uint64_t seed = 20170223;  // documented default; override with --seed
  int workers = 1;
  int isi_length = 0;  // 0 = auto

  std::optional<double> snr_db;        // single-point runs; empty = noiseless
  double snr_min_db = -10.0;           // sweep grids
  double snr_max_db = 15.0;
  double snr_step_db = 5.0;
  std::optional<Thresholds> fixed_thresholds;

  std::vector<long> concentrations = {50, 100, 150, 300};
  std::vector<double> locations;  // empty = per-scheme default
  std::vector<double> distances = {1, 2, 3, 4, 5, 6};
  int scheme = 1;  // 1, 2, or 3 (= amplify-and-forward)
  double amplification = 50.0;
  double scheme1_location = 3.0;
  double scheme2_location = 3.0;  // measured optimum under this channel model
  double af_location = 3.0;
  double reference_ser = 1e-2;

  /// Raw key -> value pairs as parsed, for the manifest.
  std::map<std::string, std::string> resolved;

  void apply(const std::string& key, const std::string& value);
  void finalize();  // validate cross-field constraints, fill `resolved`

  ChannelSpec link_channel() const;
  CalibrationConfig calibration_config() const;
  RelayConfig relay_config() const;
  std::vector<double> snr_grid() const;
};

/// Flat `key = value` file with '#' comments and dotted section keys.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig default_config();

void write_manifest(const std::string& path, const ExperimentConfig& config,
                    const std::map<std::string, std::string>& results);

}  // namespace mcvd::tool
