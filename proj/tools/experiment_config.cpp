#include "experiment_config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace mcvd::tool {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for '" + key + "': " + value);
  }
}

long parse_long(const std::string& key, const std::string& value) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("bad integer value for '" + key + "': " + value);
  return v;
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& value, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse(key, item));
  }
  if (out.empty()) throw ConfigError("empty list for '" + key + "'");
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

void ExperimentConfig::apply(const std::string& key, const std::string& value) {
  if (key == "physics.diffusion_coefficient")
    diffusion_coefficient = parse_double(key, value);
  else if (key == "physics.dimension")
    dimension = static_cast<int>(parse_long(key, value));
  else if (key == "channel.distance")
    distance = parse_double(key, value);
  else if (key == "channel.receiver_radius")
    receiver_radius = parse_double(key, value);
  else if (key == "channel.relay_radius")
    relay_radius = parse_double(key, value);
  else if (key == "modulation.base_concentration")
    base_concentration = parse_long(key, value);
  else if (key == "modulation.relay_concentration")
    relay_concentration = parse_long(key, value);
  else if (key == "modulation.levels")
    levels = static_cast<int>(parse_long(key, value));
  else if (key == "sim.symbol_duration")
    symbol_duration = parse_double(key, value);
  else if (key == "sim.sampling_duration")
    sampling_duration = parse_double(key, value);
  else if (key == "sim.n_symbols")
    n_symbols = parse_long(key, value);
  else if (key == "sim.seed")
    seed = static_cast<std::uint64_t>(parse_long(key, value));
  else if (key == "sim.workers")
    workers = static_cast<int>(parse_long(key, value));
  else if (key == "sim.isi_length")
    isi_length = static_cast<int>(parse_long(key, value));
  else if (key == "snr.db")
    snr_db = parse_double(key, value);
  else if (key == "snr.min_db")
    snr_min_db = parse_double(key, value);
  else if (key == "snr.max_db")
    snr_max_db = parse_double(key, value);
  else if (key == "snr.step_db")
    snr_step_db = parse_double(key, value);
  else if (key == "thresholds.tau1" || key == "thresholds.tau2" || key == "thresholds.tau3") {
    if (!fixed_thresholds) fixed_thresholds = Thresholds{};
    const double v = parse_double(key, value);
    if (key.back() == '1')
      fixed_thresholds->tau1 = v;
    else if (key.back() == '2')
      fixed_thresholds->tau2 = v;
    else
      fixed_thresholds->tau3 = v;
  } else if (key == "sweep.concentrations")
    concentrations = parse_list<long>(key, value, parse_long);
  else if (key == "sweep.locations")
    locations = parse_list<double>(key, value, parse_double);
  else if (key == "sweep.distances")
    distances = parse_list<double>(key, value, parse_double);
  else if (key == "relay.scheme")
    scheme = static_cast<int>(parse_long(key, value));
  else if (key == "relay.amplification")
    amplification = parse_double(key, value);
  else if (key == "relay.scheme1_location")
    scheme1_location = parse_double(key, value);
  else if (key == "relay.scheme2_location")
    scheme2_location = parse_double(key, value);
  else if (key == "relay.af_location")
    af_location = parse_double(key, value);
  else if (key == "compare.reference_ser")
    reference_ser = parse_double(key, value);
  else
    throw ConfigError("unknown config key '" + key + "'");
}

void ExperimentConfig::finalize() {
  if (dimension != 1 && dimension != 3) throw ConfigError("physics.dimension must be 1 or 3");
  if (diffusion_coefficient <= 0.0) throw ConfigError("physics.diffusion_coefficient must be > 0");
  if (distance <= 0.0) throw ConfigError("channel.distance must be > 0");
  if (receiver_radius <= 0.0) throw ConfigError("channel.receiver_radius must be > 0");
  if (relay_radius <= 0.0) throw ConfigError("channel.relay_radius must be > 0");
  if (levels != 2 && levels != 4) throw ConfigError("modulation.levels must be 2 or 4");
  if (base_concentration < 0) throw ConfigError("modulation.base_concentration must be >= 0");
  if (symbol_duration <= 0.0) throw ConfigError("sim.symbol_duration must be > 0");
  if (sampling_duration <= 0.0 || sampling_duration > symbol_duration)
    throw ConfigError("sim.sampling_duration must be in (0, symbol_duration]");
  if (n_symbols <= 0) throw ConfigError("sim.n_symbols must be > 0");
  if (workers < 1) throw ConfigError("sim.workers must be >= 1");
  if (isi_length < 0) throw ConfigError("sim.isi_length must be >= 0");
  if (snr_step_db <= 0.0) throw ConfigError("snr.step_db must be > 0");
  if (snr_min_db > snr_max_db) throw ConfigError("snr.min_db must be <= snr.max_db");
  if (scheme < 1 || scheme > 3) throw ConfigError("relay.scheme must be 1, 2, or 3");
  if (amplification <= 0.0) throw ConfigError("relay.amplification must be > 0");
  if (reference_ser <= 0.0 || reference_ser >= 1.0)
    throw ConfigError("compare.reference_ser must be in (0, 1)");
  for (double d : distances)
    if (d <= 0.0) throw ConfigError("sweep.distances entries must be > 0");
  for (double loc : locations)
    if (loc <= 0.0 || loc >= distance)
      throw ConfigError("sweep.locations entries must lie strictly between 0 and channel.distance");
  if (fixed_thresholds) {
    try {
      fixed_thresholds->validate(levels);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("thresholds.*: ") + e.what());
    }
  }

  resolved.clear();
  resolved["physics.diffusion_coefficient"] = format_double(diffusion_coefficient);
  resolved["physics.dimension"] = std::to_string(dimension);
  resolved["channel.distance"] = format_double(distance);
  resolved["channel.receiver_radius"] = format_double(receiver_radius);
  resolved["channel.relay_radius"] = format_double(relay_radius);
  resolved["modulation.base_concentration"] = std::to_string(base_concentration);
  resolved["modulation.relay_concentration"] = std::to_string(relay_concentration);
  resolved["modulation.levels"] = std::to_string(levels);
  resolved["sim.symbol_duration"] = format_double(symbol_duration);
  resolved["sim.sampling_duration"] = format_double(sampling_duration);
  resolved["sim.n_symbols"] = std::to_string(n_symbols);
  resolved["sim.seed"] = std::to_string(seed);
  resolved["sim.workers"] = std::to_string(workers);
  resolved["sim.isi_length"] = std::to_string(isi_length);
  resolved["snr.db"] = snr_db ? format_double(*snr_db) : std::string("noiseless");
  resolved["snr.min_db"] = format_double(snr_min_db);
  resolved["snr.max_db"] = format_double(snr_max_db);
  resolved["snr.step_db"] = format_double(snr_step_db);
  if (fixed_thresholds) {
    resolved["thresholds.tau1"] = format_double(fixed_thresholds->tau1);
    resolved["thresholds.tau2"] = format_double(fixed_thresholds->tau2);
    resolved["thresholds.tau3"] = format_double(fixed_thresholds->tau3);
  }
  auto join = [](const auto& xs) {
    std::ostringstream os;
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
    return os.str();
  };
  resolved["sweep.concentrations"] = join(concentrations);
  if (!locations.empty()) resolved["sweep.locations"] = join(locations);
  resolved["sweep.distances"] = join(distances);
  resolved["relay.scheme"] = std::to_string(scheme);
  resolved["relay.amplification"] = format_double(amplification);
  resolved["relay.scheme1_location"] = format_double(scheme1_location);
  resolved["relay.scheme2_location"] = format_double(scheme2_location);
  resolved["relay.af_location"] = format_double(af_location);
  resolved["compare.reference_ser"] = format_double(reference_ser);
}

ChannelSpec ExperimentConfig::link_channel() const {
  return {{diffusion_coefficient, dimension}, distance, receiver_radius,
          ReceptionMode::Absorbing};
}

CalibrationConfig ExperimentConfig::calibration_config() const {
  CalibrationConfig c;
  c.channel = link_channel();
  c.scheme = {base_concentration, levels, MoleculeType::TypeI};
  c.symbol_duration = symbol_duration;
  c.sampling_duration = sampling_duration;
  c.rng_seed = seed;
  c.isi_length = isi_length;
  return c;
}

RelayConfig ExperimentConfig::relay_config() const {
  RelayConfig c;
  c.env = {diffusion_coefficient, dimension};
  c.topology = {distance, distance / 2.0, distance / 2.0, relay_radius, receiver_radius};
  c.n_tx = base_concentration;
  c.n_relay = relay_concentration;
  c.levels = levels;
  c.symbol_duration = symbol_duration;
  c.sampling_duration = sampling_duration;
  c.n_symbols = n_symbols;
  c.snr_db = snr_db;
  c.rng_seed = seed;
  c.isi_length = isi_length;
  c.workers = workers;
  return c;
}

std::vector<double> ExperimentConfig::snr_grid() const {
  std::vector<double> grid;
  for (double v = snr_min_db; v <= snr_max_db + 1e-9; v += snr_step_db)
    grid.push_back(v);
  return grid;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  ExperimentConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    config.apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

ExperimentConfig default_config() { return {}; }

void write_manifest(const std::string& path, const ExperimentConfig& config,
                    const std::map<std::string, std::string>& results) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << "[config]\n";
  for (const auto& [k, v] : config.resolved) out << k << " = " << v << "\n";
  out << "\n[results]\n";
  for (const auto& [k, v] : results) out << k << " = " << v << "\n";
  if (!out) throw std::runtime_error("error writing manifest: " + path);
}

}  // namespace mcvd::tool
