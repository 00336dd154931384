#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "csv_io.hpp"
#include "experiment_config.hpp"
#include "mcvd/calibration.hpp"
#include "mcvd/link_sim.hpp"
#include "mcvd/relay.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using namespace mcvd;
using namespace mcvd::tool;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<long> seed;
  std::optional<int> workers;
  std::optional<long> n_symbols;
  std::optional<double> distance;
  std::optional<long> concentration;
  std::optional<double> snr;
  std::optional<double> snr_min, snr_max, snr_step;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "flat key=value config file");
  cmd->add_option("--out", args.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--seed", args.seed, "master RNG seed");
  cmd->add_option("--workers", args.workers, "worker threads (results are identical for any count)");
  cmd->add_option("--symbols", args.n_symbols, "symbols per Monte Carlo run");
  cmd->add_option("--distance", args.distance, "transmitter-receiver distance, um");
  cmd->add_option("--concentration", args.concentration, "base concentration N");
  cmd->add_option("--snr", args.snr, "single SNR point, dB (omit for noiseless)");
  cmd->add_option("--snr-min", args.snr_min, "sweep start, dB");
  cmd->add_option("--snr-max", args.snr_max, "sweep end, dB");
  cmd->add_option("--snr-step", args.snr_step, "sweep step, dB");
}

ExperimentConfig resolve_config(const CommonArgs& args) {
  ExperimentConfig config =
      args.config_path.empty() ? default_config() : load_config(args.config_path);
  if (args.seed) config.seed = static_cast<std::uint64_t>(*args.seed);
  if (args.workers) config.workers = *args.workers;
  if (args.n_symbols) config.n_symbols = *args.n_symbols;
  if (args.distance) config.distance = *args.distance;
  if (args.concentration) config.base_concentration = *args.concentration;
  if (args.snr) config.snr_db = *args.snr;
  if (args.snr_min) config.snr_min_db = *args.snr_min;
  if (args.snr_max) config.snr_max_db = *args.snr_max;
  if (args.snr_step) config.snr_step_db = *args.snr_step;
  config.finalize();
  fs::create_directories(args.out_dir);
  return config;
}

std::string path_in(const CommonArgs& args, const std::string& name) {
  return (fs::path(args.out_dir) / name).string();
}

std::string fmt_thresholds(const Thresholds& t) {
  std::ostringstream os;
  os << '(' << t.tau1 << ", " << t.tau2 << ", " << t.tau3 << ')';
  return os.str();
}

Thresholds calibrated_or_fixed(const ExperimentConfig& config) {
  if (config.fixed_thresholds) return *config.fixed_thresholds;
  CalibrationConfig calib = config.calibration_config();
  calib.rng_seed = splitmix64(config.seed ^ 0xca11b8a7ull);
  return thresholds_from_pdf_intersections(
             estimate_conditional_pdfs(calib, std::max(config.n_symbols / 4, 2000L)))
      .thresholds;
}

int run_calibrate_thresholds(const CommonArgs& args) {
  const ExperimentConfig config = resolve_config(args);
  std::ofstream out(path_in(args, "thresholds.csv"));
  if (!out) throw std::runtime_error("cannot write thresholds.csv");
  out << "distance,tau1,tau2,tau3,gap_fallback\n";
  std::map<std::string, std::string> results;
  for (const double d : config.distances) {
    ExperimentConfig at_d = config;
    at_d.distance = d;
    CalibrationConfig calib = at_d.calibration_config();
    calib.rng_seed = splitmix64(config.seed ^ 0xca11b8a7ull);
    const ThresholdResult r = thresholds_from_pdf_intersections(
        estimate_conditional_pdfs(calib, std::max(config.n_symbols / 4, 2000L)));
    const bool any_gap = r.gap_fallback[0] || r.gap_fallback[1] || r.gap_fallback[2];
    out << format_value(d) << ',' << format_value(r.thresholds.tau1) << ','
        << format_value(r.thresholds.tau2) << ',' << format_value(r.thresholds.tau3) << ','
        << (any_gap ? 1 : 0) << '\n';
    results["thresholds.d" + format_value(d)] = fmt_thresholds(r.thresholds);
  }
  if (!out) throw std::runtime_error("error writing thresholds.csv");
  write_manifest(path_in(args, "manifest.txt"), config, results);
  return kExitOk;
}

int run_sweep_concentration(const CommonArgs& args) {
  const ExperimentConfig config = resolve_config(args);
  std::map<std::string, std::string> results;

  // noiseless SER vs N (thresholds recalibrated per candidate)
  CalibrationConfig base = config.calibration_config();
  const ConcentrationResult noiseless =
      optimal_concentration(config.concentrations, base, config.n_symbols, config.workers);
  SerCurve noiseless_curve = noiseless.curve;
  noiseless_curve.parameter = "concentration";
  noiseless_curve.series = "noiseless";
  write_curves_csv(path_in(args, "concentration_noiseless.csv"), {noiseless_curve});
  results["best_concentration.noiseless"] = std::to_string(noiseless.best);

  // SER vs SNR, one curve per candidate N; seeds paired across candidates
  std::vector<SerCurve> snr_curves(config.concentrations.size());
  for (std::size_t i = 0; i < snr_curves.size(); ++i) {
    snr_curves[i].parameter = "snr_db";
    snr_curves[i].series = "N=" + std::to_string(config.concentrations[i]);
  }
  for (const double snr : config.snr_grid()) {
    CalibrationConfig at_snr = base;
    at_snr.snr_db = snr;
    const ConcentrationResult r =
        optimal_concentration(config.concentrations, at_snr, config.n_symbols, config.workers);
    for (std::size_t i = 0; i < r.curve.points.size(); ++i)
      snr_curves[i].add(snr, r.curve.points[i].estimate);
    results["best_concentration.snr_" + format_value(snr)] = std::to_string(r.best);
  }
  write_curves_csv(path_in(args, "concentration_snr.csv"), snr_curves);
  write_manifest(path_in(args, "manifest.txt"), config, results);
  return kExitOk;
}

int run_simulate_link(const CommonArgs& args) {
  const ExperimentConfig config = resolve_config(args);
  const Thresholds thresholds = calibrated_or_fixed(config);

  LinkConfig link;
  link.channel = config.link_channel();
  link.scheme = {config.base_concentration, config.levels, MoleculeType::TypeI};
  link.thresholds = thresholds;
  link.symbol_duration = config.symbol_duration;
  link.sampling_duration = config.sampling_duration;
  link.n_symbols = config.n_symbols;
  link.snr_db = config.snr_db;
  link.rng_seed = config.seed;
  link.isi_length = config.isi_length;
  link.workers = config.workers;
  const SerEstimate est = simulate_link(link);

  SerCurve curve;
  curve.parameter = config.snr_db ? "snr_db" : "noiseless";
  curve.series = "link";
  curve.add(config.snr_db.value_or(0.0), est);
  write_curves_csv(path_in(args, "link.csv"), {curve});

  std::map<std::string, std::string> results;
  results["thresholds"] = fmt_thresholds(thresholds);
  results["ser"] = format_value(est.ser());
  results["errors"] = std::to_string(est.errors);
  results["trials"] = std::to_string(est.trials);
  for (int tx = 0; tx < config.levels; ++tx) {
    std::ostringstream os;
    for (int rx = 0; rx < config.levels; ++rx) os << (rx ? " " : "") << est.confusion[tx][rx];
    results["confusion.tx" + std::to_string(tx)] = os.str();
  }
  write_manifest(path_in(args, "manifest.txt"), config, results);
  return kExitOk;
}

RelayScheme parse_scheme(const std::string& s) {
  if (s == "1") return RelayScheme::Scheme1;
  if (s == "2") return RelayScheme::Scheme2;
  if (s == "af") return RelayScheme::AmplifyForward;
  throw ConfigError("--scheme must be 1, 2, or af");
}

std::vector<double> default_locations(RelayScheme scheme, const ExperimentConfig& config) {
  switch (scheme) {
    case RelayScheme::Scheme1:
      return {2.0, 3.0, 4.0};
    case RelayScheme::Scheme2:
      return {1.0, 2.0, 3.0, 4.0, 5.0};
    case RelayScheme::AmplifyForward:
      return {config.af_location};
  }
  return {};
}

void append_sweep_results(const LocationSweep& sweep, const std::string& prefix,
                          std::map<std::string, std::string>& results) {
  results[prefix + "best_location_overall"] = format_value(sweep.best_location_overall);
  for (const auto& [snr, loc] : sweep.best_location_per_snr)
    results[prefix + "best_location.snr_" + format_value(snr)] = format_value(loc);
}

int run_relay_sweep(const CommonArgs& args, const std::string& scheme_arg) {
  ExperimentConfig config = resolve_config(args);
  const RelayScheme scheme = parse_scheme(scheme_arg);
  const std::vector<double> locations =
      config.locations.empty() ? default_locations(scheme, config) : config.locations;
  const std::vector<double> snrs = config.snr_grid();

  const LocationSweep sweep = relay_location_sweep(scheme, locations, snrs,
                                                   config.relay_config(), config.amplification);
  std::vector<SerCurve> curves;
  for (const auto& entry : sweep.entries) {
    SerCurve c = entry.curve;
    c.parameter = "snr_db";
    c.series = "d13=" + format_value(entry.location) + "um";
    curves.push_back(std::move(c));
  }
  write_curves_csv(path_in(args, "relay_sweep.csv"), curves);

  std::map<std::string, std::string> results;
  results["scheme"] = scheme_arg;
  append_sweep_results(sweep, "", results);
  write_manifest(path_in(args, "manifest.txt"), config, results);
  return kExitOk;
}

/// SNR where the curve crosses `ref` (log-linear interpolation in SER).
std::optional<double> snr_at_ser(const SerCurve& curve, double ref) {
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const auto& a = curve.points[i];
    const auto& b = curve.points[i + 1];
    const double sa = a.estimate.ser(), sb = b.estimate.ser();
    if (sa >= ref && sb <= ref && sb > 0.0 && sa > 0.0) {
      if (sa == sb) return a.x;
      const double t = (std::log(ref) - std::log(sa)) / (std::log(sb) - std::log(sa));
      return a.x + t * (b.x - a.x);
    }
  }
  return std::nullopt;
}

int run_compare_schemes(const CommonArgs& args) {
  ExperimentConfig config = resolve_config(args);
  const std::vector<double> snrs = config.snr_grid();
  const RelayConfig base = config.relay_config();
  std::map<std::string, std::string> results;

  // direct tx->rx link; thresholds calibrated for the full distance
  SerCurve direct;
  direct.parameter = "snr_db";
  direct.series = "direct";
  {
    const Thresholds t = calibrate_hop_thresholds(base, config.distance,
                                                  config.receiver_radius,
                                                  config.base_concentration, config.n_symbols);
    results["thresholds.direct"] = fmt_thresholds(t);
    for (std::size_t i = 0; i < snrs.size(); ++i) {
      LinkConfig link;
      link.channel = config.link_channel();
      link.scheme = {config.base_concentration, config.levels, MoleculeType::TypeI};
      link.thresholds = t;
      link.symbol_duration = config.symbol_duration;
      link.sampling_duration = config.sampling_duration;
      link.n_symbols = config.n_symbols;
      link.snr_db = snrs[i];
      link.rng_seed = splitmix64(config.seed + 1000 + i);  // paired with relay sweeps
      link.isi_length = config.isi_length;
      link.workers = config.workers;
      direct.add(snrs[i], simulate_link(link));
    }
  }

  const auto one_scheme = [&](RelayScheme scheme, double location, const std::string& name) {
    const double locs[] = {location};
    const LocationSweep sweep =
        relay_location_sweep(scheme, locs, snrs, base, config.amplification);
    SerCurve c = sweep.entries.at(0).curve;
    c.parameter = "snr_db";
    c.series = name;
    return c;
  };
  const SerCurve s1 = one_scheme(RelayScheme::Scheme1, config.scheme1_location, "scheme1");
  const SerCurve s2 = one_scheme(RelayScheme::Scheme2, config.scheme2_location, "scheme2");
  const SerCurve af = one_scheme(RelayScheme::AmplifyForward, config.af_location, "af");

  write_curves_csv(path_in(args, "compare_schemes.csv"), {direct, s1, s2, af});

  const SerCurve* all_curves[] = {&direct, &s1, &s2, &af};
  for (const SerCurve* c : all_curves) {
    const auto crossing = snr_at_ser(*c, config.reference_ser);
    results["snr_at_ref." + c->series] =
        crossing ? format_value(*crossing) : std::string("not_reached");
  }
  const auto d = snr_at_ser(direct, config.reference_ser);
  const auto g1 = snr_at_ser(s1, config.reference_ser);
  const auto g2 = snr_at_ser(s2, config.reference_ser);
  results["gain_db.scheme1"] = (d && g1) ? format_value(*d - *g1) : std::string("n/a");
  results["gain_db.scheme2"] = (d && g2) ? format_value(*d - *g2) : std::string("n/a");
  write_manifest(path_in(args, "manifest.txt"), config, results);
  return kExitOk;
}

int run_plot(const std::string& input, const std::string& output, std::string title) {
  const std::vector<CsvRow> rows = read_curves_csv(input);
  if (title.empty()) title = fs::path(input).stem().string();
  write_ser_svg(output, rows, title);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo simulator for molecular communication links and relays"};
  app.require_subcommand(1);

  CommonArgs calib_args, conc_args, link_args, relay_args, cmp_args;
  std::string relay_scheme = "1";
  std::string plot_input, plot_output, plot_title;

  CLI::App* calib = app.add_subcommand(
      "calibrate-thresholds", "detection thresholds per distance from conditional pdfs");
  add_common(calib, calib_args);

  CLI::App* conc = app.add_subcommand(
      "sweep-concentration", "SER vs base concentration, thresholds recalibrated per N");
  add_common(conc, conc_args);

  CLI::App* link = app.add_subcommand("simulate-link", "single point-to-point run");
  add_common(link, link_args);

  CLI::App* relay = app.add_subcommand(
      "relay-sweep", "SER vs SNR over relay locations for one relaying scheme");
  add_common(relay, relay_args);
  relay->add_option("--scheme", relay_scheme, "1 (decode-and-forward), 2 (joint MAP), af")
      ->capture_default_str();

  CLI::App* cmp = app.add_subcommand(
      "compare-schemes", "direct link vs relay schemes at their default locations");
  add_common(cmp, cmp_args);

  CLI::App* plot = app.add_subcommand("plot", "render a results CSV as an SVG chart");
  plot->add_option("--input", plot_input, "curves CSV produced by another subcommand")
      ->required();
  plot->add_option("--output", plot_output, "SVG file to write")->required();
  plot->add_option("--title", plot_title, "chart title (default: input stem)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (calib->parsed()) return run_calibrate_thresholds(calib_args);
    if (conc->parsed()) return run_sweep_concentration(conc_args);
    if (link->parsed()) return run_simulate_link(link_args);
    if (relay->parsed()) return run_relay_sweep(relay_args, relay_scheme);
    if (cmp->parsed()) return run_compare_schemes(cmp_args);
    if (plot->parsed()) return run_plot(plot_input, plot_output, plot_title);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitConfigError;
}
