// scer_lab: command-line front end for calibration, detection campaigns and
// the closed-form timing analyses.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "manifest.hpp"
#include "scer/scer.hpp"

namespace fs = std::filesystem;
using namespace scer;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string default_output(const std::string& given, const std::string& name) {
  if (!given.empty()) return given;
  const char* dir = std::getenv("SCER_OUTPUT_DIR");
  return (fs::path(dir && *dir ? dir : ".") / name).string();
}

void ensure_parent(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::ofstream open_output(const std::string& path) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

// "a:b:step" or a comma list.
std::vector<std::int64_t> parse_grid(const std::string& text) {
  if (text.empty()) throw UsageError("--grid is empty");
  std::vector<std::int64_t> out;
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw UsageError("--grid: '" + s + "' is not an integer");
    return static_cast<std::int64_t>(v);
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
      const auto next = text.find(':', pos);
      parts.push_back(text.substr(pos, next - pos));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    if (parts.size() != 3) throw UsageError("--grid must look like start:stop:step");
    const auto a = to_int(parts[0]), b = to_int(parts[1]), step = to_int(parts[2]);
    if (step < 1 || a < 1 || b < a) throw UsageError("--grid needs 1 <= start <= stop and step >= 1");
    for (auto v = a; v <= b; v += step) out.push_back(v);
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto next = text.find(',', pos);
      out.push_back(to_int(text.substr(pos, next - pos)));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
  }
  try {
    check_grid(out);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--grid: ") + e.what());
  }
  return out;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<std::string> g_argv;

// ---------------------------------------------------------------- calibrate

struct CalibrateArgs {
  std::string config;
  std::string grid;
  std::string out;
  double pfa = 0.02;
  std::size_t trials = 10000;
  unsigned threads = 1;
};

int run_calibrate(const CalibrateArgs& a) {
  const auto config = load_config(a.config);
  CalibrationOptions opt;
  opt.pfa = a.pfa;
  opt.trials = a.trials;
  opt.threads = a.threads;
  check_pfa(opt.pfa);
  const auto grid = a.grid.empty() ? std::vector<std::int64_t>{config.n_symbols} : parse_grid(a.grid);
  const auto table = calibrate(config, grid, opt);

  const auto out_path = default_output(a.out, "thresholds.txt");
  {
    auto out = open_output(out_path);
    write_thresholds(out, table);
  }

  std::cout << "H0 trials " << opt.trials << ", target pfa " << opt.pfa << "\n";
  for (const auto& s : table.sets) {
    std::cout << "N_b = " << s.n_b << "  fingerprint " << fingerprint_hex(s.fingerprint) << "\n";
    for (auto d : kAllDetectors) {
      std::cout << "  " << detector_name(d) << "  gamma = "
                << (s.valid[static_cast<std::size_t>(d)] ? fmt("%.6g", s[d]) : std::string("invalid")) << "\n";
    }
    if (s.rayleigh_r3 && s.valid[static_cast<std::size_t>(Detector::r3)])
      std::cout << "  R3 closed-form Rayleigh gamma = " << fmt("%.6g", *s.rayleigh_r3)
                << "  (empirical / closed-form = " << fmt("%.4f", s[Detector::r3] / *s.rayleigh_r3) << ")\n";
  }
  std::cout << "wrote " << out_path << "\n";

  tools::Manifest m("calibrate", g_argv);
  m["config"] = config_to_json(config);
  m["master_seed"] = config.master_seed;
  m["pfa"] = opt.pfa;
  m["h0_trials"] = opt.trials;
  m["n_b_grid"] = grid;
  m.add_output(out_path);
  m.write(out_path);
  return 0;
}

// ---------------------------------------------------------------- pd-curve

struct PdCurveArgs {
  std::string config;
  std::string grid;
  std::string thresholds;
  std::string out;
  std::string gnuplot;
  bool auto_calibrate = false;
  std::size_t trials = 2000;
  std::size_t calibration_trials = 10000;
  double pfa = 0.02;
  unsigned threads = 1;
};

int run_pd_curve(const PdCurveArgs& a) {
  const auto config = load_config(a.config);
  const auto grid = parse_grid(a.grid);
  if (a.thresholds.empty() == !a.auto_calibrate)
    throw UsageError("give exactly one of --thresholds or --auto-calibrate");
  CampaignOptions opt;
  opt.trials = a.trials;
  opt.calibration_trials = a.calibration_trials;
  opt.pfa = a.pfa;
  opt.threads = a.threads;
  check_pfa(opt.pfa);

  std::optional<ThresholdTable> table;
  if (!a.thresholds.empty()) table = load_thresholds(a.thresholds);
  const auto curve = pd_curve(config, grid, opt, table ? &*table : nullptr);

  const auto out_path = default_output(a.out, "pd_curve.csv");
  {
    auto out = open_output(out_path);
    write_pd_curve_csv(out, curve);
  }
  tools::Manifest m("pd-curve", g_argv);
  m.add_output(out_path);
  if (!a.gnuplot.empty()) {
    auto out = open_output(a.gnuplot);
    write_gnuplot_script(out, fs::path(out_path).filename().string());
    out.close();
    m.add_output(a.gnuplot);
  }

  std::cout << "N_b";
  for (auto d : kAllDetectors) std::cout << "\t" << detector_name(d);
  std::cout << "\n";
  for (std::size_t i = 0; i < curve.n_b.size(); ++i) {
    std::cout << curve.n_b[i];
    for (auto d : kAllDetectors) std::cout << "\t" << fmt("%.3f", curve.pd[i][static_cast<std::size_t>(d)].rate);
    std::cout << "\n";
  }
  std::cout << "wrote " << out_path << "\n";

  m["config"] = config_to_json(config);
  m["master_seed"] = config.master_seed;
  m["n_b_grid"] = grid;
  m["h1_trials"] = opt.trials;
  m["thresholds"] = a.thresholds.empty() ? nlohmann::json("auto-calibrated") : nlohmann::json(a.thresholds);
  if (a.auto_calibrate) m["h0_trials"] = opt.calibration_trials;
  m.write(out_path);
  return 0;
}

// ---------------------------------------------------------------- required

struct RequiredArgs {
  std::string config;
  std::string batch;
  std::string detector = "R3";
  std::string out;
  double target_pd = 0.9;
  std::size_t trials = 2000;
  std::size_t calibration_trials = 10000;
  double pfa = 0.02;
  unsigned threads = 1;
  std::int64_t max_n_b = 1000;
  std::int64_t resolution = 10;
  std::int64_t initial_horizon = 160;
};

int run_required(const RequiredArgs& a) {
  Detector detector;
  try {
    detector = parse_detector(a.detector);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (a.config.empty() == a.batch.empty()) throw UsageError("give exactly one of --config or --batch");

  std::vector<std::pair<std::string, std::string>> cases;  // id, path
  if (!a.config.empty()) {
    cases.emplace_back(fs::path(a.config).stem().string(), a.config);
  } else {
    if (!fs::is_directory(a.batch)) throw UsageError("--batch: '" + a.batch + "' is not a directory");
    for (const auto& e : fs::directory_iterator(a.batch))
      if (e.is_regular_file() && e.path().extension() == ".json")
        cases.emplace_back(e.path().stem().string(), e.path().string());
    std::sort(cases.begin(), cases.end());
    if (cases.empty()) throw UsageError("--batch: no .json configs in '" + a.batch + "'");
  }
  // Validate every config before spending time on any of them.
  std::vector<ScenarioConfig> configs;
  for (const auto& [id, path] : cases) configs.push_back(load_config(path));

  CampaignOptions opt;
  opt.trials = a.trials;
  opt.calibration_trials = a.calibration_trials;
  opt.pfa = a.pfa;
  opt.threads = a.threads;
  opt.max_n_b = a.max_n_b;
  opt.grid_resolution = a.resolution;
  opt.initial_horizon = a.initial_horizon;
  check_pfa(opt.pfa);

  const auto out_path = default_output(a.out, "required.csv");
  auto out = open_output(out_path);
  write_required_header(out);
  auto cases_json = nlohmann::json::array();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto r = required_symbols(configs[i], detector, a.target_pd, opt);
    write_required_row(out, cases[i].first, r);
    std::cout << cases[i].first << "  " << detector_name(detector) << "  N_b = "
              << (r.n_b ? std::to_string(*r.n_b) : std::string("not reached (cap " + std::to_string(opt.max_n_b) + ")"));
    if (r.crossing_estimate) std::cout << "  (point-estimate crossing " << fmt("%.1f", *r.crossing_estimate) << ")";
    std::cout << std::endl;
    nlohmann::json cj{{"case_id", cases[i].first}, {"config", config_to_json(configs[i])},
                      {"master_seed", configs[i].master_seed}, {"horizons", r.horizons}};
    if (r.crossing_estimate) cj["crossing_estimate"] = *r.crossing_estimate;
    cases_json.push_back(std::move(cj));
  }
  out.close();
  std::cout << "wrote " << out_path << "\n";

  tools::Manifest m("required", g_argv);
  m["cases"] = std::move(cases_json);
  m["detector"] = std::string(detector_name(detector));
  m["target_pd"] = a.target_pd;
  m["h1_trials"] = opt.trials;
  m["h0_trials"] = opt.calibration_trials;
  m.add_output(out_path);
  m.write(out_path);
  return 0;
}

// ---------------------------------------------------------------- analyze

void finish_analysis(const std::string& command, const std::string& out_path, nlohmann::json inputs) {
  std::cout << "wrote " << out_path << "\n";
  tools::Manifest m(command, g_argv);
  m["inputs"] = std::move(inputs);
  m.add_output(out_path);
  m.write(out_path);
}

int run_timing(double cn0, double pe, double stability, const std::string& out_arg) {
  const auto t = analyze_timing(cn0, pe, stability);
  std::cout << "T_spof = [erfc^-1(2 Pe)]^2 / (C/N0)\n"
            << "  C/N0 = " << cn0 << " dB-Hz, Pe = " << pe << "\n"
            << "  T_spof = " << fmt("%.2f", t.t_spof * 1e6) << " us\n"
            << "T_mask = T_spof / clock stability\n"
            << "  stability = " << stability << "\n"
            << "  T_mask = " << fmt("%.1f", t.masking_time) << " s\n";
  const auto out_path = default_output(out_arg, "timing.csv");
  {
    auto out = open_output(out_path);
    out << "cn0_dbhz,pe,t_spof_s,clock_stability,masking_time_s\n"
        << fmt("%.6g", cn0) << ',' << fmt("%.6g", pe) << ',' << fmt("%.9e", t.t_spof) << ','
        << fmt("%.6g", stability) << ',' << fmt("%.9e", t.masking_time) << "\n";
  }
  finish_analysis("analyze timing", out_path, {{"cn0_dbhz", cn0}, {"pe", pe}, {"clock_stability", stability}});
  return 0;
}

int run_osnma(double duration, bool key_unpredictable, std::optional<std::int64_t> required,
              const std::string& out_arg) {
  OsnmaConfig cfg;
  if (key_unpredictable) cfg.key_assumption = KeyAssumption::first_64_unpredictable;
  const auto n = osnma_symbol_budget(cfg, duration);
  const auto per_block = osnma_symbols_per_block(cfg);
  const char* key = key_unpredictable ? "first_64_unpredictable" : "predictable";
  std::cout << "unpredictable symbols = blocks x (MACs x MAC bits" << (key_unpredictable ? " + 64 key bits" : "")
            << ")\n"
            << "  " << per_block << " per " << cfg.block_period_s() << " s block, key bits " << key << "\n"
            << "  " << n << " symbols in " << duration << " s\n";
  std::optional<DetectionTime> ttd;
  if (required) {
    ttd = time_to_detect(*required, cfg);
    std::cout << "  " << *required << " symbols need " << ttd->seconds << " s\n";
  }
  const auto out_path = default_output(out_arg, "osnma.csv");
  {
    auto out = open_output(out_path);
    out << "duration_s,key_assumption,symbols_per_block,symbols";
    if (ttd) out << ",required_symbols,time_to_detect_s";
    out << "\n" << fmt("%.6g", duration) << ',' << key << ',' << per_block << ',' << n;
    if (ttd) out << ',' << *required << ',' << fmt("%.6g", ttd->seconds);
    out << "\n";
  }
  nlohmann::json inputs{{"duration_s", duration}, {"key_assumption", key}};
  if (required) inputs["required_symbols"] = *required;
  finish_analysis("analyze osnma", out_path, std::move(inputs));
  return 0;
}

int run_coherence(std::optional<double> kmh, std::optional<double> mps, double carrier, const std::string& out_arg) {
  if (kmh.has_value() == mps.has_value()) throw UsageError("give exactly one of --speed-kmh or --speed-mps");
  const double v = mps ? *mps : *kmh / 3.6;
  const double tc = coherence_time(v, carrier);
  std::cout << "T_c = c / (v f_c)\n"
            << "  v = " << fmt("%.4f", v) << " m/s, f_c = " << fmt("%.6g", carrier) << " Hz\n"
            << "  T_c = " << (std::isinf(tc) ? std::string("inf") : fmt("%.3f", tc * 1e3) + " ms") << "\n";
  const auto out_path = default_output(out_arg, "coherence.csv");
  {
    auto out = open_output(out_path);
    out << "speed_mps,carrier_hz,coherence_time_s\n"
        << fmt("%.9g", v) << ',' << fmt("%.9g", carrier) << ',' << fmt("%.9e", tc) << "\n";
  }
  finish_analysis("analyze coherence", out_path, {{"speed_mps", v}, {"carrier_hz", carrier}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  g_argv.assign(argv + 1, argv + argc);
  CLI::App app{"scer_lab: SCER attack detection experiments"};
  app.set_version_flag("--version", std::string(SCER_VERSION));
  app.require_subcommand(1);

  CalibrateArgs cal;
  auto* c_cal = app.add_subcommand("calibrate", "Calibrate detection thresholds from H0 trials");
  c_cal->add_option("--config", cal.config, "Scenario JSON")->required();
  c_cal->add_option("--pfa", cal.pfa, "Target false-alarm probability")->capture_default_str();
  c_cal->add_option("--trials", cal.trials, "H0 trials")->capture_default_str();
  c_cal->add_option("--grid", cal.grid, "N_b grid start:stop:step or a,b,c (default: config n_symbols)");
  c_cal->add_option("--threads", cal.threads, "Worker threads")->capture_default_str();
  c_cal->add_option("--out", cal.out, "Threshold file (default $SCER_OUTPUT_DIR/thresholds.txt)");

  PdCurveArgs pd;
  auto* c_pd = app.add_subcommand("pd-curve", "Detection probability against N_b");
  c_pd->add_option("--config", pd.config, "Scenario JSON")->required();
  c_pd->add_option("--grid", pd.grid, "N_b grid start:stop:step or a,b,c")->required();
  c_pd->add_option("--trials", pd.trials, "H1 trials per point")->capture_default_str();
  c_pd->add_option("--thresholds", pd.thresholds, "Threshold file from 'calibrate'");
  c_pd->add_flag("--auto-calibrate", pd.auto_calibrate, "Calibrate the grid first");
  c_pd->add_option("--calibration-trials", pd.calibration_trials, "H0 trials with --auto-calibrate")
      ->capture_default_str();
  c_pd->add_option("--pfa", pd.pfa, "Target false-alarm probability")->capture_default_str();
  c_pd->add_option("--threads", pd.threads, "Worker threads")->capture_default_str();
  c_pd->add_option("--out", pd.out, "CSV output (default $SCER_OUTPUT_DIR/pd_curve.csv)");
  c_pd->add_option("--gnuplot", pd.gnuplot, "Also write a gnuplot script here");

  RequiredArgs req;
  auto* c_req = app.add_subcommand("required", "Symbols needed to reach a target Pd");
  c_req->add_option("--config", req.config, "Scenario JSON");
  c_req->add_option("--batch", req.batch, "Directory of scenario JSONs, one CSV row each");
  c_req->add_option("--detector", req.detector, "R1..R5")->capture_default_str();
  c_req->add_option("--target-pd", req.target_pd, "Target detection probability")->capture_default_str();
  c_req->add_option("--trials", req.trials, "H1 trials per grid point")->capture_default_str();
  c_req->add_option("--calibration-trials", req.calibration_trials, "H0 trials")->capture_default_str();
  c_req->add_option("--pfa", req.pfa, "Target false-alarm probability")->capture_default_str();
  c_req->add_option("--threads", req.threads, "Worker threads")->capture_default_str();
  c_req->add_option("--max-n-b", req.max_n_b, "Search cap")->capture_default_str();
  c_req->add_option("--resolution", req.resolution, "Grid step")->capture_default_str();
  c_req->add_option("--initial-horizon", req.initial_horizon, "First search horizon")->capture_default_str();
  c_req->add_option("--out", req.out, "CSV output (default $SCER_OUTPUT_DIR/required.csv)");

  auto* c_an = app.add_subcommand("analyze", "Closed-form analyses");
  c_an->require_subcommand(1);
  double cn0 = 0.0, pe = 0.0, stability = 1e-7;
  std::string timing_out;
  auto* c_timing = c_an->add_subcommand("timing", "Spoofer decision time and clock masking time");
  c_timing->add_option("--cn0", cn0, "Spoofer C/N0 [dB-Hz]")->required();
  c_timing->add_option("--pe", pe, "Symbol error probability")->required();
  c_timing->add_option("--stability", stability, "Receiver clock stability")->capture_default_str();
  c_timing->add_option("--out", timing_out, "CSV output (default $SCER_OUTPUT_DIR/timing.csv)");

  double duration = 0.0;
  bool key_unpredictable = false;
  std::optional<std::int64_t> required_symbols_arg;
  std::string osnma_out;
  auto* c_osnma = c_an->add_subcommand("osnma", "Unpredictable symbol budget");
  c_osnma->add_option("--duration", duration, "Interval [s], a multiple of the block period")->required();
  c_osnma->add_flag("--key-unpredictable", key_unpredictable, "Count the first 64 key bits");
  c_osnma->add_option("--required", required_symbols_arg, "Also report the time to collect this many symbols");
  c_osnma->add_option("--out", osnma_out, "CSV output (default $SCER_OUTPUT_DIR/osnma.csv)");

  std::optional<double> speed_kmh, speed_mps;
  double carrier = kGalileoE1Hz;
  std::string coherence_out;
  auto* c_coh = c_an->add_subcommand("coherence", "Channel coherence time");
  c_coh->add_option("--speed-kmh", speed_kmh, "Receiver speed [km/h]");
  c_coh->add_option("--speed-mps", speed_mps, "Receiver speed [m/s]");
  c_coh->add_option("--carrier", carrier, "Carrier frequency [Hz]")->capture_default_str();
  c_coh->add_option("--out", coherence_out, "CSV output (default $SCER_OUTPUT_DIR/coherence.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*c_cal) return run_calibrate(cal);
    if (*c_pd) return run_pd_curve(pd);
    if (*c_req) return run_required(req);
    if (*c_timing) return run_timing(cn0, pe, stability, timing_out);
    if (*c_osnma) return run_osnma(duration, key_unpredictable, required_symbols_arg, osnma_out);
    if (*c_coh) return run_coherence(speed_kmh, speed_mps, carrier, coherence_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
