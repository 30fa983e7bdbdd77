// aero-ftc: closed-loop fault-tolerant control simulations of the Aero 2
// bi-rotor helicopter model.
//
// Exit codes: 0 success, 1 usage, 2 configuration error, 3 simulation
// divergence, 4 I/O or trace error, 5 anything else. Failures print one JSON
// object on stderr: {"error": <class>, "key": <config key>, "message": ...}.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "aero_ftc/config.hpp"
#include "aero_ftc/metrics.hpp"
#include "aero_ftc/sim.hpp"
#include "aero_ftc/trace_io.hpp"

namespace fs = std::filesystem;
using namespace aero_ftc;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kConfig = 2, kDiverged = 3, kIo = 4, kOther = 5 };

int fail(int code, const std::string& kind, const std::string& message, const std::string& key = "") {
  nlohmann::json line = {{"error", kind}, {"message", message}};
  if (!key.empty()) line["key"] = key;
  std::cerr << line.dump() << std::endl;
  return code;
}

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

fs::path prepare_output_dir(const std::string& flag, const std::string& manifest_dir) {
  std::string dir = flag;
  if (dir.empty()) {
    if (const char* env = std::getenv("AERO_FTC_OUT"); env && *env) dir = env;
  }
  if (dir.empty()) dir = manifest_dir;
  if (dir.empty()) dir = ".";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("output directory '" + dir + "' is not usable");
  return dir;
}

void emit(const fs::path& out_dir, const std::string& name, const SimTrace& trace) {
  write_file(out_dir / (name + "_trace.csv"), trace_csv(trace));
  const MetricsReport report = compute_metrics(trace);
  write_file(out_dir / (name + "_metrics.csv"), metrics_csv(report));
  std::cout << "== " << name << " (" << trace.size() << " samples)\n" << metrics_table(report);
}

struct RunOptions {
  std::string config;
  std::string preset;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool no_estimator = false;
  bool no_accommodation = false;
};

int cmd_run(const RunOptions& opt) {
  std::vector<ScenarioConfig> configs;
  std::string manifest_dir;
  try {
    if (!opt.preset.empty()) {
      try {
        configs.push_back(preset_scenario(opt.preset));
      } catch (const InvalidParameter& e) {
        return fail(kConfig, "config", e.what(), "preset");
      }
    } else {
      const std::string text = read_text_file(opt.config);
      if (is_manifest_document(text)) {
        const RunManifest m = parse_manifest(text, fs::path(opt.config).parent_path().string());
        manifest_dir = m.output_dir;
        for (const auto& entry : m.scenarios) {
          ScenarioConfig cfg = load_scenario_file(entry.config_path);
          cfg.name = entry.name;
          if (m.seed) cfg.seed = *m.seed;
          configs.push_back(std::move(cfg));
        }
      } else {
        configs.push_back(load_scenario_file(opt.config));
      }
    }
  } catch (const ConfigError& e) {
    return fail(kConfig, "config", e.what(), e.key());
  }

  for (auto& cfg : configs) {
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.no_estimator) cfg.estimator_enabled = false;
    if (opt.no_accommodation) cfg.accommodation.enabled = false;
    try {
      cfg.validate();
    } catch (const InvalidParameter& e) {
      return fail(kConfig, "config", e.what());
    }
  }

  fs::path out_dir;
  try {
    out_dir = prepare_output_dir(opt.out, manifest_dir);
  } catch (const IoError& e) {
    return fail(kIo, "io", e.what());
  }

  std::size_t current = 0;
  try {
    if (configs.size() == 1) {
      emit(out_dir, configs[0].name, run_scenario(configs[0]));
    } else {
      const std::vector<SimTrace> traces = run_batch(configs);
      for (current = 0; current < configs.size(); ++current) emit(out_dir, configs[current].name, traces[current]);
    }
  } catch (const DivergenceError& e) {
    try {
      write_file(out_dir / (configs[current].name + "_trace.csv"), trace_csv(e.partial_trace()));
    } catch (const IoError&) {
    }
    return fail(kDiverged, "divergence", e.what());
  } catch (const IoError& e) {
    return fail(kIo, "io", e.what());
  } catch (const SolverError& e) {
    return fail(kConfig, "solver", e.what(), "lqr");
  }
  return kOk;
}

int cmd_compare(const std::string& baseline, const std::string& candidate) {
  try {
    const SimTrace b = from_table(read_trace_csv_file(baseline));
    const SimTrace c = from_table(read_trace_csv_file(candidate));
    std::cout << compare_table(compare_traces(b, c));
  } catch (const TraceFormatError& e) {
    return fail(kIo, "trace", e.what());
  } catch (const MetricError& e) {
    return fail(kIo, "compare", e.what());
  }
  return kOk;
}

int cmd_release(double pitch_deg, double duration, double T_s, const std::string& out) {
  try {
    const SimTrace trace = open_loop_release(ContinuousModel::aero2(),
                                             StateVector(deg_to_rad(pitch_deg), 0.0, 0.0, 0.0), duration, T_s);
    const auto t = trace.time();
    const auto pitch = trace.angle(0);
    const double w = natural_frequency(t, pitch);
    std::cout << "damped natural frequency (pitch): " << w << " rad/s\n";
    if (!out.empty()) {
      const fs::path dir = prepare_output_dir(out, "");
      write_file(dir / "release_trace.csv", trace_csv(trace));
    }
  } catch (const MetricError& e) {
    return fail(kOther, "metric", e.what());
  } catch (const IoError& e) {
    return fail(kIo, "io", e.what());
  } catch (const InvalidParameter& e) {
    return fail(kUsage, "usage", e.what());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault-tolerant control simulation for a 2-DOF bi-rotor helicopter"};
  app.require_subcommand(1);

  RunOptions run_opt;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Run a scenario file, a manifest of scenarios, or a built-in preset");
  auto* config_opt = run->add_option("--config", run_opt.config, "Scenario or manifest JSON file");
  auto* preset_opt = run->add_option("--preset", run_opt.preset, "Built-in scenario (healthy, fig7, 1-blade, ...)");
  config_opt->excludes(preset_opt);
  run->add_option("--out", run_opt.out, "Output directory (default: $AERO_FTC_OUT or .)");
  auto* seed_opt = run->add_option("--seed", seed, "Noise seed override");
  run->add_flag("--no-estimator", run_opt.no_estimator, "Disable the fault estimator");
  run->add_flag("--no-accommodation", run_opt.no_accommodation, "Disable fault accommodation");

  std::string baseline, candidate;
  auto* compare = app.add_subcommand("compare", "Compare step and vibration metrics of two trace CSVs");
  compare->add_option("baseline", baseline, "Baseline trace CSV")->required();
  compare->add_option("candidate", candidate, "Candidate trace CSV")->required();

  double release_deg = 10.0, release_duration = 60.0, release_ts = 0.002;
  std::string release_out;
  auto* release = app.add_subcommand("release", "Open-loop pitch release and damped natural frequency");
  release->add_option("--pitch-deg", release_deg, "Initial pitch offset in degrees");
  release->add_option("--duration", release_duration, "Duration in seconds");
  release->add_option("--ts", release_ts, "Sample time in seconds");
  release->add_option("--out", release_out, "Directory for release_trace.csv");

  app.add_subcommand("presets", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fail(kUsage, "usage", e.what());
  }

  try {
    if (run->parsed()) {
      if (run_opt.config.empty() && run_opt.preset.empty()) {
        return fail(kUsage, "usage", "run needs --config or --preset");
      }
      if (seed_opt->count() > 0) run_opt.seed = seed;
      return cmd_run(run_opt);
    }
    if (compare->parsed()) return cmd_compare(baseline, candidate);
    if (release->parsed()) return cmd_release(release_deg, release_duration, release_ts, release_out);
    for (const auto& name : preset_names()) std::cout << name << '\n';
    return kOk;
  } catch (const std::exception& e) {
    return fail(kOther, "internal", e.what());
  }
}
