#include "amot/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "amot/config.hpp"
#include "amot/experiment.hpp"
#include "amot/metrics.hpp"
#include "amot/mot_io.hpp"
#include "amot/simgen.hpp"
#include "amot/tracker.hpp"

namespace amot::cli {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

struct SimulateArgs {
  std::string spec;
  std::string out;
  long long seed = -1;
};

int simulate(const SimulateArgs& a, std::ostream& out) {
  auto kv = read_key_values(a.spec);
  if (a.seed >= 0) kv["seed"] = std::to_string(a.seed);
  const ScenarioSpec spec = scenario_spec_from(kv);
  const ScenarioBundle bundle = generate(spec);
  save_bundle(bundle, a.out);
  out << "wrote " << bundle.frame_count() << " frames to " << a.out << "\n";
  return kOk;
}

struct TrackArgs {
  std::string det_dir;
  std::string config;
  std::string out;
  bool no_amc = false;
  bool no_mtc = false;
  bool no_app = false;
};

int track(const TrackArgs& a, std::ostream& out) {
  TrackerConfig cfg = a.config.empty() ? TrackerConfig{} : load_tracker_config(a.config);
  if (a.no_amc) cfg.use_amc = false;
  if (a.no_mtc) cfg.use_mtc = false;
  if (a.no_app) cfg.use_app = false;
  const DiskSequence seq(a.det_dir);
  const auto start = std::chrono::steady_clock::now();
  const auto results = run_sequence(seq, cfg);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  std::ostringstream os;
  write_results(os, results);
  write_file(a.out, os.str());
  out << "tracked " << results.size() << " frames";
  if (!results.empty() && elapsed.count() > 0.0) {
    out << " (association fps, detection ingested: " << static_cast<double>(results.size()) / elapsed.count() << ")";
  }
  out << "\n";
  return kOk;
}

struct EvalArgs {
  std::string gt;
  std::string results;
  std::string out;
};

int eval(const EvalArgs& a, std::ostream& out) {
  const auto gt = read_ground_truth(a.gt);
  const auto pred = trajectories_from_rows(read_mot_rows(a.results));
  const MetricsReport report = evaluate(gt, pred);
  out << format_report_text(report);
  if (!a.out.empty()) write_file(a.out, format_report_key_values(report));
  return kOk;
}

struct SweepArgs {
  std::string scenario;
  std::string config;
  std::string out;
  std::vector<int> intervals{1, 2, 3, 4, 5};
  std::vector<std::string> variants{"iou-only", "app-only", "amc", "amc+mtc"};
  int jobs = 1;
  bool timing = false;
};

int sweep(const SweepArgs& a, std::ostream& out) {
  ExperimentGrid grid{a.intervals, a.variants};
  grid.validate();
  SweepOptions opt;
  opt.base = a.config.empty() ? TrackerConfig{} : load_tracker_config(a.config);
  opt.jobs = a.jobs;
  opt.timing = a.timing;
  const DiskSequence seq(a.scenario);
  const auto cells = run_sweep(seq, grid, opt);
  const std::string table = format_sweep_table(cells, a.timing);
  write_file(a.out, table);
  fs::path csv = a.out;
  csv.replace_extension(".csv");
  write_file(csv, format_sweep_csv(cells, a.timing));
  out << table;
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Appearance-motion multi-object tracking engine"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic scenario bundle");
  simulate_cmd->add_option("--spec", sim.spec, "Scenario spec (key=value)")->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--out", sim.out, "Output directory")->required();
  simulate_cmd->add_option("--seed", sim.seed, "Override the spec seed")->check(CLI::NonNegativeNumber);

  TrackArgs trk;
  auto* track_cmd = app.add_subcommand("track", "Track a detection directory");
  track_cmd->add_option("--det-dir", trk.det_dir, "Detection directory")->required()->check(CLI::ExistingDirectory);
  track_cmd->add_option("--config", trk.config, "Tracker config (key=value)")->check(CLI::ExistingFile);
  track_cmd->add_option("--out", trk.out, "MOTChallenge result file")->required();
  track_cmd->add_flag("--no-amc", trk.no_amc, "Drop the AMC term (motion cost becomes IoU alone)");
  track_cmd->add_flag("--no-mtc", trk.no_mtc, "Skip track continuation");
  track_cmd->add_flag("--no-app", trk.no_app, "Zero the appearance cost");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate results against ground truth");
  eval_cmd->add_option("--gt", ev.gt, "Ground-truth file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--results", ev.results, "Result file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", ev.out, "Write key=value metrics here");

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Frame-interval / ablation grid over a scenario");
  sweep_cmd->add_option("--scenario", sw.scenario, "Scenario bundle directory")->required()->check(CLI::ExistingDirectory);
  sweep_cmd->add_option("--config", sw.config, "Base tracker config")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", sw.out, "Table file; a .csv is written alongside")->required();
  sweep_cmd->add_option("--intervals", sw.intervals, "Frame intervals")->delimiter(',');
  sweep_cmd->add_option("--variants", sw.variants, "Association variants")->delimiter(',');
  sweep_cmd->add_option("--jobs", sw.jobs, "Parallel grid cells")->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--timing", sw.timing, "Report association fps (makes output time-dependent)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (simulate_cmd->parsed()) return simulate(sim, out);
    if (track_cmd->parsed()) return track(trk, out);
    if (eval_cmd->parsed()) return eval(ev, out);
    if (sweep_cmd->parsed()) return sweep(sw, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

}  // namespace amot::cli
