#include "amot/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <memory>
#include <thread>

#include "amot/mot_io.hpp"
#include "amot/simgen.hpp"
#include "amot/tracker.hpp"

namespace amot {

const std::vector<std::string>& known_variants() {
  static const std::vector<std::string> names{"iou-only", "app-only", "iou+app", "iou+amc",
                                              "iou+amc+mtc", "amc", "mtc", "amc+mtc"};
  return names;
}

TrackerConfig variant_config(const std::string& variant, TrackerConfig base) {
  auto set = [&](bool amc, bool iou_cost, bool app, bool mtc) {
    base.use_amc = amc;
    base.use_iou = iou_cost;
    base.use_app = app;
    base.use_mtc = mtc;
    return base;
  };
  if (variant == "iou-only") return set(false, true, false, false);
  if (variant == "app-only") return set(false, false, true, false);
  if (variant == "iou+app") return set(false, true, true, false);
  if (variant == "iou+amc") return set(true, true, false, false);
  if (variant == "iou+amc+mtc") return set(true, true, false, true);
  if (variant == "amc") return set(true, true, true, false);
  if (variant == "mtc") return set(false, true, true, true);
  if (variant == "amc+mtc") return set(true, true, true, true);
  throw ConfigError("unknown variant '" + variant + "'");
}

void ExperimentGrid::validate() const {
  if (intervals.empty()) throw ConfigError("experiment grid: no intervals");
  if (variants.empty()) throw ConfigError("experiment grid: no variants");
  for (int k : intervals) {
    if (k < 1) throw ConfigError("experiment grid: interval " + std::to_string(k) + " is < 1");
  }
  for (const auto& v : variants) variant_config(v);
}

namespace {

struct Prepared {
  std::unique_ptr<FrameSource> frames;
  std::vector<Trajectory> gt;
};

std::vector<SweepCell> sweep(const std::function<Prepared(int)>& prepare, const ExperimentGrid& grid,
                             const SweepOptions& opt) {
  grid.validate();
  std::vector<SweepCell> cells;
  for (const auto& v : grid.variants) {
    for (int k : grid.intervals) cells.push_back({v, k, false, {}, {}, 0.0});
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      SweepCell& cell = cells[i];
      try {
        const TrackerConfig cfg = variant_config(cell.variant, opt.base);
        const Prepared p = prepare(cell.interval);
        const auto start = std::chrono::steady_clock::now();
        const auto results = run_sequence(*p.frames, cfg);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        cell.fps = elapsed.count() > 0.0 ? static_cast<double>(results.size()) / elapsed.count() : 0.0;
        cell.report = evaluate(p.gt, trajectories_from_results(results));
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return cells;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

}  // namespace

std::vector<SweepCell> run_sweep(const ScenarioBundle& bundle, const ExperimentGrid& grid, const SweepOptions& opt) {
  return sweep(
      [&](int k) {
        auto sub = std::make_unique<ScenarioBundle>(subsample(bundle, k));
        auto gt = sub->ground_truth();
        return Prepared{std::move(sub), std::move(gt)};
      },
      grid, opt);
}

std::vector<SweepCell> run_sweep(const DiskSequence& sequence, const ExperimentGrid& grid, const SweepOptions& opt) {
  return sweep(
      [&](int k) {
        auto sub = std::make_unique<DiskSequence>(sequence.subsample(k));
        auto gt = sub->ground_truth();
        return Prepared{std::move(sub), std::move(gt)};
      },
      grid, opt);
}

std::string format_sweep_table(const std::vector<SweepCell>& cells, bool timing) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-12s %3s %8s %8s %6s %7s %7s %5s %5s %10s\n", "variant", "k", "IDF1", "MOTA", "IDs",
                "FP", "FN", "MT", "ML", "assoc-fps");
  out += buf;
  for (const auto& c : cells) {
    if (!c.ok) {
      std::snprintf(buf, sizeof buf, "%-12s %3d FAILED: %s\n", c.variant.c_str(), c.interval, c.error.c_str());
    } else {
      const std::string fps = timing ? fmt("%.1f", c.fps) : "-";
      std::snprintf(buf, sizeof buf, "%-12s %3d %8.2f %8.2f %6d %7lld %7lld %5d %5d %10s\n", c.variant.c_str(),
                    c.interval, 100.0 * c.report.idf1, 100.0 * c.report.mota, c.report.ids, c.report.fp, c.report.fn,
                    c.report.mt, c.report.ml, fps.c_str());
    }
    out += buf;
  }
  return out;
}

std::string format_sweep_csv(const std::vector<SweepCell>& cells, bool timing) {
  std::string out = "variant,k,idf1,mota,ids,fp,fn,mt,ml,fps\n";
  for (const auto& c : cells) {
    out += c.variant + "," + std::to_string(c.interval) + ",";
    if (!c.ok) {
      out += "failed,,,,,,,\n";
      continue;
    }
    out += fmt("%.6f", c.report.idf1) + "," + fmt("%.6f", c.report.mota) + "," + std::to_string(c.report.ids) + "," +
           std::to_string(c.report.fp) + "," + std::to_string(c.report.fn) + "," + std::to_string(c.report.mt) + "," +
           std::to_string(c.report.ml) + "," + (timing ? fmt("%.3f", c.fps) : std::string("-")) + "\n";
  }
  return out;
}

}  // namespace amot
