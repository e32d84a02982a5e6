#pragma once

#include <string>
#include <vector>

#include "amot/config.hpp"
#include "amot/metrics.hpp"

namespace amot {

class ScenarioBundle;
class DiskSequence;

// Named association variants used by the ablation and frame-interval
// experiments:
//   iou-only      IoU cost alone (two-stage IoU tracker)
//   app-only      appearance cost alone in stage 1
//   iou+app       IoU fused with appearance
//   iou+amc       C_AMC * C_IOU, no appearance term
//   iou+amc+mtc   as above plus track continuation
//   amc           full unified cost, no continuation
//   mtc           IoU fused with appearance, plus continuation
//   amc+mtc       full model
TrackerConfig variant_config(const std::string& variant, TrackerConfig base = {});
const std::vector<std::string>& known_variants();

struct ExperimentGrid {
  std::vector<int> intervals{1, 2, 3, 4, 5};
  std::vector<std::string> variants{"iou-only", "app-only", "amc", "amc+mtc"};

  void validate() const;
};

struct SweepCell {
  std::string variant;
  int interval = 1;
  bool ok = false;
  std::string error;
  MetricsReport report;
  double fps = 0.0;  // association frames per second; only meaningful when timed
};

struct SweepOptions {
  TrackerConfig base;
  int jobs = 1;
  bool timing = false;
};

// Cells are ordered variant-major, in grid order. A failing cell is marked
// and the rest of the grid still runs.
std::vector<SweepCell> run_sweep(const ScenarioBundle& bundle, const ExperimentGrid& grid, const SweepOptions& opt);
std::vector<SweepCell> run_sweep(const DiskSequence& sequence, const ExperimentGrid& grid, const SweepOptions& opt);

std::string format_sweep_table(const std::vector<SweepCell>& cells, bool timing);
std::string format_sweep_csv(const std::vector<SweepCell>& cells, bool timing);

}  // namespace amot
