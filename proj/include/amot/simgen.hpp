#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "amot/metrics.hpp"
#include "amot/tracker.hpp"
#include "amot/types.hpp"

namespace amot {

// Portable random stream: mt19937_64 bits with explicit conversions, so a
// seed gives the same scenario on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t bits() { return engine_(); }
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  int poisson(double mean);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

enum class MotionModel { ConstantVelocity, Turning, RandomWalk, Mixed };

struct ScenarioSpec {
  std::uint64_t seed = 0;
  int num_objects = 10;
  int num_frames = 100;
  GridGeometry geometry;
  MotionModel motion = MotionModel::Mixed;
  double speed_min = 0.5;  // cells/frame
  double speed_max = 2.0;
  double turn_rate = 0.05;      // rad/frame, turning objects
  double camera_motion = 0.0;   // max global shift per axis, cells/frame
  double dropout = 0.0;         // object absent from detections and feature map
  double miss_prob = 0.0;       // detector miss; appearance still in the feature map
  double conf_min = 0.6;
  double conf_max = 0.95;
  double clutter_rate = 0.0;    // mean false detections per frame
  double clutter_conf_min = 0.45;
  double clutter_conf_max = 0.7;
  double embed_noise = 0.0;     // per-component std added before normalization
  double distractor_similarity = 0.0;  // cosine of odd identities to their predecessor
  double box_min = 4.0;         // cells
  double box_max = 8.0;
  int num_classes = 1;
  std::vector<std::pair<int, int>> scripted_misses;  // (object, frame)

  void validate() const;
};

// `seed` is required; every other key defaults. Unknown keys are an error.
ScenarioSpec scenario_spec_from(const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> to_key_values(const ScenarioSpec& spec);

struct PlantedObject {
  GridPoint center;
  double w;
  double h;
  Embedding embedding;
};

// Everything needed to render one frame's feature map on demand.
struct FramePlan {
  std::vector<PlantedObject> planted;
  std::uint64_t background_seed = 0;
};

// Background cells get random vectors with norm in [0.05, 0.1]. Each planted
// object writes weight * embedding over its box with a Gaussian weight that
// is exactly 1 at the cell nearest its center; the remaining (1 - weight)
// share is background. Overlapping objects add.
FeatureMap render_feature_map(const GridGeometry& geometry, const FramePlan& plan);
int count_overlapping_cells(const GridGeometry& geometry, const FramePlan& plan);

class ScenarioBundle : public FrameSource {
 public:
  GridGeometry geometry() const override { return geometry_; }
  std::size_t frame_count() const override { return detections_.size(); }
  std::vector<Detection> detections(std::size_t frame) const override { return detections_.at(frame); }
  FeatureMap feature_map(std::size_t frame) const override { return render_feature_map(geometry_, plans_.at(frame)); }

  const std::vector<GroundTruthTrack>& ground_truth() const { return gt_; }
  const std::vector<std::vector<Detection>>& all_detections() const { return detections_; }
  const std::vector<FramePlan>& plans() const { return plans_; }
  const std::map<std::string, std::string>& manifest() const { return manifest_; }

  ScenarioBundle(GridGeometry geometry, std::vector<GroundTruthTrack> gt, std::vector<std::vector<Detection>> dets,
                 std::vector<FramePlan> plans, std::map<std::string, std::string> manifest);

 private:
  GridGeometry geometry_;
  std::vector<GroundTruthTrack> gt_;
  std::vector<std::vector<Detection>> detections_;
  std::vector<FramePlan> plans_;
  std::map<std::string, std::string> manifest_;
};

ScenarioBundle generate(const ScenarioSpec& spec);

// Hand-built scenario: each object has one box per frame (grid cells) and is
// always planted in the feature map; it emits no detection on `missed` frames.
struct ScriptedObject {
  int class_id = 0;
  Embedding embedding;
  std::vector<BBox> boxes;
  std::set<int> missed;
  double confidence = 0.9;
};
ScenarioBundle build_scripted(const GridGeometry& geometry, const std::vector<ScriptedObject>& objects,
                              std::uint64_t seed);

// Keeps frames 0, k, 2k, ... and renumbers them consecutively.
ScenarioBundle subsample(const ScenarioBundle& bundle, int k);
std::vector<Trajectory> subsample_trajectories(const std::vector<Trajectory>& trajectories, int k);

struct ScoreMap {
  int height = 0;
  int width = 0;
  int classes = 1;
  std::vector<float> values;  // (y, x, class)
  float at(int x, int y, int c) const { return values[(static_cast<std::size_t>(y) * width + x) * classes + c]; }
};

struct SizeMap {
  int height = 0;
  int width = 0;
  std::vector<float> values;  // (y, x, {w, h})
};

// Cells scoring above tau that strictly exceed their 3x3 neighbours (per
// class) become detections centered on the cell, sized from `sizes`, with
// the embedding read from `embeddings` at the same cell.
std::vector<Detection> decode_detections(const ScoreMap& scores, const SizeMap& sizes, const FeatureMap& embeddings,
                                         double tau);

Embedding random_unit_embedding(Rng& rng, int dim);

}  // namespace amot
