#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "amot/amc.hpp"
#include "amot/config.hpp"
#include "amot/types.hpp"

namespace amot {

enum class Provenance { Matched, Reactivated };

struct TrackOutput {
  int track_id;
  int class_id;
  BBox box;  // image pixels
  double confidence;
  Provenance provenance;
};

struct FrameResult {
  int frame = 0;  // 0-based
  std::vector<TrackOutput> outputs;  // sorted by track id
};

// Two-stage appearance/motion tracker. One instance per sequence; frames
// must be fed in order.
class Tracker {
 public:
  Tracker(TrackerConfig cfg, GridGeometry geometry);

  // Detections must already be thresholded at tau_det. The unit grids may be
  // null when the configuration uses neither AMC nor MTC; `grid_prev` may
  // also be null on the first frame.
  FrameResult step(std::span<const Detection> detections, const amc::UnitGrid* grid_t,
                   const amc::UnitGrid* grid_prev, int frame);
  FrameResult step(std::span<const Detection> detections, const FeatureMap& fm_t, const FeatureMap* fm_prev,
                   int frame);

  const std::vector<Track>& tracks() const { return tracks_; }
  const TrackerConfig& config() const { return cfg_; }
  bool needs_feature_maps() const { return cfg_.use_amc || cfg_.use_mtc; }

 private:
  TrackerConfig cfg_;
  GridGeometry geometry_;
  std::vector<Track> tracks_;
  int next_id_ = 1;
};

// Per-frame input stream. Frame indices are 0-based and consecutive.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual GridGeometry geometry() const = 0;
  virtual std::size_t frame_count() const = 0;
  virtual std::vector<Detection> detections(std::size_t frame) const = 0;
  virtual FeatureMap feature_map(std::size_t frame) const = 0;
};

class InMemoryFrames : public FrameSource {
 public:
  InMemoryFrames(GridGeometry geometry, std::vector<std::vector<Detection>> detections,
                 std::vector<FeatureMap> feature_maps);

  GridGeometry geometry() const override { return geometry_; }
  std::size_t frame_count() const override { return detections_.size(); }
  std::vector<Detection> detections(std::size_t frame) const override { return detections_.at(frame); }
  FeatureMap feature_map(std::size_t frame) const override { return maps_.at(frame); }

 private:
  GridGeometry geometry_;
  std::vector<std::vector<Detection>> detections_;
  std::vector<FeatureMap> maps_;
};

class SequenceError : public std::runtime_error {
 public:
  SequenceError(std::size_t frame, const std::string& what);
  std::size_t frame() const { return frame_; }

 private:
  std::size_t frame_;
};

// Applies the tau_det threshold, keeps exactly one previous feature map, and
// runs the tracker over every frame. Errors carry the failing frame index.
std::vector<FrameResult> run_sequence(const FrameSource& frames, const TrackerConfig& cfg);

}  // namespace amot
