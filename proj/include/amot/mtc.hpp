#pragma once

#include <optional>
#include <span>
#include <vector>

#include "amot/amc.hpp"
#include "amot/config.hpp"
#include "amot/types.hpp"

namespace amot::mtc {

struct ReactivationCandidate {
  int track_id;
  int class_id;
  BBox box_kf;
  GridPoint c_kf;
  Cell c_reid;
  double d_k;
};

// A track qualifies when its newest snapshot is from the previous frame, its
// last `mtc_min_consecutive` snapshots have consecutive frame indices, and it
// has not hit the consecutive-reactivation cap.
bool is_candidate(const Track& track, int current_frame, const TrackerConfig& cfg);

// Indices into `tracks` of qualifying tracks, in input order.
std::vector<std::size_t> select_candidates(std::span<const Track> tracks, int current_frame,
                                           const TrackerConfig& cfg);

// `track.kf_state` must already hold this frame's prediction. The appearance
// peak uses the embedding of the newest buffer snapshot.
ReactivationCandidate mtc_distance(const Track& track, const amc::UnitGrid& grid_t);
ReactivationCandidate mtc_distance(const Track& track, const FeatureMap& fm_t);

// Returns the box to emit when the track should be carried forward.
std::optional<BBox> decide_reactivation(const ReactivationCandidate& cand,
                                        std::span<const Detection> detections, const TrackerConfig& cfg);

}  // namespace amot::mtc
