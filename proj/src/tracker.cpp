#include "amot/tracker.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "amot/assignment.hpp"
#include "amot/kalman.hpp"
#include "amot/mtc.hpp"

namespace amot {

namespace {

BBox to_image(const BBox& b, const GridGeometry& g) {
  const double s = g.stride;
  return BBox(b.cx() * s, b.cy() * s, b.w() * s, b.h() * s);
}

template <typename T>
std::vector<T> pick(const std::vector<T>& all, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(all[i]);
  return out;
}

}  // namespace

Tracker::Tracker(TrackerConfig cfg, GridGeometry geometry) : cfg_(cfg), geometry_(geometry) { cfg_.validate(); }

FrameResult Tracker::step(std::span<const Detection> detections, const FeatureMap& fm_t, const FeatureMap* fm_prev,
                          int frame) {
  if (fm_prev && !(fm_prev->geometry() == fm_t.geometry())) {
    throw std::invalid_argument("tracker step: feature map geometries differ");
  }
  std::optional<amc::UnitGrid> grid_t, grid_prev;
  if (needs_feature_maps()) {
    grid_t.emplace(fm_t);
    if (fm_prev) grid_prev.emplace(*fm_prev);
  }
  return step(detections, grid_t ? &*grid_t : nullptr, grid_prev ? &*grid_prev : nullptr, frame);
}

FrameResult Tracker::step(std::span<const Detection> detections, const amc::UnitGrid* grid_t,
                          const amc::UnitGrid* grid_prev, int frame) {
  if (grid_t && grid_prev && !(grid_t->geometry() == grid_prev->geometry())) {
    throw std::invalid_argument("tracker step: feature map geometries differ");
  }
  for (const auto& d : detections) {
    if (d.embedding().size() != geometry_.embed_dim) {
      throw std::invalid_argument("tracker step: detection embedding dimension mismatch");
    }
  }

  // (1) predict; remember each track's center in the previous frame
  std::vector<amc::Anchor> track_anchors;
  track_anchors.reserve(tracks_.size());
  for (auto& t : tracks_) {
    track_anchors.push_back({t.kf_state.box().center(), t.embedding});
    t.kf_state = kalman::predict(t.kf_state);
  }

  // (2) confidence split
  std::vector<std::size_t> high, low;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const double c = detections[i].confidence();
    if (c >= cfg_.conf_high) {
      high.push_back(i);
    } else if (c >= cfg_.conf_low) {
      low.push_back(i);
    }
  }
  std::vector<Detection> det_high, det_low;
  for (auto i : high) det_high.push_back(detections[i]);
  for (auto i : low) det_low.push_back(detections[i]);

  std::vector<int> track_match(tracks_.size(), -1);  // index into `detections`
  std::vector<char> high_used(high.size(), 0);

  // (3) stage 1: unified cost against high-confidence detections
  std::vector<std::size_t> unmatched_tracks;
  if (!tracks_.empty() && !det_high.empty()) {
    const auto m = static_cast<Eigen::Index>(tracks_.size());
    const auto n = static_cast<Eigen::Index>(det_high.size());
    std::optional<CostMatrix> motion;
    if (cfg_.use_amc) {
      if (!grid_t || !grid_prev) {
        throw std::invalid_argument("tracker step: AMC needs the current and previous feature maps");
      }
      std::vector<amc::Anchor> det_anchors;
      det_anchors.reserve(det_high.size());
      for (const auto& d : det_high) det_anchors.push_back({d.bbox().center(), d.embedding()});
      const auto dist = amc::bidirectional_distances(track_anchors, det_anchors, *grid_t, *grid_prev);
      motion = amc::amc_matrix(dist.forward, dist.backward, cfg_.sigma);
    }
    if (cfg_.use_iou) {
      const CostMatrix c_iou = iou_cost_matrix(tracks_, det_high);
      motion = motion ? CostMatrix(motion->cwiseProduct(c_iou)) : c_iou;
    }
    const CostMatrix c_app =
        cfg_.use_app ? appearance_cost_matrix(tracks_, det_high) : CostMatrix(CostMatrix::Zero(m, n));
    CostMatrix unified = fuse_motion_appearance(motion ? *motion : CostMatrix(CostMatrix::Zero(m, n)), c_app);
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (tracks_[j].class_id != det_high[i].class_id()) unified(j, i) = 1.0;
      }
    }
    const auto assignment = solve_assignment(unified, cfg_.gate_stage1);
    for (auto [row, col] : assignment.matches) {
      track_match[row] = static_cast<int>(high[col]);
      high_used[col] = 1;
    }
    for (int row : assignment.unmatched_rows) unmatched_tracks.push_back(row);
  } else {
    for (std::size_t j = 0; j < tracks_.size(); ++j) unmatched_tracks.push_back(j);
  }

  // (4) stage 2: IoU only against low-confidence detections
  std::vector<std::size_t> still_unmatched;
  if (!unmatched_tracks.empty() && !det_low.empty()) {
    const auto pending = pick(tracks_, unmatched_tracks);
    const auto assignment = solve_assignment(iou_cost_matrix(pending, det_low), cfg_.gate_stage2);
    for (auto [row, col] : assignment.matches) track_match[unmatched_tracks[row]] = static_cast<int>(low[col]);
    for (int row : assignment.unmatched_rows) still_unmatched.push_back(unmatched_tracks[row]);
  } else {
    still_unmatched = unmatched_tracks;
  }

  // (5) motion-aware continuation of the remaining tracks
  std::vector<std::optional<BBox>> reactivated(tracks_.size());
  if (cfg_.use_mtc && !still_unmatched.empty()) {
    for (auto j : still_unmatched) {
      if (!mtc::is_candidate(tracks_[j], frame, cfg_)) continue;
      if (!grid_t) throw std::invalid_argument("tracker step: MTC needs the current feature map");
      const auto cand = mtc::mtc_distance(tracks_[j], *grid_t);
      reactivated[j] = mtc::decide_reactivation(cand, detections, cfg_);
    }
  }

  // (6) state updates
  const auto buffer_cap = static_cast<std::size_t>(cfg_.buffer_len);
  FrameResult result;
  result.frame = frame;
  for (std::size_t j = 0; j < tracks_.size(); ++j) {
    Track& t = tracks_[j];
    if (track_match[j] >= 0) {
      const Detection& d = detections[track_match[j]];
      t.kf_state = kalman::update(t.kf_state, d.bbox());
      const Embedding blended =
          (cfg_.embed_momentum * t.embedding.cast<double>() + (1.0 - cfg_.embed_momentum) * d.embedding().cast<double>())
              .cast<float>();
      t.embedding = normalized(blended);
      t.status = TrackStatus::Active;
      t.frames_since_update = 0;
      t.consecutive_reactivations = 0;
      t.confidence = d.confidence();
      t.push_snapshot({frame, d.bbox(), d.embedding()}, buffer_cap);
      result.outputs.push_back({t.id, t.class_id, to_image(d.bbox(), geometry_), d.confidence(), Provenance::Matched});
    } else if (reactivated[j]) {
      const BBox box = *reactivated[j];
      const Embedding latest = t.buffer.back().embedding;
      t.status = TrackStatus::Active;
      t.frames_since_update = 0;
      ++t.consecutive_reactivations;
      t.push_snapshot({frame, box, latest}, buffer_cap);
      result.outputs.push_back({t.id, t.class_id, to_image(box, geometry_), t.confidence, Provenance::Reactivated});
    } else {
      t.status = TrackStatus::Lost;
      ++t.frames_since_update;
    }
  }

  // (7) removal
  for (auto& t : tracks_) {
    if (t.frames_since_update > cfg_.max_lost_frames) t.status = TrackStatus::Removed;
  }
  std::erase_if(tracks_, [](const Track& t) { return t.status == TrackStatus::Removed; });

  // (8) new tracks from leftover high-confidence detections, (9) first snapshot
  for (std::size_t k = 0; k < high.size(); ++k) {
    if (high_used[k]) continue;
    const Detection& d = detections[high[k]];
    Track t;
    t.id = next_id_++;
    t.class_id = d.class_id();
    t.kf_state = kalman::init(d.bbox());
    t.embedding = d.embedding();
    t.status = TrackStatus::Active;
    t.confidence = d.confidence();
    t.push_snapshot({frame, d.bbox(), d.embedding()}, buffer_cap);
    result.outputs.push_back({t.id, t.class_id, to_image(d.bbox(), geometry_), d.confidence(), Provenance::Matched});
    tracks_.push_back(std::move(t));
  }

  std::sort(result.outputs.begin(), result.outputs.end(),
            [](const TrackOutput& a, const TrackOutput& b) { return a.track_id < b.track_id; });
  return result;
}

InMemoryFrames::InMemoryFrames(GridGeometry geometry, std::vector<std::vector<Detection>> detections,
                               std::vector<FeatureMap> feature_maps)
    : geometry_(geometry), detections_(std::move(detections)), maps_(std::move(feature_maps)) {
  if (detections_.size() != maps_.size()) {
    throw std::invalid_argument("in-memory frames: detection and feature map counts differ");
  }
}

SequenceError::SequenceError(std::size_t frame, const std::string& what)
    : std::runtime_error("frame " + std::to_string(frame) + ": " + what), frame_(frame) {}

std::vector<FrameResult> run_sequence(const FrameSource& frames, const TrackerConfig& cfg) {
  Tracker tracker(cfg, frames.geometry());
  std::vector<FrameResult> results;
  results.reserve(frames.frame_count());
  std::optional<amc::UnitGrid> prev_grid;
  for (std::size_t t = 0; t < frames.frame_count(); ++t) {
    try {
      auto dets = frames.detections(t);
      std::erase_if(dets, [&](const Detection& d) { return !(d.confidence() > cfg.tau_det); });
      std::optional<amc::UnitGrid> grid;
      if (tracker.needs_feature_maps()) {
        const FeatureMap fm = frames.feature_map(t);
        if (!(fm.geometry() == frames.geometry())) {
          throw std::invalid_argument("feature map geometry differs from the sequence geometry");
        }
        grid.emplace(fm);
      }
      results.push_back(tracker.step(dets, grid ? &*grid : nullptr, prev_grid ? &*prev_grid : nullptr,
                                     static_cast<int>(t)));
      prev_grid = std::move(grid);
    } catch (const SequenceError&) {
      throw;
    } catch (const std::exception& e) {
      throw SequenceError(t, e.what());
    }
  }
  return results;
}

}  // namespace amot
