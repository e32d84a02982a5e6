#include "amot/mtc.hpp"

#include <stdexcept>

namespace amot::mtc {

bool is_candidate(const Track& track, int current_frame, const TrackerConfig& cfg) {
  if (track.consecutive_reactivations >= cfg.reactivation_cap) return false;
  const auto need = static_cast<std::size_t>(cfg.mtc_min_consecutive);
  if (track.buffer.size() < need) return false;
  if (track.buffer.back().frame != current_frame - 1) return false;
  for (std::size_t k = track.buffer.size() - need + 1; k < track.buffer.size(); ++k) {
    if (track.buffer[k].frame != track.buffer[k - 1].frame + 1) return false;
  }
  return true;
}

std::vector<std::size_t> select_candidates(std::span<const Track> tracks, int current_frame,
                                           const TrackerConfig& cfg) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < tracks.size(); ++k) {
    if (is_candidate(tracks[k], current_frame, cfg)) out.push_back(k);
  }
  return out;
}

ReactivationCandidate mtc_distance(const Track& track, const amc::UnitGrid& grid_t) {
  const Embedding& latest = track.buffer.empty() ? track.embedding : track.buffer.back().embedding;
  const Embedding probe[] = {latest};
  const Cell c_reid = grid_t.peaks(probe).front();
  const BBox box = track.kf_state.box();
  return {track.id, track.class_id, box, box.center(), c_reid, distance(c_reid.point(), box.center())};
}

ReactivationCandidate mtc_distance(const Track& track, const FeatureMap& fm_t) {
  return mtc_distance(track, amc::UnitGrid(fm_t));
}

std::optional<BBox> decide_reactivation(const ReactivationCandidate& cand,
                                        std::span<const Detection> detections, const TrackerConfig& cfg) {
  if (!(cand.d_k < cfg.lambda_mtc)) return std::nullopt;
  for (const auto& det : detections) {
    if (det.class_id() == cand.class_id && iou(cand.box_kf, det.bbox()) >= cfg.mtc_overlap_gate) {
      return std::nullopt;
    }
  }
  return cand.box_kf;
}

}  // namespace amot::mtc
