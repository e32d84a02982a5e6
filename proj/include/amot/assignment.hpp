#pragma once

#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "amot/types.hpp"

namespace amot {

struct AssignmentResult {
  std::vector<std::pair<int, int>> matches;  // (row, col), sorted by row
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

// Among matchings that only use entries <= gate, returns one of maximum
// cardinality and, among those, minimum total cost. Costs must be finite.
AssignmentResult solve_assignment(const CostMatrix& cost,
                                  double gate = std::numeric_limits<double>::infinity());

// 1 - IoU between the (already predicted) track boxes and detection boxes.
// Cross-class pairs cost 1.
CostMatrix iou_cost_matrix(std::span<const Track> tracks, std::span<const Detection> detections);

// (1 - cos) / 2 between track and detection embeddings. Cross-class pairs cost 1.
CostMatrix appearance_cost_matrix(std::span<const Track> tracks, std::span<const Detection> detections);

// 1 - (1 - motion) * (1 - appearance), where motion is C_AMC * C_IOU for the
// full model.
CostMatrix fuse_unified(const CostMatrix& amc, const CostMatrix& iou_cost, const CostMatrix& app);
CostMatrix fuse_motion_appearance(const CostMatrix& motion, const CostMatrix& app);

}  // namespace amot
