#pragma once

#include <span>
#include <vector>

#include "amot/types.hpp"

namespace amot::amc {

// Feature map with every cell vector scaled to unit length (zero cells stay
// zero), so a response map is one matrix-vector product.
class UnitGrid {
 public:
  explicit UnitGrid(const FeatureMap& fm);

  const GridGeometry& geometry() const { return geometry_; }

  ResponseMap response(const Embedding& e) const;
  // Argmax cell of each embedding's response map.
  std::vector<Cell> peaks(std::span<const Embedding> embeddings) const;

 private:
  GridGeometry geometry_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> unit_;
};

ResponseMap response_map(const FeatureMap& fm, const Embedding& e);

// Ties resolve to the smallest row-major index (rows are y).
Cell argmax_center(const ResponseMap& r);

// Observed center and appearance of one track or detection.
struct Anchor {
  GridPoint center;
  Embedding embedding;
};

struct PredictedCenters {
  std::vector<Cell> q_trk;  // tracks located in frame t
  std::vector<Cell> q_det;  // detections located in frame t-1
};

struct Distances {
  Eigen::MatrixXd forward;   // tracks x detections
  Eigen::MatrixXd backward;  // tracks x detections
  PredictedCenters centers;
};

// forward(j, i): track j's appearance peak in frame t to detection i's center.
// backward(j, i): detection i's appearance peak in frame t-1 to track j's center.
Distances bidirectional_distances(std::span<const Anchor> tracks, std::span<const Anchor> detections,
                                  const UnitGrid& grid_t, const UnitGrid& grid_prev);
Distances bidirectional_distances(std::span<const Anchor> tracks, std::span<const Anchor> detections,
                                  const FeatureMap& fm_t, const FeatureMap& fm_prev);

// 1 - exp(-(D_f + D_b) / (2 sigma^2)), elementwise.
CostMatrix amc_matrix(const Eigen::MatrixXd& forward, const Eigen::MatrixXd& backward, double sigma);

}  // namespace amot::amc
