#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace amot {

// All association math runs in feature-grid coordinates. Image pixels only
// appear at serialization boundaries (grid_to_image / image_to_grid).

struct GridGeometry {
  int height = 152;
  int width = 272;
  int embed_dim = 128;
  int stride = 4;

  GridGeometry() = default;
  GridGeometry(int height, int width, int embed_dim, int stride);

  std::size_t cells() const { return static_cast<std::size_t>(height) * width; }
  bool operator==(const GridGeometry&) const = default;
};

struct GridPoint {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const GridPoint&) const = default;
};

double distance(GridPoint a, GridPoint b);

GridPoint grid_to_image(GridPoint p, const GridGeometry& geom);
GridPoint image_to_grid(GridPoint p, const GridGeometry& geom);

// Integer cell containing a grid point, clamped into the grid.
struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
  GridPoint point() const { return {static_cast<double>(x), static_cast<double>(y)}; }
};

Cell nearest_cell(GridPoint p, const GridGeometry& geom);

// Center/size box in grid cells.
class BBox {
 public:
  BBox(double cx, double cy, double w, double h);

  double cx() const { return cx_; }
  double cy() const { return cy_; }
  double w() const { return w_; }
  double h() const { return h_; }
  GridPoint center() const { return {cx_, cy_}; }
  double left() const { return cx_ - 0.5 * w_; }
  double top() const { return cy_ - 0.5 * h_; }
  double right() const { return cx_ + 0.5 * w_; }
  double bottom() const { return cy_ + 0.5 * h_; }
  double area() const { return w_ * h_; }

  static BBox from_corners(double x1, double y1, double x2, double y2);
  static BBox from_tlwh(double x, double y, double w, double h);

  bool operator==(const BBox&) const = default;

 private:
  double cx_, cy_, w_, h_;
};

double iou(const BBox& a, const BBox& b);

using Embedding = Eigen::VectorXf;

// Returns e / ||e|| (computed in double). Throws on zero or non-finite input.
Embedding normalized(const Embedding& e);

class Detection {
 public:
  // Embedding is unit-normalized on ingestion.
  Detection(BBox bbox, double confidence, int class_id, const Embedding& embedding);

  const BBox& bbox() const { return bbox_; }
  double confidence() const { return confidence_; }
  int class_id() const { return class_id_; }
  const Embedding& embedding() const { return embedding_; }

 private:
  BBox bbox_;
  double confidence_;
  int class_id_;
  Embedding embedding_;
};

struct KalmanState {
  Eigen::Matrix<double, 8, 1> mean;
  Eigen::Matrix<double, 8, 8> covariance;

  BBox box() const;
};

enum class TrackStatus { Tentative, Active, Lost, Removed };

struct TrackSnapshot {
  int frame;
  BBox box;
  Embedding embedding;
};

struct Track {
  int id = 0;
  int class_id = 0;
  KalmanState kf_state;
  Embedding embedding;
  TrackStatus status = TrackStatus::Active;
  std::deque<TrackSnapshot> buffer;
  int frames_since_update = 0;
  int consecutive_reactivations = 0;
  double confidence = 0.0;

  // Appends a snapshot, dropping the oldest beyond capacity. Frame indices
  // must be strictly increasing.
  void push_snapshot(TrackSnapshot snap, std::size_t capacity);
};

// Dense H x W x D grid stored row-major as (y, x, d).
class FeatureMap {
 public:
  explicit FeatureMap(GridGeometry geometry);
  FeatureMap(GridGeometry geometry, std::vector<float> values);

  const GridGeometry& geometry() const { return geometry_; }
  std::span<const float> cell(int x, int y) const;
  std::span<float> cell(int x, int y);
  const std::vector<float>& values() const { return values_; }
  std::vector<float>& values() { return values_; }

  FeatureMap scaled(float factor) const;

 private:
  GridGeometry geometry_;
  std::vector<float> values_;
};

// H x W map of cosine similarities in [-1, 1], row-major (y, x).
struct ResponseMap {
  GridGeometry geometry;
  std::vector<double> values;

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * geometry.width + x]; }
};

// Rows are tracks, columns are detections.
using CostMatrix = Eigen::MatrixXd;

}  // namespace amot
