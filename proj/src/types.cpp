#include "amot/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace amot {

GridGeometry::GridGeometry(int height, int width, int embed_dim, int stride)
    : height(height), width(width), embed_dim(embed_dim), stride(stride) {
  if (height < 1 || width < 1 || embed_dim < 1 || stride < 1) {
    throw std::invalid_argument("grid geometry: height, width, embed_dim and stride must be >= 1");
  }
}

double distance(GridPoint a, GridPoint b) { return std::hypot(a.x - b.x, a.y - b.y); }

GridPoint grid_to_image(GridPoint p, const GridGeometry& geom) {
  return {p.x * geom.stride, p.y * geom.stride};
}

GridPoint image_to_grid(GridPoint p, const GridGeometry& geom) {
  return {p.x / geom.stride, p.y / geom.stride};
}

Cell nearest_cell(GridPoint p, const GridGeometry& geom) {
  const int x = static_cast<int>(std::lround(p.x));
  const int y = static_cast<int>(std::lround(p.y));
  return {std::clamp(x, 0, geom.width - 1), std::clamp(y, 0, geom.height - 1)};
}

BBox::BBox(double cx, double cy, double w, double h) : cx_(cx), cy_(cy), w_(w), h_(h) {
  if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(w) || !std::isfinite(h)) {
    throw std::invalid_argument("bbox: non-finite component");
  }
  if (!(w > 0.0) || !(h > 0.0)) {
    throw std::invalid_argument("bbox: width and height must be positive");
  }
}

BBox BBox::from_corners(double x1, double y1, double x2, double y2) {
  return BBox(0.5 * (x1 + x2), 0.5 * (y1 + y2), x2 - x1, y2 - y1);
}

BBox BBox::from_tlwh(double x, double y, double w, double h) {
  return BBox(x + 0.5 * w, y + 0.5 * h, w, h);
}

double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

Embedding normalized(const Embedding& e) {
  const Eigen::VectorXd d = e.cast<double>();
  const double n = d.norm();
  if (!std::isfinite(n) || n == 0.0) {
    throw std::invalid_argument("embedding: zero or non-finite norm");
  }
  return (d / n).cast<float>();
}

Detection::Detection(BBox bbox, double confidence, int class_id, const Embedding& embedding)
    : bbox_(bbox), confidence_(confidence), class_id_(class_id), embedding_(normalized(embedding)) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw std::invalid_argument("detection: confidence outside [0, 1]");
  }
  if (class_id < 0) throw std::invalid_argument("detection: negative class id");
}

BBox KalmanState::box() const {
  const double h = mean(3);
  return BBox(mean(0), mean(1), mean(2) * h, h);
}

void Track::push_snapshot(TrackSnapshot snap, std::size_t capacity) {
  if (!buffer.empty() && snap.frame <= buffer.back().frame) {
    throw std::logic_error("track buffer: frame indices must be strictly increasing");
  }
  buffer.push_back(std::move(snap));
  while (buffer.size() > capacity) buffer.pop_front();
}

FeatureMap::FeatureMap(GridGeometry geometry)
    : geometry_(geometry), values_(geometry.cells() * geometry.embed_dim, 0.0f) {}

FeatureMap::FeatureMap(GridGeometry geometry, std::vector<float> values)
    : geometry_(geometry), values_(std::move(values)) {
  if (values_.size() != geometry_.cells() * geometry_.embed_dim) {
    throw std::invalid_argument("feature map: expected " +
                                std::to_string(geometry_.cells() * geometry_.embed_dim) +
                                " values, got " + std::to_string(values_.size()));
  }
  for (float v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("feature map: non-finite value");
  }
}

std::span<const float> FeatureMap::cell(int x, int y) const {
  const std::size_t d = geometry_.embed_dim;
  return {values_.data() + (static_cast<std::size_t>(y) * geometry_.width + x) * d, d};
}

std::span<float> FeatureMap::cell(int x, int y) {
  const std::size_t d = geometry_.embed_dim;
  return {values_.data() + (static_cast<std::size_t>(y) * geometry_.width + x) * d, d};
}

FeatureMap FeatureMap::scaled(float factor) const {
  FeatureMap out(geometry_);
  std::transform(values_.begin(), values_.end(), out.values_.begin(),
                 [factor](float v) { return v * factor; });
  return out;
}

}  // namespace amot
