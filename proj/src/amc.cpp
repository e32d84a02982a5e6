#include "amot/amc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace amot::amc {

namespace {

void check_dim(const GridGeometry& g, const Embedding& e) {
  if (e.size() != g.embed_dim) {
    throw std::invalid_argument("response map: embedding dimension " + std::to_string(e.size()) +
                                " does not match feature dimension " + std::to_string(g.embed_dim));
  }
}

}  // namespace

UnitGrid::UnitGrid(const FeatureMap& fm)
    : geometry_(fm.geometry()), unit_(static_cast<Eigen::Index>(fm.geometry().cells()), fm.geometry().embed_dim) {
  const Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> raw(
      fm.values().data(), unit_.rows(), unit_.cols());
  unit_ = raw.cast<double>();
  for (Eigen::Index r = 0; r < unit_.rows(); ++r) {
    const double n = unit_.row(r).norm();
    if (n > 0.0) unit_.row(r) /= n;
  }
}

ResponseMap UnitGrid::response(const Embedding& e) const {
  check_dim(geometry_, e);
  const Eigen::VectorXd col = unit_ * normalized(e).cast<double>();
  ResponseMap out{geometry_, std::vector<double>(col.size())};
  for (Eigen::Index i = 0; i < col.size(); ++i) out.values[i] = std::clamp(col(i), -1.0, 1.0);
  return out;
}

std::vector<Cell> UnitGrid::peaks(std::span<const Embedding> embeddings) const {
  std::vector<Cell> out;
  if (embeddings.empty()) return out;
  Eigen::MatrixXd e(geometry_.embed_dim, static_cast<Eigen::Index>(embeddings.size()));
  for (std::size_t k = 0; k < embeddings.size(); ++k) {
    check_dim(geometry_, embeddings[k]);
    e.col(static_cast<Eigen::Index>(k)) = normalized(embeddings[k]).cast<double>();
  }
  const Eigen::MatrixXd responses = unit_ * e;
  out.reserve(embeddings.size());
  for (Eigen::Index k = 0; k < responses.cols(); ++k) {
    Eigen::Index best = 0;
    double best_value = std::clamp(responses(0, k), -1.0, 1.0);
    for (Eigen::Index i = 1; i < responses.rows(); ++i) {
      const double v = std::clamp(responses(i, k), -1.0, 1.0);
      if (v > best_value) {
        best_value = v;
        best = i;
      }
    }
    out.push_back({static_cast<int>(best % geometry_.width), static_cast<int>(best / geometry_.width)});
  }
  return out;
}

ResponseMap response_map(const FeatureMap& fm, const Embedding& e) {
  check_dim(fm.geometry(), e);
  return UnitGrid(fm).response(e);
}

Cell argmax_center(const ResponseMap& r) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.values.size(); ++i) {
    if (r.values[i] > r.values[best]) best = i;
  }
  const auto w = static_cast<std::size_t>(r.geometry.width);
  return {static_cast<int>(best % w), static_cast<int>(best / w)};
}

Distances bidirectional_distances(std::span<const Anchor> tracks, std::span<const Anchor> detections,
                                  const UnitGrid& grid_t, const UnitGrid& grid_prev) {
  if (!(grid_t.geometry() == grid_prev.geometry())) {
    throw std::invalid_argument("bidirectional distances: feature map geometries differ");
  }
  std::vector<Embedding> trk_emb, det_emb;
  for (const auto& a : tracks) trk_emb.push_back(a.embedding);
  for (const auto& a : detections) det_emb.push_back(a.embedding);

  Distances d;
  d.centers.q_trk = grid_t.peaks(trk_emb);
  d.centers.q_det = grid_prev.peaks(det_emb);
  const auto m = static_cast<Eigen::Index>(tracks.size());
  const auto n = static_cast<Eigen::Index>(detections.size());
  d.forward.resize(m, n);
  d.backward.resize(m, n);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      d.forward(j, i) = distance(d.centers.q_trk[j].point(), detections[i].center);
      d.backward(j, i) = distance(d.centers.q_det[i].point(), tracks[j].center);
    }
  }
  return d;
}

Distances bidirectional_distances(std::span<const Anchor> tracks, std::span<const Anchor> detections,
                                  const FeatureMap& fm_t, const FeatureMap& fm_prev) {
  if (!(fm_t.geometry() == fm_prev.geometry())) {
    throw std::invalid_argument("bidirectional distances: feature map geometries differ");
  }
  return bidirectional_distances(tracks, detections, UnitGrid(fm_t), UnitGrid(fm_prev));
}

CostMatrix amc_matrix(const Eigen::MatrixXd& forward, const Eigen::MatrixXd& backward, double sigma) {
  if (forward.rows() != backward.rows() || forward.cols() != backward.cols()) {
    throw std::invalid_argument("amc matrix: distance matrices differ in shape");
  }
  if (!(sigma > 0.0)) throw std::invalid_argument("amc matrix: sigma must be positive");
  const double denom = 2.0 * sigma * sigma;
  // expm1 keeps full relative precision for near-zero distances.
  return (forward + backward).unaryExpr([denom](double s) { return -std::expm1(-s / denom); });
}

}  // namespace amot::amc
