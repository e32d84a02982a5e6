#include "amot/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace amot {

namespace {

// Lexicographic cost: first the number of gate-violating pairs used, then
// the summed cost of admissible pairs. Potentials stay exact in the count.
struct LexCost {
  long long count = 0;
  double value = 0.0;

  LexCost operator+(const LexCost& o) const { return {count + o.count, value + o.value}; }
  LexCost operator-(const LexCost& o) const { return {count - o.count, value - o.value}; }
  LexCost& operator+=(const LexCost& o) { return *this = *this + o; }
  LexCost& operator-=(const LexCost& o) { return *this = *this - o; }
  bool operator<(const LexCost& o) const {
    return count != o.count ? count < o.count : value < o.value;
  }
};

constexpr LexCost kInfinity{std::numeric_limits<long long>::max() / 4, 0.0};

// Shortest augmenting path Hungarian method; rows <= cols. Returns the
// column assigned to each row.
std::vector<int> hungarian(const std::vector<std::vector<LexCost>>& a, int rows, int cols) {
  std::vector<LexCost> u(rows + 1), v(cols + 1);
  std::vector<int> p(cols + 1, 0), way(cols + 1, 0);
  for (int i = 1; i <= rows; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<LexCost> minv(cols + 1, kInfinity);
    std::vector<char> used(cols + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      LexCost delta = kInfinity;
      int j1 = 0;
      for (int j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const LexCost cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(rows, -1);
  for (int j = 1; j <= cols; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

AssignmentResult solve_assignment(const CostMatrix& cost, double gate) {
  if (!cost.allFinite()) throw std::invalid_argument("assignment: cost matrix has non-finite entries");
  const int m = static_cast<int>(cost.rows());
  const int n = static_cast<int>(cost.cols());
  AssignmentResult result;
  std::vector<char> row_used(m, 0), col_used(n, 0);

  if (m > 0 && n > 0) {
    const bool transposed = m > n;
    const int rows = transposed ? n : m;
    const int cols = transposed ? m : n;
    std::vector<std::vector<LexCost>> a(rows, std::vector<LexCost>(cols));
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double v = transposed ? cost(c, r) : cost(r, c);
        a[r][c] = v <= gate ? LexCost{0, v} : LexCost{1, 0.0};
      }
    }
    const auto assigned = hungarian(a, rows, cols);
    for (int r = 0; r < rows; ++r) {
      const int c = assigned[r];
      if (c < 0) continue;
      const int row = transposed ? c : r;
      const int col = transposed ? r : c;
      if (cost(row, col) <= gate) {
        result.matches.emplace_back(row, col);
        row_used[row] = 1;
        col_used[col] = 1;
      }
    }
    std::sort(result.matches.begin(), result.matches.end());
  }
  for (int r = 0; r < m; ++r) {
    if (!row_used[r]) result.unmatched_rows.push_back(r);
  }
  for (int c = 0; c < n; ++c) {
    if (!col_used[c]) result.unmatched_cols.push_back(c);
  }
  return result;
}

CostMatrix iou_cost_matrix(std::span<const Track> tracks, std::span<const Detection> detections) {
  CostMatrix c(static_cast<Eigen::Index>(tracks.size()), static_cast<Eigen::Index>(detections.size()));
  for (std::size_t j = 0; j < tracks.size(); ++j) {
    const BBox box = tracks[j].kf_state.box();
    for (std::size_t i = 0; i < detections.size(); ++i) {
      c(j, i) = tracks[j].class_id == detections[i].class_id() ? 1.0 - iou(box, detections[i].bbox()) : 1.0;
    }
  }
  return c;
}

CostMatrix appearance_cost_matrix(std::span<const Track> tracks, std::span<const Detection> detections) {
  CostMatrix c(static_cast<Eigen::Index>(tracks.size()), static_cast<Eigen::Index>(detections.size()));
  for (std::size_t j = 0; j < tracks.size(); ++j) {
    const Eigen::VectorXd te = tracks[j].embedding.cast<double>();
    for (std::size_t i = 0; i < detections.size(); ++i) {
      if (tracks[j].class_id != detections[i].class_id()) {
        c(j, i) = 1.0;
        continue;
      }
      const double cosine = std::clamp(te.dot(detections[i].embedding().cast<double>()), -1.0, 1.0);
      c(j, i) = 0.5 * (1.0 - cosine);
    }
  }
  return c;
}

CostMatrix fuse_motion_appearance(const CostMatrix& motion, const CostMatrix& app) {
  if (motion.rows() != app.rows() || motion.cols() != app.cols()) {
    throw std::invalid_argument("fuse: cost matrices differ in shape");
  }
  return motion.binaryExpr(app, [](double x, double y) {
    // Both forms are the same algebra; the second avoids cancellation when
    // the result is small.
    const double direct = 1.0 - (1.0 - x) * (1.0 - y);
    return direct >= 0.5 ? direct : x + y * (1.0 - x);
  });
}

CostMatrix fuse_unified(const CostMatrix& amc, const CostMatrix& iou_cost, const CostMatrix& app) {
  if (amc.rows() != iou_cost.rows() || amc.cols() != iou_cost.cols()) {
    throw std::invalid_argument("fuse: cost matrices differ in shape");
  }
  return fuse_motion_appearance(amc.cwiseProduct(iou_cost), app);
}

}  // namespace amot
