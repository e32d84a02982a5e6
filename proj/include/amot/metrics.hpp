#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "amot/types.hpp"

namespace amot {

inline constexpr double kClearIouThreshold = 0.5;

struct TrajectoryPoint {
  int frame;
  BBox box;  // image pixels
};

// One identity over time; used for both ground truth and tracker output.
struct Trajectory {
  int id = 0;
  int class_id = 0;
  std::vector<TrajectoryPoint> points;  // strictly increasing frames
};
using GroundTruthTrack = Trajectory;

struct FrameEntry {
  int id;
  int class_id;
  BBox box;
};

struct FrameCorrespondence {
  std::vector<std::pair<int, int>> matches;  // (gt id, predicted id)
  std::vector<int> false_positives;          // predicted ids
  std::vector<int> false_negatives;          // gt ids
};

// Keeps last frame's (gt, pred) pairs that still overlap, then solves the
// rest with IoU >= 0.5 as the admissibility gate. Only same-class pairs match.
FrameCorrespondence clear_match(const std::vector<FrameEntry>& gt, const std::vector<FrameEntry>& pred,
                                const std::map<int, int>& previous = {});

struct IdentityCounts {
  long long idtp = 0;
  long long idfp = 0;
  long long idfn = 0;
  double idf1() const;
};

IdentityCounts identity_counts(const std::vector<Trajectory>& gt, const std::vector<Trajectory>& pred);
double compute_idf1(const std::vector<Trajectory>& gt, const std::vector<Trajectory>& pred);

struct MetricsReport {
  double mota = 0.0;
  double idf1 = 0.0;
  int mt = 0;
  int ml = 0;
  int ids = 0;
  long long fp = 0;
  long long fn = 0;
  long long gt_count = 0;  // ground-truth boxes
  int gt_tracks = 0;
  IdentityCounts identity;

  double mt_ratio() const { return gt_tracks ? static_cast<double>(mt) / gt_tracks : 0.0; }
  double ml_ratio() const { return gt_tracks ? static_cast<double>(ml) / gt_tracks : 0.0; }
};

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws MetricsError when the ground truth holds no boxes.
MetricsReport evaluate(const std::vector<Trajectory>& gt, const std::vector<Trajectory>& pred);

std::string format_report_text(const MetricsReport& r);
std::string format_report_key_values(const MetricsReport& r);

}  // namespace amot
