#include "amot/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "amot/assignment.hpp"

namespace amot {

namespace {

using FrameIndex = std::map<int, std::vector<FrameEntry>>;

FrameIndex index_by_frame(const std::vector<Trajectory>& trajectories) {
  FrameIndex out;
  for (const auto& t : trajectories) {
    for (const auto& p : t.points) out[p.frame].push_back({t.id, t.class_id, p.box});
  }
  return out;
}

double pair_iou(const FrameEntry& a, const FrameEntry& b) {
  return a.class_id == b.class_id ? iou(a.box, b.box) : 0.0;
}

long long total_points(const std::vector<Trajectory>& ts) {
  long long n = 0;
  for (const auto& t : ts) n += static_cast<long long>(t.points.size());
  return n;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

}  // namespace

FrameCorrespondence clear_match(const std::vector<FrameEntry>& gt, const std::vector<FrameEntry>& pred,
                                const std::map<int, int>& previous) {
  FrameCorrespondence out;
  std::vector<char> gt_used(gt.size(), 0), pred_used(pred.size(), 0);

  for (std::size_t g = 0; g < gt.size(); ++g) {
    const auto it = previous.find(gt[g].id);
    if (it == previous.end()) continue;
    for (std::size_t p = 0; p < pred.size(); ++p) {
      if (!pred_used[p] && pred[p].id == it->second && pair_iou(gt[g], pred[p]) >= kClearIouThreshold) {
        out.matches.emplace_back(gt[g].id, pred[p].id);
        gt_used[g] = pred_used[p] = 1;
        break;
      }
    }
  }

  std::vector<std::size_t> gt_rest, pred_rest;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    if (!gt_used[g]) gt_rest.push_back(g);
  }
  for (std::size_t p = 0; p < pred.size(); ++p) {
    if (!pred_used[p]) pred_rest.push_back(p);
  }
  CostMatrix cost(static_cast<Eigen::Index>(gt_rest.size()), static_cast<Eigen::Index>(pred_rest.size()));
  for (std::size_t a = 0; a < gt_rest.size(); ++a) {
    for (std::size_t b = 0; b < pred_rest.size(); ++b) {
      cost(a, b) = 1.0 - pair_iou(gt[gt_rest[a]], pred[pred_rest[b]]);
    }
  }
  const auto assignment = solve_assignment(cost, 1.0 - kClearIouThreshold);
  for (auto [a, b] : assignment.matches) {
    out.matches.emplace_back(gt[gt_rest[a]].id, pred[pred_rest[b]].id);
    gt_used[gt_rest[a]] = pred_used[pred_rest[b]] = 1;
  }
  for (std::size_t g = 0; g < gt.size(); ++g) {
    if (!gt_used[g]) out.false_negatives.push_back(gt[g].id);
  }
  for (std::size_t p = 0; p < pred.size(); ++p) {
    if (!pred_used[p]) out.false_positives.push_back(pred[p].id);
  }
  std::sort(out.matches.begin(), out.matches.end());
  return out;
}

double IdentityCounts::idf1() const {
  const long long denom = 2 * idtp + idfp + idfn;
  return denom == 0 ? 1.0 : 2.0 * static_cast<double>(idtp) / static_cast<double>(denom);
}

IdentityCounts identity_counts(const std::vector<Trajectory>& gt, const std::vector<Trajectory>& pred) {
  IdentityCounts c;
  const long long gt_total = total_points(gt);
  const long long pred_total = total_points(pred);
  if (!gt.empty() && !pred.empty()) {
    // Co-located frame counts for every (gt, pred) trajectory pair.
    CostMatrix overlap = CostMatrix::Zero(static_cast<Eigen::Index>(gt.size()), static_cast<Eigen::Index>(pred.size()));
    for (std::size_t g = 0; g < gt.size(); ++g) {
      for (std::size_t p = 0; p < pred.size(); ++p) {
        if (gt[g].class_id != pred[p].class_id) continue;
        const auto& a = gt[g].points;
        const auto& b = pred[p].points;
        std::size_t i = 0, k = 0;
        long long n = 0;
        while (i < a.size() && k < b.size()) {
          if (a[i].frame < b[k].frame) {
            ++i;
          } else if (b[k].frame < a[i].frame) {
            ++k;
          } else {
            if (iou(a[i].box, b[k].box) >= kClearIouThreshold) ++n;
            ++i;
            ++k;
          }
        }
        overlap(g, p) = static_cast<double>(n);
      }
    }
    const auto assignment = solve_assignment(-overlap);
    for (auto [g, p] : assignment.matches) c.idtp += static_cast<long long>(overlap(g, p));
  }
  c.idfn = gt_total - c.idtp;
  c.idfp = pred_total - c.idtp;
  return c;
}

double compute_idf1(const std::vector<Trajectory>& gt, const std::vector<Trajectory>& pred) {
  return identity_counts(gt, pred).idf1();
}

MetricsReport evaluate(const std::vector<Trajectory>& gt, const std::vector<Trajectory>& pred) {
  MetricsReport r;
  r.gt_count = total_points(gt);
  if (r.gt_count == 0) throw MetricsError("ground truth is empty; MOTA is undefined");
  r.gt_tracks = static_cast<int>(gt.size());

  const FrameIndex gt_frames = index_by_frame(gt);
  const FrameIndex pred_frames = index_by_frame(pred);
  std::set<int> frames;
  for (const auto& [f, _] : gt_frames) frames.insert(f);
  for (const auto& [f, _] : pred_frames) frames.insert(f);

  std::map<int, int> previous;    // last frame's correspondences
  std::map<int, int> last_match;  // most recent predicted id per gt id
  std::map<int, int> matched_frames;
  static const std::vector<FrameEntry> kNone;
  for (int f : frames) {
    const auto g = gt_frames.find(f);
    const auto p = pred_frames.find(f);
    const auto corr = clear_match(g == gt_frames.end() ? kNone : g->second,
                                  p == pred_frames.end() ? kNone : p->second, previous);
    r.fp += static_cast<long long>(corr.false_positives.size());
    r.fn += static_cast<long long>(corr.false_negatives.size());
    previous.clear();
    for (auto [gid, pid] : corr.matches) {
      const auto it = last_match.find(gid);
      if (it != last_match.end() && it->second != pid) ++r.ids;
      last_match[gid] = pid;
      previous[gid] = pid;
      ++matched_frames[gid];
    }
  }

  for (const auto& t : gt) {
    if (t.points.empty()) continue;
    const double ratio = static_cast<double>(matched_frames[t.id]) / static_cast<double>(t.points.size());
    if (ratio >= 0.8) ++r.mt;
    if (ratio <= 0.2) ++r.ml;
  }
  r.mota = 1.0 - static_cast<double>(r.fn + r.fp + r.ids) / static_cast<double>(r.gt_count);
  r.identity = identity_counts(gt, pred);
  r.idf1 = r.identity.idf1();
  return r;
}

std::string format_report_text(const MetricsReport& r) {
  std::string s;
  auto row = [&](const char* name, const std::string& value) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-8s %12s\n", name, value.c_str());
    s += buf;
  };
  row("MOTA", fmt("%.4f", r.mota));
  row("IDF1", fmt("%.4f", r.idf1));
  row("MT", std::to_string(r.mt));
  row("ML", std::to_string(r.ml));
  row("IDs", std::to_string(r.ids));
  row("FP", std::to_string(r.fp));
  row("FN", std::to_string(r.fn));
  row("GT", std::to_string(r.gt_count));
  return s;
}

std::string format_report_key_values(const MetricsReport& r) {
  std::string s;
  s += "mota=" + fmt("%.10g", r.mota) + "\n";
  s += "idf1=" + fmt("%.10g", r.idf1) + "\n";
  s += "mt=" + std::to_string(r.mt) + "\n";
  s += "ml=" + std::to_string(r.ml) + "\n";
  s += "mt_ratio=" + fmt("%.10g", r.mt_ratio()) + "\n";
  s += "ml_ratio=" + fmt("%.10g", r.ml_ratio()) + "\n";
  s += "ids=" + std::to_string(r.ids) + "\n";
  s += "fp=" + std::to_string(r.fp) + "\n";
  s += "fn=" + std::to_string(r.fn) + "\n";
  s += "gt_count=" + std::to_string(r.gt_count) + "\n";
  s += "gt_tracks=" + std::to_string(r.gt_tracks) + "\n";
  s += "idtp=" + std::to_string(r.identity.idtp) + "\n";
  s += "idfp=" + std::to_string(r.identity.idfp) + "\n";
  s += "idfn=" + std::to_string(r.identity.idfn) + "\n";
  return s;
}

}  // namespace amot
