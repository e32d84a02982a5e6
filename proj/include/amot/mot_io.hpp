#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "amot/metrics.hpp"
#include "amot/simgen.hpp"
#include "amot/tracker.hpp"

namespace amot {

// Malformed or inconsistent input data (as opposed to usage errors).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One MOTChallenge text row. Frames and ids are 1-based on disk and 0-based
// (frames) in memory; boxes are top-left/size in image pixels on disk.
struct MotRow {
  int frame;  // 0-based
  int id;
  BBox box;   // image pixels
  double conf;
  int class_id;
};

// Accepts `frame,id,x,y,w,h,conf[,class[,...]]`; class defaults to 0.
std::vector<MotRow> parse_mot_rows(std::istream& in, const std::string& source);
std::vector<MotRow> read_mot_rows(const std::filesystem::path& path);

// Ground truth rows with conf == 0 are ignored, as in MOTChallenge.
std::vector<Trajectory> read_ground_truth(const std::filesystem::path& path);
std::vector<Trajectory> trajectories_from_rows(const std::vector<MotRow>& rows);
std::vector<Trajectory> trajectories_from_results(const std::vector<FrameResult>& results);

void write_results(std::ostream& out, const std::vector<FrameResult>& results);
void write_ground_truth(std::ostream& out, const std::vector<Trajectory>& gt);
void write_detections(std::ostream& out, const std::vector<std::vector<Detection>>& frames, const GridGeometry& g);

// "AMOTEMB1", u32 count, u32 dim, count * dim little-endian f32.
void write_embeddings(std::ostream& out, const std::vector<Embedding>& embeddings, int dim);
std::vector<Embedding> read_embeddings(std::istream& in, const std::string& source);

// "AMOTFMP1", u32 H, u32 W, u32 D, H*W*D little-endian f32 in (y, x, d) order.
void write_feature_map(std::ostream& out, const FeatureMap& fm);
FeatureMap read_feature_map(std::istream& in, const std::string& source);
FeatureMap read_feature_map(const std::filesystem::path& path);

void write_key_values(std::ostream& out, const std::map<std::string, std::string>& kv);

// Bundle directory layout: manifest.txt, gt.txt, det.txt, emb.bin,
// fmap/NNNNNN.fmp (1-based frame numbers).
void save_bundle(const ScenarioBundle& bundle, const std::filesystem::path& dir);

// Detection directory read back from disk; feature maps load lazily.
class DiskSequence : public FrameSource {
 public:
  // An empty directory (no det.txt) is a valid zero-frame sequence.
  explicit DiskSequence(const std::filesystem::path& dir);

  GridGeometry geometry() const override { return geometry_; }
  std::size_t frame_count() const override { return frames_.size(); }
  std::vector<Detection> detections(std::size_t frame) const override;
  FeatureMap feature_map(std::size_t frame) const override;

  // Ground truth if gt.txt exists, renumbered to match this view's frames.
  std::vector<Trajectory> ground_truth() const;
  DiskSequence subsample(int k) const;

 private:
  DiskSequence() = default;

  std::filesystem::path dir_;
  GridGeometry geometry_;
  std::vector<std::vector<Detection>> detections_;  // indexed by original frame
  std::vector<int> frames_;                          // original frame per view frame
  int interval_ = 1;
};

}  // namespace amot
