#include <gtest/gtest.h>

#include <random>

#include "amot/kalman.hpp"
#include "amot/mtc.hpp"
#include "support.hpp"

using namespace amot;
using amot::fixtures::plant;
using amot::fixtures::unit;

namespace {

Track track_with_frames(std::initializer_list<int> frames, int dim = 8) {
  Track t;
  t.id = 1;
  t.embedding = unit(dim, 0);
  t.kf_state = kalman::init(BBox(10, 10, 4, 4));
  for (int f : frames) t.push_snapshot({f, BBox(10, 10, 4, 4), unit(dim, 0)}, 20);
  return t;
}

mtc::ReactivationCandidate candidate(double d_k, BBox box = BBox(10, 10, 4, 4)) {
  return {1, 0, box, box.center(), Cell{10, 10}, d_k};
}

}  // namespace

TEST(SelectCandidates, ConsecutiveRecentBufferQualifies) {
  const TrackerConfig cfg;
  EXPECT_TRUE(mtc::is_candidate(track_with_frames({5, 6, 7}), 8, cfg));
  EXPECT_FALSE(mtc::is_candidate(track_with_frames({2, 3, 7}), 8, cfg));
  EXPECT_FALSE(mtc::is_candidate(track_with_frames({6, 7}), 8, cfg));
  EXPECT_FALSE(mtc::is_candidate(track_with_frames({4, 5, 6}), 8, cfg));  // newest snapshot too old
  EXPECT_TRUE(mtc::is_candidate(track_with_frames({1, 3, 5, 6, 7}), 8, cfg));
}

TEST(SelectCandidates, ReactivationCapExcludes) {
  const TrackerConfig cfg;
  Track t = track_with_frames({5, 6, 7});
  t.consecutive_reactivations = 5;
  EXPECT_FALSE(mtc::is_candidate(t, 8, cfg));
  t.consecutive_reactivations = 4;
  EXPECT_TRUE(mtc::is_candidate(t, 8, cfg));
}

TEST(SelectCandidates, ReturnsIndicesInInputOrder) {
  const TrackerConfig cfg;
  const std::vector<Track> tracks{track_with_frames({5, 6, 7}), track_with_frames({7}),
                                  track_with_frames({4, 5, 6, 7})};
  EXPECT_EQ(mtc::select_candidates(tracks, 8, cfg), (std::vector<std::size_t>{0, 2}));
}

TEST(MtcDistance, CoincidentPeakIsZero) {
  const GridGeometry g(30, 30, 8, 1);
  FeatureMap fm(g);
  Track t = track_with_frames({5, 6, 7});
  plant(fm, 10, 10, unit(8, 0));
  const auto c = mtc::mtc_distance(t, fm);
  EXPECT_EQ(c.c_reid, (Cell{10, 10}));
  EXPECT_DOUBLE_EQ(c.d_k, 0.0);
  EXPECT_EQ(c.box_kf, t.kf_state.box());
}

TEST(MtcDistance, PythagoreanExample) {
  const GridGeometry g(30, 30, 8, 1);
  FeatureMap fm(g);
  Track t = track_with_frames({5, 6, 7});
  plant(fm, 13, 14, unit(8, 0));
  const auto c = mtc::mtc_distance(t, fm);
  EXPECT_EQ(c.c_kf, (GridPoint{10, 10}));
  EXPECT_DOUBLE_EQ(c.d_k, 5.0);
}

TEST(MtcDistance, UsesNewestSnapshotEmbedding) {
  const GridGeometry g(30, 30, 8, 1);
  FeatureMap fm(g);
  Track t = track_with_frames({5, 6});
  t.push_snapshot({7, BBox(10, 10, 4, 4), unit(8, 3)}, 20);
  plant(fm, 2, 2, unit(8, 0));
  plant(fm, 20, 25, unit(8, 3));
  EXPECT_EQ(mtc::mtc_distance(t, fm).c_reid, (Cell{20, 25}));
}

TEST(MtcDistance, DimensionMismatchThrows) {
  Track t = track_with_frames({5, 6, 7}, 8);
  EXPECT_THROW(mtc::mtc_distance(t, FeatureMap(GridGeometry(5, 5, 4, 1))), std::invalid_argument);
}

TEST(MtcDistanceProperty, MatchesIndependentRecomputation) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> pos(3, 37), vel(-2, 2);
  std::uniform_int_distribution<int> cell(0, 39);
  const GridGeometry g(40, 40, 8, 1);
  for (int trial = 0; trial < 200; ++trial) {
    FeatureMap fm(g);
    const int px = cell(gen), py = cell(gen);
    const Embedding e = amot::fixtures::random_unit(gen, 8);
    plant(fm, px, py, e);
    Track t;
    t.id = trial + 1;
    t.kf_state = kalman::init(BBox(pos(gen), pos(gen), 4, 6));
    t.kf_state.mean(4) = vel(gen);
    t.kf_state.mean(5) = vel(gen);
    t.kf_state = kalman::predict(t.kf_state);
    t.push_snapshot({0, BBox(1, 1, 1, 1), e}, 20);
    const auto c = mtc::mtc_distance(t, fm);
    const double cx = t.kf_state.mean(0), cy = t.kf_state.mean(1);
    EXPECT_EQ(c.c_reid, (Cell{px, py}));
    EXPECT_NEAR(c.d_k, std::sqrt((px - cx) * (px - cx) + (py - cy) * (py - cy)), 1e-9);
  }
}

TEST(DecideReactivation, Examples) {
  const TrackerConfig cfg;
  const Embedding e = unit(4, 0);
  EXPECT_TRUE(mtc::decide_reactivation(candidate(0.0), {}, cfg).has_value());
  EXPECT_FALSE(mtc::decide_reactivation(candidate(10.0), {}, cfg).has_value());
  EXPECT_FALSE(mtc::decide_reactivation(candidate(3.0), {}, cfg).has_value());  // strict gate

  // IoU of (10,10,4,4) with (10.2,10,4,4) is 0.9
  const std::vector<Detection> overlapping{Detection(BBox(10.2, 10, 4, 4), 0.9, 0, e)};
  EXPECT_GT(iou(BBox(10, 10, 4, 4), overlapping[0].bbox()), 0.89);
  EXPECT_FALSE(mtc::decide_reactivation(candidate(2.0), overlapping, cfg).has_value());

  // the same detection of another class does not block
  const std::vector<Detection> other_class{Detection(BBox(10.2, 10, 4, 4), 0.9, 1, e)};
  const auto box = mtc::decide_reactivation(candidate(2.0), other_class, cfg);
  ASSERT_TRUE(box.has_value());
  EXPECT_EQ(*box, BBox(10, 10, 4, 4));
}

TEST(DecideReactivation, Deterministic) {
  const TrackerConfig cfg;
  const std::vector<Detection> dets{Detection(BBox(13, 10, 4, 4), 0.9, 0, unit(4, 0))};
  for (double d : {0.0, 1.0, 2.9, 3.1}) {
    EXPECT_EQ(mtc::decide_reactivation(candidate(d), dets, cfg), mtc::decide_reactivation(candidate(d), dets, cfg));
  }
}
