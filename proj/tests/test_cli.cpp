#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "amot/commands.hpp"
#include "amot/mot_io.hpp"
#include "support.hpp"

using amot::fixtures::scratch_dir;
using amot::fixtures::slurp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome amot_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "amot");
  std::ostringstream out, err;
  const int code = amot::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const char* kSmallSpec =
    "seed=3\nnum_objects=4\nnum_frames=15\nheight=30\nwidth=40\nembed_dim=8\nstride=4\n"
    "camera_motion=0.5\nclutter_rate=0.3\n";

}  // namespace

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(amot_cli({}).code, 1);
  EXPECT_EQ(amot_cli({"frobnicate"}).code, 1);
  EXPECT_EQ(amot_cli({"track", "--out", "x"}).code, 1);
  EXPECT_EQ(amot_cli({"eval", "--gt", "/nonexistent/gt.txt", "--results", "/nonexistent/r.txt"}).code, 1);
  EXPECT_EQ(amot_cli({"--help"}).code, 0);
}

TEST(Cli, SimulateRequiresSeed) {
  const auto dir = scratch_dir("cli_seed");
  write(dir / "spec.txt", "num_objects=2\n");
  const auto r = amot_cli({"simulate", "--spec", (dir / "spec.txt").string(), "--out", (dir / "b").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("seed"), std::string::npos) << r.err;
}

TEST(Cli, SimulateTrackEvalPipelineIsDeterministic) {
  const auto dir = scratch_dir("cli_pipeline");
  write(dir / "spec.txt", kSmallSpec);
  std::string first_results;
  for (int run = 0; run < 2; ++run) {
    const fs::path bundle = dir / ("b" + std::to_string(run));
    const fs::path results = dir / ("r" + std::to_string(run) + ".txt");
    auto s = amot_cli({"simulate", "--spec", (dir / "spec.txt").string(), "--out", bundle.string()});
    ASSERT_EQ(s.code, 0) << s.err;
    EXPECT_EQ(s.out, "wrote 15 frames to " + bundle.string() + "\n");
    const std::string manifest = slurp(bundle / "manifest.txt");
    EXPECT_NE(manifest.find("spec.seed=3\n"), std::string::npos);
    EXPECT_NE(manifest.find("spec.clutter_rate=0.3\n"), std::string::npos);

    auto t = amot_cli({"track", "--det-dir", bundle.string(), "--out", results.string()});
    ASSERT_EQ(t.code, 0) << t.err;
    EXPECT_EQ(t.out.rfind("tracked 15 frames", 0), 0u);
    if (run == 0) {
      first_results = slurp(results);
      EXPECT_FALSE(first_results.empty());
    } else {
      EXPECT_EQ(slurp(results), first_results);
      EXPECT_EQ(slurp(dir / "b0" / "det.txt"), slurp(bundle / "det.txt"));
      EXPECT_EQ(slurp(dir / "b0" / "emb.bin"), slurp(bundle / "emb.bin"));
    }
  }
  auto e = amot_cli({"eval", "--gt", (dir / "b0" / "gt.txt").string(), "--results", (dir / "r0.txt").string(),
                     "--out", (dir / "m.txt").string()});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("IDF1"), std::string::npos);
  EXPECT_NE(slurp(dir / "m.txt").find("idf1="), std::string::npos);
}

TEST(Cli, SeedOverrideChangesTheScenario) {
  const auto dir = scratch_dir("cli_override");
  write(dir / "spec.txt", kSmallSpec);
  ASSERT_EQ(amot_cli({"simulate", "--spec", (dir / "spec.txt").string(), "--out", (dir / "a").string()}).code, 0);
  ASSERT_EQ(
      amot_cli({"simulate", "--spec", (dir / "spec.txt").string(), "--out", (dir / "b").string(), "--seed", "4"}).code,
      0);
  EXPECT_NE(slurp(dir / "a" / "det.txt"), slurp(dir / "b" / "det.txt"));
  EXPECT_NE(slurp(dir / "b" / "manifest.txt").find("spec.seed=4\n"), std::string::npos);
}

TEST(Cli, FlagOrderDoesNotMatter) {
  const auto dir = scratch_dir("cli_flags");
  write(dir / "spec.txt", kSmallSpec);
  ASSERT_EQ(amot_cli({"simulate", "--spec", (dir / "spec.txt").string(), "--out", (dir / "b").string()}).code, 0);
  const auto b = (dir / "b").string();
  ASSERT_EQ(amot_cli({"track", "--det-dir", b, "--out", (dir / "x.txt").string(), "--no-amc", "--no-mtc"}).code, 0);
  ASSERT_EQ(amot_cli({"track", "--no-mtc", "--det-dir", b, "--no-amc", "--out", (dir / "y.txt").string()}).code, 0);
  EXPECT_EQ(slurp(dir / "x.txt"), slurp(dir / "y.txt"));
}

TEST(Cli, TrackEmptyDirectoryWritesEmptyFile) {
  const auto dir = scratch_dir("cli_empty");
  fs::create_directories(dir / "dets");
  const auto r = amot_cli({"track", "--det-dir", (dir / "dets").string(), "--out", (dir / "r.txt").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  ASSERT_TRUE(fs::exists(dir / "r.txt"));
  EXPECT_TRUE(slurp(dir / "r.txt").empty());
}

TEST(Cli, TrackRejectsBadConfig) {
  const auto dir = scratch_dir("cli_badcfg");
  fs::create_directories(dir / "dets");
  write(dir / "cfg.txt", "sigma=-1\n");
  const auto r = amot_cli({"track", "--det-dir", (dir / "dets").string(), "--config", (dir / "cfg.txt").string(),
                           "--out", (dir / "r.txt").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("sigma"), std::string::npos) << r.err;
}

TEST(Cli, EvalFixtureAndErrors) {
  const auto dir = scratch_dir("cli_eval");
  write(dir / "gt.txt", "1,1,40,40,20,20,1,0\n2,1,40,40,20,20,1,0\n3,1,40,40,20,20,1,0\n");
  write(dir / "res.txt", "1,7,40,40,20,20,0.9,0,-1,-1\n3,7,40,40,20,20,0.9,0,-1,-1\n");
  const auto ok = amot_cli({"eval", "--gt", (dir / "gt.txt").string(), "--results", (dir / "res.txt").string(),
                            "--out", (dir / "m.txt").string()});
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(slurp(dir / "m.txt").find("mota=0.6666666667\n"), std::string::npos);

  write(dir / "bad.txt", "1,7,40,40,20,20,0.9\n2,7,40,40\n");
  const auto bad = amot_cli({"eval", "--gt", (dir / "gt.txt").string(), "--results", (dir / "bad.txt").string()});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("bad.txt:2"), std::string::npos) << bad.err;

  write(dir / "empty.txt", "");
  const auto none = amot_cli({"eval", "--gt", (dir / "empty.txt").string(), "--results", (dir / "res.txt").string()});
  EXPECT_NE(none.code, 0);
  EXPECT_FALSE(none.err.empty());
}

TEST(Cli, SweepPerfectSingleCellAndFailedCell) {
  const auto dir = scratch_dir("cli_sweep");
  amot::save_bundle(amot::fixtures::dropped_frame_bundle(), dir / "b");
  const auto r = amot_cli({"sweep", "--scenario", (dir / "b").string(), "--out", (dir / "t.txt").string(),
                           "--intervals", "1,50", "--variants", "amc+mtc"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir / "t.csv");
  EXPECT_NE(csv.find("amc+mtc,1,1.000000,"), std::string::npos) << csv;
  EXPECT_NE(csv.find("amc+mtc,50,failed"), std::string::npos) << csv;
  EXPECT_NE(csv.find(",-\n"), std::string::npos);
  EXPECT_EQ(slurp(dir / "t.txt"), r.out);

  const auto bad = amot_cli({"sweep", "--scenario", (dir / "b").string(), "--out", (dir / "u.txt").string(),
                             "--variants", "teleport"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("teleport"), std::string::npos);
}
