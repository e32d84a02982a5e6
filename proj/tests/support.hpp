#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "amot/simgen.hpp"
#include "amot/types.hpp"

namespace amot::fixtures {

inline Embedding unit(int dim, int axis) {
  Embedding e = Embedding::Zero(dim);
  e(axis) = 1.0f;
  return e;
}

inline Embedding random_unit(std::mt19937_64& gen, int dim) {
  std::normal_distribution<double> n;
  Eigen::VectorXd v(dim);
  for (int k = 0; k < dim; ++k) v(k) = n(gen);
  return (v / v.norm()).cast<float>();
}

inline FeatureMap zero_map(const GridGeometry& g) { return FeatureMap(g); }

inline void plant(FeatureMap& fm, int x, int y, const Embedding& e) {
  auto c = fm.cell(x, y);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = e(static_cast<Eigen::Index>(k));
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("amot_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Two objects of distinct appearance approach each other horizontally until
// their centers are one cell apart, then bounce back. A constant-velocity motion model carries them through each
// other, so motion-only association swaps identities at the turn.
inline ScenarioBundle crossing_bundle(int frames = 24) {
  const GridGeometry g(40, 60, 16, 4);
  ScriptedObject a, b;
  a.embedding = unit(16, 0);
  b.embedding = unit(16, 1);
  const int meet = frames / 2;
  for (int t = 0; t < frames; ++t) {
    const double s = t <= meet ? t : 2 * meet - t;
    a.boxes.emplace_back(10.0 + 1.5 * s, 20.0, 6.0, 6.0);
    b.boxes.emplace_back(47.0 - 1.5 * s, 20.0, 6.0, 6.0);
  }
  return build_scripted(g, {a, b}, 7);
}

// One object at constant velocity whose detection is missing on one frame.
inline ScenarioBundle dropped_frame_bundle(int frames = 20, int missed = 10) {
  const GridGeometry g(40, 80, 16, 4);
  ScriptedObject o;
  o.embedding = unit(16, 3);
  for (int t = 0; t < frames; ++t) o.boxes.emplace_back(10.0 + 1.0 * t, 20.0, 6.0, 8.0);
  o.missed.insert(missed);
  return build_scripted(g, {o}, 11);
}

}  // namespace amot::fixtures
