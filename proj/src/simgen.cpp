#include "amot/simgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "amot/config.hpp"

namespace amot {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

int Rng::poisson(double mean) {
  if (mean <= 0.0) return 0;
  const double limit = std::exp(-mean);
  int k = 0;
  double p = uniform();
  while (p > limit) {
    ++k;
    p *= uniform();
  }
  return k;
}

Embedding random_unit_embedding(Rng& rng, int dim) {
  Eigen::VectorXd v(dim);
  do {
    for (int i = 0; i < dim; ++i) v(i) = rng.normal();
  } while (v.norm() == 0.0);
  return (v / v.norm()).cast<float>();
}

namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const char* motion_name(MotionModel m) {
  switch (m) {
    case MotionModel::ConstantVelocity: return "constant-velocity";
    case MotionModel::Turning: return "turning";
    case MotionModel::RandomWalk: return "random-walk";
    case MotionModel::Mixed: return "mixed";
  }
  return "mixed";
}

MotionModel parse_motion(const std::string& key, const std::string& v) {
  if (v == "constant-velocity") return MotionModel::ConstantVelocity;
  if (v == "turning") return MotionModel::Turning;
  if (v == "random-walk") return MotionModel::RandomWalk;
  if (v == "mixed") return MotionModel::Mixed;
  throw ConfigError("key '" + key + "': unknown motion model '" + v + "'");
}

std::vector<std::pair<int, int>> parse_misses(const std::string& key, const std::string& v) {
  std::vector<std::pair<int, int>> out;
  std::size_t pos = 0;
  while (pos < v.size()) {
    auto comma = v.find(',', pos);
    if (comma == std::string::npos) comma = v.size();
    const std::string item = v.substr(pos, comma - pos);
    const auto at = item.find('@');
    if (at == std::string::npos) throw ConfigError("key '" + key + "': expected object@frame, got '" + item + "'");
    out.emplace_back(static_cast<int>(parse_int(key, item.substr(0, at))),
                     static_cast<int>(parse_int(key, item.substr(at + 1))));
    pos = comma + 1;
  }
  return out;
}

struct Box {
  int x0, x1, y0, y1;  // inclusive cell range
  int px, py;          // peak cell
  double sx, sy;
};

Box cell_box(const GridGeometry& g, const PlantedObject& o) {
  const Cell peak = nearest_cell(o.center, g);
  Box b;
  b.px = peak.x;
  b.py = peak.y;
  b.x0 = std::clamp(static_cast<int>(std::ceil(o.center.x - 0.5 * o.w)), 0, g.width - 1);
  b.x1 = std::clamp(static_cast<int>(std::floor(o.center.x + 0.5 * o.w)), 0, g.width - 1);
  b.y0 = std::clamp(static_cast<int>(std::ceil(o.center.y - 0.5 * o.h)), 0, g.height - 1);
  b.y1 = std::clamp(static_cast<int>(std::floor(o.center.y + 0.5 * o.h)), 0, g.height - 1);
  b.x0 = std::min(b.x0, b.px);
  b.x1 = std::max(b.x1, b.px);
  b.y0 = std::min(b.y0, b.py);
  b.y1 = std::max(b.y1, b.py);
  b.sx = std::max(0.25 * o.w, 0.5);
  b.sy = std::max(0.25 * o.h, 0.5);
  return b;
}

double weight(const Box& b, int x, int y) {
  const double dx = (x - b.px) / b.sx;
  const double dy = (y - b.py) / b.sy;
  return std::exp(-0.5 * (dx * dx + dy * dy));
}

BBox scale_box(const BBox& b, double s) { return BBox(b.cx() * s, b.cy() * s, b.w() * s, b.h() * s); }

}  // namespace

void ScenarioSpec::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid scenario spec: " + what);
  };
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  require(num_objects >= 1, "num_objects must be >= 1");
  require(num_frames >= 1, "num_frames must be >= 1");
  require(speed_min >= 0.0 && speed_max >= speed_min, "speeds must satisfy 0 <= speed_min <= speed_max");
  require(turn_rate >= 0.0, "turn_rate must be >= 0");
  require(camera_motion >= 0.0, "camera_motion must be >= 0");
  require(prob(dropout), "dropout must lie in [0, 1]");
  require(prob(miss_prob), "miss_prob must lie in [0, 1]");
  require(prob(conf_min) && prob(conf_max) && conf_min <= conf_max, "conf_min/conf_max must be ordered in [0, 1]");
  require(prob(clutter_conf_min) && prob(clutter_conf_max) && clutter_conf_min <= clutter_conf_max,
          "clutter_conf_min/clutter_conf_max must be ordered in [0, 1]");
  require(clutter_rate >= 0.0, "clutter_rate must be >= 0");
  require(embed_noise >= 0.0, "embed_noise must be >= 0");
  require(distractor_similarity >= 0.0 && distractor_similarity < 1.0, "distractor_similarity must lie in [0, 1)");
  require(box_min > 0.0 && box_max >= box_min, "box sizes must satisfy 0 < box_min <= box_max");
  require(box_max + 2.0 < geometry.width && box_max + 2.0 < geometry.height, "boxes must fit inside the grid");
  require(num_classes >= 1, "num_classes must be >= 1");
  for (auto [obj, frame] : scripted_misses) {
    require(obj >= 0 && obj < num_objects && frame >= 0 && frame < num_frames,
            "scripted miss " + std::to_string(obj) + "@" + std::to_string(frame) + " out of range");
  }
}

ScenarioSpec scenario_spec_from(const std::map<std::string, std::string>& kv) {
  if (!kv.contains("seed")) throw ConfigError("scenario spec: missing required key 'seed'");
  ScenarioSpec s;
  int height = s.geometry.height, width = s.geometry.width, dim = s.geometry.embed_dim, stride = s.geometry.stride;
  for (const auto& [k, v] : kv) {
    auto i = [&] { return static_cast<int>(parse_int(k, v)); };
    auto d = [&] { return parse_double(k, v); };
    if (k == "seed") {
      const long long seed = parse_int(k, v);
      if (seed < 0) throw ConfigError("key 'seed': must be non-negative");
      s.seed = static_cast<std::uint64_t>(seed);
    } else if (k == "num_objects") s.num_objects = i();
    else if (k == "num_frames") s.num_frames = i();
    else if (k == "height") height = i();
    else if (k == "width") width = i();
    else if (k == "embed_dim") dim = i();
    else if (k == "stride") stride = i();
    else if (k == "motion") s.motion = parse_motion(k, v);
    else if (k == "speed_min") s.speed_min = d();
    else if (k == "speed_max") s.speed_max = d();
    else if (k == "turn_rate") s.turn_rate = d();
    else if (k == "camera_motion") s.camera_motion = d();
    else if (k == "dropout") s.dropout = d();
    else if (k == "miss_prob") s.miss_prob = d();
    else if (k == "conf_min") s.conf_min = d();
    else if (k == "conf_max") s.conf_max = d();
    else if (k == "clutter_rate") s.clutter_rate = d();
    else if (k == "clutter_conf_min") s.clutter_conf_min = d();
    else if (k == "clutter_conf_max") s.clutter_conf_max = d();
    else if (k == "embed_noise") s.embed_noise = d();
    else if (k == "distractor_similarity") s.distractor_similarity = d();
    else if (k == "box_min") s.box_min = d();
    else if (k == "box_max") s.box_max = d();
    else if (k == "num_classes") s.num_classes = i();
    else if (k == "scripted_misses") s.scripted_misses = parse_misses(k, v);
    else throw ConfigError("scenario spec: unknown key '" + k + "'");
  }
  try {
    s.geometry = GridGeometry(height, width, dim, stride);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scenario spec: ") + e.what());
  }
  s.validate();
  return s;
}

std::map<std::string, std::string> to_key_values(const ScenarioSpec& s) {
  std::string misses;
  for (auto [obj, frame] : s.scripted_misses) {
    if (!misses.empty()) misses += ',';
    misses += std::to_string(obj) + "@" + std::to_string(frame);
  }
  return {
      {"seed", std::to_string(s.seed)},
      {"num_objects", std::to_string(s.num_objects)},
      {"num_frames", std::to_string(s.num_frames)},
      {"height", std::to_string(s.geometry.height)},
      {"width", std::to_string(s.geometry.width)},
      {"embed_dim", std::to_string(s.geometry.embed_dim)},
      {"stride", std::to_string(s.geometry.stride)},
      {"motion", motion_name(s.motion)},
      {"speed_min", num(s.speed_min)},
      {"speed_max", num(s.speed_max)},
      {"turn_rate", num(s.turn_rate)},
      {"camera_motion", num(s.camera_motion)},
      {"dropout", num(s.dropout)},
      {"miss_prob", num(s.miss_prob)},
      {"conf_min", num(s.conf_min)},
      {"conf_max", num(s.conf_max)},
      {"clutter_rate", num(s.clutter_rate)},
      {"clutter_conf_min", num(s.clutter_conf_min)},
      {"clutter_conf_max", num(s.clutter_conf_max)},
      {"embed_noise", num(s.embed_noise)},
      {"distractor_similarity", num(s.distractor_similarity)},
      {"box_min", num(s.box_min)},
      {"box_max", num(s.box_max)},
      {"num_classes", std::to_string(s.num_classes)},
      {"scripted_misses", misses},
  };
}

FeatureMap render_feature_map(const GridGeometry& g, const FramePlan& plan) {
  const int dim = g.embed_dim;
  std::vector<float> values(g.cells() * dim);
  Rng rng(plan.background_seed);
  Eigen::VectorXd v(dim);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    double n2 = 0.0;
    do {
      for (int k = 0; k < dim; ++k) v(k) = rng.normal();
      n2 = v.squaredNorm();
    } while (n2 == 0.0);
    const double scale = rng.uniform(0.05, 0.1) / std::sqrt(n2);
    float* out = values.data() + c * dim;
    for (int k = 0; k < dim; ++k) out[k] = static_cast<float>(v(k) * scale);
  }

  std::vector<Box> boxes;
  std::vector<double> total(g.cells(), 0.0);
  for (const auto& o : plan.planted) {
    boxes.push_back(cell_box(g, o));
    const Box& b = boxes.back();
    for (int y = b.y0; y <= b.y1; ++y) {
      for (int x = b.x0; x <= b.x1; ++x) total[static_cast<std::size_t>(y) * g.width + x] += weight(b, x, y);
    }
  }
  for (std::size_t c = 0; c < g.cells(); ++c) {
    if (total[c] <= 0.0) continue;
    const float keep = static_cast<float>(1.0 - std::min(1.0, total[c]));
    float* out = values.data() + c * dim;
    for (int k = 0; k < dim; ++k) out[k] *= keep;
  }
  for (std::size_t k = 0; k < plan.planted.size(); ++k) {
    const Box& b = boxes[k];
    const Embedding& e = plan.planted[k].embedding;
    for (int y = b.y0; y <= b.y1; ++y) {
      for (int x = b.x0; x <= b.x1; ++x) {
        const double w = weight(b, x, y);
        float* out = values.data() + (static_cast<std::size_t>(y) * g.width + x) * dim;
        for (int d = 0; d < dim; ++d) out[d] += static_cast<float>(w * e(d));
      }
    }
  }
  return FeatureMap(g, std::move(values));
}

int count_overlapping_cells(const GridGeometry& g, const FramePlan& plan) {
  std::vector<int> hits(g.cells(), 0);
  for (const auto& o : plan.planted) {
    const Box b = cell_box(g, o);
    for (int y = b.y0; y <= b.y1; ++y) {
      for (int x = b.x0; x <= b.x1; ++x) ++hits[static_cast<std::size_t>(y) * g.width + x];
    }
  }
  return static_cast<int>(std::count_if(hits.begin(), hits.end(), [](int h) { return h > 1; }));
}

ScenarioBundle::ScenarioBundle(GridGeometry geometry, std::vector<GroundTruthTrack> gt,
                               std::vector<std::vector<Detection>> dets, std::vector<FramePlan> plans,
                               std::map<std::string, std::string> manifest)
    : geometry_(geometry),
      gt_(std::move(gt)),
      detections_(std::move(dets)),
      plans_(std::move(plans)),
      manifest_(std::move(manifest)) {
  if (detections_.size() != plans_.size()) throw std::invalid_argument("scenario bundle: frame counts differ");
}

namespace {

struct ObjectState {
  double cx, cy, w, h;
  double vx, vy;
  double turn;
  MotionModel model;
  int class_id;
  Embedding identity;
};

void step_object(ObjectState& o, const ScenarioSpec& s, Rng& rng, double shift_x, double shift_y) {
  switch (o.model) {
    case MotionModel::Turning: {
      const double c = std::cos(o.turn), sn = std::sin(o.turn);
      const double vx = c * o.vx - sn * o.vy;
      o.vy = sn * o.vx + c * o.vy;
      o.vx = vx;
      break;
    }
    case MotionModel::RandomWalk: {
      const double jitter = 0.25 * std::max(s.speed_max, 1e-9);
      o.vx += jitter * rng.normal();
      o.vy += jitter * rng.normal();
      const double speed = std::hypot(o.vx, o.vy);
      if (speed > s.speed_max && speed > 0.0) {
        o.vx *= s.speed_max / speed;
        o.vy *= s.speed_max / speed;
      }
      break;
    }
    default:
      break;
  }
  const GridGeometry& g = s.geometry;
  auto reflect = [](double& p, double& v, double lo, double hi) {
    if (p < lo) {
      p = 2.0 * lo - p;
      v = std::abs(v);
    } else if (p > hi) {
      p = 2.0 * hi - p;
      v = -std::abs(v);
    }
    p = std::clamp(p, lo, hi);
  };
  o.cx += o.vx + shift_x;
  o.cy += o.vy + shift_y;
  reflect(o.cx, o.vx, 0.5 * o.w, g.width - 1 - 0.5 * o.w);
  reflect(o.cy, o.vy, 0.5 * o.h, g.height - 1 - 0.5 * o.h);
}

Embedding noisy(const Embedding& e, double noise, Rng& rng) {
  if (noise <= 0.0) return e;
  Eigen::VectorXd v = e.cast<double>();
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) += noise * rng.normal();
  return normalized(v.cast<float>());
}

std::map<std::string, std::string> base_manifest(const std::vector<FramePlan>& plans, const GridGeometry& g) {
  long long overlaps = 0;
  for (const auto& p : plans) overlaps += count_overlapping_cells(g, p);
  return {
      {"format_gt", "motchallenge-gt"},
      {"format_det", "motchallenge-det"},
      {"format_emb", "AMOTEMB1"},
      {"format_fmap", "AMOTFMP1"},
      {"frames", std::to_string(plans.size())},
      {"height", std::to_string(g.height)},
      {"width", std::to_string(g.width)},
      {"embed_dim", std::to_string(g.embed_dim)},
      {"stride", std::to_string(g.stride)},
      {"overlapping_cells", std::to_string(overlaps)},
  };
}

}  // namespace

ScenarioBundle generate(const ScenarioSpec& spec) {
  spec.validate();
  const GridGeometry& g = spec.geometry;
  Rng rng(spec.seed);

  std::vector<ObjectState> objects;
  for (int i = 0; i < spec.num_objects; ++i) {
    ObjectState o{};
    o.w = rng.uniform(spec.box_min, spec.box_max);
    o.h = rng.uniform(spec.box_min, spec.box_max);
    o.cx = rng.uniform(0.5 * o.w, g.width - 1 - 0.5 * o.w);
    o.cy = rng.uniform(0.5 * o.h, g.height - 1 - 0.5 * o.h);
    const double speed = rng.uniform(spec.speed_min, spec.speed_max);
    const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    o.vx = speed * std::cos(heading);
    o.vy = speed * std::sin(heading);
    o.turn = (rng.uniform() < 0.5 ? -1.0 : 1.0) * spec.turn_rate;
    o.model = spec.motion == MotionModel::Mixed ? static_cast<MotionModel>(i % 3) : spec.motion;
    o.class_id = i % spec.num_classes;
    o.identity = random_unit_embedding(rng, g.embed_dim);
    if (spec.distractor_similarity > 0.0 && i % 2 == 1) {
      // Component of a fresh direction orthogonal to the predecessor.
      const Eigen::VectorXd prev = objects.back().identity.cast<double>();
      Eigen::VectorXd u = o.identity.cast<double>();
      u -= u.dot(prev) * prev;
      u.normalize();
      const double s = spec.distractor_similarity;
      o.identity = normalized((s * prev + std::sqrt(1.0 - s * s) * u).cast<float>());
    }
    objects.push_back(std::move(o));
  }

  std::set<std::pair<int, int>> scripted(spec.scripted_misses.begin(), spec.scripted_misses.end());
  std::vector<GroundTruthTrack> gt(spec.num_objects);
  for (int i = 0; i < spec.num_objects; ++i) {
    gt[i].id = i + 1;
    gt[i].class_id = objects[i].class_id;
  }
  std::vector<std::vector<Detection>> dets(spec.num_frames);
  std::vector<FramePlan> plans(spec.num_frames);

  for (int t = 0; t < spec.num_frames; ++t) {
    if (t > 0) {
      const double sx = rng.uniform(-spec.camera_motion, spec.camera_motion);
      const double sy = rng.uniform(-spec.camera_motion, spec.camera_motion);
      for (auto& o : objects) step_object(o, spec, rng, sx, sy);
    }
    for (int i = 0; i < spec.num_objects; ++i) {
      const ObjectState& o = objects[i];
      const BBox box(o.cx, o.cy, o.w, o.h);
      gt[i].points.push_back({t, scale_box(box, g.stride)});
      const bool absent = rng.uniform() < spec.dropout;
      const bool missed = rng.uniform() < spec.miss_prob || scripted.contains({i, t});
      const Embedding e = noisy(o.identity, spec.embed_noise, rng);
      const double conf = rng.uniform(spec.conf_min, spec.conf_max);
      if (absent) continue;
      plans[t].planted.push_back({box.center(), o.w, o.h, e});
      if (!missed) dets[t].emplace_back(box, conf, o.class_id, e);
    }
    const int clutter = rng.poisson(spec.clutter_rate);
    for (int c = 0; c < clutter; ++c) {
      const double w = rng.uniform(spec.box_min, spec.box_max);
      const double h = rng.uniform(spec.box_min, spec.box_max);
      const double cx = rng.uniform(0.5 * w, g.width - 1 - 0.5 * w);
      const double cy = rng.uniform(0.5 * h, g.height - 1 - 0.5 * h);
      const double conf = rng.uniform(spec.clutter_conf_min, spec.clutter_conf_max);
      const int cls = static_cast<int>(rng.uniform() * spec.num_classes);
      dets[t].emplace_back(BBox(cx, cy, w, h), conf, std::min(cls, spec.num_classes - 1),
                           random_unit_embedding(rng, g.embed_dim));
    }
    plans[t].background_seed = rng.bits();
  }

  auto manifest = base_manifest(plans, g);
  for (auto& [k, v] : to_key_values(spec)) manifest["spec." + k] = v;
  return ScenarioBundle(g, std::move(gt), std::move(dets), std::move(plans), std::move(manifest));
}

ScenarioBundle build_scripted(const GridGeometry& g, const std::vector<ScriptedObject>& objects, std::uint64_t seed) {
  std::size_t frames = 0;
  for (const auto& o : objects) frames = std::max(frames, o.boxes.size());
  std::vector<GroundTruthTrack> gt;
  std::vector<std::vector<Detection>> dets(frames);
  std::vector<FramePlan> plans(frames);
  Rng rng(seed);
  for (std::size_t t = 0; t < frames; ++t) plans[t].background_seed = rng.bits();
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    GroundTruthTrack track;
    track.id = static_cast<int>(i) + 1;
    track.class_id = o.class_id;
    const Embedding e = normalized(o.embedding);
    for (std::size_t t = 0; t < o.boxes.size(); ++t) {
      const BBox& b = o.boxes[t];
      track.points.push_back({static_cast<int>(t), scale_box(b, g.stride)});
      plans[t].planted.push_back({b.center(), b.w(), b.h(), e});
      if (!o.missed.contains(static_cast<int>(t))) dets[t].emplace_back(b, o.confidence, o.class_id, e);
    }
    gt.push_back(std::move(track));
  }
  auto manifest = base_manifest(plans, g);
  manifest["scripted_objects"] = std::to_string(objects.size());
  return ScenarioBundle(g, std::move(gt), std::move(dets), std::move(plans), std::move(manifest));
}

std::vector<Trajectory> subsample_trajectories(const std::vector<Trajectory>& trajectories, int k) {
  if (k < 1) throw std::invalid_argument("subsample: interval must be >= 1");
  std::vector<Trajectory> out;
  for (const auto& t : trajectories) {
    Trajectory s{t.id, t.class_id, {}};
    for (const auto& p : t.points) {
      if (p.frame % k == 0) s.points.push_back({p.frame / k, p.box});
    }
    if (!s.points.empty()) out.push_back(std::move(s));
  }
  return out;
}

ScenarioBundle subsample(const ScenarioBundle& bundle, int k) {
  if (k < 1) throw std::invalid_argument("subsample: interval must be >= 1");
  if (static_cast<std::size_t>(k) > bundle.frame_count()) {
    throw std::invalid_argument("subsample: interval " + std::to_string(k) + " exceeds sequence length " +
                                std::to_string(bundle.frame_count()));
  }
  std::vector<std::vector<Detection>> dets;
  std::vector<FramePlan> plans;
  for (std::size_t t = 0; t < bundle.frame_count(); t += k) {
    dets.push_back(bundle.all_detections()[t]);
    plans.push_back(bundle.plans()[t]);
  }
  auto manifest = bundle.manifest();
  manifest["frames"] = std::to_string(plans.size());
  manifest["subsample_interval"] = std::to_string(k);
  return ScenarioBundle(bundle.geometry(), subsample_trajectories(bundle.ground_truth(), k), std::move(dets),
                        std::move(plans), std::move(manifest));
}

std::vector<Detection> decode_detections(const ScoreMap& scores, const SizeMap& sizes, const FeatureMap& embeddings,
                                         double tau) {
  const GridGeometry& g = embeddings.geometry();
  if (scores.height != g.height || scores.width != g.width || sizes.height != g.height || sizes.width != g.width ||
      scores.values.size() != g.cells() * scores.classes || sizes.values.size() != g.cells() * 2) {
    throw std::invalid_argument("decode detections: map geometries differ");
  }
  std::vector<Detection> out;
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      for (int c = 0; c < scores.classes; ++c) {
        const float s = scores.at(x, y, c);
        if (!(s > tau)) continue;
        bool peak = true;
        for (int dy = -1; dy <= 1 && peak; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx, ny = y + dy;
            if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= g.width || ny >= g.height) continue;
            if (scores.at(nx, ny, c) >= s) {
              peak = false;
              break;
            }
          }
        }
        if (!peak) continue;
        const std::size_t cell = static_cast<std::size_t>(y) * g.width + x;
        const auto span = embeddings.cell(x, y);
        const Embedding e = Eigen::Map<const Eigen::VectorXf>(span.data(), static_cast<Eigen::Index>(span.size()));
        out.emplace_back(BBox(x, y, sizes.values[cell * 2], sizes.values[cell * 2 + 1]), std::min(1.0f, s), c, e);
      }
    }
  }
  return out;
}

}  // namespace amot
