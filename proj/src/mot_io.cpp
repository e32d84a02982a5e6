#include "amot/mot_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "amot/config.hpp"

namespace amot {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

constexpr char kEmbeddingMagic[8] = {'A', 'M', 'O', 'T', 'E', 'M', 'B', '1'};
constexpr char kFeatureMapMagic[8] = {'A', 'M', 'O', 'T', 'F', 'M', 'P', '1'};

template <typename T>
void put_le(std::ostream& out, T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const std::string& source) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw DataError(source + ": truncated binary file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

void put_floats(std::ostream& out, const float* data, std::size_t n) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(float)));
  } else {
    for (std::size_t i = 0; i < n; ++i) put_le(out, data[i]);
  }
}

void get_floats(std::istream& in, float* data, std::size_t n, const std::string& source) {
  if constexpr (std::endian::native == std::endian::little) {
    if (!in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(float)))) {
      throw DataError(source + ": truncated binary file");
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) data[i] = get_le<float>(in, source);
  }
}

void expect_magic(std::istream& in, const char (&magic)[8], const std::string& source) {
  char got[8];
  if (!in.read(got, 8) || std::memcmp(got, magic, 8) != 0) {
    throw DataError(source + ": bad magic, expected " + std::string(magic, 8));
  }
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double field_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw DataError(where + ": invalid number '" + s + "'");
  }
  return v;
}

int field_int(const std::string& s, const std::string& where) {
  const double v = field_double(s, where);
  if (v != std::floor(v)) throw DataError(where + ": expected integer, got '" + s + "'");
  return static_cast<int>(v);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::string frame_file(int frame) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06d.fmp", frame + 1);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

}  // namespace

std::vector<MotRow> parse_mot_rows(std::istream& in, const std::string& source) {
  std::vector<MotRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const std::string where = source + ":" + std::to_string(line_no);
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(trim(item));
    if (f.size() < 7) throw DataError(where + ": expected at least 7 comma-separated fields");
    const int frame = field_int(f[0], where);
    if (frame < 1) throw DataError(where + ": frame numbers are 1-based");
    try {
      const double w = field_double(f[4], where), h = field_double(f[5], where);
      rows.push_back({frame - 1, field_int(f[1], where),
                      BBox::from_tlwh(field_double(f[2], where), field_double(f[3], where), w, h),
                      field_double(f[6], where), f.size() > 7 ? field_int(f[7], where) : 0});
    } catch (const std::invalid_argument& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return rows;
}

std::vector<MotRow> read_mot_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_mot_rows(in, path.string());
}

std::vector<Trajectory> trajectories_from_rows(const std::vector<MotRow>& rows) {
  std::map<int, Trajectory> by_id;
  for (const auto& r : rows) {
    auto& t = by_id[r.id];
    t.id = r.id;
    t.class_id = r.class_id;
    t.points.push_back({r.frame, r.box});
  }
  std::vector<Trajectory> out;
  for (auto& [id, t] : by_id) {
    std::stable_sort(t.points.begin(), t.points.end(),
                     [](const TrajectoryPoint& a, const TrajectoryPoint& b) { return a.frame < b.frame; });
    for (std::size_t k = 1; k < t.points.size(); ++k) {
      if (t.points[k].frame == t.points[k - 1].frame) {
        throw DataError("id " + std::to_string(id) + " appears twice in frame " + std::to_string(t.points[k].frame + 1));
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Trajectory> read_ground_truth(const std::filesystem::path& path) {
  auto rows = read_mot_rows(path);
  std::erase_if(rows, [](const MotRow& r) { return r.conf == 0.0; });
  return trajectories_from_rows(rows);
}

std::vector<Trajectory> trajectories_from_results(const std::vector<FrameResult>& results) {
  std::vector<MotRow> rows;
  for (const auto& fr : results) {
    for (const auto& o : fr.outputs) rows.push_back({fr.frame, o.track_id, o.box, o.confidence, o.class_id});
  }
  return trajectories_from_rows(rows);
}

void write_results(std::ostream& out, const std::vector<FrameResult>& results) {
  for (const auto& fr : results) {
    for (const auto& o : fr.outputs) {
      out << fr.frame + 1 << ',' << o.track_id << ',' << fixed(o.box.left(), 3) << ',' << fixed(o.box.top(), 3)
          << ',' << fixed(o.box.w(), 3) << ',' << fixed(o.box.h(), 3) << ',' << fixed(o.confidence, 4) << ','
          << o.class_id << ",-1,-1\n";
    }
  }
}

void write_ground_truth(std::ostream& out, const std::vector<Trajectory>& gt) {
  std::vector<std::pair<int, std::string>> lines;
  for (const auto& t : gt) {
    for (const auto& p : t.points) {
      lines.emplace_back(p.frame, std::to_string(p.frame + 1) + ',' + std::to_string(t.id) + ',' +
                                      fixed(p.box.left(), 4) + ',' + fixed(p.box.top(), 4) + ',' + fixed(p.box.w(), 4) +
                                      ',' + fixed(p.box.h(), 4) + ",1," + std::to_string(t.class_id) + ",1\n");
    }
  }
  std::stable_sort(lines.begin(), lines.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [_, l] : lines) out << l;
}

void write_detections(std::ostream& out, const std::vector<std::vector<Detection>>& frames, const GridGeometry& g) {
  const double s = g.stride;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    for (const auto& d : frames[t]) {
      const BBox& b = d.bbox();
      out << t + 1 << ",-1," << fixed(b.left() * s, 4) << ',' << fixed(b.top() * s, 4) << ',' << fixed(b.w() * s, 4)
          << ',' << fixed(b.h() * s, 4) << ',' << fixed(d.confidence(), 6) << ',' << d.class_id() << ",-1,-1\n";
    }
  }
}

void write_embeddings(std::ostream& out, const std::vector<Embedding>& embeddings, int dim) {
  out.write(kEmbeddingMagic, 8);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(embeddings.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dim));
  for (const auto& e : embeddings) {
    if (e.size() != dim) throw DataError("embedding sidecar: inconsistent embedding dimension");
    put_floats(out, e.data(), static_cast<std::size_t>(dim));
  }
}

std::vector<Embedding> read_embeddings(std::istream& in, const std::string& source) {
  expect_magic(in, kEmbeddingMagic, source);
  const auto count = get_le<std::uint32_t>(in, source);
  const auto dim = get_le<std::uint32_t>(in, source);
  if (dim == 0) throw DataError(source + ": zero embedding dimension");
  std::vector<Embedding> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    Embedding e(dim);
    get_floats(in, e.data(), dim, source);
    out.push_back(std::move(e));
  }
  return out;
}

void write_feature_map(std::ostream& out, const FeatureMap& fm) {
  const auto& g = fm.geometry();
  out.write(kFeatureMapMagic, 8);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.height));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.width));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.embed_dim));
  put_floats(out, fm.values().data(), fm.values().size());
}

FeatureMap read_feature_map(std::istream& in, const std::string& source) {
  expect_magic(in, kFeatureMapMagic, source);
  const auto h = get_le<std::uint32_t>(in, source);
  const auto w = get_le<std::uint32_t>(in, source);
  const auto d = get_le<std::uint32_t>(in, source);
  if (h == 0 || w == 0 || d == 0 || h > 1u << 15 || w > 1u << 15 || d > 1u << 15) {
    throw DataError(source + ": implausible feature map dimensions");
  }
  std::vector<float> values(static_cast<std::size_t>(h) * w * d);
  get_floats(in, values.data(), values.size(), source);
  try {
    // Stride is not part of the file; callers compare H/W/D only.
    return FeatureMap(GridGeometry(static_cast<int>(h), static_cast<int>(w), static_cast<int>(d), 1),
                      std::move(values));
  } catch (const std::invalid_argument& e) {
    throw DataError(source + ": " + e.what());
  }
}

FeatureMap read_feature_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_feature_map(in, path.string());
}

void write_key_values(std::ostream& out, const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

void save_bundle(const ScenarioBundle& bundle, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "fmap");
  {
    std::ostringstream os;
    write_key_values(os, bundle.manifest());
    write_text(dir / "manifest.txt", os.str());
  }
  {
    std::ostringstream os;
    write_ground_truth(os, bundle.ground_truth());
    write_text(dir / "gt.txt", os.str());
  }
  {
    std::ostringstream os;
    write_detections(os, bundle.all_detections(), bundle.geometry());
    write_text(dir / "det.txt", os.str());
  }
  {
    std::vector<Embedding> embs;
    for (const auto& frame : bundle.all_detections()) {
      for (const auto& d : frame) embs.push_back(d.embedding());
    }
    std::ofstream out(dir / "emb.bin", std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir / "emb.bin").string());
    write_embeddings(out, embs, bundle.geometry().embed_dim);
  }
  for (std::size_t t = 0; t < bundle.frame_count(); ++t) {
    const auto path = dir / "fmap" / frame_file(static_cast<int>(t));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    write_feature_map(out, bundle.feature_map(t));
  }
}

DiskSequence::DiskSequence(const std::filesystem::path& dir) : dir_(dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  const auto det_path = dir / "det.txt";
  if (!fs::exists(det_path)) return;

  std::map<std::string, std::string> manifest;
  try {
    manifest = read_key_values(dir / "manifest.txt");
  } catch (const ConfigError& e) {
    throw DataError(e.what());
  }
  auto need = [&](const char* key) -> int {
    const auto it = manifest.find(key);
    if (it == manifest.end()) throw DataError("manifest.txt: missing key '" + std::string(key) + "'");
    try {
      return static_cast<int>(parse_int(key, it->second));
    } catch (const ConfigError& e) {
      throw DataError(std::string("manifest.txt: ") + e.what());
    }
  };
  try {
    geometry_ = GridGeometry(need("height"), need("width"), need("embed_dim"), need("stride"));
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("manifest.txt: ") + e.what());
  }
  const int frames = need("frames");
  if (frames < 0) throw DataError("manifest.txt: negative frame count");

  const auto rows = read_mot_rows(det_path);
  std::vector<Embedding> embs;
  {
    const auto emb_path = dir / "emb.bin";
    std::ifstream in(emb_path, std::ios::binary);
    if (!in) throw DataError("cannot open " + emb_path.string());
    embs = read_embeddings(in, emb_path.string());
  }
  detections_.assign(frames, {});
  const double s = geometry_.stride;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const MotRow& r = rows[k];
    if (r.frame >= frames) {
      throw DataError("det.txt: frame " + std::to_string(r.frame + 1) + " beyond manifest frame count");
    }
    if (k >= embs.size()) {
      throw DataError("frame " + std::to_string(r.frame + 1) + ": detection " + std::to_string(k + 1) +
                      " has no embedding (emb.bin holds " + std::to_string(embs.size()) + ")");
    }
    if (embs[k].size() != geometry_.embed_dim) {
      throw DataError("emb.bin: embedding dimension differs from manifest embed_dim");
    }
    try {
      detections_[r.frame].emplace_back(BBox(r.box.cx() / s, r.box.cy() / s, r.box.w() / s, r.box.h() / s),
                                        r.conf, r.class_id, embs[k]);
    } catch (const std::invalid_argument& e) {
      throw DataError("frame " + std::to_string(r.frame + 1) + ": " + e.what());
    }
  }
  if (embs.size() != rows.size()) {
    const int last = rows.empty() ? 0 : rows.back().frame + 1;
    throw DataError("frame " + std::to_string(last) + ": emb.bin holds " + std::to_string(embs.size()) +
                    " embeddings for " + std::to_string(rows.size()) + " detections");
  }
  for (int t = 0; t < frames; ++t) frames_.push_back(t);
}

std::vector<Detection> DiskSequence::detections(std::size_t frame) const {
  return detections_.at(static_cast<std::size_t>(frames_.at(frame)));
}

FeatureMap DiskSequence::feature_map(std::size_t frame) const {
  const auto path = dir_ / "fmap" / frame_file(frames_.at(frame));
  FeatureMap fm = read_feature_map(path);
  const auto& g = fm.geometry();
  if (g.height != geometry_.height || g.width != geometry_.width || g.embed_dim != geometry_.embed_dim) {
    throw DataError(path.string() + ": dimensions differ from manifest");
  }
  return FeatureMap(geometry_, std::move(fm.values()));
}

std::vector<Trajectory> DiskSequence::ground_truth() const {
  const auto path = dir_ / "gt.txt";
  if (!std::filesystem::exists(path)) return {};
  return subsample_trajectories(read_ground_truth(path), interval_);
}

DiskSequence DiskSequence::subsample(int k) const {
  if (k < 1) throw std::invalid_argument("subsample: interval must be >= 1");
  if (static_cast<std::size_t>(k) > frames_.size()) {
    throw std::invalid_argument("subsample: interval " + std::to_string(k) + " exceeds sequence length " +
                                std::to_string(frames_.size()));
  }
  DiskSequence out;
  out.dir_ = dir_;
  out.geometry_ = geometry_;
  out.detections_ = detections_;
  out.interval_ = interval_ * k;
  for (std::size_t t = 0; t < frames_.size(); t += k) out.frames_.push_back(frames_[t]);
  return out;
}

}  // namespace amot
