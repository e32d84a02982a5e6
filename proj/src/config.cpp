#include "amot/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace amot {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, value).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_key_values(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw ConfigError("key '" + key + "': invalid number '" + value + "'");
  }
  return out;
}

long long parse_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("key '" + key + "': invalid integer '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  throw ConfigError("key '" + key + "': invalid boolean '" + value + "'");
}

void TrackerConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid tracker config: ") + what);
  };
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  require(unit(tau_det), "tau_det must lie in [0, 1]");
  require(0.0 <= conf_low && conf_low < conf_high && conf_high <= 1.0,
          "conf_low/conf_high must satisfy 0 <= conf_low < conf_high <= 1");
  require(sigma > 0.0, "sigma must be > 0");
  require(lambda_mtc > 0.0, "lambda_mtc must be > 0");
  require(unit(gate_stage1), "gate_stage1 must lie in [0, 1]");
  require(unit(gate_stage2), "gate_stage2 must lie in [0, 1]");
  require(unit(mtc_overlap_gate), "mtc_overlap_gate must lie in [0, 1]");
  require(max_lost_frames >= 0, "max_lost_frames must be >= 0");
  require(buffer_len >= 1, "buffer_len must be >= 1");
  require(mtc_min_consecutive >= 1 && mtc_min_consecutive <= buffer_len,
          "mtc_min_consecutive must lie in [1, buffer_len]");
  require(reactivation_cap >= 0, "reactivation_cap must be >= 0");
  require(unit(embed_momentum), "embed_momentum must lie in [0, 1]");
}

TrackerConfig tracker_config_from(const std::map<std::string, std::string>& kv) {
  TrackerConfig cfg;
  const std::map<std::string, std::function<void(const std::string&, const std::string&)>> setters = {
      {"tau_det", [&](auto& k, auto& v) { cfg.tau_det = parse_double(k, v); }},
      {"conf_high", [&](auto& k, auto& v) { cfg.conf_high = parse_double(k, v); }},
      {"conf_low", [&](auto& k, auto& v) { cfg.conf_low = parse_double(k, v); }},
      {"sigma", [&](auto& k, auto& v) { cfg.sigma = parse_double(k, v); }},
      {"lambda_mtc", [&](auto& k, auto& v) { cfg.lambda_mtc = parse_double(k, v); }},
      {"gate_stage1", [&](auto& k, auto& v) { cfg.gate_stage1 = parse_double(k, v); }},
      {"gate_stage2", [&](auto& k, auto& v) { cfg.gate_stage2 = parse_double(k, v); }},
      {"max_lost_frames", [&](auto& k, auto& v) { cfg.max_lost_frames = static_cast<int>(parse_int(k, v)); }},
      {"buffer_len", [&](auto& k, auto& v) { cfg.buffer_len = static_cast<int>(parse_int(k, v)); }},
      {"mtc_min_consecutive", [&](auto& k, auto& v) { cfg.mtc_min_consecutive = static_cast<int>(parse_int(k, v)); }},
      {"mtc_overlap_gate", [&](auto& k, auto& v) { cfg.mtc_overlap_gate = parse_double(k, v); }},
      {"reactivation_cap", [&](auto& k, auto& v) { cfg.reactivation_cap = static_cast<int>(parse_int(k, v)); }},
      {"embed_momentum", [&](auto& k, auto& v) { cfg.embed_momentum = parse_double(k, v); }},
      {"use_amc", [&](auto& k, auto& v) { cfg.use_amc = parse_bool(k, v); }},
      {"use_iou", [&](auto& k, auto& v) { cfg.use_iou = parse_bool(k, v); }},
      {"use_app", [&](auto& k, auto& v) { cfg.use_app = parse_bool(k, v); }},
      {"use_mtc", [&](auto& k, auto& v) { cfg.use_mtc = parse_bool(k, v); }},
  };
  for (const auto& [key, value] : kv) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(key, value);
  }
  cfg.validate();
  return cfg;
}

TrackerConfig load_tracker_config(const std::filesystem::path& path) {
  return tracker_config_from(read_key_values(path));
}

std::string to_key_values(const TrackerConfig& cfg) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "tau_det=" << cfg.tau_det << '\n'
     << "conf_high=" << cfg.conf_high << '\n'
     << "conf_low=" << cfg.conf_low << '\n'
     << "sigma=" << cfg.sigma << '\n'
     << "lambda_mtc=" << cfg.lambda_mtc << '\n'
     << "gate_stage1=" << cfg.gate_stage1 << '\n'
     << "gate_stage2=" << cfg.gate_stage2 << '\n'
     << "max_lost_frames=" << cfg.max_lost_frames << '\n'
     << "buffer_len=" << cfg.buffer_len << '\n'
     << "mtc_min_consecutive=" << cfg.mtc_min_consecutive << '\n'
     << "mtc_overlap_gate=" << cfg.mtc_overlap_gate << '\n'
     << "reactivation_cap=" << cfg.reactivation_cap << '\n'
     << "embed_momentum=" << cfg.embed_momentum << '\n'
     << "use_amc=" << cfg.use_amc << '\n'
     << "use_iou=" << cfg.use_iou << '\n'
     << "use_app=" << cfg.use_app << '\n'
     << "use_mtc=" << cfg.use_mtc << '\n';
  return os.str();
}

}  // namespace amot
