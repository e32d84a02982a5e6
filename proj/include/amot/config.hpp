#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

namespace amot {

struct TrackerConfig {
  double tau_det = 0.4;
  double conf_high = 0.5;
  double conf_low = 0.1;
  double sigma = 5.0;        // AMC scale, grid cells
  double lambda_mtc = 3.0;   // MTC center-agreement gate, grid cells
  double gate_stage1 = 0.8;  // max unified cost
  double gate_stage2 = 0.5;  // max IoU cost
  int max_lost_frames = 30;
  int buffer_len = 20;
  int mtc_min_consecutive = 3;
  double mtc_overlap_gate = 0.5;
  int reactivation_cap = 5;
  double embed_momentum = 0.9;

  // Ablation switches. With use_amc and use_iou both on, the motion term of
  // the unified cost is C_AMC * C_IOU; either alone uses that matrix; both
  // off zeroes the motion term.
  bool use_amc = true;
  bool use_iou = true;
  bool use_app = true;
  bool use_mtc = true;

  // Throws ConfigError naming the first violated field.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key=value text; '#' starts a comment; blank lines ignored.
// Duplicate keys are an error.
std::map<std::string, std::string> parse_key_values(const std::string& text);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

// Unknown keys are an error; missing keys keep their defaults.
TrackerConfig tracker_config_from(const std::map<std::string, std::string>& kv);
TrackerConfig load_tracker_config(const std::filesystem::path& path);
std::string to_key_values(const TrackerConfig& cfg);

// Strict scalar parsing used by every key=value consumer.
double parse_double(const std::string& key, const std::string& value);
long long parse_int(const std::string& key, const std::string& value);
bool parse_bool(const std::string& key, const std::string& value);

}  // namespace amot
