#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "csx/coherence.hpp"
#include "csx/ensemble.hpp"

namespace csx {

// Flat "key = value" run description. '#' starts a comment. Keys are
// case-sensitive; duplicates are rejected.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text, const std::string& source = "<string>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  const std::map<std::string, std::string>& values() const { return values_; }
  const std::string& source() const { return source_; }

 private:
  std::map<std::string, std::string> values_;
  std::string source_;
};

// Builds the ensemble described by the domain.*, packet[i].* and
// constants.* keys. Packets are normalized over the domain; weights default
// to 1/N. Throws ConfigError for an empty packet list or bad weights.
MixedEnsemble build_ensemble(const KeyValueConfig& config);

struct TimeSpec {
  double start = 0.0;
  double end = 0.0;
  double step = 1.0;

  std::size_t count() const;
  double at(std::size_t i) const { return start + static_cast<double>(i) * step; }
};

struct DetectionSpec {
  double amplitude_floor = 1e-12;  // relative to the slice maximum
  std::vector<int> radii_cells{1, 2, 4, 8, 16, 24, 32};
};

struct TrackingSpec {
  double match_radius_cells = 3.0;
  double pair_radius_cells = 5.0;
  SpinPair spin_pair{Spin::kUp, Spin::kUp};
  std::size_t max_anomalies = 0;
  int refine_depth = 0;
};

struct RunConfig {
  MixedEnsemble ensemble;
  std::vector<SpinPair> spin_pairs = all_spin_pairs();
  TimeSpec time;
  DetectionSpec detection;
  TrackingSpec tracking;
  std::filesystem::path output_dir = "out";
  bool render = false;
};

// Recognised keys, for error messages and the README.
const std::vector<std::string>& known_config_keys();

RunConfig load_run_config(const KeyValueConfig& config);

}  // namespace csx
