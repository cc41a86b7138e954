#include "csx/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "csx/errors.hpp"

namespace csx {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  }
  return out;
}

const std::regex& packet_key() {
  static const std::regex re(R"(packet\[(\d+)\]\.(x|k_up|k_down|mu|weight))");
  return re;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& source) {
  KeyValueConfig cfg;
  cfg.source_ = source;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (cfg.values_.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? to_double(key, *v) : fallback;
}

double KeyValueConfig::require_double(const std::string& key) const {
  const auto v = get(key);
  if (!v) throw ConfigError(source_ + ": missing required key '" + key + "'");
  return to_double(key, *v);
}

long KeyValueConfig::get_int(const std::string& key, long fallback) const {
  const auto v = get(key);
  return v ? to_long(key, *v) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + *v + "'");
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys{
      "domain.length", "domain.boundary", "domain.n", "domain.origin",
      "packet[i].x", "packet[i].k_up", "packet[i].k_down", "packet[i].mu", "packet[i].weight",
      "constants.hbar", "constants.mass",
      "time.start", "time.end", "time.dt",
      "field.spin_pairs",
      "detect.amplitude_floor", "detect.radii",
      "track.match_radius", "track.pair_radius", "track.spin_pair", "track.max_anomalies", "track.refine_depth",
      "output.dir", "output.render"};
  return keys;
}

MixedEnsemble build_ensemble(const KeyValueConfig& config) {
  MixedEnsemble ens;
  Domain1D& d = ens.domain;
  d.length = config.get_double("domain.length", d.length);
  const std::string boundary = config.get_string("domain.boundary", "open");
  if (boundary == "open") {
    d.boundary = Boundary::kOpen;
  } else if (boundary == "periodic") {
    d.boundary = Boundary::kPeriodic;
  } else {
    throw ConfigError("domain.boundary must be 'open' or 'periodic', got '" + boundary + "'");
  }
  const long n = config.get_int("domain.n", static_cast<long>(d.n));
  if (n < 4) throw ConfigError("domain.n must be at least 4");
  d.n = static_cast<std::size_t>(n);
  d.origin = config.get_double("domain.origin", -0.5 * d.length);
  d.validate();

  ens.constants.hbar = config.get_double("constants.hbar", 1.0);
  ens.constants.mass = config.get_double("constants.mass", 1.0);
  ens.constants.validate();

  std::set<std::size_t> indices;
  std::smatch m;
  for (const auto& [key, value] : config.values()) {
    if (std::regex_match(key, m, packet_key())) indices.insert(std::stoul(m[1].str()));
  }
  if (indices.empty()) throw ConfigError(config.source() + ": no packets defined");
  if (*indices.rbegin() + 1 != indices.size()) {
    throw ConfigError("packet indices must run 0..N-1 without gaps");
  }
  const std::size_t count = indices.size();
  bool any_weight = false;
  for (std::size_t i = 0; i < count; ++i) {
    const std::string p = "packet[" + std::to_string(i) + "].";
    SpinorGaussianPacket pk;
    pk.center = config.require_double(p + "x");
    pk.k_up = config.get_double(p + "k_up", 0.0);
    pk.k_down = config.get_double(p + "k_down", pk.k_up);
    pk.width = config.require_double(p + "mu");
    if (!(pk.width > 0.0)) throw ConfigError(p + "mu must be positive");
    ens.packets.push_back(normalize_packet(pk, d));
    any_weight = any_weight || config.has(p + "weight");
  }
  for (std::size_t i = 0; i < count; ++i) {
    const std::string key = "packet[" + std::to_string(i) + "].weight";
    if (any_weight && !config.has(key)) {
      throw ConfigError("weights must be given for every packet or for none (missing " + key + ")");
    }
    ens.weights.push_back(any_weight ? config.require_double(key)
                                     : 1.0 / static_cast<double>(count));
  }
  ens.validate();
  return ens;
}

std::size_t TimeSpec::count() const {
  return static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1;
}

RunConfig load_run_config(const KeyValueConfig& config) {
  const auto& known = known_config_keys();
  for (const auto& [key, value] : config.values()) {
    if (std::regex_match(key, packet_key())) continue;
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(config.source() + ": unknown key '" + key + "'");
    }
  }

  RunConfig rc;
  rc.ensemble = build_ensemble(config);

  if (const auto v = config.get("field.spin_pairs")) {
    rc.spin_pairs.clear();
    for (const auto& name : split_list(*v)) rc.spin_pairs.push_back(SpinPair::parse(name));
    if (rc.spin_pairs.empty()) throw ConfigError("field.spin_pairs is empty");
  }

  rc.time.start = config.get_double("time.start", 0.0);
  rc.time.end = config.get_double("time.end", rc.time.start);
  rc.time.step = config.get_double("time.dt", 1.0);
  if (!(rc.time.step > 0.0)) throw ConfigError("time.dt must be positive");
  if (rc.time.start < 0.0) throw ConfigError("time.start must be non-negative");
  if (rc.time.end < rc.time.start) throw ConfigError("time.end must not precede time.start");

  rc.detection.amplitude_floor =
      config.get_double("detect.amplitude_floor", rc.detection.amplitude_floor);
  if (!(rc.detection.amplitude_floor >= 0.0)) {
    throw ConfigError("detect.amplitude_floor must be non-negative");
  }
  if (const auto v = config.get("detect.radii")) {
    rc.detection.radii_cells.clear();
    for (const auto& r : split_list(*v)) {
      const long cells = to_long("detect.radii", r);
      if (cells < 1) throw ConfigError("detect.radii entries must be positive");
      rc.detection.radii_cells.push_back(static_cast<int>(cells));
    }
  }

  rc.tracking.match_radius_cells = config.get_double("track.match_radius", 3.0);
  rc.tracking.pair_radius_cells = config.get_double("track.pair_radius", 5.0);
  if (!(rc.tracking.match_radius_cells > 0.0) || !(rc.tracking.pair_radius_cells > 0.0)) {
    throw ConfigError("track radii must be positive");
  }
  rc.tracking.spin_pair = SpinPair::parse(config.get_string("track.spin_pair", "uu"));
  const long max_anom = config.get_int("track.max_anomalies", 0);
  if (max_anom < 0) throw ConfigError("track.max_anomalies must be non-negative");
  rc.tracking.max_anomalies = static_cast<std::size_t>(max_anom);
  const long depth = config.get_int("track.refine_depth", 0);
  if (depth < 0 || depth > 30) throw ConfigError("track.refine_depth must lie in [0, 30]");
  rc.tracking.refine_depth = static_cast<int>(depth);

  rc.output_dir = config.get_string("output.dir", "out");
  rc.render = config.get_bool("output.render", false);
  return rc;
}

}  // namespace csx
