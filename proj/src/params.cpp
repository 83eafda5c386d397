#include "kerrprobe/params.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "kerrprobe/errors.h"
#include "kerrprobe/units.h"

using nlohmann::json;

namespace kerr {

double reduced_detuning(const SystemParams& p, const DriveSpec& d) {
  if (p.kappa <= 0.0) throw ConfigError("kappa must be positive");
  return 2.0 * (p.omega_r - d.omega) / p.kappa;
}

int drive_index(const std::vector<DriveSpec>& drives, DriveKind kind,
                bool required_unique) {
  int found = -1;
  for (size_t i = 0; i < drives.size(); ++i) {
    if (drives[i].kind != kind) continue;
    if (found >= 0) {
      if (!required_unique) return found;
      throw ConfigError(kind == DriveKind::pump
                            ? "exactly one pump drive is required here"
                            : "at most one spectroscopy drive is allowed");
    }
    found = (int)i;
  }
  return found;
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

double freq_field(const json& j, const char* key, const std::string& where,
                  bool required = true, double fallback = 0.0) {
  if (!j.contains(key)) {
    if (required) throw ConfigError(where + "." + key + " is missing");
    return fallback;
  }
  const json& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_frequency(v.get<std::string>());
  throw ConfigError(where + "." + key + " must be a number or a unit string");
}

double num_field(const json& j, const char* key, const std::string& where,
                 bool required = true, double fallback = 0.0) {
  if (!j.contains(key)) {
    if (required) throw ConfigError(where + "." + key + " is missing");
    return fallback;
  }
  if (!j.at(key).is_number())
    throw ConfigError(where + "." + key + " must be a number");
  return j.at(key).get<double>();
}

}  // namespace

Scenario load_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"label", "comment", "resonator", "qubit", "drives",
                 "sideband_correction"},
             "config");

  Scenario s;
  if (j.contains("label")) s.label = j.at("label").get<std::string>();

  if (!j.contains("resonator")) throw ConfigError("config.resonator is missing");
  const json& r = j.at("resonator");
  check_keys(r, {"omega_r", "kerr", "kerr_prime", "kappa"}, "resonator");
  s.params.omega_r = freq_field(r, "omega_r", "resonator");
  s.params.K = freq_field(r, "kerr", "resonator");
  s.params.Kp = freq_field(r, "kerr_prime", "resonator", false, 0.0);
  s.params.kappa = freq_field(r, "kappa", "resonator");
  if (!(s.params.kappa > 0.0))
    throw ConfigError("resonator.kappa must be positive");

  if (!j.contains("qubit")) throw ConfigError("config.qubit is missing");
  const json& q = j.at("qubit");
  check_keys(q, {"levels", "gamma", "gamma_phi"}, "qubit");
  if (!q.contains("levels") || !q.at("levels").is_array() ||
      q.at("levels").size() < 2)
    throw ConfigError("qubit.levels needs at least two entries");
  int M = (int)q.at("levels").size();
  for (int i = 0; i < M; ++i) {
    const json& lv = q.at("levels")[i];
    std::string where = "qubit.levels[" + std::to_string(i) + "]";
    check_keys(lv, {"omega", "g", "eps"}, where);
    Level level;
    level.omega = freq_field(lv, "omega", where);
    if (i + 1 < M) {
      level.g = freq_field(lv, "g", where);
    } else if (lv.contains("g")) {
      throw ConfigError(where + ".g: the top level has no upward transition");
    }
    if (i == 0) {
      level.eps = num_field(lv, "eps", where, false, 0.0);
      if (level.eps != 0.0) throw ConfigError(where + ".eps must be 0");
    } else if (i == 1) {
      level.eps = num_field(lv, "eps", where, false, 1.0);
      if (level.eps != 1.0) throw ConfigError(where + ".eps must be 1");
    } else {
      level.eps = num_field(lv, "eps", where);
    }
    s.params.levels.push_back(level);
  }
  s.params.gamma = freq_field(q, "gamma", "qubit", false, 0.0);
  s.params.gamma_phi = freq_field(q, "gamma_phi", "qubit", false, 0.0);
  if (s.params.gamma < 0.0) throw ConfigError("qubit.gamma must be >= 0");
  if (s.params.gamma_phi < 0.0)
    throw ConfigError("qubit.gamma_phi must be >= 0");

  if (j.contains("drives")) {
    if (!j.at("drives").is_array())
      throw ConfigError("config.drives must be an array");
    for (size_t d = 0; d < j.at("drives").size(); ++d) {
      const json& jd = j.at("drives")[d];
      std::string where = "drives[" + std::to_string(d) + "]";
      check_keys(jd,
                 {"kind", "frequency", "amplitude", "amplitude_re",
                  "amplitude_im", "phase"},
                 where);
      DriveSpec spec;
      if (!jd.contains("kind"))
        throw ConfigError(where + ".kind is missing");
      std::string kind = jd.at("kind").get<std::string>();
      if (kind == "pump")
        spec.kind = DriveKind::pump;
      else if (kind == "spectroscopy")
        spec.kind = DriveKind::spectroscopy;
      else
        throw ConfigError(where + ".kind must be 'pump' or 'spectroscopy'");
      spec.omega = freq_field(jd, "frequency", where);
      if (jd.contains("amplitude_re") || jd.contains("amplitude_im")) {
        spec.eps = {num_field(jd, "amplitude_re", where),
                    num_field(jd, "amplitude_im", where)};
      } else {
        double amp = freq_field(jd, "amplitude", where);
        double phase = num_field(jd, "phase", where, false, 0.0);
        spec.eps = std::polar(amp, phase);
        if (phase == 0.0) spec.eps = amp;  // keep the exact double
      }
      if (!std::isfinite(spec.eps.real()) || !std::isfinite(spec.eps.imag()))
        throw ConfigError(where + ".amplitude must be finite");
      s.drives.push_back(spec);
    }
  }
  // distinct pump frequencies: the multi-drive ansatz assigns one field
  // component per drive frequency
  for (size_t a = 0; a < s.drives.size(); ++a)
    for (size_t b = a + 1; b < s.drives.size(); ++b)
      if (s.drives[a].omega == s.drives[b].omega)
        throw ConfigError("drive frequencies must be pairwise distinct");
  drive_index(s.drives, DriveKind::spectroscopy);  // at most one

  s.sideband_correction =
      num_field(j, "sideband_correction", "config", false, 1.0);
  if (!(s.sideband_correction > 0.0))
    throw ConfigError("sideband_correction must be positive");
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& s) {
  json j;
  if (!s.label.empty()) j["label"] = s.label;
  j["resonator"] = {{"omega_r", s.params.omega_r},
                    {"kerr", s.params.K},
                    {"kerr_prime", s.params.Kp},
                    {"kappa", s.params.kappa}};
  json levels = json::array();
  for (int i = 0; i < s.params.M(); ++i) {
    json lv = {{"omega", s.params.levels[i].omega},
               {"eps", s.params.levels[i].eps}};
    if (i + 1 < s.params.M()) lv["g"] = s.params.levels[i].g;
    levels.push_back(lv);
  }
  j["qubit"] = {{"levels", levels},
                {"gamma", s.params.gamma},
                {"gamma_phi", s.params.gamma_phi}};
  json drives = json::array();
  for (const DriveSpec& d : s.drives) {
    json jd = {{"kind", d.kind == DriveKind::pump ? "pump" : "spectroscopy"},
               {"frequency", d.omega}};
    if (d.eps.imag() == 0.0) {
      jd["amplitude"] = d.eps.real();
    } else {
      jd["amplitude_re"] = d.eps.real();
      jd["amplitude_im"] = d.eps.imag();
    }
    drives.push_back(jd);
  }
  j["drives"] = drives;
  j["sideband_correction"] = s.sideband_correction;
  return j.dump(2);
}

uint64_t param_hash(const Scenario& s) {
  Scenario bare = s;
  bare.label.clear();  // hash covers the physics, not the human label
  std::string text = serialize_scenario(bare);
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string param_hash_hex(const Scenario& s) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)param_hash(s));
  return buf;
}

}  // namespace kerr
