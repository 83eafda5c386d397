#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>

#include "doctest.h"
#include "kerrprobe/errors.h"
#include "kerrprobe/params.h"
#include "kerrprobe/units.h"

using namespace kerr;

namespace {

// Minimal valid config used as a template by the validation tests.
std::string base_json() {
  return R"({
    "resonator": {"omega_r": 100.0, "kerr": -0.05, "kappa": 1.0},
    "qubit": {
      "levels": [
        {"omega": 0.0, "g": 0.3},
        {"omega": 125.5, "g": 0.4, "eps": 1.0},
        {"omega": 246.0, "eps": 2.1}
      ],
      "gamma": 0.1, "gamma_phi": 0.02
    },
    "drives": [
      {"kind": "pump", "frequency": 99.5, "amplitude": 1.2},
      {"kind": "spectroscopy", "frequency": 125.4, "amplitude": 0.4}
    ]
  })";
}

}  // namespace

TEST_CASE("frequency strings convert to angular units") {
  // Hz-type suffixes pick up a factor 2*pi, rad/s-type ones do not.
  CHECK(parse_frequency("20 MHz") == doctest::Approx(two_pi * 20e6).epsilon(1e-15));
  CHECK(parse_frequency("1GHz") == doctest::Approx(two_pi * 1e9).epsilon(1e-15));
  CHECK(parse_frequency("0.5 kHz") == doctest::Approx(two_pi * 500.0).epsilon(1e-15));
  CHECK(parse_frequency("2 Hz") == doctest::Approx(two_pi * 2.0).epsilon(1e-15));
  CHECK(parse_frequency("5 rad/s") == 5.0);
  CHECK(parse_frequency("3 krad/s") == 3000.0);
  CHECK(parse_frequency("1.5 Mrad/s") == 1.5e6);
  CHECK(parse_frequency("2 Grad/s") == 2e9);
  // a bare number is already rad/s
  CHECK(parse_frequency("7.25") == 7.25);
  CHECK(parse_frequency("  -0.3  ") == -0.3);
}

TEST_CASE("malformed frequency strings are rejected") {
  CHECK_THROWS_AS(parse_frequency(""), ConfigError);
  CHECK_THROWS_AS(parse_frequency("   "), ConfigError);
  CHECK_THROWS_AS(parse_frequency("MHz"), ConfigError);
  CHECK_THROWS_AS(parse_frequency("fast"), ConfigError);
  CHECK_THROWS_AS(parse_frequency("3 parsec"), ConfigError);
  CHECK_THROWS_AS(parse_frequency("1.2.3 MHz"), ConfigError);
}

TEST_CASE("scenario loading fills defaults and applies units") {
  Scenario s = load_scenario(base_json());
  CHECK(s.params.omega_r == 100.0);
  CHECK(s.params.K == -0.05);
  CHECK(s.params.Kp == 0.0);  // default
  CHECK(s.params.kappa == 1.0);
  CHECK(s.params.M() == 3);
  CHECK(s.params.levels[0].eps == 0.0);
  CHECK(s.params.levels[1].eps == 1.0);
  CHECK(s.params.levels[2].eps == 2.1);
  CHECK(s.params.omega_tr(0) == 125.5);
  CHECK(s.params.omega_tr(1) == doctest::Approx(120.5));
  CHECK(s.sideband_correction == 1.0);  // default
  REQUIRE(s.drives.size() == 2);
  CHECK(s.drives[0].kind == DriveKind::pump);
  CHECK(s.drives[1].kind == DriveKind::spectroscopy);
  CHECK(s.drives[0].eps == std::complex<double>(1.2, 0.0));

  // out-of-range level accessors evaluate to zero
  CHECK(s.params.omega_q(-1) == 0.0);
  CHECK(s.params.omega_q(3) == 0.0);
  CHECK(s.params.g(2) == 0.0);   // top level
  CHECK(s.params.g(-1) == 0.0);
  CHECK(s.params.eps_disp(7) == 0.0);
}

TEST_CASE("numeric fields and unit strings describe the same drive") {
  std::string a = R"({
    "resonator": {"omega_r": "6453.5 MHz", "kerr": "-0.625 MHz", "kappa": "9.6 MHz"},
    "qubit": {"levels": [{"omega": 0.0, "g": "44 MHz"}, {"omega": "5125 MHz"}]},
    "drives": [{"kind": "pump", "frequency": "6439 MHz", "amplitude": "20 MHz"}]
  })";
  Scenario sa = load_scenario(a);
  CHECK(sa.params.omega_r == doctest::Approx(two_pi * 6453.5e6).epsilon(1e-15));
  CHECK(sa.drives[0].eps.real() == doctest::Approx(two_pi * 20e6).epsilon(1e-15));

  // the same numbers written out in rad/s hash identically
  Scenario sb = sa;
  std::string text = serialize_scenario(sa);  // all numeric now
  Scenario sc = load_scenario(text);
  CHECK(param_hash(sc) == param_hash(sa));
  CHECK(param_hash(sb) == param_hash(sa));
}

TEST_CASE("serialization round-trips exactly") {
  Scenario s = load_scenario(base_json());
  s.label = "round trip";
  std::string t1 = serialize_scenario(s);
  Scenario s2 = load_scenario(t1);
  std::string t2 = serialize_scenario(s2);
  CHECK(t1 == t2);
  CHECK(param_hash(s) == param_hash(s2));
  CHECK(param_hash_hex(s).size() == 16);

  // complex drive amplitude survives the round trip
  Scenario sc = s;
  sc.drives[0].eps = {0.3, -0.7};
  Scenario sc2 = load_scenario(serialize_scenario(sc));
  CHECK(sc2.drives[0].eps == std::complex<double>(0.3, -0.7));
}

TEST_CASE("hash covers the physics, not the label") {
  Scenario s = load_scenario(base_json());
  Scenario named = s;
  named.label = "some other name";
  CHECK(param_hash(named) == param_hash(s));

  Scenario changed = s;
  changed.params.kappa = 1.0000001;
  CHECK(param_hash(changed) != param_hash(s));

  Scenario drive = s;
  drive.drives[1].eps += 1e-9;
  CHECK(param_hash(drive) != param_hash(s));
}

TEST_CASE("config validation rejects broken inputs") {
  auto patched = [](const std::string& from, const std::string& to) {
    std::string t = base_json();
    size_t at = t.find(from);
    REQUIRE(at != std::string::npos);
    return t.substr(0, at) + to + t.substr(at + from.size());
  };

  CHECK_THROWS_AS(load_scenario("not json"), ConfigError);
  CHECK_THROWS_AS(load_scenario("{}"), ConfigError);  // resonator missing
  // kappa must be positive
  CHECK_THROWS_AS(load_scenario(patched("\"kappa\": 1.0", "\"kappa\": 0.0")),
                  ConfigError);
  CHECK_THROWS_AS(load_scenario(patched("\"kappa\": 1.0", "\"kappa\": -1.0")),
                  ConfigError);
  // dephasing dispersion of the two lowest levels is fixed by definition
  CHECK_THROWS_AS(
      load_scenario(patched("{\"omega\": 0.0, \"g\": 0.3}",
                            "{\"omega\": 0.0, \"g\": 0.3, \"eps\": 0.5}")),
      ConfigError);
  CHECK_THROWS_AS(load_scenario(patched("\"eps\": 1.0", "\"eps\": 1.5")),
                  ConfigError);
  // the top level has no upward coupling
  CHECK_THROWS_AS(
      load_scenario(patched("{\"omega\": 246.0, \"eps\": 2.1}",
                            "{\"omega\": 246.0, \"eps\": 2.1, \"g\": 0.1}")),
      ConfigError);
  // negative rates
  CHECK_THROWS_AS(load_scenario(patched("\"gamma\": 0.1", "\"gamma\": -0.1")),
                  ConfigError);
  // unknown keys are flagged, not ignored
  CHECK_THROWS_AS(load_scenario(patched("\"kerr\"", "\"kerrr\"")), ConfigError);
  // drive kinds are a closed set
  CHECK_THROWS_AS(load_scenario(patched("\"spectroscopy\"", "\"probe\"")),
                  ConfigError);
  // field components are labelled by frequency, so duplicates are ambiguous
  CHECK_THROWS_AS(
      load_scenario(patched("\"frequency\": 125.4", "\"frequency\": 99.5")),
      ConfigError);

  std::string two_levels_only = R"({
    "resonator": {"omega_r": 100.0, "kerr": 0.0, "kappa": 1.0},
    "qubit": {"levels": [{"omega": 0.0, "g": 0.3}]}
  })";
  CHECK_THROWS_AS(load_scenario(two_levels_only), ConfigError);
}

TEST_CASE("drive lookup by kind") {
  Scenario s = load_scenario(base_json());
  CHECK(drive_index(s.drives, DriveKind::pump) == 0);
  CHECK(drive_index(s.drives, DriveKind::spectroscopy) == 1);
  CHECK(drive_index({}, DriveKind::pump) == -1);

  std::vector<DriveSpec> two_pumps(2);
  two_pumps[0].kind = two_pumps[1].kind = DriveKind::pump;
  two_pumps[0].omega = 1.0;
  two_pumps[1].omega = 2.0;
  CHECK_THROWS_AS(drive_index(two_pumps, DriveKind::pump), ConfigError);
  CHECK(drive_index(two_pumps, DriveKind::pump, false) == 0);
}

TEST_CASE("reduced detuning") {
  SystemParams p;
  p.omega_r = 100.0;
  p.kappa = 4.0;
  DriveSpec d;
  d.omega = 98.0;
  CHECK(reduced_detuning(p, d) == doctest::Approx(1.0));
  p.kappa = 0.0;
  CHECK_THROWS_AS(reduced_detuning(p, d), ConfigError);
}

TEST_CASE("shipped configs load and carry their hash") {
  for (const char* name :
       {"/configs/linear_dispersive.json", "/configs/kerr_squeezing.json",
        "/configs/paper_like.json"}) {
    Scenario s = load_scenario_file(std::string(PROJ_SOURCE_DIR) + name);
    CHECK(s.params.kappa > 0.0);
    CHECK(s.params.M() >= 2);
    CHECK(param_hash_hex(s).size() == 16);
  }
  CHECK_THROWS_AS(load_scenario_file("/nonexistent/nope.json"), ConfigError);
}
