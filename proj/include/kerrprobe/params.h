#pragma once
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace kerr {

// One qubit eigenlevel. `g` couples the i -> i+1 transition and is ignored on
// the top level. `eps` is the dimensionless dephasing dispersion of the level
// frequency with respect to the noisy control parameter (eps_0 = 0 and
// eps_1 = 1 by definition).
struct Level {
  double omega = 0.0;  // rad/s
  double g = 0.0;      // rad/s
  double eps = 0.0;
};

enum class DriveKind { pump, spectroscopy };

struct DriveSpec {
  std::complex<double> eps;  // complex amplitude, rad/s
  double omega = 0.0;        // rad/s
  DriveKind kind = DriveKind::pump;
};

struct SystemParams {
  double omega_r = 0.0;  // bare resonator frequency
  double K = 0.0;        // Kerr coefficient (negative in circuit QED)
  double Kp = 0.0;       // next-order Kerr coefficient
  double kappa = 0.0;    // photon loss rate
  std::vector<Level> levels;
  double gamma = 0.0;      // |1> -> |0> decay rate
  double gamma_phi = 0.0;  // |0>,|1> pure dephasing rate

  int M() const { return (int)levels.size(); }
  // Out-of-range level indices evaluate to zero so boundary terms of the
  // Stark-coefficient sums vanish without special cases.
  double omega_q(int i) const {
    return (i >= 0 && i < M()) ? levels[i].omega : 0.0;
  }
  double g(int i) const {
    return (i >= 0 && i + 1 < M()) ? levels[i].g : 0.0;
  }
  double eps_disp(int i) const {
    return (i >= 0 && i < M()) ? levels[i].eps : 0.0;
  }
  // omega_{i+1,i}
  double omega_tr(int i) const { return omega_q(i + 1) - omega_q(i); }
};

struct Scenario {
  SystemParams params;
  std::vector<DriveSpec> drives;
  // ad-hoc multiplier on the sideband coupling coefficient c (1 = none)
  double sideband_correction = 1.0;
  std::string label;
};

// Reduced pump detuning Omega = 2(omega_r - omega_d)/kappa. The resonator
// response is bistable for suitable amplitudes once Omega > sqrt(3).
double reduced_detuning(const SystemParams& p, const DriveSpec& d);

// Index of the unique drive of the given kind; -1 if absent. Throws
// ConfigError when several drives share the kind and `required_unique`.
int drive_index(const std::vector<DriveSpec>& drives, DriveKind kind,
                bool required_unique = true);

Scenario load_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

// Canonical serialization; load_scenario(serialize_scenario(s)) reproduces s
// exactly (doubles are printed with a round-trip-safe representation).
std::string serialize_scenario(const Scenario& s);

// FNV-1a over the canonical serialization, embedded in every output file.
uint64_t param_hash(const Scenario& s);
std::string param_hash_hex(const Scenario& s);

}  // namespace kerr
