#pragma once
#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "kerrprobe/dispersive.h"
#include "kerrprobe/params.h"
#include "kerrprobe/semiclassical.h"
#include "kerrprobe/squeezing.h"

namespace kerr {

// Filtered response of the damped squeezed resonator mode.
struct SpectralFunction {
  double kappa = 0.0;
  double delta_r = 0.0;  // pump-frame mode frequency (can be negative)
};

// f(w) = (kappa/2 + i[delta_r + w]) / ((kappa/2)^2 + (delta_r + w)^2);
// L(w) = Re f(w) is a Lorentzian of HWHM kappa/2 peaking at w = -delta_r.
std::complex<double> spectral_f(const SpectralFunction& sf, double w);
double lorentzian(const SpectralFunction& sf, double w);

struct ReducedRates {
  double gamma_down = 0.0;   // effective relaxation
  double gamma_up = 0.0;     // effective excitation (quantum heating)
  double gamma_phi = 0.0;    // effective pure dephasing
  double gamma2 = 0.0;       // gamma_phi + (up + down)/2
  double delta = 0.0;        // omega_{1,0}''' - omega_s
  double delta_tilde = 0.0;  // delta + resonator-induced (Stark-like) shift
  std::complex<double> rabi{0.0};  // g_0 alpha_{0,s}
  std::complex<double> c{0.0};     // sideband coupling (correction applied)
  double w_sb = 0.0;               // |g_0 alpha_{0,s} c|^2
  double gamma_down_3p = 0.0;      // gamma + lambda_0^2 kappa
  double gamma_phi_3p = 0.0;       // gamma_phi + measurement dephasing
};

// Rates of the reduced qubit master equation at spectroscopy drive
// `s_index`. Requires a solved squeezing frame for the pump drive.
ReducedRates build_rates(const SystemParams& p,
                         const DispersiveQuantities& disp,
                         const SqueezingSolution& sq,
                         const PointerSolution& sol,
                         const std::vector<DriveSpec>& drives, int s_index,
                         double sideband_correction = 1.0);

// Steady-state excited-state probability of the reduced master equation.
// Returns 0 (optionally flagging *degenerate) when every rate vanishes.
double steady_state_P1(const ReducedRates& rr, bool* degenerate = nullptr);

struct SidebandRatio {
  double full = 0.0;      // blue/red amplitude ratio from the rate model
  double resolved = 0.0;  // sinh^2 r / (sinh^2 r + 1) limit
};

// Amplitude ratio of the weak (anti-damped) sideband to the strong one,
// evaluated at the sideband centres delta = +-delta_r.
SidebandRatio sideband_ratio(const SpectralFunction& sf, double n_th);

struct ScanOptions {
  BranchHint hint = BranchHint::automatic;
  int frame_state = 0;             // qubit state defining the squeezing frame
  double breakdown_guard = 0.5;    // |lambda| limit; <=0 disables
  double resonant_guard = 1.0;     // pump-vs-transition guard, units of kappa
};

struct SpectrumColumn {
  double eps_p = 0.0;      // pump amplitude, rad/s
  Branch branch = Branch::L;
  double r = 0.0;          // squeezing coefficient (pump-only field)
  double delta_r = 0.0;    // pump-frame mode frequency
  double omega10 = 0.0;    // omega_{1,0}''' (pump-only field)
  double n0 = 0.0;         // pump-frame photon number of state 0
  bool ok = false;
  std::string message;
};

struct SpectrumScan {
  std::vector<double> omega_s;        // row grid
  std::vector<SpectrumColumn> cols;   // one per pump amplitude
  Eigen::MatrixXd P1;                 // omega_s rows x pump columns
};

// P(|1>) over a spectroscopy-frequency x pump-amplitude grid. The scenario
// must contain exactly one pump and one spectroscopy drive; the pump
// amplitude is replaced column by column, the spectroscopy frequency row by
// row. Column metadata is evaluated with the pump alone. Failing columns are
// flagged, not dropped.
SpectrumScan spectrum_scan(const Scenario& sc,
                           const std::vector<double>& omega_s,
                           const std::vector<double>& eps_p,
                           const ScanOptions& opt = {});

}  // namespace kerr
