#pragma once
#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "kerrprobe/params.h"
#include "kerrprobe/semiclassical.h"

namespace kerr {

// Classical ac-Stark shift coefficients, one column per drive:
//   Lam(i,d) = -g_i / (omega_{i+1,i} - omega_d)
//   X(i,d)   = -g_i Lam(i,d)
//   S(i,d)   = -(X_i - X_{i-1})
//   Kq(i,d)  = -4 S_i (Lam_i^2 + Lam_{i-1}^2)
//              - (3 X_{i+1} Lam_i^2 - X_i Lam_{i+1}^2)
//              + (3 X_{i-2} Lam_{i-1}^2 - X_{i-1} Lam_{i-2}^2)
// Out-of-range level indices evaluate to zero. Spectroscopy drives sit next
// to a qubit transition where these coefficients are resonant and
// meaningless; their columns are zeroed and they influence the model only
// through the photon number of their field component.
struct StarkTables {
  Eigen::MatrixXd Lam, X, S, Kq;
  int D() const { return (int)Lam.cols(); }
};

// `resonant_guard`: throw ResonantDrive if a pump drive is within
// resonant_guard * kappa of any qubit transition (set <= 0 to disable).
StarkTables stark_coefficients(const SystemParams& p,
                               const std::vector<DriveSpec>& drives,
                               double resonant_guard = 1.0);

// Mean-field resonator frequency over a field of n photons:
// omega_r' = omega_r + 2 K n + 3 K' n^2. Kept as the single switchable point
// where the Kerr-shifted frequency enters.
double kerr_shifted_omega_r(const SystemParams& p, double n);

// Field-dependent quantities evaluated on a pointer-state solution. Indexed
// by qubit state; transition quantities (lambda_a, chi) are indexed by the
// lower level of the transition and use each level's own pointer field.
struct DispersiveQuantities {
  StarkTables stark;
  Eigen::VectorXd n_tot;         // per state: total photons over components
  Eigen::VectorXd omega_r_prime; // omega_r'(alpha_i)
  Eigen::VectorXd omega_dd;      // omega_i''  (Stark-shifted level)
  Eigen::VectorXd omega_ddd;     // omega_i''' (Stark + Lamb)
  Eigen::VectorXd lambda_a;      // lambda_i(alpha) = -g_i/[omega_{i+1,i}'' - omega_r']
  Eigen::VectorXd chi;           // chi_i = -g_i lambda_i
  Eigen::VectorXd lamb;          // L_i = chi_{i-1}
  Eigen::VectorXd pull;          // S_i = -(chi_i - chi_{i-1})
  Eigen::VectorXcd upsilon;      // (K/2 + K'|a_i|^2) a_i^2, coherent t=0 sum
  Eigen::VectorXcd upsilon_p;    // same with alpha_i -> pump component only
  int pump_col = -1;             // drive column used for upsilon_p

  double omega10_ddd() const { return omega_ddd[1] - omega_ddd[0]; }
};

// `breakdown_guard`: throw DispersiveBreakdown when any |lambda_i(alpha)|
// exceeds it (set <= 0 to disable). Throws ConfigError if several pump
// drives are present and upsilon_p would be ambiguous; with no pump drive
// upsilon_p is zero.
DispersiveQuantities field_dispersives(const SystemParams& p,
                                       const PointerSolution& sol,
                                       const std::vector<DriveSpec>& drives,
                                       double breakdown_guard = 0.5);

}  // namespace kerr
