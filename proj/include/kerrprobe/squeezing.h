#pragma once
#include <complex>

#include "kerrprobe/dispersive.h"
#include "kerrprobe/params.h"

namespace kerr {

// Bogoliubov parameters xi = r e^{2 i theta} that cancel the quadratic
// (a^dag)^2 terms of the pump-frame resonator Hamiltonian.
struct SqueezingSolution {
  double r = 0.0;
  double theta = 0.0;
  double delta_r = 0.0;   // (omega_r' + S - omega_p)/cosh(2r), rad/s
  double n_th = 0.0;      // sinh^2 r, the quantum-heating occupation
  double r_max = 0.0;     // 0.5 asinh(4|Upsilon_p|/kappa)
  double residual = 0.0;  // |squeezon condition| / max(|Upsilon_p|, kappa)
};

// Core solver on the scalar parameters: Delta = omega_r' + S - omega_p.
// r is found by bisection of the modulus equation
//   (Delta/2)^2 tanh^2(2r) + (kappa/4)^2 sinh^2(2r) = |Upsilon_p|^2
// on [0, r_max] to 1e-12, which is monotone in r; theta follows from the
// phase of the full complex condition.
SqueezingSolution solve_squeezing(double Delta, std::complex<double> upsilon_p,
                                  double kappa);

// Convenience wrapper evaluating Delta and Upsilon_p for one qubit state
// (the pipeline default is state 0: a single squeezing frame shared by both
// logical states).
SqueezingSolution solve_squeezing(const SystemParams& p,
                                  const DispersiveQuantities& disp, int state,
                                  double omega_p);

double squeezing_r_max(double abs_upsilon_p, double kappa);

// Temperature (kelvin) whose Bose-Einstein occupation at `omega` equals
// n_th: T = hbar omega / (k_B ln(1 + 1/n_th)); 0 for n_th <= 0.
double effective_temperature(double n_th, double omega);

}  // namespace kerr
