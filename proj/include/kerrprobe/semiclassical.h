#pragma once
#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "kerrprobe/params.h"

namespace kerr {

struct StarkTables;  // dispersive.h

enum class Branch { L, H };
enum class BranchHint { automatic, L, H };

struct ResponseRoot {
  double n = 0.0;                  // photon number |alpha|^2
  std::complex<double> alpha{0.0};
  bool stable = false;
};

// All non-negative real photon-number roots of the steady-state response to a
// single drive, sorted ascending in n. Stability is decided by linearizing
// the classical equation of motion around each root.
std::vector<ResponseRoot> classical_response(const SystemParams& p,
                                             const DriveSpec& d);

enum class StabilityClass { L_only, H_only, bistable };

struct StabilityCell {
  double Omega = 0.0;  // reduced detuning
  double eps = 0.0;    // drive amplitude, rad/s
  StabilityClass cls = StabilityClass::L_only;
};

// Classify the response on an (Omega, eps) grid. Cells are returned row by
// row (Omega outer, eps inner).
std::vector<StabilityCell> stability_diagram(const SystemParams& p,
                                             const std::vector<double>& Omegas,
                                             const std::vector<double>& eps);

// Photon number at the cusp of the bistable wedge (K' = 0).
double cusp_photon_number(const SystemParams& p);

struct PointerSolution {
  // alpha(i, d): field component of qubit state i at the frequency of drive d
  // (column order follows the drive list)
  Eigen::MatrixXcd alpha;
  Branch branch = Branch::L;
  double residual = 0.0;  // max |F_{i,d}| over all equations, rad/s
  bool converged = false;
  int iterations = 0;

  // total mean photon number of state i, summed over field components
  double n_tot(int i) const { return alpha.row(i).squaredNorm(); }
};

// Solve the coupled pointer-state conditions for every qubit state. Each
// state decouples from the others; its field components are coupled through
// the total photon number. Stark coefficients enter per drive; spectroscopy
// drives carry zero Stark columns but still contribute photons.
//
// Newton steps are damped by 1/2 whenever the residual fails to decrease,
// with at most 200 iterations per state; if plain Newton stalls the drive
// amplitudes are ramped adiabatically (continuation) along the hinted branch.
// Throws BranchUnavailable when the hinted branch does not exist.
PointerSolution solve_pointer_states(const SystemParams& p,
                                     const std::vector<DriveSpec>& drives,
                                     const StarkTables& stark,
                                     BranchHint hint = BranchHint::automatic);

// beta_i = alpha_{i+1} - alpha_i per field component (distinguishability of
// neighbouring pointer states)
Eigen::VectorXcd distinguishability(const PointerSolution& sol, int i);

}  // namespace kerr
