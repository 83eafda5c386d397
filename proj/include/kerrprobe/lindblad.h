#pragma once
#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <string>
#include <vector>

#include "kerrprobe/params.h"

namespace kerr {

using SpMat = Eigen::SparseMatrix<std::complex<double>>;

// Truncated product space: N Fock states x M qubit levels, index q*N + n.
struct TruncatedSpace {
  int N = 30;
  int M = 2;
  int dim() const { return N * M; }
  int idx(int n, int q) const { return q * N + n; }
};

enum class Frame { lab, single_drive_rotating };

// One e^{-i omega t} drive component: H(t) += amp e^{-i omega t} op + h.c.
struct DriveTerm {
  std::complex<double> amp;
  double omega = 0.0;
  SpMat op;
};

struct LindbladGenerator {
  TruncatedSpace space;
  SpMat H0;                                        // static, Hermitian
  std::vector<DriveTerm> drive_terms;              // empty => time-independent
  std::vector<std::pair<double, SpMat>> collapse;  // (rate, operator)
  Frame frame = Frame::lab;
  double frame_omega = 0.0;  // rotation frequency of the frame
  bool rwa = false;          // qubit-resonator coupling without CR terms

  bool time_dependent() const { return !drive_terms.empty(); }
  // drho = -i[H(t), rho] + dissipators; rho must be Hermitian.
  void apply(double t, const Eigen::MatrixXcd& rho,
             Eigen::MatrixXcd& drho) const;
  // Explicit superoperator acting on column-major vec(rho). Only available
  // for a time-independent generator.
  SpMat liouvillian() const;
};

// Brute-force generator for the full multilevel-qubit + Kerr-resonator
// master equation. In the lab frame all drives are explicit time-dependent
// terms and the coupling keeps its counter-rotating part unless rwa is set.
// In the rotating frame everything co-rotates at the reference drive (the
// pump if present, else the first drive): that drive becomes static, the
// coupling is RWA regardless of the flag, and any further drive appears as a
// beat-frequency term -- with a single drive the generator is therefore
// time-independent.
LindbladGenerator build_generator(const SystemParams& p,
                                  const std::vector<DriveSpec>& drives,
                                  Frame frame, const TruncatedSpace& space,
                                  bool rwa = false);

struct SteadyStateResult {
  Eigen::MatrixXcd rho;
  double residual = 0.0;     // ||L vec(rho)||_inf / max|L| (dimensionless)
  bool bimodal = false;      // photon-number distribution has two local maxima
  double mean_n = 0.0;
  double cutoff_fill = 0.0;  // mean_n / N; > 0.7 means the cutoff is suspect
};

// Null vector of the Liouvillian via sparse LU with the trace condition
// imposed in place of one redundant row. Time-independent generators only.
SteadyStateResult steady_state(const LindbladGenerator& gen);

// steady_state with automatic Fock-cutoff escalation: N is grown by 50%
// whenever the occupancy check fails, within dim <= dim_cap.
SteadyStateResult steady_state_adaptive(const SystemParams& p,
                                        const std::vector<DriveSpec>& drives,
                                        Frame frame, TruncatedSpace space,
                                        int dim_cap = 200);

struct EvolveOptions {
  double rtol = 1e-8;
  double atol = 1e-8;
  double dt0 = 0.0;          // 0: choose automatically
  long max_steps = 20000000;
  double trace_tol = 1e-8;   // drift guard checked at every accepted step
  double herm_tol = 1e-10;
};

struct EvolveResult {
  Eigen::MatrixXcd rho;
  long steps = 0;
  long rejected = 0;
  double max_trace_err = 0.0;
  double max_herm_err = 0.0;
};

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) evolution of the
// density matrix. Hermiticity is restored by symmetrization after every
// accepted step; trace and Hermiticity drift are tracked against the
// tolerances and reported.
EvolveResult time_evolve(const LindbladGenerator& gen, Eigen::MatrixXcd rho0,
                         double t0, double t1, const EvolveOptions& opt = {});

struct Moments {
  std::complex<double> a{0.0};
  double n = 0.0;
  std::complex<double> a2{0.0};
  Eigen::VectorXd pops;  // qubit populations
};

Moments moments(const TruncatedSpace& space, const Eigen::MatrixXcd& rho);
Eigen::VectorXd fock_populations(const TruncatedSpace& space,
                                 const Eigen::MatrixXcd& rho);

// Density-matrix sanity measures.
double trace_error(const Eigen::MatrixXcd& rho);       // |tr rho - 1|
double hermiticity_error(const Eigen::MatrixXcd& rho); // max |rho - rho^dag|
double min_eigenvalue(const Eigen::MatrixXcd& rho);

// Vacuum resonator x qubit ground state.
Eigen::MatrixXcd ground_state(const TruncatedSpace& space);

// Time-averaged qubit excited-state population: evolve from the ground
// state, discard t < t_relax, then average <Pi_11> over [t_relax, t_end]
// (trapezoid over accepted steps).
double average_P1(const LindbladGenerator& gen, double t_relax, double t_end,
                  const EvolveOptions& opt = {});

}  // namespace kerr
