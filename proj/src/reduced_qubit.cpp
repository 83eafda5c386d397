#include "kerrprobe/reduced_qubit.h"

#include <cmath>

#include "kerrprobe/errors.h"

namespace kerr {

std::complex<double> spectral_f(const SpectralFunction& sf, double w) {
  double x = sf.delta_r + w;
  double denom = sf.kappa * sf.kappa / 4.0 + x * x;
  return {sf.kappa / 2.0 / denom, x / denom};
}

double lorentzian(const SpectralFunction& sf, double w) {
  return spectral_f(sf, w).real();
}

ReducedRates build_rates(const SystemParams& p,
                         const DispersiveQuantities& disp,
                         const SqueezingSolution& sq,
                         const PointerSolution& sol,
                         const std::vector<DriveSpec>& drives, int s_index,
                         double sideband_correction) {
  if (s_index < 0 || s_index >= (int)drives.size() ||
      drives[s_index].kind != DriveKind::spectroscopy)
    throw ConfigError("build_rates needs a spectroscopy drive index");
  if (p.M() < 2) throw ConfigError("at least two qubit levels are required");

  ReducedRates rr;
  rr.delta = disp.omega10_ddd() - drives[s_index].omega;
  rr.rabi = p.g(0) * sol.alpha(0, s_index);

  // sideband coupling: c = beta cosh r + beta* e^{2 i theta} sinh r with
  // beta the pump-frequency component of alpha_1 - alpha_0
  std::complex<double> beta_p = 0.0;
  if (disp.pump_col >= 0)
    beta_p = sol.alpha(1, disp.pump_col) - sol.alpha(0, disp.pump_col);
  std::complex<double> e2t = std::polar(1.0, 2.0 * sq.theta);
  rr.c = (beta_p * std::cosh(sq.r) +
          std::conj(beta_p) * e2t * std::sinh(sq.r)) *
         sideband_correction;
  rr.w_sb = std::norm(rr.rabi * rr.c);

  // undriven rates: Purcell decay and measurement dephasing summed over all
  // field components (cross terms average out over a beat period)
  rr.gamma_down_3p =
      p.gamma + disp.lambda_a[0] * disp.lambda_a[0] * p.kappa;
  double dist2 = (sol.alpha.row(1) - sol.alpha.row(0)).squaredNorm();
  rr.gamma_phi_3p = p.gamma_phi + p.kappa * dist2 / 2.0;

  SpectralFunction sf{p.kappa, sq.delta_r};
  double Lp = lorentzian(sf, rr.delta);    // L(delta)
  double Lm = lorentzian(sf, -rr.delta);   // L(-delta)
  double s2 = sq.n_th;

  rr.gamma_down = rr.gamma_down_3p + rr.w_sb * ((Lm + Lp) * s2 + Lm);
  rr.gamma_up = rr.w_sb * ((Lm + Lp) * s2 + Lp);
  rr.gamma_phi = rr.gamma_phi_3p;
  rr.gamma2 = rr.gamma_phi + 0.5 * (rr.gamma_up + rr.gamma_down);

  // resonator-induced shift of the qubit line
  double im_d = spectral_f(sf, rr.delta).imag();
  double im_m = spectral_f(sf, -rr.delta).imag();
  rr.delta_tilde = rr.delta + rr.w_sb * (2.0 * s2 + 1.0) * (im_d - im_m);
  return rr;
}

double steady_state_P1(const ReducedRates& rr, bool* degenerate) {
  if (degenerate) *degenerate = false;
  double sum = rr.gamma_up + rr.gamma_down;
  double R2 = std::norm(rr.rabi);
  if (sum <= 0.0) {
    if (degenerate && R2 > 0.0) *degenerate = true;
    return 0.0;
  }
  double pi11_eq = rr.gamma_up / sum;
  double g2 = rr.gamma2;
  double d2 = rr.delta_tilde * rr.delta_tilde;
  double num = pi11_eq * (g2 * g2 + d2) + 2.0 * g2 * R2 / sum;
  double den = g2 * g2 + 4.0 * g2 * R2 / sum + d2;
  if (den <= 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return num / den;
}

SidebandRatio sideband_ratio(const SpectralFunction& sf, double n_th) {
  SidebandRatio out;
  double Lp = lorentzian(sf, sf.delta_r);    // off-resonant lobe
  double Lm = lorentzian(sf, -sf.delta_r);   // resonant lobe, 2/kappa
  // weak (anti-damped) sideband over strong one; limits to n/(n+1)
  out.full = ((Lp + Lm) * n_th + Lp) / ((Lp + Lm) * n_th + Lm);
  out.resolved = n_th / (n_th + 1.0);
  return out;
}

SpectrumScan spectrum_scan(const Scenario& sc,
                           const std::vector<double>& omega_s,
                           const std::vector<double>& eps_p,
                           const ScanOptions& opt) {
  int pump = drive_index(sc.drives, DriveKind::pump);
  int spec = drive_index(sc.drives, DriveKind::spectroscopy);
  if (pump < 0 || spec < 0)
    throw ConfigError("spectrum scan needs one pump and one spectroscopy drive");
  const SystemParams& p = sc.params;

  SpectrumScan scan;
  scan.omega_s = omega_s;
  scan.P1 = Eigen::MatrixXd::Constant(
      (int)omega_s.size(), (int)eps_p.size(),
      std::numeric_limits<double>::quiet_NaN());

  std::complex<double> pump_phase = 1.0;
  if (std::abs(sc.drives[pump].eps) > 0.0)
    pump_phase = sc.drives[pump].eps / std::abs(sc.drives[pump].eps);

  for (size_t c = 0; c < eps_p.size(); ++c) {
    SpectrumColumn col;
    col.eps_p = eps_p[c];

    std::vector<DriveSpec> drives = sc.drives;
    drives[pump].eps = eps_p[c] * pump_phase;

    // column metadata from the pump alone
    std::vector<DriveSpec> pump_only{drives[pump]};
    try {
      StarkTables st0 =
          stark_coefficients(p, pump_only, opt.resonant_guard);
      PointerSolution sol0 = solve_pointer_states(p, pump_only, st0, opt.hint);
      DispersiveQuantities disp0 =
          field_dispersives(p, sol0, pump_only, opt.breakdown_guard);
      SqueezingSolution sq0 = solve_squeezing(p, disp0, opt.frame_state,
                                              drives[pump].omega);
      col.branch = sol0.branch;
      col.r = sq0.r;
      col.delta_r = sq0.delta_r;
      col.omega10 = disp0.omega10_ddd();
      col.n0 = disp0.n_tot[0];
      col.ok = sol0.converged;
      if (!sol0.converged) col.message = "pointer solve did not converge";
    } catch (const std::exception& e) {
      col.ok = false;
      col.message = e.what();
      scan.cols.push_back(col);
      continue;
    }

    // rows: full two-drive pipeline at each spectroscopy frequency
    StarkTables st = stark_coefficients(p, drives, opt.resonant_guard);
    BranchHint row_hint =
        col.branch == Branch::H ? BranchHint::H : BranchHint::L;
    for (size_t rix = 0; rix < omega_s.size(); ++rix) {
      drives[spec].omega = omega_s[rix];
      try {
        PointerSolution sol = solve_pointer_states(p, drives, st, row_hint);
        DispersiveQuantities disp =
            field_dispersives(p, sol, drives, opt.breakdown_guard);
        SqueezingSolution sq =
            solve_squeezing(p, disp, opt.frame_state, drives[pump].omega);
        ReducedRates rr = build_rates(p, disp, sq, sol, drives, spec,
                                      sc.sideband_correction);
        scan.P1((int)rix, (int)c) = steady_state_P1(rr);
      } catch (const std::exception& e) {
        if (col.ok) {
          col.ok = false;
          col.message = e.what();
        }
      }
    }
    scan.cols.push_back(col);
  }
  return scan;
}

}  // namespace kerr
