#include "kerrprobe/dispersive.h"

#include <cmath>

#include "kerrprobe/errors.h"

namespace kerr {

StarkTables stark_coefficients(const SystemParams& p,
                               const std::vector<DriveSpec>& drives,
                               double resonant_guard) {
  int M = p.M();
  int D = (int)drives.size();
  StarkTables t;
  t.Lam = Eigen::MatrixXd::Zero(M, D);
  t.X = Eigen::MatrixXd::Zero(M, D);
  t.S = Eigen::MatrixXd::Zero(M, D);
  t.Kq = Eigen::MatrixXd::Zero(M, D);

  for (int d = 0; d < D; ++d) {
    if (drives[d].kind == DriveKind::spectroscopy) continue;  // zero column
    double wd = drives[d].omega;
    for (int i = 0; i + 1 < M; ++i) {
      double det = p.omega_tr(i) - wd;
      if (resonant_guard > 0.0 && std::abs(det) < resonant_guard * p.kappa)
        throw ResonantDrive("pump drive within " +
                            std::to_string(resonant_guard) +
                            " linewidths of transition " + std::to_string(i) +
                            "->" + std::to_string(i + 1));
      t.Lam(i, d) = -p.g(i) / det;
      t.X(i, d) = -p.g(i) * t.Lam(i, d);
    }
    // boundary convention: Lam, X vanish outside 0 <= i <= M-2
    auto Lam = [&](int i) { return (i >= 0 && i + 1 < M) ? t.Lam(i, d) : 0.0; };
    auto X = [&](int i) { return (i >= 0 && i + 1 < M) ? t.X(i, d) : 0.0; };
    for (int i = 0; i < M; ++i) {
      double S = -(X(i) - X(i - 1));
      t.S(i, d) = S;
      t.Kq(i, d) = -4.0 * S * (Lam(i) * Lam(i) + Lam(i - 1) * Lam(i - 1)) -
                   (3.0 * X(i + 1) * Lam(i) * Lam(i) -
                    X(i) * Lam(i + 1) * Lam(i + 1)) +
                   (3.0 * X(i - 2) * Lam(i - 1) * Lam(i - 1) -
                    X(i - 1) * Lam(i - 2) * Lam(i - 2));
    }
  }
  return t;
}

double kerr_shifted_omega_r(const SystemParams& p, double n) {
  return p.omega_r + 2.0 * p.K * n + 3.0 * p.Kp * n * n;
}

DispersiveQuantities field_dispersives(const SystemParams& p,
                                       const PointerSolution& sol,
                                       const std::vector<DriveSpec>& drives,
                                       double breakdown_guard) {
  int M = p.M();
  int D = (int)drives.size();
  if (sol.alpha.rows() != M || sol.alpha.cols() != D)
    throw ConfigError("pointer solution does not match the drive list");

  DispersiveQuantities q;
  q.stark = stark_coefficients(p, drives, 0.0);  // guard applied upstream
  q.n_tot = Eigen::VectorXd::Zero(M);
  q.omega_r_prime = Eigen::VectorXd::Zero(M);
  q.omega_dd = Eigen::VectorXd::Zero(M);
  q.omega_ddd = Eigen::VectorXd::Zero(M);
  q.lambda_a = Eigen::VectorXd::Zero(M);
  q.chi = Eigen::VectorXd::Zero(M);
  q.lamb = Eigen::VectorXd::Zero(M);
  q.pull = Eigen::VectorXd::Zero(M);
  q.upsilon = Eigen::VectorXcd::Zero(M);
  q.upsilon_p = Eigen::VectorXcd::Zero(M);
  q.pump_col = drive_index(drives, DriveKind::pump, false);
  // several pumps would make the 2 omega_p squeezing frame ambiguous
  int n_pumps = 0;
  for (const DriveSpec& d : drives)
    if (d.kind == DriveKind::pump) ++n_pumps;
  if (n_pumps > 1) q.pump_col = -2;

  for (int i = 0; i < M; ++i) {
    q.n_tot[i] = sol.alpha.row(i).squaredNorm();
    q.omega_r_prime[i] = kerr_shifted_omega_r(p, q.n_tot[i]);

    // Stark-shifted level: quadratic and quartic terms of each state's own
    // field, spectroscopy columns contributing zero coefficients
    double w = p.omega_q(i);
    for (int d = 0; d < D; ++d) {
      double nd = std::norm(sol.alpha(i, d));
      w += q.stark.S(i, d) * nd + 0.25 * q.stark.Kq(i, d) * nd * nd;
    }
    q.omega_dd[i] = w;

    std::complex<double> a_sum = sol.alpha.row(i).sum();  // coherent, t = 0
    q.upsilon[i] =
        (p.K / 2.0 + p.Kp * q.n_tot[i]) * a_sum * a_sum;
    if (q.pump_col >= 0) {
      std::complex<double> ap = sol.alpha(i, q.pump_col);
      q.upsilon_p[i] = (p.K / 2.0 + p.Kp * std::norm(ap)) * ap * ap;
    }
  }

  // field-dependent dispersive coefficient per transition (lower index i):
  // the transition frequency uses the Stark-shifted levels, the resonator
  // frequency the lower state's field
  for (int i = 0; i + 1 < M; ++i) {
    double det = (q.omega_dd[i + 1] - q.omega_dd[i]) - q.omega_r_prime[i];
    q.lambda_a[i] = -p.g(i) / det;
    q.chi[i] = -p.g(i) * q.lambda_a[i];
    if (breakdown_guard > 0.0 && std::abs(q.lambda_a[i]) > breakdown_guard)
      throw DispersiveBreakdown("transition " + std::to_string(i) + "->" +
                                std::to_string(i + 1) +
                                " leaves the dispersive regime: |lambda| = " +
                                std::to_string(std::abs(q.lambda_a[i])));
  }
  for (int i = 0; i < M; ++i) {
    double chi_im1 = i > 0 ? q.chi[i - 1] : 0.0;
    double chi_i = i + 1 < M ? q.chi[i] : 0.0;
    q.lamb[i] = chi_im1;
    q.pull[i] = -(chi_i - chi_im1);
    q.omega_ddd[i] = q.omega_dd[i] + q.lamb[i];
  }
  return q;
}

}  // namespace kerr
