#include "kerrprobe/semiclassical.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "kerrprobe/dispersive.h"
#include "kerrprobe/errors.h"

namespace kerr {

namespace {

// Steady-state response to one effective drive: photon numbers n solve
//   n [ D(n)^2 + kappa^2/4 ] = |eps|^2,   D(n) = a0 + a1 n + a2 n^2,
// where a0 collects the drive detuning plus the per-drive Stark offset,
// a1 the Kerr (plus quartic Stark) coefficient and a2 the next-order Kerr.
struct EffectivePoly {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0;
  double kappa = 0.0;

  double D(double n) const { return a0 + n * (a1 + n * a2); }

  // coefficients of P(n) = n(D^2 + kappa^2/4) - E, ascending
  std::array<double, 6> coeffs(double E) const {
    return {-E,
            a0 * a0 + kappa * kappa / 4.0,
            2.0 * a0 * a1,
            a1 * a1 + 2.0 * a0 * a2,
            2.0 * a1 * a2,
            a2 * a2};
  }

  // Linear stability of a root: eigenvalues of the fluctuation matrix are
  // -kappa/2 +- sqrt(B^2 - A^2); the root is stable iff A^2 + kappa^2/4 > B^2.
  bool stable(double n) const {
    double A = a0 + n * (2.0 * a1 + 3.0 * a2 * n);
    double B = n * (a1 + 2.0 * a2 * n);
    return A * A + kappa * kappa / 4.0 > B * B;
  }
};

std::vector<double> real_nonneg_roots(const std::array<double, 6>& c) {
  // trim trailing zero coefficients
  int deg = 5;
  double scale = 0.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return {};
  while (deg > 0 && std::abs(c[deg]) < 1e-14 * scale) --deg;
  std::vector<double> roots;
  if (deg == 0) return roots;

  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);

  auto P = [&](double n) {
    double v = 0.0;
    for (int k = deg; k >= 0; --k) v = v * n + c[k];
    return v;
  };
  auto dP = [&](double n) {
    double v = 0.0;
    for (int k = deg; k >= 1; --k) v = v * n + k * c[k];
    return v;
  };

  for (int i = 0; i < deg; ++i) {
    std::complex<double> z = es.eigenvalues()[i];
    double mag = std::abs(z);
    if (std::abs(z.imag()) > 1e-8 * std::max(1.0, mag)) continue;
    double n = z.real();
    // polish: a few Newton steps on the real polynomial
    for (int it = 0; it < 8; ++it) {
      double d = dP(n);
      if (d == 0.0) break;
      double step = P(n) / d;
      n -= step;
      if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(n))) break;
    }
    if (n < 0.0) {
      if (n > -1e-12 * std::max(1.0, mag)) n = 0.0;
      else continue;
    }
    roots.push_back(n);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) {
                            return std::abs(a - b) <=
                                   1e-8 * std::max(1.0, std::abs(b));
                          }),
              roots.end());
  return roots;
}

std::vector<ResponseRoot> poly_response(const EffectivePoly& ep,
                                        std::complex<double> eps) {
  std::vector<ResponseRoot> out;
  double E = std::norm(eps);
  if (E == 0.0) {
    out.push_back({0.0, {0.0, 0.0}, ep.stable(0.0)});
    return out;
  }
  for (double n : real_nonneg_roots(ep.coeffs(E))) {
    ResponseRoot root;
    root.n = n;
    root.alpha = -eps / std::complex<double>(ep.D(n), -ep.kappa / 2.0);
    root.stable = ep.stable(n);
    out.push_back(root);
  }
  return out;
}

EffectivePoly bare_poly(const SystemParams& p, double omega_d) {
  return {p.omega_r - omega_d, p.K, p.Kp, p.kappa};
}

EffectivePoly stark_poly(const SystemParams& p, double omega_d,
                         const StarkTables& st, int i, int d) {
  return {p.omega_r - omega_d + st.S(i, d), p.K + st.Kq(i, d) / 6.0, p.Kp,
          p.kappa};
}

}  // namespace

std::vector<ResponseRoot> classical_response(const SystemParams& p,
                                             const DriveSpec& d) {
  if (p.kappa <= 0.0) throw ConfigError("kappa must be positive");
  return poly_response(bare_poly(p, d.omega), d.eps);
}

double cusp_photon_number(const SystemParams& p) {
  if (p.K == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs((2.0 / std::sqrt(3.0)) * (p.kappa / 2.0) / p.K);
}

std::vector<StabilityCell> stability_diagram(const SystemParams& p,
                                             const std::vector<double>& Omegas,
                                             const std::vector<double>& eps) {
  std::vector<StabilityCell> cells;
  cells.reserve(Omegas.size() * eps.size());
  double n_c = cusp_photon_number(p);
  for (double Om : Omegas) {
    EffectivePoly ep = bare_poly(p, p.omega_r - Om * p.kappa / 2.0);
    for (double e : eps) {
      int n_stable = 0;
      double n_last = 0.0;
      for (double n : real_nonneg_roots(ep.coeffs(e * e))) {
        if (ep.stable(n)) {
          ++n_stable;
          n_last = n;
        }
      }
      StabilityCell cell{Om, e, StabilityClass::L_only};
      if (n_stable >= 2)
        cell.cls = StabilityClass::bistable;
      else if (n_stable == 1)
        cell.cls = n_last > n_c ? StabilityClass::H_only
                                : StabilityClass::L_only;
      // n_stable == 0 cannot happen for kappa > 0; keep L_only if it does
      cells.push_back(cell);
    }
  }
  return cells;
}

namespace {

struct BranchRoots {
  double L = -1.0, H = -1.0;  // stable photon numbers; -1 when absent
};

BranchRoots branch_roots(const EffectivePoly& ep, std::complex<double> eps,
                         double n_c) {
  BranchRoots br;
  std::vector<double> stable;
  for (const ResponseRoot& r : poly_response(ep, eps))
    if (r.stable) stable.push_back(r.n);
  if (stable.empty()) return br;
  if (stable.size() == 1) {
    (stable[0] > n_c ? br.H : br.L) = stable[0];
  } else {
    br.L = stable.front();
    br.H = stable.back();
  }
  return br;
}

// One qubit state's pointer equations for D drives: unknowns alpha_d, d < D.
struct StateSystem {
  std::vector<EffectivePoly> poly;       // per drive
  std::vector<std::complex<double>> eps; // per drive, possibly ramped
  double kappa = 0.0;

  std::complex<double> C(int d, double n) const {
    return {poly[d].D(n), -kappa / 2.0};
  }

  // residual F_d = C_d(n) alpha_d + eps_d with n = sum |alpha|^2
  double residual(const Eigen::VectorXcd& alpha, Eigen::VectorXcd* F) const {
    int D = (int)poly.size();
    double n = alpha.squaredNorm();
    double worst = 0.0;
    for (int d = 0; d < D; ++d) {
      std::complex<double> f = C(d, n) * alpha[d] + eps[d];
      if (F) (*F)[d] = f;
      worst = std::max(worst, std::abs(f));
    }
    return worst;
  }

  bool newton(Eigen::VectorXcd& alpha, double tol, int max_iter,
              int* used) const {
    int D = (int)poly.size();
    Eigen::VectorXcd F(D);
    Eigen::MatrixXd J(2 * D, 2 * D);
    Eigen::VectorXd rhs(2 * D);
    double res = residual(alpha, &F);
    int it = 0;
    for (; it < max_iter && res > tol; ++it) {
      double n = alpha.squaredNorm();
      for (int d = 0; d < D; ++d) {
        std::complex<double> Cd = C(d, n);
        double dCd = poly[d].a1 + 2.0 * poly[d].a2 * n;  // dD/dn
        for (int e = 0; e < D; ++e) {
          // dF_d/dRe(alpha_e), dF_d/dIm(alpha_e)
          std::complex<double> dre = alpha[d] * dCd * 2.0 * alpha[e].real();
          std::complex<double> dim = alpha[d] * dCd * 2.0 * alpha[e].imag();
          if (d == e) {
            dre += Cd;
            dim += Cd * std::complex<double>(0.0, 1.0);
          }
          J(2 * d, 2 * e) = dre.real();
          J(2 * d, 2 * e + 1) = dim.real();
          J(2 * d + 1, 2 * e) = dre.imag();
          J(2 * d + 1, 2 * e + 1) = dim.imag();
        }
        rhs[2 * d] = -F[d].real();
        rhs[2 * d + 1] = -F[d].imag();
      }
      Eigen::VectorXd step = J.colPivHouseholderQr().solve(rhs);
      // damp by halves until the residual actually decreases
      double lambda = 1.0;
      Eigen::VectorXcd trial(D);
      double new_res = res;
      for (int h = 0; h < 12; ++h) {
        for (int d = 0; d < D; ++d)
          trial[d] = alpha[d] + lambda * std::complex<double>(
                                             step[2 * d], step[2 * d + 1]);
        new_res = residual(trial, nullptr);
        if (new_res < res) break;
        lambda *= 0.5;
      }
      if (new_res >= res) break;  // stalled
      alpha = trial;
      res = residual(alpha, &F);
    }
    if (used) *used = it;
    return res <= tol;
  }
};

}  // namespace

PointerSolution solve_pointer_states(const SystemParams& p,
                                     const std::vector<DriveSpec>& drives,
                                     const StarkTables& stark,
                                     BranchHint hint) {
  int M = p.M();
  int D = (int)drives.size();
  if (stark.Lam.rows() != M || stark.Lam.cols() != D)
    throw ConfigError("Stark tables do not match the drive list");

  PointerSolution sol;
  sol.alpha = Eigen::MatrixXcd::Zero(M, D);
  sol.converged = true;
  if (D == 0) {
    sol.branch = Branch::L;
    return sol;
  }

  double n_c = cusp_photon_number(p);
  int pump = drive_index(drives, DriveKind::pump, false);

  // Decide the target branch from the ground-state response to the pump.
  Branch target = Branch::L;
  if (pump >= 0) {
    EffectivePoly ep0 = stark_poly(p, drives[pump].omega, stark, 0, pump);
    BranchRoots br0 = branch_roots(ep0, drives[pump].eps, n_c);
    switch (hint) {
      case BranchHint::automatic:
        target = br0.L >= 0.0 ? Branch::L : Branch::H;
        break;
      case BranchHint::L:
        if (br0.L < 0.0)
          throw BranchUnavailable("L branch does not exist at this drive");
        target = Branch::L;
        break;
      case BranchHint::H:
        if (br0.H < 0.0)
          throw BranchUnavailable("H branch does not exist at this drive");
        target = Branch::H;
        break;
    }
  } else if (hint == BranchHint::H) {
    throw BranchUnavailable("H branch requires a pump drive");
  }
  sol.branch = target;

  double eps_scale = p.kappa;
  for (const DriveSpec& d : drives)
    eps_scale = std::max(eps_scale, std::abs(d.eps));
  double tol = 1e-10 * eps_scale;

  for (int i = 0; i < M; ++i) {
    StateSystem sys;
    sys.kappa = p.kappa;
    for (int d = 0; d < D; ++d) {
      sys.poly.push_back(stark_poly(p, drives[d].omega, stark, i, d));
      sys.eps.push_back(drives[d].eps);
    }

    // Each qubit state sees its own pulled response and can lose the target
    // branch at a drive where other states keep it (state-selective
    // bifurcation). Fall back to the branch that exists for this state; the
    // reported branch stays the ground-state one.
    Branch state_target = target;
    if (pump >= 0) {
      BranchRoots bri =
          branch_roots(sys.poly[pump], drives[pump].eps, n_c);
      double want = target == Branch::H ? bri.H : bri.L;
      if (want < 0.0)
        state_target = target == Branch::H ? Branch::L : Branch::H;
    }

    // initial guess: branch root of the pump alone, linear response of the
    // remaining components in the pump background
    auto guess_at = [&](double ramp) {
      Eigen::VectorXcd a = Eigen::VectorXcd::Zero(D);
      double n_bg = 0.0;
      if (pump >= 0) {
        std::complex<double> ep = drives[pump].eps * ramp;
        BranchRoots br = branch_roots(sys.poly[pump], ep, n_c);
        double n_target = state_target == Branch::H ? br.H : br.L;
        if (n_target < 0.0) n_target = std::max(br.L, br.H);
        if (n_target < 0.0) n_target = 0.0;
        a[pump] = -ep / sys.C(pump, n_target);
        n_bg = n_target;
      }
      for (int d = 0; d < D; ++d) {
        if (d == pump) continue;
        a[d] = -drives[d].eps * ramp / sys.C(d, n_bg);
      }
      return a;
    };

    auto on_target_branch = [&](const Eigen::VectorXcd& a, double ramp) {
      if (pump < 0) return true;
      BranchRoots br =
          branch_roots(sys.poly[pump], drives[pump].eps * ramp, n_c);
      double np = std::norm(a[pump]);
      double want = state_target == Branch::H ? br.H : br.L;
      double other = state_target == Branch::H ? br.L : br.H;
      if (want < 0.0) return false;
      if (other < 0.0) return true;
      return std::abs(np - want) <= std::abs(np - other);
    };

    int used = 0;
    Eigen::VectorXcd a = guess_at(1.0);
    bool ok = sys.newton(a, tol, 200, &used) && on_target_branch(a, 1.0);

    if (!ok) {
      // continuation: adiabatic ramp of every drive amplitude along the
      // target branch; L grows out of the undriven solution, H walks down
      // from a strongly driven (monostable) point
      double t = state_target == Branch::L ? 0.0 : 2.0;
      double t_end = 1.0;
      double dt = state_target == Branch::L ? 0.25 : -0.25;
      a = state_target == Branch::L ? Eigen::VectorXcd::Zero(D) : guess_at(t);
      bool alive = true;
      int ramp_iters = 0;
      while (alive && std::abs(t - t_end) > 1e-12) {
        double t_next = t + dt;
        if ((dt > 0.0 && t_next > t_end) || (dt < 0.0 && t_next < t_end))
          t_next = t_end;
        Eigen::VectorXcd trial = a;
        for (int d = 0; d < D; ++d) sys.eps[d] = drives[d].eps * t_next;
        int it = 0;
        if (sys.newton(trial, tol, 60, &it) &&
            on_target_branch(trial, t_next)) {
          a = trial;
          t = t_next;
          ramp_iters += it;
        } else {
          dt *= 0.5;
          if (std::abs(dt) < 1e-4)
            throw BranchUnavailable(
                state_target == Branch::H
                    ? "H branch lost during amplitude ramp"
                    : "L branch lost during amplitude ramp");
        }
      }
      for (int d = 0; d < D; ++d) sys.eps[d] = drives[d].eps;
      ok = sys.newton(a, tol, 200, &used) && on_target_branch(a, 1.0);
      used += ramp_iters;
    }

    sol.alpha.row(i) = a.transpose();
    double res = sys.residual(a, nullptr);
    sol.residual = std::max(sol.residual, res);
    sol.iterations = std::max(sol.iterations, used);
    if (!ok) sol.converged = false;
  }
  return sol;
}

Eigen::VectorXcd distinguishability(const PointerSolution& sol, int i) {
  if (i < 0 || i + 1 >= sol.alpha.rows())
    return Eigen::VectorXcd::Zero(sol.alpha.cols());
  return (sol.alpha.row(i + 1) - sol.alpha.row(i)).transpose();
}

}  // namespace kerr
