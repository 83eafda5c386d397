#include "kerrprobe/squeezing.h"

#include <cmath>

#include "kerrprobe/errors.h"
#include "kerrprobe/units.h"

namespace kerr {

double squeezing_r_max(double abs_upsilon_p, double kappa) {
  if (kappa <= 0.0) throw ConfigError("kappa must be positive");
  return 0.5 * std::asinh(4.0 * std::abs(abs_upsilon_p) / kappa);
}

SqueezingSolution solve_squeezing(double Delta,
                                  std::complex<double> upsilon_p,
                                  double kappa) {
  SqueezingSolution s;
  double U = std::abs(upsilon_p);
  s.r_max = squeezing_r_max(U, kappa);
  if (U == 0.0) {
    s.delta_r = Delta;
    return s;  // no quadratic term, no squeezing
  }

  // modulus of the squeezon condition as a function of r:
  //   G(r) = (Delta/2)^2 tanh^2(2r) + (kappa/4)^2 sinh^2(2r) - U^2
  // monotone on r >= 0 with G(0) = -U^2 < 0 and G(r_max) >= 0
  auto G = [&](double r) {
    double t = std::tanh(2.0 * r);
    double sh = std::sinh(2.0 * r);
    return 0.25 * Delta * Delta * t * t +
           kappa * kappa / 16.0 * sh * sh - U * U;
  };
  double lo = 0.0, hi = s.r_max;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    double mid = 0.5 * (lo + hi);
    (G(mid) <= 0.0 ? lo : hi) = mid;
  }
  s.r = 0.5 * (lo + hi);

  // phase: with phi = arg(Upsilon_p) - 2 theta the condition splits into
  //   cos(phi) = Delta tanh(2r) / (2U),  sin(phi) = -kappa sinh(2r) / (4U)
  double phi = std::atan2(-kappa * std::sinh(2.0 * s.r) / (4.0 * U),
                          Delta * std::tanh(2.0 * s.r) / (2.0 * U));
  s.theta = 0.5 * (std::arg(upsilon_p) - phi);

  s.delta_r = Delta / std::cosh(2.0 * s.r);
  double sh = std::sinh(s.r);
  s.n_th = sh * sh;

  // residual of the full complex condition, relative to its natural scale
  std::complex<double> e2t = std::polar(1.0, 2.0 * s.theta);
  std::complex<double> cond =
      std::complex<double>(-Delta * std::sinh(2.0 * s.r) / 2.0,
                           kappa * std::sinh(2.0 * s.r) / 4.0) +
      upsilon_p / e2t * std::cosh(s.r) * std::cosh(s.r) +
      std::conj(upsilon_p) * e2t * sh * sh;
  s.residual = std::abs(cond) / std::max(U, kappa);
  return s;
}

SqueezingSolution solve_squeezing(const SystemParams& p,
                                  const DispersiveQuantities& disp, int state,
                                  double omega_p) {
  if (state < 0 || state >= disp.n_tot.size())
    throw ConfigError("squeezing frame state out of range");
  if (disp.pump_col == -2)
    throw ConfigError("squeezing frame requires exactly one pump drive");
  double Delta = disp.omega_r_prime[state] + disp.pull[state] - omega_p;
  return solve_squeezing(Delta, disp.upsilon_p[state], p.kappa);
}

double effective_temperature(double n_th, double omega) {
  if (n_th <= 0.0) return 0.0;
  return hbar_SI * std::abs(omega) / (kB_SI * std::log1p(1.0 / n_th));
}

}  // namespace kerr
