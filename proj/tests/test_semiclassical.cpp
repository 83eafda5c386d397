#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "doctest.h"
#include "kerrprobe/dispersive.h"
#include "kerrprobe/errors.h"
#include "kerrprobe/params.h"
#include "kerrprobe/semiclassical.h"
#include "kerrprobe/units.h"

using namespace kerr;
using cplx = std::complex<double>;

namespace {

// kappa=1, K=-1/8 puts the response in reduced units: the reduced drive
// energy 8|K| eps^2 / kappa^3 equals eps^2 and the scale photon number
// kappa/(2|K|) equals 4.
SystemParams reduced_units_params() {
  SystemParams p;
  p.omega_r = 1.0;  // drive at 0 => detuning 1, reduced detuning Omega = 2
  p.K = -0.125;
  p.kappa = 1.0;
  return p;
}

DriveSpec pump_at(double omega, double eps) {
  DriveSpec d;
  d.omega = omega;
  d.eps = eps;
  d.kind = DriveKind::pump;
  return d;
}

SystemParams with_idle_qubit(SystemParams p) {
  p.levels = {{0.0, 0.0, 0.0}, {50.0, 0.0, 1.0}};  // decoupled, far detuned
  return p;
}

}  // namespace

// Reference roots from tools/oracles/response_roots.py (companion-matrix
// polynomial solve, independent of the Newton machinery used here).
TEST_CASE("classical response roots against the polynomial oracle") {
  SystemParams p = reduced_units_params();

  SUBCASE("three roots inside the bistable window, middle one unstable") {
    auto roots = classical_response(p, pump_at(0.0, std::sqrt(1.9)));
    REQUIRE(roots.size() == 3);
    CHECK(roots[0].n == doctest::Approx(2.8817724405973304).epsilon(1e-10));
    CHECK(roots[1].n == doctest::Approx(5.6504222890187545).epsilon(1e-10));
    CHECK(roots[2].n == doctest::Approx(7.467805270383914).epsilon(1e-10));
    CHECK(roots[0].stable);
    CHECK(!roots[1].stable);
    CHECK(roots[2].stable);

    CHECK(roots[0].alpha.real() ==
          doctest::Approx(-1.337557581109443).epsilon(1e-9));
    CHECK(roots[0].alpha.imag() ==
          doctest::Approx(-1.0453287319374638).epsilon(1e-9));
    CHECK(roots[2].alpha.real() ==
          doctest::Approx(-0.3604099454174232).epsilon(1e-9));
    CHECK(roots[2].alpha.imag() ==
          doctest::Approx(-2.7088576820549508).epsilon(1e-9));
    // |alpha|^2 is the photon number by construction
    for (const auto& r : roots)
      CHECK(std::norm(r.alpha) == doctest::Approx(r.n).epsilon(1e-12));
  }

  SUBCASE("single stable root below and above the window") {
    auto lo = classical_response(p, pump_at(0.0, 1.0));
    REQUIRE(lo.size() == 1);
    CHECK(lo[0].n == doctest::Approx(0.980489335013229).epsilon(1e-10));
    CHECK(lo[0].stable);

    auto hi = classical_response(p, pump_at(0.0, std::sqrt(2.5)));
    REQUIRE(hi.size() == 1);
    CHECK(hi[0].n == doctest::Approx(9.188626032709703).epsilon(1e-10));
    CHECK(hi[0].stable);
  }

  SUBCASE("root count flips 1 -> 3 -> 1 across the drive window") {
    // window boundaries (reduced energy = eps^2 here): (50/27, 2)
    double e_lo = 1.851851851851852, e_hi = 2.0;
    CHECK(classical_response(p, pump_at(0.0, std::sqrt(e_lo - 1e-3))).size() == 1);
    CHECK(classical_response(p, pump_at(0.0, std::sqrt(0.5 * (e_lo + e_hi)))).size() == 3);
    CHECK(classical_response(p, pump_at(0.0, std::sqrt(e_hi + 1e-3))).size() == 1);
  }

  SUBCASE("next-order nonlinearity changes the polynomial degree") {
    SystemParams q = p;
    q.K = -0.1;
    q.Kp = 0.004;
    auto roots = classical_response(q, pump_at(0.0, std::sqrt(1.5)));
    REQUIRE(roots.size() == 1);
    CHECK(roots[0].n == doctest::Approx(1.5239817817065753).epsilon(1e-10));
  }
}

TEST_CASE("cusp photon number") {
  SystemParams p = reduced_units_params();
  // |x_c (kappa/2) / K| with x_c = 2/sqrt(3)
  CHECK(cusp_photon_number(p) ==
        doctest::Approx(4.618802153517007).epsilon(1e-12));
  p.K = -0.25;
  CHECK(cusp_photon_number(p) ==
        doctest::Approx(4.618802153517007 / 2.0).epsilon(1e-12));
}

TEST_CASE("stability diagram classifies the wedge") {
  SystemParams p = reduced_units_params();

  // Below the critical detuning: never bistable, whatever the drive.
  std::vector<double> eps;
  for (int i = 0; i <= 60; ++i) eps.push_back(1.0 + 0.01 * i);
  for (double Om : {1.0, 1.5, 1.70}) {
    auto cells = stability_diagram(p, {Om}, eps);
    for (const auto& c : cells) CHECK(c.cls != StabilityClass::bistable);
  }

  // At Omega = 2 the window in eps^2 is exactly (50/27, 2).
  auto cells = stability_diagram(p, {2.0}, eps);
  REQUIRE(cells.size() == eps.size());
  for (size_t i = 0; i < cells.size(); ++i) {
    double e2 = eps[i] * eps[i];
    CHECK(cells[i].Omega == 2.0);
    CHECK(cells[i].eps == eps[i]);
    StabilityClass want = e2 < 1.851851851851852 ? StabilityClass::L_only
                          : e2 > 2.0             ? StabilityClass::H_only
                                                 : StabilityClass::bistable;
    // grid values sit well clear of the boundaries at this spacing
    if (std::abs(e2 - 1.851851851851852) > 2e-2 && std::abs(e2 - 2.0) > 2e-2)
      CHECK(cells[i].cls == want);
  }

  // row-major ordering: Omega outer, eps inner
  auto grid = stability_diagram(p, {1.7, 2.0}, {1.2, 1.38});
  REQUIRE(grid.size() == 4);
  CHECK(grid[0].Omega == 1.7);
  CHECK(grid[1].Omega == 1.7);
  CHECK(grid[2].Omega == 2.0);
  CHECK(grid[1].eps == 1.38);
  CHECK(grid[3].cls == StabilityClass::bistable);
}

TEST_CASE("pointer states of a decoupled linear resonator are closed form") {
  SystemParams p = with_idle_qubit(reduced_units_params());
  p.K = 0.0;
  std::vector<DriveSpec> drives{pump_at(0.0, 0.8)};
  StarkTables st = stark_coefficients(p, drives);
  PointerSolution sol = solve_pointer_states(p, drives, st);

  cplx expect = -0.8 / cplx(1.0, -0.5);  // -eps / (Delta - i kappa/2)
  REQUIRE(sol.alpha.rows() == 2);
  REQUIRE(sol.alpha.cols() == 1);
  CHECK(sol.converged);
  CHECK(std::abs(sol.alpha(0, 0) - expect) < 1e-12);
  CHECK(std::abs(sol.alpha(1, 0) - expect) < 1e-12);  // same field, g = 0
  CHECK(sol.residual <= 1e-10);
  CHECK(sol.n_tot(0) == doctest::Approx(std::norm(expect)).epsilon(1e-12));
}

// Closed-form two-level dispersive benchmark from
// tools/oracles/linear_cavity.py. The solver additionally carries the
// quartic correction of the level-dependent nonlinearity, which moves the
// fields at the 1e-4 level; tolerances reflect that.
TEST_CASE("two-level dispersive pointer fields near the closed form") {
  SystemParams p;
  p.omega_r = 100.0;
  p.K = 0.0;
  p.kappa = 1.0;
  p.levels = {{0.0, 0.65, 0.0}, {125.5, 0.0, 1.0}};
  p.gamma = 0.1;
  p.gamma_phi = 0.02;
  std::vector<DriveSpec> drives{pump_at(99.5, 1.33)};
  StarkTables st = stark_coefficients(p, drives);

  // classical table values for this detuning
  CHECK(st.Lam(0, 0) == doctest::Approx(-0.025).epsilon(1e-12));
  CHECK(st.S(0, 0) == doctest::Approx(-0.01625).epsilon(1e-12));
  CHECK(st.S(1, 0) == doctest::Approx(0.01625).epsilon(1e-12));

  PointerSolution sol = solve_pointer_states(p, drives, st);
  REQUIRE(sol.converged);
  CHECK(sol.residual <= 1e-10 * 1.33);

  cplx a0(-1.329274394790957, -1.3739270230397491);
  cplx a1(-1.329320051184473, -1.2874770471520318);
  CHECK(std::abs(sol.alpha(0, 0) - a0) < 2e-4 * std::abs(a0));
  CHECK(std::abs(sol.alpha(1, 0) - a1) < 2e-4 * std::abs(a1));

  Eigen::VectorXcd beta = distinguishability(sol, 0);
  REQUIRE(beta.size() == 1);
  // beta is a difference of nearly equal fields, so it inherits the
  // quartic-correction offset on the absolute |alpha| scale
  CHECK(std::abs(beta(0) - (a1 - a0)) < 2e-4 * std::abs(a0));
  // the pulled state-1 response sits closer to resonance from above:
  // its field rotates towards the real axis
  CHECK(beta(0).imag() > 0.0);
}

TEST_CASE("branch selection on the bistable response") {
  SystemParams p = with_idle_qubit(reduced_units_params());
  std::vector<DriveSpec> drives{pump_at(0.0, std::sqrt(1.9))};
  StarkTables st = stark_coefficients(p, drives);

  PointerSolution lo = solve_pointer_states(p, drives, st, BranchHint::L);
  PointerSolution hi = solve_pointer_states(p, drives, st, BranchHint::H);
  CHECK(lo.branch == Branch::L);
  CHECK(hi.branch == Branch::H);
  CHECK(lo.n_tot(0) == doctest::Approx(2.8817724405973304).epsilon(1e-9));
  CHECK(hi.n_tot(0) == doctest::Approx(7.467805270383914).epsilon(1e-9));
  CHECK(lo.residual <= 1e-10 * std::sqrt(1.9));
  CHECK(hi.residual <= 1e-10 * std::sqrt(1.9));
  // single-drive solves start from the exact polynomial root, so Newton has
  // nothing left to do
  CHECK(hi.iterations <= 1);

  PointerSolution amb = solve_pointer_states(p, drives, st);
  CHECK(amb.converged);
  CHECK((amb.branch == Branch::L || amb.branch == Branch::H));

  SUBCASE("hinted branches that do not exist are refused") {
    std::vector<DriveSpec> weak{pump_at(0.0, 1.0)};
    CHECK_THROWS_AS(
        solve_pointer_states(p, weak, stark_coefficients(p, weak),
                             BranchHint::H),
        BranchUnavailable);
    std::vector<DriveSpec> strong{pump_at(0.0, std::sqrt(2.5))};
    CHECK_THROWS_AS(
        solve_pointer_states(p, strong, stark_coefficients(p, strong),
                             BranchHint::L),
        BranchUnavailable);
  }
}

TEST_CASE("two-drive solve with continuation on the realistic config") {
  Scenario sc =
      load_scenario_file(std::string(PROJ_SOURCE_DIR) + "/configs/paper_like.json");
  int pump = drive_index(sc.drives, DriveKind::pump);
  REQUIRE(pump >= 0);

  auto solve_at = [&](double pump_mhz, BranchHint hint) {
    std::vector<DriveSpec> drives = sc.drives;
    drives[pump].eps = two_pi * pump_mhz * 1e6;
    StarkTables st = stark_coefficients(sc.params, drives);
    return solve_pointer_states(sc.params, drives, st, hint);
  };

  double tol = 1e-10 * two_pi * 40e6;  // 1e-10 of the largest amplitude used

  SUBCASE("low branch at moderate power") {
    PointerSolution sol = solve_at(20.0, BranchHint::L);
    CHECK(sol.converged);
    CHECK(sol.branch == Branch::L);
    CHECK(sol.residual <= tol);
    REQUIRE(sol.alpha.rows() == 3);  // three qubit states
    REQUIRE(sol.alpha.cols() == 2);  // pump + spectroscopy components
    CHECK(sol.n_tot(0) > 0.0);
    // components couple through the total photon number, so this one needs
    // at least one genuine Newton step
    CHECK(sol.iterations >= 1);
  }

  // Near the top of the low branch the highest qubit state runs out of its
  // own L branch before states 0 and 1 do; the solve must still succeed by
  // letting that state follow the branch it actually has.
  SUBCASE("mixed per-state branches near the fold") {
    for (double mhz : {26.0, 30.0, 34.0}) {
      PointerSolution sol = solve_at(mhz, BranchHint::L);
      CHECK(sol.converged);
      CHECK(sol.branch == Branch::L);
      CHECK(sol.residual <= tol);
      // state 2 has jumped high while state 0 is still low
      CHECK(sol.alpha(2, 0).real() != doctest::Approx(sol.alpha(0, 0).real())
                                          .epsilon(0.5));
    }
  }

  SUBCASE("high branch above the jump") {
    PointerSolution sol = solve_at(40.0, BranchHint::H);
    CHECK(sol.converged);
    CHECK(sol.branch == Branch::H);
    CHECK(sol.residual <= tol);
    PointerSolution lo = solve_at(20.0, BranchHint::L);
    CHECK(sol.n_tot(0) > 4.0 * lo.n_tot(0));
  }
}
