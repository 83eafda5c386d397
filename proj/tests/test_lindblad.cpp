#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "kerrprobe/errors.h"
#include "kerrprobe/lindblad.h"
#include "kerrprobe/params.h"
#include "kerrprobe/units.h"

using namespace kerr;
using cplx = std::complex<double>;

namespace {

SystemParams bare_cavity(double omega_r, double K, double kappa) {
  SystemParams p;
  p.omega_r = omega_r;
  p.K = K;
  p.kappa = kappa;
  // two decoupled, far-detuned qubit levels keep the model well formed
  p.levels = {{0.0, 0.0, 0.0}, {1e4, 0.0, 1.0}};
  return p;
}

DriveSpec pump(double omega, cplx eps) {
  DriveSpec d;
  d.kind = DriveKind::pump;
  d.omega = omega;
  d.eps = eps;
  return d;
}

}  // namespace

TEST_CASE("undriven decoupled system stays in the ground state") {
  SystemParams p = bare_cavity(50.0, 0.0, 1.0);
  p.gamma = 0.1;  // without any qubit channel the steady state is not unique
  TruncatedSpace space{8, 2};
  LindbladGenerator gen = build_generator(p, {}, Frame::lab, space);
  CHECK(!gen.time_dependent());

  SteadyStateResult ss = steady_state(gen);
  CHECK(ss.residual < 1e-9);
  CHECK(ss.mean_n < 1e-12);
  CHECK(!ss.bimodal);

  Moments m = moments(space, ss.rho);
  CHECK(std::abs(m.a) < 1e-10);
  CHECK(std::abs(m.a2) < 1e-10);
  CHECK(m.pops[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(ss.rho(space.idx(0, 0), space.idx(0, 0)) - 1.0) < 1e-10);
}

// Closed form from tools/oracles/linear_cavity.py: in the frame of the drive
// the steady coherent amplitude is -i eps / (kappa/2 + i Delta). Signs and
// phases are asserted component by component; a transposed index pair in the
// moment evaluation would conjugate them.
TEST_CASE("driven linear cavity reaches the closed-form coherent state") {
  SystemParams p = bare_cavity(100.0, 0.0, 1.0);
  TruncatedSpace space{30, 1};
  std::vector<DriveSpec> drives{pump(99.7, 0.5)};  // Delta = +0.3
  LindbladGenerator gen =
      build_generator(p, drives, Frame::single_drive_rotating, space);
  CHECK(!gen.time_dependent());
  CHECK(gen.frame_omega == 99.7);

  SteadyStateResult ss = steady_state(gen);
  CHECK(ss.residual < 1e-10);
  CHECK(ss.cutoff_fill < 0.2);

  Moments m = moments(space, ss.rho);
  cplx want(-0.44117647058823534, -0.73529411764705888);
  CHECK(m.a.real() == doctest::Approx(want.real()).epsilon(1e-8));
  CHECK(m.a.imag() == doctest::Approx(want.imag()).epsilon(1e-8));
  // a coherent state: n = |<a>|^2 and <a^2> = <a>^2
  CHECK(m.n == doctest::Approx(0.7352941176470589).epsilon(1e-8));
  CHECK(std::abs(m.a2 - want * want) < 1e-6);

  // photon statistics agree with the moment sums
  Eigen::VectorXd pn = fock_populations(space, ss.rho);
  double n_sum = 0.0;
  for (int n = 0; n < space.N; ++n) n_sum += n * pn[n];
  CHECK(n_sum == doctest::Approx(m.n).epsilon(1e-12));
  CHECK(pn.sum() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("explicit superoperator matches the direct application") {
  SystemParams p = bare_cavity(10.0, -0.08, 0.7);
  p.levels[1].omega = 12.5;
  p.levels[0].g = 0.4;
  p.gamma = 0.05;
  p.gamma_phi = 0.03;
  TruncatedSpace space{6, 2};
  std::vector<DriveSpec> drives{pump(9.8, cplx(0.3, -0.1))};
  LindbladGenerator gen =
      build_generator(p, drives, Frame::single_drive_rotating, space);

  // a fixed, well-scrambled Hermitian test matrix with unit trace
  int d = space.dim();
  Eigen::MatrixXcd R(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      R(i, j) = cplx(std::sin(0.7 * i + 0.3 * j * j),
                     std::cos(1.3 * i * j + 0.2 * j));
  Eigen::MatrixXcd rho = R * R.adjoint();
  rho /= rho.trace().real();

  Eigen::MatrixXcd drho;
  gen.apply(0.0, rho, drho);

  SpMat L = gen.liouvillian();
  Eigen::VectorXcd vec =
      Eigen::Map<const Eigen::VectorXcd>(rho.data(), d * d);
  Eigen::VectorXcd dvec = L * vec;
  Eigen::MatrixXcd drho_L =
      Eigen::Map<const Eigen::MatrixXcd>(dvec.data(), d, d);

  CHECK((drho - drho_L).cwiseAbs().maxCoeff() < 1e-12);
  // the generator preserves the trace: columns of L sum against identity
  CHECK(std::abs(drho.trace()) < 1e-12);
}

TEST_CASE("time evolution relaxes to the steady state") {
  SystemParams p = bare_cavity(100.0, -0.05, 1.0);
  TruncatedSpace space{25, 1};
  std::vector<DriveSpec> drives{pump(99.6, 0.7)};
  LindbladGenerator gen =
      build_generator(p, drives, Frame::single_drive_rotating, space);

  SteadyStateResult ss = steady_state(gen);
  EvolveOptions opt;
  opt.rtol = opt.atol = 1e-9;
  EvolveResult ev = time_evolve(gen, ground_state(space), 0.0, 60.0, opt);

  CHECK(ev.max_trace_err < 1e-8);
  CHECK(ev.max_herm_err < 1e-10);
  CHECK(ev.steps > 10);

  Moments ma = moments(space, ev.rho);
  Moments mb = moments(space, ss.rho);
  CHECK(std::abs(ma.a - mb.a) < 1e-5);
  CHECK(ma.n == doctest::Approx(mb.n).epsilon(1e-5));

  // physicality of both results
  for (const Eigen::MatrixXcd& rho : {ev.rho, ss.rho}) {
    CHECK(trace_error(rho) < 1e-8);
    CHECK(hermiticity_error(rho) < 1e-10);
    CHECK(min_eigenvalue(rho) > -1e-8);
  }
}

TEST_CASE("Fock cutoff escalates until the tail is resolved") {
  SystemParams p = bare_cavity(100.0, -0.05, 1.0);
  std::vector<DriveSpec> drives{pump(99.6, 0.7)};
  // start with a hopeless cutoff; mean occupation is about 1.4
  SteadyStateResult ss = steady_state_adaptive(
      p, drives, Frame::single_drive_rotating, TruncatedSpace{4, 1});
  CHECK(ss.cutoff_fill <= 0.7);
  CHECK(ss.residual < 1e-9);

  // the escalated result agrees with a generously truncated reference
  LindbladGenerator ref_gen = build_generator(
      p, drives, Frame::single_drive_rotating, TruncatedSpace{30, 1});
  SteadyStateResult ref = steady_state(ref_gen);
  CHECK(ss.mean_n == doctest::Approx(ref.mean_n).epsilon(1e-4));
}

TEST_CASE("lab frame with explicit drive matches the rotating frame") {
  SystemParams p = bare_cavity(30.0, 0.0, 1.0);
  std::vector<DriveSpec> drives{pump(29.7, 0.5)};
  TruncatedSpace space{16, 1};

  LindbladGenerator lab = build_generator(p, drives, Frame::lab, space);
  CHECK(lab.time_dependent());
  CHECK_THROWS_AS(lab.liouvillian(), std::logic_error);
  CHECK_THROWS_AS(steady_state(lab), std::logic_error);

  EvolveOptions opt;
  opt.rtol = opt.atol = 1e-8;
  EvolveResult ev = time_evolve(lab, ground_state(space), 0.0, 40.0, opt);

  LindbladGenerator rot =
      build_generator(p, drives, Frame::single_drive_rotating, space);
  SteadyStateResult ss = steady_state(rot);

  Moments ma = moments(space, ev.rho);
  Moments mb = moments(space, ss.rho);
  // the lab-frame amplitude rotates at the drive frequency: compare moduli
  CHECK(std::abs(ma.a) == doctest::Approx(std::abs(mb.a)).epsilon(1e-3));
  CHECK(ma.n == doctest::Approx(mb.n).epsilon(1e-3));
}

TEST_CASE("counter-rotating coupling is the only lab/RWA difference") {
  SystemParams p = bare_cavity(10.0, 0.0, 0.0);
  p.levels = {{0.0, 0.3, 0.0}, {9.7, 0.0, 1.0}};  // coupled qubit, no loss
  TruncatedSpace space{5, 2};

  LindbladGenerator rwa = build_generator(p, {}, Frame::lab, space, true);
  LindbladGenerator full = build_generator(p, {}, Frame::lab, space, false);

  // vacuum + ground: invariant under the excitation-preserving coupling,
  // but the counter-rotating term pumps it towards |1, e>
  Eigen::MatrixXcd rho = ground_state(space), drho;
  rwa.apply(0.0, rho, drho);
  CHECK(drho.cwiseAbs().maxCoeff() < 1e-15);
  full.apply(0.0, rho, drho);
  CHECK(drho.cwiseAbs().maxCoeff() > 0.01);
  CHECK(std::abs(drho(space.idx(1, 1), space.idx(0, 0))) > 0.01);
}

TEST_CASE("two-drive rotating frame keeps one beat term") {
  SystemParams p = bare_cavity(100.0, -0.02, 1.0);
  std::vector<DriveSpec> drives{pump(99.6, 0.4)};
  DriveSpec s;
  s.kind = DriveKind::spectroscopy;
  s.omega = 99.9;
  s.eps = 0.05;
  drives.push_back(s);

  TruncatedSpace space{10, 1};
  LindbladGenerator gen =
      build_generator(p, drives, Frame::single_drive_rotating, space);
  CHECK(gen.time_dependent());
  REQUIRE(gen.drive_terms.size() == 1);
  // the spectroscopy tone beats at its detuning from the pump
  CHECK(gen.drive_terms[0].omega == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(gen.frame_omega == 99.6);

  // no steady state exists for a generator with explicit time dependence
  CHECK_THROWS_AS(steady_state_adaptive(p, drives,
                                        Frame::single_drive_rotating,
                                        TruncatedSpace{6, 1}),
                  ConfigError);
}

TEST_CASE("density-matrix sanity measures") {
  Eigen::MatrixXcd ok = Eigen::MatrixXcd::Zero(3, 3);
  ok(0, 0) = 0.5;
  ok(1, 1) = 0.5;
  CHECK(trace_error(ok) < 1e-15);
  CHECK(hermiticity_error(ok) < 1e-15);
  CHECK(min_eigenvalue(ok) == doctest::Approx(0.0).epsilon(1e-12));

  Eigen::MatrixXcd bad = ok;
  bad(2, 2) = -0.25;
  bad(0, 0) = 0.75;
  CHECK(min_eigenvalue(bad) == doctest::Approx(-0.25).epsilon(1e-12));

  Eigen::MatrixXcd skew = ok;
  skew(0, 1) = cplx(0.0, 0.1);
  CHECK(hermiticity_error(skew) == doctest::Approx(0.1).epsilon(1e-12));

  CHECK(trace_error(Eigen::MatrixXcd::Identity(3, 3)) ==
        doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("averaging window validation") {
  SystemParams p = bare_cavity(10.0, 0.0, 1.0);
  TruncatedSpace space{4, 2};
  LindbladGenerator gen = build_generator(p, {}, Frame::lab, space);
  CHECK_THROWS_AS(average_P1(gen, 10.0, 5.0), ConfigError);
  // nothing drives the qubit: the excited level stays empty
  CHECK(average_P1(gen, 0.5, 1.5) == doctest::Approx(0.0).epsilon(1e-12));
}
