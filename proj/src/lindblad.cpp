#include "kerrprobe/lindblad.h"

#include <unsupported/Eigen/KroneckerProduct>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "kerrprobe/errors.h"

namespace kerr {

namespace {

using Trip = Eigen::Triplet<std::complex<double>>;

SpMat annihilation(int N) {
  SpMat a(N, N);
  std::vector<Trip> t;
  t.reserve(N);
  for (int n = 1; n < N; ++n) t.emplace_back(n - 1, n, std::sqrt((double)n));
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

// Diagonal resonator operator f(n) in the Fock basis.
SpMat fock_diag(int N, const std::function<double(int)>& f) {
  SpMat d(N, N);
  std::vector<Trip> t;
  t.reserve(N);
  for (int n = 0; n < N; ++n)
    if (f(n) != 0.0) t.emplace_back(n, n, f(n));
  d.setFromTriplets(t.begin(), t.end());
  return d;
}

SpMat qubit_proj(int M, int r, int c) {
  SpMat p(M, M);
  p.insert(r, c) = 1.0;
  p.makeCompressed();
  return p;
}

SpMat identity(int n) {
  SpMat id(n, n);
  id.setIdentity();
  return id;
}

// Index convention idx(n, q) = q*N + n, i.e. the qubit is the slow index, so
// a full-space operator is kron(qubit part, resonator part).
SpMat lift(const SpMat& q_op, const SpMat& f_op) {
  return Eigen::kroneckerProduct(q_op, f_op).eval();
}

double rms_scaled(const Eigen::MatrixXcd& e, const Eigen::MatrixXcd& y0,
                  const Eigen::MatrixXcd& y1, double atol, double rtol) {
  Eigen::ArrayXXd sc =
      atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array();
  return std::sqrt((e.cwiseAbs().array() / sc).square().mean());
}

}  // namespace

void LindbladGenerator::apply(double t, const Eigen::MatrixXcd& rho,
                              Eigen::MatrixXcd& drho) const {
  // P = H(t) rho, assembled term by term so H(t) itself is never formed
  Eigen::MatrixXcd P = H0 * rho;
  for (const DriveTerm& d : drive_terms) {
    std::complex<double> ph = d.amp * std::polar(1.0, -d.omega * t);
    P += ph * (d.op * rho);
    P += std::conj(ph) * (d.op.adjoint() * rho);
  }
  drho = std::complex<double>(0.0, -1.0) * (P - P.adjoint());
  for (const auto& [rate, A] : collapse) {
    Eigen::MatrixXcd R = A * rho;               // A rho
    Eigen::MatrixXcd Q = A.adjoint() * R;       // A^dag A rho
    drho += rate * (R * A.adjoint() - 0.5 * (Q + Q.adjoint()));
  }
}

SpMat LindbladGenerator::liouvillian() const {
  if (time_dependent())
    throw std::logic_error(
        "liouvillian(): generator has explicit time dependence");
  int dim = space.dim();
  SpMat id = identity(dim);
  // column-major vec(rho): vec(A X B) = (B^T kron A) vec(X)
  std::complex<double> mi(0.0, -1.0);
  SpMat L = mi * (Eigen::kroneckerProduct(id, H0).eval() -
                  Eigen::kroneckerProduct(SpMat(H0.transpose()), id).eval());
  for (const auto& [rate, A] : collapse) {
    SpMat AdA = SpMat(A.adjoint()) * A;
    L += rate * (Eigen::kroneckerProduct(SpMat(A.conjugate()), A).eval() -
                 0.5 * Eigen::kroneckerProduct(id, AdA).eval() -
                 0.5 * Eigen::kroneckerProduct(SpMat(AdA.transpose()), id)
                           .eval());
  }
  L.makeCompressed();
  return L;
}

LindbladGenerator build_generator(const SystemParams& p,
                                  const std::vector<DriveSpec>& drives,
                                  Frame frame, const TruncatedSpace& space,
                                  bool rwa) {
  int N = space.N;
  int M = space.M;
  if (M > p.M())
    throw ConfigError("truncated space has more qubit levels than the model");

  LindbladGenerator g;
  g.space = space;
  g.frame = frame;

  double omega_ref = 0.0;
  int ref = -1;
  if (frame == Frame::single_drive_rotating && !drives.empty()) {
    ref = drive_index(drives, DriveKind::pump, /*required_unique=*/false);
    if (ref < 0) ref = 0;
    omega_ref = drives[ref].omega;
  }
  g.frame_omega = omega_ref;
  g.rwa = rwa || frame == Frame::single_drive_rotating;

  SpMat a_f = annihilation(N);
  SpMat adag_f = SpMat(a_f.adjoint());
  SpMat I_N = identity(N);
  SpMat I_M = identity(M);
  SpMat a_full = lift(I_M, a_f);
  SpMat adag_full = lift(I_M, adag_f);

  double K2 = p.K / 2.0, K3 = p.Kp / 3.0;
  SpMat h_res = fock_diag(N, [&](int n) {
    return (p.omega_r - omega_ref) * n + K2 * n * (n - 1.0) +
           K3 * n * (n - 1.0) * (n - 2.0);
  });
  SpMat H = lift(I_M, h_res);

  for (int q = 0; q < M; ++q) {
    double w = p.omega_q(q) - q * omega_ref;
    if (w != 0.0) H += w * lift(qubit_proj(M, q, q), I_N);
  }

  for (int i = 0; i + 1 < M; ++i) {
    double gi = p.g(i);
    if (gi == 0.0) continue;
    SpMat low = lift(qubit_proj(M, i, i + 1), adag_f);  // a^dag |i><i+1|
    H += gi * (low + SpMat(low.adjoint()));
    if (!g.rwa) {
      SpMat cr = lift(qubit_proj(M, i, i + 1), a_f);    // a |i><i+1|
      H += gi * (cr + SpMat(cr.adjoint()));
    }
  }

  for (int d = 0; d < (int)drives.size(); ++d) {
    if (drives[d].eps == std::complex<double>(0.0)) continue;
    double beat = drives[d].omega - omega_ref;
    if (d == ref || beat == 0.0) {
      H += SpMat(drives[d].eps * adag_full) +
           SpMat(std::conj(drives[d].eps) * a_full);
    } else {
      g.drive_terms.push_back({drives[d].eps, beat, adag_full});
    }
  }
  H.makeCompressed();
  g.H0 = H;

  if (p.kappa > 0.0) g.collapse.emplace_back(p.kappa, a_full);
  double g0 = p.g(0);
  for (int i = 0; i + 1 < M && p.gamma > 0.0; ++i) {
    double ratio = (i == 0) ? 1.0 : (g0 != 0.0 ? p.g(i) / g0 : 0.0);
    double rate = p.gamma * ratio * ratio;
    if (rate > 0.0)
      g.collapse.emplace_back(rate, lift(qubit_proj(M, i, i + 1), I_N));
  }
  if (p.gamma_phi > 0.0) {
    SpMat deph(M, M);
    std::vector<Trip> t;
    for (int q = 0; q < M; ++q)
      if (p.eps_disp(q) != 0.0) t.emplace_back(q, q, p.eps_disp(q));
    deph.setFromTriplets(t.begin(), t.end());
    g.collapse.emplace_back(2.0 * p.gamma_phi, lift(deph, I_N));
  }
  return g;
}

SteadyStateResult steady_state(const LindbladGenerator& gen) {
  SpMat L = gen.liouvillian();
  int dim = gen.space.dim();
  int D = dim * dim;

  double maxL = 0.0;
  for (int k = 0; k < L.outerSize(); ++k)
    for (SpMat::InnerIterator it(L, k); it; ++it)
      maxL = std::max(maxL, std::abs(it.value()));
  if (maxL == 0.0) throw std::runtime_error("empty generator");

  // L vec(rho) = 0 has a one-dimensional null space; swap the first row for
  // the trace condition to pin the physical solution
  std::vector<Trip> trips;
  trips.reserve(L.nonZeros() + dim);
  for (int k = 0; k < L.outerSize(); ++k)
    for (SpMat::InnerIterator it(L, k); it; ++it)
      if (it.row() != 0) trips.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < dim; ++i) trips.emplace_back(0, i * dim + i, maxL);
  SpMat Lc(D, D);
  Lc.setFromTriplets(trips.begin(), trips.end());
  Lc.makeCompressed();

  Eigen::SparseLU<SpMat> lu(Lc);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("steady-state factorization failed");
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(D);
  b(0) = maxL;  // trace row was scaled by maxL for conditioning
  Eigen::VectorXcd x = lu.solve(b);

  SteadyStateResult out;
  Eigen::VectorXcd res = L * x;
  out.residual = res.cwiseAbs().maxCoeff() / maxL;
  out.rho = Eigen::Map<Eigen::MatrixXcd>(x.data(), dim, dim);
  out.rho = 0.5 * (out.rho + out.rho.adjoint()).eval();

  Moments m = moments(gen.space, out.rho);
  out.mean_n = m.n;
  out.cutoff_fill = m.n / gen.space.N;

  Eigen::VectorXd pn = fock_populations(gen.space, out.rho);
  int peaks = 0;
  for (int n = 0; n < pn.size(); ++n) {
    double left = n > 0 ? pn(n - 1) : -1.0;
    double right = n + 1 < pn.size() ? pn(n + 1) : -1.0;
    if (pn(n) > 1e-6 && pn(n) > left && pn(n) >= right) ++peaks;
  }
  out.bimodal = peaks >= 2;
  return out;
}

SteadyStateResult steady_state_adaptive(const SystemParams& p,
                                        const std::vector<DriveSpec>& drives,
                                        Frame frame, TruncatedSpace space,
                                        int dim_cap) {
  for (;;) {
    LindbladGenerator gen = build_generator(p, drives, frame, space);
    if (gen.time_dependent())
      throw ConfigError(
          "steady state needs a time-independent generator; use the rotating "
          "frame with a single drive");
    SteadyStateResult res = steady_state(gen);
    Eigen::VectorXd pn = fock_populations(space, res.rho);
    double tail = pn(pn.size() - 1);
    bool suspect = res.cutoff_fill > 0.7 || tail > 1e-7;
    int next_N = (space.N * 3 + 1) / 2;
    if (!suspect || next_N * space.M > dim_cap) return res;
    space.N = next_N;
  }
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double A2[] = {1.0 / 5};
constexpr double A3[] = {3.0 / 40, 9.0 / 40};
constexpr double A4[] = {44.0 / 45, -56.0 / 15, 32.0 / 9};
constexpr double A5[] = {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561,
                         -212.0 / 729};
constexpr double A6[] = {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247,
                         49.0 / 176, -5103.0 / 18656};
constexpr double B5[] = {35.0 / 384,     0.0,         500.0 / 1113,
                         125.0 / 192,    -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double B4[] = {5179.0 / 57600, 0.0,           7571.0 / 16695,
                         393.0 / 640,    -92097.0 / 339200, 187.0 / 2100,
                         1.0 / 40};
constexpr double C[] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};

EvolveResult evolve_observed(
    const LindbladGenerator& gen, Eigen::MatrixXcd rho, double t0, double t1,
    const EvolveOptions& opt,
    const std::function<void(double, const Eigen::MatrixXcd&)>& observe) {
  EvolveResult out;
  double t = t0;
  Eigen::MatrixXcd k[7], y5, err;
  gen.apply(t, rho, k[0]);

  double dt = opt.dt0;
  if (dt <= 0.0) {
    double d0 = std::sqrt(rho.cwiseAbs().array().square().mean());
    double d1 = std::sqrt(k[0].cwiseAbs().array().square().mean());
    dt = 0.01 * (opt.atol + opt.rtol * d0) / std::max(d1, 1e-300);
    dt = std::min(dt, t1 - t0);
  }

  if (observe) observe(t, rho);
  while (t < t1) {
    if (out.steps + out.rejected >= opt.max_steps)
      throw std::runtime_error("time evolution exceeded the step budget");
    if (dt < 1e-15 * std::max({std::abs(t0), std::abs(t1), 1.0}))
      throw StepUnderflow("integration step size underflowed");
    dt = std::min(dt, t1 - t);

    k[1] = k[0];  // staging buffer reuse; k[0] holds f(t, rho)
    Eigen::MatrixXcd y = rho + dt * A2[0] * k[0];
    gen.apply(t + C[1] * dt, y, k[1]);
    y = rho + dt * (A3[0] * k[0] + A3[1] * k[1]);
    gen.apply(t + C[2] * dt, y, k[2]);
    y = rho + dt * (A4[0] * k[0] + A4[1] * k[1] + A4[2] * k[2]);
    gen.apply(t + C[3] * dt, y, k[3]);
    y = rho + dt * (A5[0] * k[0] + A5[1] * k[1] + A5[2] * k[2] + A5[3] * k[3]);
    gen.apply(t + C[4] * dt, y, k[4]);
    y = rho + dt * (A6[0] * k[0] + A6[1] * k[1] + A6[2] * k[2] +
                    A6[3] * k[3] + A6[4] * k[4]);
    gen.apply(t + C[5] * dt, y, k[5]);
    y5 = rho + dt * (B5[0] * k[0] + B5[2] * k[2] + B5[3] * k[3] +
                     B5[4] * k[4] + B5[5] * k[5]);
    gen.apply(t + dt, y5, k[6]);  // FSAL stage

    err = dt * ((B5[0] - B4[0]) * k[0] + (B5[2] - B4[2]) * k[2] +
                (B5[3] - B4[3]) * k[3] + (B5[4] - B4[4]) * k[4] +
                (B5[5] - B4[5]) * k[5] + (B5[6] - B4[6]) * k[6]);
    double e = rms_scaled(err, rho, y5, opt.atol, opt.rtol);

    if (e <= 1.0) {
      t += dt;
      rho = y5;
      out.max_herm_err = std::max(out.max_herm_err, hermiticity_error(rho));
      rho = 0.5 * (rho + rho.adjoint()).eval();
      out.max_trace_err = std::max(out.max_trace_err, trace_error(rho));
      k[0] = k[6];
      ++out.steps;
      if (observe) observe(t, rho);
    } else {
      ++out.rejected;
    }
    double fac = 0.9 * std::pow(std::max(e, 1e-10), -0.2);
    dt *= std::min(5.0, std::max(0.2, fac));
  }
  out.rho = std::move(rho);
  return out;
}

}  // namespace

EvolveResult time_evolve(const LindbladGenerator& gen, Eigen::MatrixXcd rho0,
                         double t0, double t1, const EvolveOptions& opt) {
  return evolve_observed(gen, std::move(rho0), t0, t1, opt, nullptr);
}

Moments moments(const TruncatedSpace& space, const Eigen::MatrixXcd& rho) {
  Moments m;
  m.pops = Eigen::VectorXd::Zero(space.M);
  for (int q = 0; q < space.M; ++q) {
    for (int n = 0; n < space.N; ++n) {
      int i = space.idx(n, q);
      double pop = rho(i, i).real();
      m.pops(q) += pop;
      m.n += n * pop;
      // <a> = sum sqrt(n) rho(n, q; n-1, q) etc., diagonal in the qubit
      if (n >= 1) m.a += std::sqrt((double)n) * rho(i, space.idx(n - 1, q));
      if (n >= 2)
        m.a2 += std::sqrt(n * (n - 1.0)) * rho(i, space.idx(n - 2, q));
    }
  }
  return m;
}

Eigen::VectorXd fock_populations(const TruncatedSpace& space,
                                 const Eigen::MatrixXcd& rho) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(space.N);
  for (int n = 0; n < space.N; ++n)
    for (int q = 0; q < space.M; ++q)
      p(n) += rho(space.idx(n, q), space.idx(n, q)).real();
  return p;
}

double trace_error(const Eigen::MatrixXcd& rho) {
  return std::abs(rho.trace() - std::complex<double>(1.0));
}

double hermiticity_error(const Eigen::MatrixXcd& rho) {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Eigen::MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Eigen::MatrixXcd ground_state(const TruncatedSpace& space) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
  rho(space.idx(0, 0), space.idx(0, 0)) = 1.0;
  return rho;
}

double average_P1(const LindbladGenerator& gen, double t_relax, double t_end,
                  const EvolveOptions& opt) {
  if (!(t_end > t_relax))
    throw ConfigError("averaging window must come after the relaxation time");
  EvolveResult warm =
      evolve_observed(gen, ground_state(gen.space), 0.0, t_relax, opt, nullptr);

  double integral = 0.0, prev_t = t_relax, prev_v = 0.0;
  bool first = true;
  auto observe = [&](double t, const Eigen::MatrixXcd& rho) {
    double v = 0.0;
    for (int n = 0; n < gen.space.N; ++n)
      v += rho(gen.space.idx(n, 1), gen.space.idx(n, 1)).real();
    if (!first) integral += 0.5 * (v + prev_v) * (t - prev_t);
    first = false;
    prev_t = t;
    prev_v = v;
  };
  evolve_observed(gen, std::move(warm.rho), t_relax, t_end, opt, observe);
  return integral / (t_end - t_relax);
}

}  // namespace kerr
