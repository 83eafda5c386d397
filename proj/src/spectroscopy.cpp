#include "kerrprobe/spectroscopy.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "kerrprobe/errors.h"
#include "kerrprobe/squeezing.h"
#include "kerrprobe/units.h"

namespace kerr {

namespace {

// Up to three Lorentzians over a constant baseline. Parameter packing order:
// baseline, then (A, f0, w) for every active slot; slot 0 is the main line,
// slots 1 and 2 the tentative sidebands.
struct PeakState {
  bool active[3] = {false, false, false};
  double A[3] = {0, 0, 0};
  double f0[3] = {0, 0, 0};
  double w[3] = {0, 0, 0};
  double b = 0.0;
  double w_min = 0.0;  // width floor, keeps the model differentiable

  int npar() const {
    int n = 1;
    for (bool a : active) n += a ? 3 : 0;
    return n;
  }
  Eigen::VectorXd pack() const {
    Eigen::VectorXd p(npar());
    p(0) = b;
    int c = 1;
    for (int k = 0; k < 3; ++k)
      if (active[k]) {
        p(c++) = A[k];
        p(c++) = f0[k];
        p(c++) = w[k];
      }
    return p;
  }
  void unpack(const Eigen::VectorXd& p) {
    b = p(0);
    int c = 1;
    for (int k = 0; k < 3; ++k)
      if (active[k]) {
        A[k] = p(c++);
        f0[k] = p(c++);
        w[k] = std::max(std::abs(p(c++)), w_min);
      }
  }
};

void model_eval(const std::vector<double>& x, const PeakState& s,
                Eigen::VectorXd& m, Eigen::MatrixXd* J) {
  int n = (int)x.size();
  m.resize(n);
  if (J) J->resize(n, s.npar());
  for (int i = 0; i < n; ++i) {
    double v = s.b;
    if (J) (*J)(i, 0) = 1.0;
    int c = 1;
    for (int k = 0; k < 3; ++k) {
      if (!s.active[k]) continue;
      double u = x[i] - s.f0[k];
      double hw = s.w[k] / 2.0;
      double h = hw * hw;
      double d = u * u + h;
      double L = h / d;
      v += s.A[k] * L;
      if (J) {
        (*J)(i, c) = L;
        (*J)(i, c + 1) = s.A[k] * h * 2.0 * u / (d * d);
        (*J)(i, c + 2) = s.A[k] * hw * u * u / (d * d);
      }
      c += 3;
    }
    m(i) = v;
  }
}

struct LmResult {
  double rss = 0.0;
  Eigen::MatrixXd cov;
  bool converged = false;
};

LmResult lm_fit(const std::vector<double>& x, const Eigen::VectorXd& y,
                PeakState& s) {
  const int n = (int)x.size();
  LmResult out;
  Eigen::VectorXd m, r, m_try;
  Eigen::MatrixXd J;
  model_eval(x, s, m, nullptr);
  double rss = (m - y).squaredNorm();

  double lambda = 1e-3;
  bool converged = false;
  for (int iter = 0; iter < 200 && !converged; ++iter) {
    model_eval(x, s, m, &J);
    r = m - y;
    Eigen::MatrixXd H = J.transpose() * J;
    Eigen::VectorXd g = J.transpose() * r;
    double hmax = H.diagonal().maxCoeff();
    if (!(hmax > 0.0)) break;

    bool accepted = false;
    for (int tries = 0; tries < 40; ++tries) {
      Eigen::MatrixXd Hd = H;
      for (int j = 0; j < Hd.rows(); ++j)
        Hd(j, j) += lambda * std::max(H(j, j), 1e-14 * hmax);
      Eigen::VectorXd dx = Hd.ldlt().solve(-g);
      PeakState trial = s;
      trial.unpack(s.pack() + dx);
      model_eval(x, trial, m_try, nullptr);
      double rss_try = (m_try - y).squaredNorm();
      if (std::isfinite(rss_try) && rss_try < rss) {
        if (rss - rss_try <= 1e-12 * (rss_try + 1e-300)) converged = true;
        s = trial;
        rss = rss_try;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 4.0;
      if (lambda > 1e14) break;
    }
    if (!accepted) {
      converged = lambda <= 1e14;  // stalled at a (local) minimum
      break;
    }
  }

  out.rss = rss;
  out.converged = converged || rss <= 1e-24;
  // covariance from the Gauss-Newton Hessian at the solution
  model_eval(x, s, m, &J);
  Eigen::MatrixXd H = J.transpose() * J;
  int np = s.npar();
  double s2 = n > np ? rss / (n - np) : 0.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(H);
  if (lu.isInvertible()) {
    out.cov = lu.inverse() * s2;
  } else {
    out.cov = Eigen::MatrixXd::Constant(
        np, np, std::numeric_limits<double>::infinity());
  }
  return out;
}

// 1-sigma errors in slot order, mirroring PeakState::pack
struct Sigmas {
  double b = 0.0;
  double A[3] = {0, 0, 0}, f0[3] = {0, 0, 0}, w[3] = {0, 0, 0};
};

Sigmas sigmas_from(const PeakState& s, const Eigen::MatrixXd& cov) {
  auto sig = [&](int i) {
    double v = cov(i, i);
    return v >= 0.0 ? std::sqrt(v) : std::numeric_limits<double>::infinity();
  };
  Sigmas out;
  out.b = sig(0);
  int c = 1;
  for (int k = 0; k < 3; ++k)
    if (s.active[k]) {
      out.A[k] = sig(c++);
      out.f0[k] = sig(c++);
      out.w[k] = sig(c++);
    }
  return out;
}

double estimate_fwhm(const std::vector<double>& x, const Eigen::VectorXd& y,
                     int imax, double base) {
  double half = base + (y(imax) - base) / 2.0;
  double lo = x.front(), hi = x.back();
  for (int i = imax; i >= 0; --i)
    if (y(i) < half) {
      lo = x[i];
      break;
    }
  for (int i = imax; i < y.size(); ++i)
    if (y(i) < half) {
      hi = x[i];
      break;
    }
  double w = hi - lo;
  if (!(w > 0.0)) w = (x.back() - x.front()) / 20.0;
  return w;
}

}  // namespace

LorentzianTriplet fit_three_lorentzians(const std::vector<double>& x_in,
                                        const std::vector<double>& y_in,
                                        const FitInit& init) {
  if (x_in.size() != y_in.size())
    throw ConfigError("fit: x and y lengths differ");

  // keep finite pairs only, sorted in x
  std::vector<int> order;
  for (int i = 0; i < (int)x_in.size(); ++i)
    if (std::isfinite(x_in[i]) && std::isfinite(y_in[i])) order.push_back(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return x_in[a] < x_in[b]; });
  std::vector<double> x;
  Eigen::VectorXd y((int)order.size());
  for (int i = 0; i < (int)order.size(); ++i) {
    x.push_back(x_in[order[i]]);
    y(i) = y_in[order[i]];
  }
  if ((int)x.size() < 12)
    throw FitDiverged("fit: need at least 12 finite samples");

  // Fit in a centred, unit-span coordinate. Spectroscopy axes arrive in Hz
  // with offsets ~1e9 and linewidths ~1e6; in raw units the normal equations
  // mix O(1) baseline columns with O(1e-7) frequency columns and the Hessian
  // is numerically singular, which poisons every parameter error bar.
  const double x_mid = 0.5 * (x.front() + x.back());
  const double x_span = x.back() - x.front();
  if (!(x_span > 0.0)) throw FitDiverged("fit: zero frequency span");
  for (double& v : x) v = (v - x_mid) / x_span;

  LorentzianTriplet out;
  double ymax = y.maxCoeff(), ymin = y.minCoeff();
  if (!(ymax > ymin)) {
    out.message = "flat data";
    return out;
  }

  Eigen::VectorXd ysorted = y;
  std::sort(ysorted.data(), ysorted.data() + ysorted.size());
  double b0 = ysorted((int)(0.1 * (ysorted.size() - 1)));

  int imax = 0;
  y.maxCoeff(&imax);
  const double guide_centre = (init.centre - x_mid) / x_span;
  const double guide_split = init.split / x_span;
  double centre0 = x[imax];
  if (init.model_guided && guide_centre > x.front() && guide_centre < x.back())
    centre0 = guide_centre;

  PeakState s;
  s.w_min = (x.back() - x.front()) * 1e-9;
  s.b = b0;
  s.active[0] = true;
  s.A[0] = std::max(ymax - b0, 1e-3 * (ymax - ymin));
  s.f0[0] = centre0;
  s.w[0] = estimate_fwhm(x, y, imax, b0);

  lm_fit(x, y, s);  // stage 1: main line only

  // seed the sidebands, either at the model-predicted offsets or from the
  // two largest residual bumps on each side of the fitted line
  Eigen::VectorXd m1;
  model_eval(x, s, m1, nullptr);
  Eigen::VectorXd resid = y - m1;
  double floorA = 0.02 * std::max(s.A[0], ymax - ymin);
  auto seed = [&](int slot, double f) {
    if (f <= x.front() || f >= x.back()) return;
    int j = (int)(std::lower_bound(x.begin(), x.end(), f) - x.begin());
    j = std::min(j, (int)x.size() - 1);
    s.active[slot] = true;
    s.A[slot] = std::max(resid(j), floorA);
    s.f0[slot] = f;
    s.w[slot] = s.w[0];
  };
  if (guide_split > 0.0) {
    seed(1, s.f0[0] - guide_split);
    seed(2, s.f0[0] + guide_split);
  } else {
    auto bump = [&](double lo, double hi) -> double {
      int best = -1;
      for (int i = 0; i < (int)x.size(); ++i)
        if (x[i] > lo && x[i] < hi && (best < 0 || resid(i) > resid(best)))
          best = i;
      return best >= 0 && resid(best) > 0.0 ? x[best]
                                            : std::numeric_limits<double>::quiet_NaN();
    };
    double fr = bump(x.front(), s.f0[0] - s.w[0]);
    double fb = bump(s.f0[0] + s.w[0], x.back());
    if (std::isfinite(fr)) seed(1, fr);
    if (std::isfinite(fb)) seed(2, fb);
  }

  // stage 2: full model, pruning sidebands that do not survive
  LmResult lm;
  Sigmas sg;
  for (int round = 0; round < 4; ++round) {
    lm = lm_fit(x, y, s);
    sg = sigmas_from(s, lm.cov);

    int drop = -1;
    std::string why;
    for (int k = 1; k < 3 && drop < 0; ++k) {
      if (!s.active[k]) continue;
      if (s.f0[k] <= x.front() || s.f0[k] >= x.back()) {
        drop = k;
        why = "sideband left the scan window";
      } else if (!(s.A[k] > 0.0) || s.A[k] < 2.0 * sg.A[k]) {
        drop = k;
        why = "sideband not significant at 2 sigma";
      }
    }
    if (drop < 0) {
      for (int k = 0; k < 3 && drop < 0; ++k)
        for (int l = k + 1; l < 3 && drop < 0; ++l) {
          if (!s.active[k] || !s.active[l]) continue;
          if (std::abs(s.f0[k] - s.f0[l]) <
              0.25 * std::max(s.w[k], s.w[l])) {
            if (!init.allow_fallback)
              throw DegeneratePeaks("fit: two peaks collapsed together");
            drop = (k == 0 || std::abs(s.A[k]) >= std::abs(s.A[l])) ? l : k;
            why = "degenerate with a neighbouring peak";
          }
        }
    }
    if (drop < 0) break;
    if (!init.allow_fallback)
      throw FitDiverged("fit: " + why);
    s.active[drop] = false;
    s.A[drop] = s.f0[drop] = s.w[drop] = 0.0;
    if (!out.message.empty()) out.message += "; ";
    out.message += why;
  }

  out.baseline = s.b;
  out.s_baseline = sg.b;
  out.rss = lm.rss;
  auto fill = [&](LorentzianPeak& p, int k) {
    if (!s.active[k]) return;
    p.present = true;
    p.f0 = x_mid + s.f0[k] * x_span;
    p.w = s.w[k] * x_span;
    p.A = s.A[k];
    p.sf0 = sg.f0[k] * x_span;
    p.sw = sg.w[k] * x_span;
    p.sA = sg.A[k];
    ++out.n_peaks;
  };
  fill(out.centre, 0);
  // frequency-order the surviving sidebands around the line
  int lo_slot = -1, hi_slot = -1;
  for (int k = 1; k < 3; ++k) {
    if (!s.active[k]) continue;
    if (lo_slot < 0)
      lo_slot = k;
    else if (s.f0[k] < s.f0[lo_slot]) {
      hi_slot = lo_slot;
      lo_slot = k;
    } else {
      hi_slot = k;
    }
  }
  if (lo_slot >= 0 && hi_slot >= 0) {
    fill(out.red, lo_slot);
    fill(out.blue, hi_slot);
    if (!(out.red.f0 < out.centre.f0 && out.centre.f0 < out.blue.f0)) {
      if (!out.message.empty()) out.message += "; ";
      out.message += "sidebands not astride the main line";
    }
  } else if (lo_slot >= 0) {
    fill(s.f0[lo_slot] < s.f0[0] ? out.red : out.blue, lo_slot);
  }

  out.ok = lm.converged && s.A[0] > 0.0;
  if (!lm.converged) {
    if (!out.message.empty()) out.message += "; ";
    out.message += "fit did not converge";
  }
  return out;
}

std::vector<HeatingRow> heating_report(const SpectrumScan& scan,
                                       const Scenario& sc) {
  int pump = drive_index(sc.drives, DriveKind::pump);
  if (pump < 0) throw ConfigError("heating report needs a pump drive");
  double omega_p = sc.drives[pump].omega;

  std::vector<double> x_hz(scan.omega_s.size());
  for (size_t i = 0; i < scan.omega_s.size(); ++i)
    x_hz[i] = scan.omega_s[i] / two_pi;

  std::vector<HeatingRow> rows;
  for (size_t c = 0; c < scan.cols.size(); ++c) {
    const SpectrumColumn& col = scan.cols[c];
    HeatingRow row;
    row.eps_p = col.eps_p;
    if (!col.ok) {
      row.flagged = true;
      row.note = col.message.empty() ? "column failed" : col.message;
      rows.push_back(row);
      continue;
    }

    std::vector<double> y(scan.P1.rows());
    for (int i = 0; i < scan.P1.rows(); ++i) y[i] = scan.P1(i, (int)c);

    FitInit init;
    init.model_guided = true;
    init.centre = col.omega10 / two_pi;
    init.split = std::abs(col.delta_r) / two_pi;
    LorentzianTriplet fit;
    try {
      fit = fit_three_lorentzians(x_hz, y, init);
    } catch (const std::exception& e) {
      row.flagged = true;
      row.note = e.what();
      rows.push_back(row);
      continue;
    }
    if (!fit.ok || !fit.red.present || !fit.blue.present) {
      row.flagged = true;
      row.note = fit.message.empty() ? "sideband pair not resolved"
                                     : fit.message;
      rows.push_back(row);
      continue;
    }

    // the anti-damped (weak) sideband sits at omega_s = line - delta_r:
    // above the line for delta_r < 0, below it otherwise
    const LorentzianPeak& weak = col.delta_r <= 0.0 ? fit.blue : fit.red;
    const LorentzianPeak& strong = col.delta_r <= 0.0 ? fit.red : fit.blue;
    row.split = (fit.blue.f0 - fit.red.f0) / 2.0;
    row.ratio = weak.A / strong.A;
    double rel2 = 0.0;
    if (weak.A != 0.0) rel2 += std::pow(weak.sA / weak.A, 2);
    if (strong.A != 0.0) rel2 += std::pow(strong.sA / strong.A, 2);
    row.s_ratio = std::abs(row.ratio) * std::sqrt(rel2);

    if (!(row.ratio >= 0.0 && row.ratio < 1.0)) {
      row.flagged = true;
      row.note = "sideband ratio outside [0, 1)";
    } else {
      row.n_th = row.ratio / (1.0 - row.ratio);
      row.r = std::asinh(std::sqrt(row.n_th));
      row.T_eff = effective_temperature(row.n_th, omega_p);
      if (row.ratio > 0.0 && row.s_ratio / row.ratio > 0.3) {
        row.flagged = true;
        row.note = "statistical error above 30%";
      }
    }
    // A confident fit can still be latched onto shoulder structure rather
    // than real sidebands (typical just below the bifurcation, where the
    // peaks merge). Cross-check the fitted splitting against the offset the
    // pointer-state model predicts.
    double want = std::abs(col.delta_r) / two_pi;
    if (want > 0.0 && std::abs(row.split - want) > 0.5 * want) {
      row.flagged = true;
      if (!row.note.empty()) row.note += "; ";
      row.note += "fitted splitting far from the model sideband offset";
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

struct ScanColumn {
  double amp = 0.0;
  std::vector<double> omega;
  std::vector<double> p1;
};

std::vector<ScanColumn> split_columns(const CsvTable& t) {
  int ca = t.col("pump_amp"), co = t.col("omega_s"), cp = t.col("P1");
  if (ca < 0 || co < 0 || cp < 0)
    throw ConfigError("spectrum table needs pump_amp, omega_s and P1 columns");
  std::vector<ScanColumn> cols;
  for (size_t i = 0; i < t.rows.size(); ++i) {
    double amp = t.num(i, ca);
    if (cols.empty() || cols.back().amp != amp) {
      auto it = std::find_if(cols.begin(), cols.end(),
                             [&](const ScanColumn& c) { return c.amp == amp; });
      if (it != cols.end())
        throw GridMismatch("pump amplitudes are not grouped");
      cols.push_back({amp, {}, {}});
    }
    cols.back().omega.push_back(t.num(i, co));
    cols.back().p1.push_back(t.num(i, cp));
  }
  return cols;
}

}  // namespace

CompareReport compare_runs(const CsvTable& a, const CsvTable& b) {
  std::vector<ScanColumn> ca = split_columns(a), cb = split_columns(b);
  if (ca.size() != cb.size())
    throw GridMismatch("pump grids have different sizes");
  for (size_t i = 0; i < ca.size(); ++i) {
    if (ca[i].amp != cb[i].amp)
      throw GridMismatch("pump grids differ");
    if (ca[i].omega != cb[i].omega)
      throw GridMismatch("spectroscopy grids differ");
  }

  CompareReport rep;
  int n_ok = 0;
  for (size_t i = 0; i < ca.size(); ++i) {
    ColumnDiff d;
    d.eps_p = ca[i].amp;
    try {
      LorentzianTriplet fa = fit_three_lorentzians(ca[i].omega, ca[i].p1);
      LorentzianTriplet fb = fit_three_lorentzians(cb[i].omega, cb[i].p1);
      d.ok = fa.ok && fb.ok && fa.centre.present && fb.centre.present;
      if (d.ok) {
        d.d_centre = std::abs(fa.centre.f0 - fb.centre.f0);
        d.d_width = std::abs(fa.centre.w - fb.centre.w);
        if (fa.red.present && fa.blue.present && fb.red.present &&
            fb.blue.present && fa.red.A != 0.0 && fb.red.A != 0.0)
          d.d_ratio =
              std::abs(fa.blue.A / fa.red.A - fb.blue.A / fb.red.A);
      }
    } catch (const std::exception&) {
      d.ok = false;
    }
    if (d.ok) {
      ++n_ok;
      rep.max_d_centre = std::max(rep.max_d_centre, d.d_centre);
      rep.mean_d_centre += d.d_centre;
      rep.max_d_ratio = std::max(rep.max_d_ratio, d.d_ratio);
    }
    rep.cols.push_back(d);
  }
  if (n_ok > 0) rep.mean_d_centre /= n_ok;
  return rep;
}

}  // namespace kerr
