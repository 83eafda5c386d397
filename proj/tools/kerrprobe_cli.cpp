// kerrprobe -- driven Kerr resonator + multilevel qubit toolbox.
//
// Subcommands cover the whole pipeline: config validation, semiclassical
// response and stability maps, dispersive coefficient dumps, squeezing
// sweeps, analytical qubit spectra, the brute-force master-equation oracle,
// and three-Lorentzian spectrum analysis. Every CSV embeds the hash of the
// resolved parameter set; spectrum-shaped outputs also get a JSON sidecar.

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kerrprobe/csv.h"
#include "kerrprobe/dispersive.h"
#include "kerrprobe/errors.h"
#include "kerrprobe/lindblad.h"
#include "kerrprobe/params.h"
#include "kerrprobe/reduced_qubit.h"
#include "kerrprobe/semiclassical.h"
#include "kerrprobe/spectroscopy.h"
#include "kerrprobe/squeezing.h"
#include "kerrprobe/units.h"

using nlohmann::json;
using namespace kerr;

namespace {

constexpr const char* kVersion = "0.1.0";

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  if (n < 1) return v;
  if (n == 1) {
    v.push_back(a);
    return v;
  }
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}

double freq(const std::string& s) { return parse_frequency(s); }

BranchHint parse_hint(const std::string& s) {
  if (s == "auto") return BranchHint::automatic;
  if (s == "L") return BranchHint::L;
  if (s == "H") return BranchHint::H;
  throw ConfigError("branch must be auto, L or H");
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

void stamp(CsvTable& t, const Scenario& sc, const std::string& cmd) {
  t.meta["tool"] = std::string("kerrprobe ") + kVersion;
  t.meta["command"] = cmd;
  t.meta["params_hash"] = param_hash_hex(sc);
  if (!sc.label.empty()) t.meta["label"] = sc.label;
}

std::string sidecar_path(const std::string& csv_path) {
  if (csv_path.size() > 4 && csv_path.substr(csv_path.size() - 4) == ".csv")
    return csv_path.substr(0, csv_path.size() - 4) + ".meta.json";
  return csv_path + ".meta.json";
}

void write_sidecar(const std::string& csv_path, const Scenario& sc,
                   const std::string& cmd, const json& extra) {
  json j;
  j["tool"] = "kerrprobe";
  j["version"] = kVersion;
  j["command"] = cmd;
  j["params_hash"] = param_hash_hex(sc);
  j["scenario"] = json::parse(serialize_scenario(sc));
  j["tolerances"] = {{"pointer_residual_rel", 1e-10},
                     {"squeezing_residual_rel", 1e-10},
                     {"squeezing_bisection_abs", 1e-12},
                     {"oracle_steady_residual", 1e-9}};
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = *it;
  std::ofstream f(sidecar_path(csv_path));
  f << j.dump(2) << "\n";
  if (!f) throw std::runtime_error("cannot write " + sidecar_path(csv_path));
}

// Shared row schema of `response` and `stability`: one row per steady-state
// photon-number root, branch labels from the |alpha| ordering.
void emit_response_rows(CsvTable& t, double Omega, double eps,
                        const std::vector<ResponseRoot>& roots, double n_c) {
  int stable = 0;
  for (const auto& r : roots) stable += r.stable ? 1 : 0;
  std::string cls;
  if (stable >= 2)
    cls = "bistable";
  else if (stable == 1) {
    double n = 0;
    for (const auto& r : roots)
      if (r.stable) n = r.n;
    cls = n > n_c ? "H_only" : "L_only";
  } else {
    cls = "none";
  }
  double n_lo = -1, n_hi = -1;
  for (const auto& r : roots)
    if (r.stable) {
      if (n_lo < 0 || r.n < n_lo) n_lo = r.n;
      if (r.n > n_hi) n_hi = r.n;
    }
  for (const auto& r : roots) {
    std::string branch = "unstable";
    if (r.stable)
      branch = (stable >= 2 ? (r.n == n_lo ? "L" : "H")
                            : (r.n > n_c ? "H" : "L"));
    t.add_row({format_num(Omega), format_num(eps), format_num(r.n), branch,
               cls});
  }
}

struct ScanGrids {
  std::string ws_min, ws_max;
  int ws_points = 201;
  std::string pump_min, pump_max;
  int pump_points = 0;  // 0: single column at the configured amplitude
  std::string branch = "auto";
  int state = 0;
  double breakdown_guard = 0.5;
  double resonant_guard = 1.0;
};

void add_scan_options(CLI::App* cmd, ScanGrids& g) {
  cmd->add_option("--ws-min", g.ws_min,
                  "spectroscopy sweep start (rad/s, or e.g. 5.1GHz)")
      ->required();
  cmd->add_option("--ws-max", g.ws_max, "spectroscopy sweep end")->required();
  cmd->add_option("--ws-points", g.ws_points, "sweep sample count");
  cmd->add_option("--pump-min", g.pump_min, "pump amplitude sweep start");
  cmd->add_option("--pump-max", g.pump_max, "pump amplitude sweep end");
  cmd->add_option("--pump-points", g.pump_points,
                  "pump amplitude count (0: use the configured amplitude)");
  cmd->add_option("--branch", g.branch, "pump branch: auto, L or H");
  cmd->add_option("--state", g.state, "qubit state defining the pump frame");
  cmd->add_option("--breakdown-guard", g.breakdown_guard,
                  "|lambda| validity guard (<=0 disables)");
  cmd->add_option("--resonant-guard", g.resonant_guard,
                  "pump-vs-transition guard in units of kappa");
}

struct ScanResult {
  SpectrumScan scan;
  std::vector<double> eps_grid;
};

ScanResult run_scan(const Scenario& sc, const ScanGrids& g) {
  std::vector<double> ws =
      linspace(freq(g.ws_min), freq(g.ws_max), g.ws_points);
  std::vector<double> eps;
  if (g.pump_points > 0) {
    eps = linspace(freq(g.pump_min), freq(g.pump_max), g.pump_points);
  } else {
    int ip = drive_index(sc.drives, DriveKind::pump);
    if (ip < 0) throw ConfigError("scenario has no pump drive");
    eps = {std::abs(sc.drives[ip].eps)};
  }
  ScanOptions opt;
  opt.hint = parse_hint(g.branch);
  opt.frame_state = g.state;
  opt.breakdown_guard = g.breakdown_guard;
  opt.resonant_guard = g.resonant_guard;
  return {spectrum_scan(sc, ws, eps, opt), eps};
}

CsvTable spectrum_table(const SpectrumScan& scan, const Scenario& sc) {
  CsvTable t;
  stamp(t, sc, "spectrum");
  int ip = drive_index(sc.drives, DriveKind::pump);
  if (ip >= 0) t.meta["omega_p"] = format_num(sc.drives[ip].omega);
  t.columns = {"pump_amp", "omega_s",       "P1", "branch",
               "r",        "delta_r_tilde", "omega10_stark",
               "ok",       "note"};
  for (size_t c = 0; c < scan.cols.size(); ++c) {
    const SpectrumColumn& col = scan.cols[c];
    for (size_t i = 0; i < scan.omega_s.size(); ++i) {
      t.add_row({format_num(col.eps_p), format_num(scan.omega_s[i]),
                 format_num(scan.P1((int)i, (int)c)),
                 col.branch == Branch::H ? "H" : "L", format_num(col.r),
                 format_num(col.delta_r), format_num(col.omega10),
                 col.ok ? "1" : "0", sanitize(col.message)});
    }
  }
  return t;
}

json scan_sidecar_extra(const SpectrumScan& scan,
                        const std::vector<double>& eps_grid) {
  json failed = json::array();
  for (const auto& c : scan.cols)
    if (!c.ok) failed.push_back({{"pump_amp", c.eps_p}, {"note", c.message}});
  return {{"grids",
           {{"omega_s_min", scan.omega_s.front()},
            {"omega_s_max", scan.omega_s.back()},
            {"omega_s_points", scan.omega_s.size()},
            {"pump_points", eps_grid.size()}}},
          {"failed_columns", failed}};
}

// Rebuild a SpectrumScan (plus provenance) from a spectrum CSV so `analyze`
// can run on any previously produced table, including oracle output that
// carries only pump_amp/omega_s/P1.
struct LoadedScan {
  SpectrumScan scan;
  double omega_p = 0.0;
  bool has_omega_p = false;
  std::string hash, label;
};

LoadedScan load_scan_csv(const CsvTable& t) {
  int ca = t.col("pump_amp"), co = t.col("omega_s"), cp = t.col("P1");
  if (ca < 0 || co < 0 || cp < 0)
    throw ConfigError("spectrum table needs pump_amp, omega_s and P1 columns");
  int cb = t.col("branch"), cr = t.col("r"), cd = t.col("delta_r_tilde");
  int c10 = t.col("omega10_stark"), cok = t.col("ok"), cnote = t.col("note");

  LoadedScan out;
  std::vector<std::vector<double>> p1cols;
  std::vector<double> omega_first;
  std::vector<double> omega_cur;
  auto flush = [&](size_t upto) {
    if (omega_cur.empty()) return;
    if (omega_first.empty())
      omega_first = omega_cur;
    else if (omega_first != omega_cur)
      throw GridMismatch("spectroscopy grids differ between pump columns");
    (void)upto;
    omega_cur.clear();
  };
  for (size_t i = 0; i < t.rows.size(); ++i) {
    double amp = t.num(i, ca);
    if (out.scan.cols.empty() || out.scan.cols.back().eps_p != amp ||
        (!omega_cur.empty() && t.num(i, co) <= omega_cur.back())) {
      if (!out.scan.cols.empty() &&
          std::any_of(out.scan.cols.begin(), out.scan.cols.end() - 1,
                      [&](const SpectrumColumn& c) { return c.eps_p == amp; }))
        throw GridMismatch("pump amplitudes are not grouped");
      if (!out.scan.cols.empty()) flush(i);
      SpectrumColumn col;
      col.eps_p = amp;
      col.ok = cok < 0 || t.num(i, cok) != 0.0;
      col.branch = (cb >= 0 && t.rows[i][cb] == "H") ? Branch::H : Branch::L;
      if (cr >= 0) col.r = t.num(i, cr);
      if (cd >= 0) col.delta_r = t.num(i, cd);
      if (c10 >= 0) col.omega10 = t.num(i, c10);
      if (cnote >= 0) col.message = t.rows[i][cnote];
      out.scan.cols.push_back(col);
      p1cols.emplace_back();
    }
    omega_cur.push_back(t.num(i, co));
    p1cols.back().push_back(t.num(i, cp));
  }
  flush(t.rows.size());
  out.scan.omega_s = omega_first;

  size_t nr = omega_first.size();
  out.scan.P1.resize((int)nr, (int)p1cols.size());
  for (size_t c = 0; c < p1cols.size(); ++c) {
    if (p1cols[c].size() != nr)
      throw GridMismatch("ragged spectrum table");
    for (size_t i = 0; i < nr; ++i) out.scan.P1((int)i, (int)c) = p1cols[c][i];
  }

  auto it = t.meta.find("omega_p");
  if (it != t.meta.end()) {
    out.omega_p = std::strtod(it->second.c_str(), nullptr);
    out.has_omega_p = true;
  }
  if (t.meta.count("params_hash")) out.hash = t.meta.at("params_hash");
  if (t.meta.count("label")) out.label = t.meta.at("label");
  return out;
}

// Three-Lorentzian fits (in Hz) for every pump column, with the same
// model-guided seeding the heating report uses.
CsvTable fits_table(const SpectrumScan& scan) {
  CsvTable t;
  t.columns = {"pump_amp", "peak",     "present", "f0_hz",
               "fwhm_hz",  "height",   "s_f0_hz", "s_fwhm_hz",
               "s_height", "baseline", "rss",     "ok",
               "note"};
  std::vector<double> x(scan.omega_s.size());
  for (size_t i = 0; i < x.size(); ++i) x[i] = scan.omega_s[i] / two_pi;
  for (size_t c = 0; c < scan.cols.size(); ++c) {
    const SpectrumColumn& col = scan.cols[c];
    LorentzianTriplet fit;
    if (col.ok) {
      std::vector<double> y(scan.P1.rows());
      for (int i = 0; i < scan.P1.rows(); ++i) y[i] = scan.P1(i, (int)c);
      FitInit init;
      init.model_guided = col.omega10 != 0.0;
      init.centre = col.omega10 / two_pi;
      init.split = std::abs(col.delta_r) / two_pi;
      try {
        fit = fit_three_lorentzians(x, y, init);
      } catch (const std::exception& e) {
        fit.ok = false;
        fit.message = e.what();
      }
    } else {
      fit.message = col.message.empty() ? "column failed" : col.message;
    }
    auto row = [&](const char* name, const LorentzianPeak& p) {
      t.add_row({format_num(col.eps_p), name, p.present ? "1" : "0",
                 format_num(p.f0), format_num(p.w), format_num(p.A),
                 format_num(p.sf0), format_num(p.sw), format_num(p.sA),
                 format_num(fit.baseline), format_num(fit.rss),
                 fit.ok ? "1" : "0", sanitize(fit.message)});
    };
    row("red", fit.red);
    row("centre", fit.centre);
    row("blue", fit.blue);
  }
  return t;
}

CsvTable heating_table(const std::vector<HeatingRow>& rows) {
  CsvTable t;
  t.columns = {"pump_amp", "ratio",    "s_ratio", "n_th",  "r",
               "T_eff_K",  "split_hz", "flagged", "note"};
  for (const auto& h : rows)
    t.add_row({format_num(h.eps_p), format_num(h.ratio),
               format_num(h.s_ratio), format_num(h.n_th), format_num(h.r),
               format_num(h.T_eff), format_num(h.split),
               h.flagged ? "1" : "0", sanitize(h.note)});
  return t;
}

Scenario pump_only_stub(double omega_p) {
  Scenario sc;
  sc.params.kappa = 1.0;
  sc.params.levels.resize(2);
  sc.drives.push_back({1.0, omega_p, DriveKind::pump});
  return sc;
}

void print_analysis_summary(const SpectrumScan& scan,
                            const std::vector<HeatingRow>& heat) {
  int ok_cols = 0;
  for (const auto& c : scan.cols) ok_cols += c.ok ? 1 : 0;
  std::cout << "columns ok: " << ok_cols << "/" << scan.cols.size() << "\n";
  double tmin = 0, tmax = 0;
  int good = 0;
  for (const auto& h : heat)
    if (!h.flagged) {
      if (good == 0) tmin = tmax = h.T_eff;
      tmin = std::min(tmin, h.T_eff);
      tmax = std::max(tmax, h.T_eff);
      ++good;
    }
  std::cout << "heating rows usable: " << good << "/" << heat.size() << "\n";
  if (good > 0)
    std::cout << "T_eff range: " << tmin << " .. " << tmax << " K\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driven Kerr resonator / multilevel qubit toolbox"};
  app.set_version_flag("--version", std::string("kerrprobe ") + kVersion);
  app.require_subcommand(1);

  // ---- validate ----------------------------------------------------------
  auto vo = std::make_shared<std::string>();
  auto* c_validate =
      app.add_subcommand("validate", "check a config and print its hash");
  c_validate->add_option("config", *vo, "scenario JSON file")->required();
  c_validate->callback([vo] {
    Scenario sc = load_scenario_file(*vo);
    std::cout << "ok: " << *vo << "\n";
    if (!sc.label.empty()) std::cout << "label: " << sc.label << "\n";
    std::cout << "params_hash: " << param_hash_hex(sc) << "\n";
    std::cout << "levels: " << sc.params.M() << ", drives: " << sc.drives.size()
              << "\n";
    for (const auto& d : sc.drives) {
      std::cout << (d.kind == DriveKind::pump ? "  pump" : "  spectroscopy")
                << " omega=" << format_num(d.omega)
                << " |eps|=" << format_num(std::abs(d.eps));
      if (d.kind == DriveKind::pump)
        std::cout << " Omega=" << format_num(reduced_detuning(sc.params, d));
      std::cout << "\n";
    }
    std::cout << "n_c: " << format_num(cusp_photon_number(sc.params)) << "\n";
  });

  // ---- response ----------------------------------------------------------
  struct ResponseOpts {
    std::string config, eps_min = "0", eps_max, out = "response.csv";
    int points = 200;
  };
  auto ro = std::make_shared<ResponseOpts>();
  auto* c_response = app.add_subcommand(
      "response", "steady-state photon number vs pump amplitude");
  c_response->add_option("config", ro->config)->required();
  c_response->add_option("--eps-min", ro->eps_min, "sweep start (rad/s)");
  c_response->add_option("--eps-max", ro->eps_max,
                         "sweep end (default: 2x configured amplitude)");
  c_response->add_option("--points", ro->points);
  c_response->add_option("--out", ro->out);
  c_response->callback([ro] {
    Scenario sc = load_scenario_file(ro->config);
    int ip = drive_index(sc.drives, DriveKind::pump);
    if (ip < 0) throw ConfigError("scenario has no pump drive");
    DriveSpec d = sc.drives[ip];
    double hi = ro->eps_max.empty() ? 2.0 * std::abs(d.eps) : freq(ro->eps_max);
    if (hi <= 0.0)
      throw ConfigError("give --eps-max (configured amplitude is zero)");
    double Omega = reduced_detuning(sc.params, d);
    double n_c = cusp_photon_number(sc.params);
    std::complex<double> phase =
        std::abs(d.eps) > 0 ? d.eps / std::abs(d.eps) : 1.0;

    CsvTable t;
    stamp(t, sc, "response");
    t.meta["omega_d"] = format_num(d.omega);
    t.columns = {"Omega", "eps", "n", "branch", "class"};
    for (double e : linspace(freq(ro->eps_min), hi, ro->points)) {
      d.eps = e * phase;
      emit_response_rows(t, Omega, e, classical_response(sc.params, d), n_c);
    }
    write_csv(ro->out, t);
    std::cout << "wrote " << ro->out << "\n";
  });

  // ---- stability ---------------------------------------------------------
  struct StabilityOpts {
    std::string config, eps_min = "0", eps_max, out = "stability.csv";
    double omega_min = 0.0, omega_max = 3.0;
    int omega_points = 200, eps_points = 200;
  };
  auto so = std::make_shared<StabilityOpts>();
  auto* c_stability = app.add_subcommand(
      "stability", "L/H/bistable map over reduced detuning and amplitude");
  c_stability->add_option("config", so->config)->required();
  c_stability->add_option("--omega-min", so->omega_min, "reduced detuning");
  c_stability->add_option("--omega-max", so->omega_max);
  c_stability->add_option("--omega-points", so->omega_points);
  c_stability->add_option("--eps-min", so->eps_min);
  c_stability->add_option("--eps-max", so->eps_max)->required();
  c_stability->add_option("--eps-points", so->eps_points);
  c_stability->add_option("--out", so->out);
  c_stability->callback([so] {
    Scenario sc = load_scenario_file(so->config);
    std::vector<double> Om =
        linspace(so->omega_min, so->omega_max, so->omega_points);
    std::vector<double> ep =
        linspace(freq(so->eps_min), freq(so->eps_max), so->eps_points);
    double n_c = cusp_photon_number(sc.params);

    CsvTable t;
    stamp(t, sc, "stability");
    t.columns = {"Omega", "eps", "n", "branch", "class"};
    DriveSpec d;
    d.kind = DriveKind::pump;
    for (double O : Om) {
      d.omega = sc.params.omega_r - O * sc.params.kappa / 2.0;
      for (double e : ep) {
        d.eps = e;
        emit_response_rows(t, O, e, classical_response(sc.params, d), n_c);
      }
    }
    write_csv(so->out, t);
    std::cout << "wrote " << so->out << "\n";
  });

  // ---- dispersive --------------------------------------------------------
  struct DispersiveOpts {
    std::string config, out = "dispersive.csv", branch = "auto";
    double breakdown_guard = 0.5, resonant_guard = 1.0;
  };
  auto dv = std::make_shared<DispersiveOpts>();
  auto* c_dispersive = app.add_subcommand(
      "dispersive", "dump Stark tables and field-dependent shifts");
  c_dispersive->add_option("config", dv->config)->required();
  c_dispersive->add_option("--out", dv->out);
  c_dispersive->add_option("--branch", dv->branch);
  c_dispersive->add_option("--breakdown-guard", dv->breakdown_guard);
  c_dispersive->add_option("--resonant-guard", dv->resonant_guard);
  c_dispersive->callback([dv] {
    Scenario sc = load_scenario_file(dv->config);
    StarkTables st =
        stark_coefficients(sc.params, sc.drives, dv->resonant_guard);
    PointerSolution sol =
        solve_pointer_states(sc.params, sc.drives, st, parse_hint(dv->branch));
    DispersiveQuantities q =
        field_dispersives(sc.params, sol, sc.drives, dv->breakdown_guard);

    CsvTable t;
    stamp(t, sc, "dispersive");
    t.meta["branch"] = sol.branch == Branch::H ? "H" : "L";
    t.meta["residual"] = format_num(sol.residual);
    t.columns = {"state",     "drive",      "omega_d",   "Lambda",
                 "X",         "S_coef",     "K_coef",    "alpha_re",
                 "alpha_im",  "n_tot",      "lambda_a",  "chi",
                 "lamb",      "pull",       "omega_dd",  "omega_ddd",
                 "upsilon_re", "upsilon_im"};
    for (int i = 0; i < sc.params.M(); ++i)
      for (int d = 0; d < (int)sc.drives.size(); ++d)
        t.add_row({format_num(i), format_num(d),
                   format_num(sc.drives[d].omega), format_num(st.Lam(i, d)),
                   format_num(st.X(i, d)), format_num(st.S(i, d)),
                   format_num(st.Kq(i, d)), format_num(sol.alpha(i, d).real()),
                   format_num(sol.alpha(i, d).imag()),
                   format_num(q.n_tot[i]), format_num(q.lambda_a[i]),
                   format_num(q.chi[i]), format_num(q.lamb[i]),
                   format_num(q.pull[i]), format_num(q.omega_dd[i]),
                   format_num(q.omega_ddd[i]), format_num(q.upsilon[i].real()),
                   format_num(q.upsilon[i].imag())});
    write_csv(dv->out, t);
    std::cout << "wrote " << dv->out << "\n";
  });

  // ---- squeezing ---------------------------------------------------------
  struct SqueezeOpts {
    std::string config, wp_min, wp_max, out = "squeezing.csv",
                branch = "auto";
    int points = 121, state = 0;
    double breakdown_guard = 0.5, resonant_guard = 1.0;
  };
  auto qo = std::make_shared<SqueezeOpts>();
  auto* c_squeezing =
      app.add_subcommand("squeezing", "squeezing parameters vs pump frequency");
  c_squeezing->add_option("config", qo->config)->required();
  c_squeezing->add_option("--wp-min", qo->wp_min,
                          "sweep start (default omega_r - 3 kappa)");
  c_squeezing->add_option("--wp-max", qo->wp_max);
  c_squeezing->add_option("--points", qo->points);
  c_squeezing->add_option("--state", qo->state);
  c_squeezing->add_option("--branch", qo->branch);
  c_squeezing->add_option("--breakdown-guard", qo->breakdown_guard);
  c_squeezing->add_option("--resonant-guard", qo->resonant_guard);
  c_squeezing->add_option("--out", qo->out);
  c_squeezing->callback([qo] {
    Scenario sc = load_scenario_file(qo->config);
    int ip = drive_index(sc.drives, DriveKind::pump);
    if (ip < 0) throw ConfigError("scenario has no pump drive");
    double lo = qo->wp_min.empty()
                    ? sc.params.omega_r - 3.0 * sc.params.kappa
                    : freq(qo->wp_min);
    double hi = qo->wp_max.empty()
                    ? sc.params.omega_r + 3.0 * sc.params.kappa
                    : freq(qo->wp_max);

    CsvTable t;
    stamp(t, sc, "squeezing");
    t.columns = {"omega_p", "r",     "theta", "n_th",
                 "delta_r_tilde", "r_max", "n_state"};
    int skipped = 0;
    for (double wp : linspace(lo, hi, qo->points)) {
      std::vector<DriveSpec> drives = sc.drives;
      drives[ip].omega = wp;
      try {
        StarkTables st =
            stark_coefficients(sc.params, drives, qo->resonant_guard);
        PointerSolution sol = solve_pointer_states(sc.params, drives, st,
                                                   parse_hint(qo->branch));
        DispersiveQuantities q =
            field_dispersives(sc.params, sol, drives, qo->breakdown_guard);
        SqueezingSolution s = solve_squeezing(sc.params, q, qo->state, wp);
        t.add_row({format_num(wp), format_num(s.r), format_num(s.theta),
                   format_num(s.n_th), format_num(s.delta_r),
                   format_num(s.r_max), format_num(q.n_tot[qo->state])});
      } catch (const std::exception& e) {
        ++skipped;
        std::cerr << "skip omega_p=" << format_num(wp) << ": " << e.what()
                  << "\n";
      }
    }
    write_csv(qo->out, t);
    std::cout << "wrote " << qo->out;
    if (skipped) std::cout << " (" << skipped << " points skipped)";
    std::cout << "\n";
  });

  // ---- spectrum ----------------------------------------------------------
  struct SpectrumOpts {
    std::string config, out = "spectrum.csv";
    ScanGrids grids;
  };
  auto po = std::make_shared<SpectrumOpts>();
  auto* c_spectrum = app.add_subcommand(
      "spectrum", "analytical qubit excitation spectrum P(|1>)");
  c_spectrum->add_option("config", po->config)->required();
  add_scan_options(c_spectrum, po->grids);
  c_spectrum->add_option("--out", po->out);
  c_spectrum->callback([po] {
    Scenario sc = load_scenario_file(po->config);
    ScanResult r = run_scan(sc, po->grids);
    write_csv(po->out, spectrum_table(r.scan, sc));
    write_sidecar(po->out, sc, "spectrum",
                  scan_sidecar_extra(r.scan, r.eps_grid));
    int ok_cols = 0;
    for (const auto& c : r.scan.cols) ok_cols += c.ok ? 1 : 0;
    std::cout << "wrote " << po->out << " (" << ok_cols << "/"
              << r.scan.cols.size() << " columns ok)\n";
  });

  // ---- oracle ------------------------------------------------------------
  struct OracleOpts {
    std::string config, observable, out = "oracle.csv", fock_out;
    std::string frame = "rotating", ws_min, ws_max;
    int ws_points = 0, fock = 30, mlevels = 0, dim_cap = 200;
    double t_relax = -1.0, t_end = -1.0, rtol = 1e-8, atol = 1e-8;
    bool rwa = false;
  };
  auto oo = std::make_shared<OracleOpts>();
  auto* c_oracle = app.add_subcommand(
      "oracle", "brute-force master-equation reference values");
  c_oracle->add_option("config", oo->config)->required();
  c_oracle->add_option("--observable", oo->observable, "P1 or moments")
      ->required();
  c_oracle->add_option("--frame", oo->frame, "lab or rotating");
  c_oracle->add_option("--fock", oo->fock, "Fock cutoff N");
  c_oracle->add_option("--mlevels", oo->mlevels,
                       "qubit levels kept (0: min(M, 3))");
  c_oracle->add_option("--dim-cap", oo->dim_cap, "max N*M when escalating");
  c_oracle->add_flag("--rwa", oo->rwa, "drop counter-rotating coupling (lab)");
  c_oracle->add_option("--ws-min", oo->ws_min, "spectroscopy sweep (P1 mode)");
  c_oracle->add_option("--ws-max", oo->ws_max);
  c_oracle->add_option("--ws-points", oo->ws_points);
  c_oracle->add_option("--t-relax", oo->t_relax,
                       "averaging window start, seconds (default 20/kappa)");
  c_oracle->add_option("--t-end", oo->t_end, "window end (default 60/kappa)");
  c_oracle->add_option("--rtol", oo->rtol);
  c_oracle->add_option("--atol", oo->atol);
  c_oracle->add_option("--out", oo->out);
  c_oracle->add_option("--fock-out", oo->fock_out,
                       "also dump the diagonal Fock distribution");
  c_oracle->callback([oo] {
    Scenario sc = load_scenario_file(oo->config);
    Frame frame;
    if (oo->frame == "lab")
      frame = Frame::lab;
    else if (oo->frame == "rotating")
      frame = Frame::single_drive_rotating;
    else
      throw ConfigError("--frame must be lab or rotating");
    TruncatedSpace space;
    space.N = oo->fock;
    space.M = oo->mlevels > 0 ? oo->mlevels : std::min(sc.params.M(), 3);
    if (sc.params.kappa <= 0.0) throw ConfigError("kappa must be positive");
    double t_relax = oo->t_relax >= 0 ? oo->t_relax : 20.0 / sc.params.kappa;
    double t_end = oo->t_end >= 0 ? oo->t_end : 60.0 / sc.params.kappa;

    CsvTable t;
    stamp(t, sc, "oracle");
    t.meta["frame"] = oo->frame;
    t.meta["rwa"] = (oo->rwa || frame == Frame::single_drive_rotating)
                        ? "1"
                        : "0";
    t.meta["fock"] = format_num(space.N);
    t.meta["mlevels"] = format_num(space.M);
    int ip = drive_index(sc.drives, DriveKind::pump);
    if (ip >= 0) t.meta["omega_p"] = format_num(sc.drives[ip].omega);

    if (oo->observable == "moments") {
      SteadyStateResult res = steady_state_adaptive(sc.params, sc.drives,
                                                    frame, space, oo->dim_cap);
      Moments m = moments(space, res.rho);
      t.columns = {"re_a", "im_a", "n", "re_a2", "im_a2"};
      std::vector<std::string> row = {
          format_num(m.a.real()), format_num(m.a.imag()), format_num(m.n),
          format_num(m.a2.real()), format_num(m.a2.imag())};
      for (int q = 0; q < m.pops.size(); ++q) {
        t.columns.push_back("pop" + std::to_string(q));
        row.push_back(format_num(m.pops(q)));
      }
      t.columns.insert(t.columns.end(),
                       {"residual", "mean_n", "cutoff_fill", "bimodal"});
      row.insert(row.end(), {format_num(res.residual), format_num(res.mean_n),
                             format_num(res.cutoff_fill),
                             res.bimodal ? "1" : "0"});
      t.add_row(row);
      write_csv(oo->out, t);
      if (!oo->fock_out.empty()) {
        CsvTable ft;
        stamp(ft, sc, "oracle");
        ft.columns = {"n", "p"};
        Eigen::VectorXd pn = fock_populations(space, res.rho);
        for (int n = 0; n < pn.size(); ++n)
          ft.add_row({format_num(n), format_num(pn(n))});
        write_csv(oo->fock_out, ft);
      }
      write_sidecar(oo->out, sc, "oracle",
                    {{"frame", oo->frame},
                     {"fock", space.N},
                     {"mlevels", space.M},
                     {"residual", res.residual},
                     {"bimodal", res.bimodal}});
      std::cout << "wrote " << oo->out
                << " (residual=" << format_num(res.residual) << ")\n";
      return;
    }
    if (oo->observable != "P1")
      throw ConfigError("--observable must be P1 or moments");

    if (space.M < 2)
      throw ConfigError("P1 needs at least two qubit levels in the oracle");
    int is = drive_index(sc.drives, DriveKind::spectroscopy);
    std::vector<double> ws;
    if (oo->ws_points > 0) {
      if (is < 0)
        throw ConfigError("ws sweep needs a spectroscopy drive in the config");
      ws = linspace(freq(oo->ws_min), freq(oo->ws_max), oo->ws_points);
    } else {
      ws = {is >= 0 ? sc.drives[is].omega : 0.0};
    }
    double pump_amp = ip >= 0 ? std::abs(sc.drives[ip].eps) : 0.0;

    EvolveOptions eopt;
    eopt.rtol = oo->rtol;
    eopt.atol = oo->atol;
    t.columns = {"pump_amp", "omega_s", "P1"};
    for (double w : ws) {
      std::vector<DriveSpec> drives = sc.drives;
      if (is >= 0) drives[is].omega = w;
      LindbladGenerator gen =
          build_generator(sc.params, drives, frame, space, oo->rwa);
      double p1;
      if (gen.time_dependent()) {
        p1 = average_P1(gen, t_relax, t_end, eopt);
      } else {
        SteadyStateResult res = steady_state(gen);
        p1 = moments(space, res.rho).pops(1);
      }
      t.add_row({format_num(pump_amp), format_num(w), format_num(p1)});
      std::cerr << "omega_s=" << format_num(w) << " P1=" << format_num(p1)
                << "\n";
    }
    write_csv(oo->out, t);
    write_sidecar(oo->out, sc, "oracle",
                  {{"frame", oo->frame},
                   {"fock", space.N},
                   {"mlevels", space.M},
                   {"t_relax", t_relax},
                   {"t_end", t_end}});
    std::cout << "wrote " << oo->out << "\n";
  });

  // ---- analyze -----------------------------------------------------------
  struct AnalyzeOpts {
    std::string input, out = "fits.csv,heating.csv";
    std::string fits_out, heating_out;
  };
  auto ao = std::make_shared<AnalyzeOpts>();
  auto* c_analyze = app.add_subcommand(
      "analyze", "fit three Lorentzians per pump column of a spectrum CSV");
  c_analyze->add_option("spectrum", ao->input, "spectrum CSV")->required();
  c_analyze->add_option("--out", ao->out,
                        "output pair: <fits.csv>,<heating.csv>");
  c_analyze->callback([ao] {
    auto comma = ao->out.find(',');
    if (comma == std::string::npos || comma == 0 ||
        comma + 1 >= ao->out.size())
      throw kerr::ConfigError(
          "--out wants two comma-separated paths: fits.csv,heating.csv");
    ao->fits_out = ao->out.substr(0, comma);
    ao->heating_out = ao->out.substr(comma + 1);
    CsvTable in = read_csv(ao->input);
    LoadedScan ls = load_scan_csv(in);
    if (!ls.has_omega_p)
      std::cerr << "warning: no omega_p metadata; T_eff will be zero\n";
    Scenario stub = pump_only_stub(ls.omega_p);

    CsvTable fits = fits_table(ls.scan);
    std::vector<HeatingRow> heat = heating_report(ls.scan, stub);
    CsvTable ht = heating_table(heat);
    for (CsvTable* t : {&fits, &ht}) {
      t->meta["tool"] = std::string("kerrprobe ") + kVersion;
      t->meta["command"] = "analyze";
      if (!ls.hash.empty()) t->meta["params_hash"] = ls.hash;
      if (!ls.label.empty()) t->meta["label"] = ls.label;
    }
    write_csv(ao->fits_out, fits);
    write_csv(ao->heating_out, ht);
    json extra = {{"source", ao->input}, {"source_hash", ls.hash}};
    Scenario carrier = stub;
    carrier.label = ls.label;
    write_sidecar(ao->fits_out, carrier, "analyze", extra);
    write_sidecar(ao->heating_out, carrier, "analyze", extra);
    print_analysis_summary(ls.scan, heat);
    std::cout << "wrote " << ao->fits_out << ", " << ao->heating_out << "\n";
  });

  // ---- pipeline ----------------------------------------------------------
  struct PipelineOpts {
    std::string config, outdir = "out";
    ScanGrids grids;
  };
  auto lo = std::make_shared<PipelineOpts>();
  auto* c_pipeline = app.add_subcommand(
      "pipeline", "spectrum scan, fits and heating report end to end");
  c_pipeline->add_option("config", lo->config)->required();
  add_scan_options(c_pipeline, lo->grids);
  c_pipeline->add_option("--outdir", lo->outdir);
  c_pipeline->callback([lo] {
    Scenario sc = load_scenario_file(lo->config);
    std::filesystem::create_directories(lo->outdir);
    auto path = [&](const char* f) {
      return (std::filesystem::path(lo->outdir) / f).string();
    };

    ScanResult r = run_scan(sc, lo->grids);
    write_csv(path("spectrum.csv"), spectrum_table(r.scan, sc));
    write_sidecar(path("spectrum.csv"), sc, "spectrum",
                  scan_sidecar_extra(r.scan, r.eps_grid));

    CsvTable fits = fits_table(r.scan);
    stamp(fits, sc, "pipeline");
    std::vector<HeatingRow> heat = heating_report(r.scan, sc);
    CsvTable ht = heating_table(heat);
    stamp(ht, sc, "pipeline");
    write_csv(path("fits.csv"), fits);
    write_csv(path("heating.csv"), ht);
    write_sidecar(path("fits.csv"), sc, "pipeline", json::object());
    write_sidecar(path("heating.csv"), sc, "pipeline", json::object());

    print_analysis_summary(r.scan, heat);
    std::cout << "wrote " << path("spectrum.csv") << ", " << path("fits.csv")
              << ", " << path("heating.csv") << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
