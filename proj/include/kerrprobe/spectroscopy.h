#pragma once
#include <string>
#include <vector>

#include "kerrprobe/csv.h"
#include "kerrprobe/params.h"
#include "kerrprobe/reduced_qubit.h"

namespace kerr {

struct LorentzianPeak {
  double f0 = 0.0;  // centre (same units as the x grid)
  double w = 0.0;   // FWHM
  double A = 0.0;   // height above baseline
  double sf0 = 0.0, sw = 0.0, sA = 0.0;  // 1-sigma statistical errors
  bool present = false;
};

struct LorentzianTriplet {
  LorentzianPeak red, centre, blue;  // ordered: red.f0 < centre.f0 < blue.f0
  double baseline = 0.0;
  double s_baseline = 0.0;
  int n_peaks = 0;
  double rss = 0.0;  // residual sum of squares
  bool ok = false;
  std::string message;
};

struct FitInit {
  // model-guided initialization: centre peak near `centre`, sidebands offset
  // by +-`split`; if split <= 0 the sidebands are seeded from residual maxima
  double centre = 0.0;
  double split = 0.0;
  bool model_guided = false;
  // drop a sideband and refit when its amplitude is consistent with zero at
  // 2 sigma (or when two peaks degenerate); when false such fits throw
  bool allow_fallback = true;
};

// Levenberg-Marquardt fit of up to three Lorentzian peaks plus a constant
// baseline. Sidebands that fall below 2 sigma significance are removed and
// the reduced model is refit; the removed peak keeps zero amplitude.
LorentzianTriplet fit_three_lorentzians(const std::vector<double>& x,
                                        const std::vector<double>& y,
                                        const FitInit& init = {});

struct HeatingRow {
  double eps_p = 0.0;
  double ratio = 0.0;    // A_blue / A_red
  double s_ratio = 0.0;  // propagated 1-sigma
  double n_th = 0.0;     // ratio/(1-ratio)
  double r = 0.0;        // asinh(sqrt(n_th))
  double T_eff = 0.0;    // kelvin at the pump frequency
  double split = 0.0;    // fitted sideband half-splitting (Hz)
  bool flagged = false;  // unusable: failed fit, ratio outside [0,1), or
                         // relative statistical error above 30%
  std::string note;
};

// Quantum-heating summary per pump amplitude, from three-Lorentzian fits of
// each spectrum column. Frequencies handled in Hz here (reports are in Hz;
// everything upstream is rad/s).
std::vector<HeatingRow> heating_report(const SpectrumScan& scan,
                                       const Scenario& sc);

struct ColumnDiff {
  double eps_p = 0.0;
  double d_centre = 0.0;  // |centre shift| in x units
  double d_width = 0.0;
  double d_ratio = 0.0;
  bool ok = false;
};

struct CompareReport {
  std::vector<ColumnDiff> cols;
  double max_d_centre = 0.0;
  double mean_d_centre = 0.0;
  double max_d_ratio = 0.0;
};

// Compare two spectrum tables (columns pump_amp, omega_s, P1) peak by peak.
// Grids must match exactly; otherwise GridMismatch.
CompareReport compare_runs(const CsvTable& a, const CsvTable& b);

}  // namespace kerr
