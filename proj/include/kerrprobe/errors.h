#pragma once
#include <stdexcept>

namespace kerr {

// Configuration rejected during load or validation.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The requested semiclassical branch does not exist at these parameters.
struct BranchUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// |lambda_i| exceeded the validity threshold of the dispersive expansion.
struct DispersiveBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A pump drive sits within a resonator linewidth of a qubit transition.
struct ResonantDrive : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two data sets to be compared were taken on different grids.
struct GridMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Nonlinear least squares produced non-finite values or failed to converge.
struct FitDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two fitted peaks collapsed onto each other.
struct DegeneratePeaks : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Adaptive integrator step size underflowed before reaching the target time.
struct StepUnderflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kerr
