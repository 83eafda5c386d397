#pragma once
#include <string>

// Every frequency-valued quantity in this library is an angular frequency in
// rad/s. Config files may use explicit unit suffixes ("Hz", "kHz", "MHz",
// "GHz" -- converted by 2*pi*scale -- or "rad/s", "krad/s", ... taken as is).
// Bare numbers are already rad/s.

namespace kerr {

inline constexpr double two_pi = 6.28318530717958647692528676656;

// CODATA/SI exact values.
inline constexpr double hbar_SI = 1.054571817e-34;  // J s
inline constexpr double kB_SI = 1.380649e-23;       // J / K

// Parse "number [suffix]" into rad/s. Throws ConfigError on anything else.
double parse_frequency(const std::string& text);

}  // namespace kerr
