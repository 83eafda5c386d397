#include "kerrprobe/units.h"

#include <cctype>
#include <cstdlib>

#include "kerrprobe/errors.h"

namespace kerr {

namespace {

struct Suffix {
  const char* name;
  double scale;
  bool cycles;  // true: value is in Hz-type units, multiply by 2*pi
};

// Longest suffixes first so "Hz" does not shadow "GHz".
const Suffix suffixes[] = {
    {"Grad/s", 1e9, false}, {"Mrad/s", 1e6, false}, {"krad/s", 1e3, false},
    {"rad/s", 1.0, false},  {"GHz", 1e9, true},     {"MHz", 1e6, true},
    {"kHz", 1e3, true},     {"Hz", 1.0, true},
};

}  // namespace

double parse_frequency(const std::string& text) {
  size_t a = text.find_first_not_of(" \t");
  size_t b = text.find_last_not_of(" \t");
  if (a == std::string::npos)
    throw ConfigError("empty frequency value");
  std::string s = text.substr(a, b - a + 1);

  double scale = 1.0;
  bool cycles = false;
  for (const Suffix& u : suffixes) {
    size_t n = std::string(u.name).size();
    if (s.size() > n && s.compare(s.size() - n, n, u.name) == 0) {
      scale = u.scale;
      cycles = u.cycles;
      s = s.substr(0, s.size() - n);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
      break;
    }
  }
  if (s.empty())
    throw ConfigError("frequency value '" + text + "' has no number");

  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + s.size())
    throw ConfigError("cannot parse frequency value '" + text + "'");
  return v * scale * (cycles ? two_pi : 1.0);
}

}  // namespace kerr
