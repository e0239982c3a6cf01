#pragma once

#include <stdexcept>
#include <string>

namespace cmf {

// Configuration problems (bad files, bad field values). CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numeric failures during computation. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Weighted-mean denominator collapsed below eps_den; never silently clamped.
class DegenerateDenominator : public NumericError {
 public:
  DegenerateDenominator(int sample, int time, double denom)
      : NumericError("degenerate mean-field denominator " + std::to_string(denom) +
                     " for trajectory " + std::to_string(sample) + " at time " +
                     std::to_string(time)),
        sample_index(sample),
        time(time),
        denominator(denom) {}
  int sample_index;
  int time;
  double denominator;
};

}  // namespace cmf
