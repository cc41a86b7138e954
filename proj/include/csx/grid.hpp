#pragma once

#include <cmath>
#include <cstddef>

namespace csx {

enum class Boundary { kOpen, kPeriodic };

// A regular sampling axis. Periodic axes sample [origin, origin + period)
// with spacing period / n; open axes include both end points.
struct Axis {
  double origin = 0.0;
  double spacing = 1.0;
  std::size_t n = 0;
  bool periodic = false;

  double coordinate(std::size_t i) const { return origin + static_cast<double>(i) * spacing; }
  double period() const { return spacing * static_cast<double>(n); }
  // Last sample for open axes, origin + period for periodic ones.
  double upper() const {
    return periodic ? origin + period() : origin + spacing * static_cast<double>(n - 1);
  }
  // Signed separation b - a, reduced to the nearest image on periodic axes.
  double separation(double a, double b) const {
    double d = b - a;
    if (periodic) {
      const double p = period();
      d -= p * std::round(d / p);
    }
    return d;
  }

  bool operator==(const Axis&) const = default;
};

}  // namespace csx
