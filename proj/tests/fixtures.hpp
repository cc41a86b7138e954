#pragma once

#include <vector>

#include "csx/ensemble.hpp"

namespace fx {

using namespace csx;

inline Domain1D open_domain(std::size_t n = 512, double length = 12.0, double origin = -6.0) {
  return Domain1D{length, Boundary::kOpen, n, origin};
}

inline Domain1D ring(std::size_t n = 256, double length = 12.0, double origin = -6.0) {
  return Domain1D{length, Boundary::kPeriodic, n, origin};
}

inline MixedEnsemble make(const std::vector<SpinorGaussianPacket>& raw, const Domain1D& d) {
  MixedEnsemble e;
  e.domain = d;
  for (const auto& p : raw) {
    e.packets.push_back(normalize_packet(p, d));
    e.weights.push_back(1.0 / static_cast<double>(raw.size()));
  }
  return e;
}

// Two packets, one defect per spin pair near the origin.
inline MixedEnsemble two_packet(const Domain1D& d = open_domain()) {
  return make({{-1.0, 0.5, 0.5, 1.0, 1.0}, {1.0, -0.4, -0.4, 1.0, 1.0}}, d);
}

// Three packets with mixed spin momenta.
inline MixedEnsemble three_packet(const Domain1D& d = open_domain()) {
  return make({{3.0, -2.0, 2.0, 3.0, 1.0}, {0.0, -1.0, -1.0, 2.0, 1.0}, {-3.0, 1.5, -1.5, 1.5, 1.0}},
              d);
}

inline MixedEnsemble pure(const Domain1D& d = open_domain()) {
  return make({{0.5, 0.7, -0.3, 1.2, 1.0}}, d);
}

}  // namespace fx
