#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "csx/grid.hpp"

namespace csx {

using cd = std::complex<double>;

enum class Spin : int { kUp = 0, kDown = 1 };

const char* spin_name(Spin s);

// One-dimensional simulation domain, lengths in units of a.
struct Domain1D {
  double length = 12.0;
  Boundary boundary = Boundary::kOpen;
  std::size_t n = 512;
  double origin = -6.0;

  double spacing() const;
  Axis axis() const;
  bool periodic() const { return boundary == Boundary::kPeriodic; }
  // Throws ConfigError when L <= 0 or n < 4.
  void validate() const;
};

struct PhysicalConstants {
  double hbar = 1.0;
  double mass = 1.0;

  double hbar_over_mass() const { return hbar / mass; }
  void validate() const;
};

// Two-component Gaussian wave packet. At t = 0 component s is
//   amplitude * exp(-(x - center)^2 / (2 width^2)) * exp(i k_s x) / width.
struct SpinorGaussianPacket {
  double center = 0.0;
  double k_up = 0.0;
  double k_down = 0.0;
  double width = 1.0;
  double amplitude = 1.0;

  double momentum(Spin s) const { return s == Spin::kUp ? k_up : k_down; }
};

struct MixedEnsemble {
  std::vector<SpinorGaussianPacket> packets;
  std::vector<double> weights;
  Domain1D domain;
  PhysicalConstants constants;

  std::size_t size() const { return packets.size(); }
  // Throws ConfigError on an empty list, negative weights, or weights not
  // summing to one within 1e-12.
  void validate() const;
};

// Value and the derivatives that enter the free Schroedinger operator.
struct PointDerivatives {
  cd value;
  cd d_x;
  cd d_xx;
  cd d_t;
};

// Exact free evolution of a packet component. On periodic domains the
// line solution is wrapped by an image sum, truncated once a term falls
// below 1e-15 of the running sum. Throws InvalidPacketError for width <= 0.
cd evaluate_packet(const SpinorGaussianPacket& packet, Spin spin, double x, double t,
                   const PhysicalConstants& consts, const Domain1D& domain);

PointDerivatives packet_derivatives(const SpinorGaussianPacket& packet, Spin spin, double x,
                                    double t, const PhysicalConstants& consts,
                                    const Domain1D& domain);

// evaluate_packet over every sample of an axis. The axis must lie in the
// packet's domain.
std::vector<cd> sample_packet(const SpinorGaussianPacket& packet, Spin spin, const Axis& axis,
                              double t, const PhysicalConstants& consts, const Domain1D& domain);

// Sum over both spins of the integral of |psi|^2 at t = 0 for the packet as
// given (open: closed form; periodic: quadrature over one period).
double packet_norm(const SpinorGaussianPacket& packet, const Domain1D& domain);

// Returns a copy whose amplitude gives unit total norm over the domain.
SpinorGaussianPacket normalize_packet(const SpinorGaussianPacket& packet, const Domain1D& domain);

}  // namespace csx
