#include "csx/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "csx/errors.hpp"

namespace csx {

namespace {

constexpr double kImageCutoff = 1e-15;
constexpr int kMaxImages = 100000;

void check_packet(const SpinorGaussianPacket& p) {
  if (!(p.width > 0.0) || !std::isfinite(p.width)) {
    std::ostringstream os;
    os << "invalid packet: width must be positive, got " << p.width;
    throw InvalidPacketError(os.str());
  }
  if (!std::isfinite(p.center) || !std::isfinite(p.k_up) || !std::isfinite(p.k_down) ||
      !std::isfinite(p.amplitude)) {
    throw InvalidPacketError("invalid packet: non-finite parameter");
  }
}

void check_point(double x, double t, const Domain1D& d) {
  if (!(t >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "packet evaluation needs t >= 0");
  if (!d.periodic()) {
    const double slack = 1e-9 * d.length;
    if (x < d.origin - slack || x > d.origin + d.length + slack) {
      std::ostringstream os;
      os << "x = " << x << " lies outside the open domain [" << d.origin << ", "
         << d.origin + d.length << "]";
      throw Error(ErrorKind::kInvalidArgument, os.str());
    }
  }
}

// Free-line solution of one component together with its derivatives.
// With s = width^2, S = s + i beta t and drift centre c = x0 + beta k t:
//   psi = (A / width) sqrt(s / S) exp(-(y - c)^2 / (2 S) + i k y - i beta k^2 t / 2).
struct LineTerm {
  cd value;
  cd log_dx;  // d/dy log psi
  cd inv_s;   // 1 / S
  cd log_dt;  // d/dt log psi
};

LineTerm line_term(const SpinorGaussianPacket& p, double k, double y, double t, double beta) {
  const double s = p.width * p.width;
  const cd big_s{s, beta * t};
  const cd inv_s = 1.0 / big_s;
  const double c = p.center + beta * k * t;
  const double dy = y - c;
  const cd i{0.0, 1.0};
  const cd expo = -dy * dy * 0.5 * inv_s + i * (k * y - 0.5 * beta * k * k * t);
  LineTerm out;
  out.value = (p.amplitude / p.width) * std::sqrt(s * inv_s) * std::exp(expo);
  out.log_dx = -dy * inv_s + i * k;
  out.inv_s = inv_s;
  out.log_dt = -0.5 * i * beta * inv_s + dy * beta * k * inv_s +
               0.5 * i * beta * dy * dy * inv_s * inv_s - 0.5 * i * beta * k * k;
  return out;
}

// Closed t = 0 form, written the same way as the packet definition.
cd initial_value(const SpinorGaussianPacket& p, double k, double x) {
  const double r = (x - p.center) / (std::numbers::sqrt2 * p.width);
  const double env = p.amplitude * std::exp(-r * r) / p.width;
  return {env * std::cos(k * x), env * std::sin(k * x)};
}

// Visits the images j0, j0+1, j0-1, j0+2, ... where j0 puts x + j L nearest
// the drifting centre, stopping on each side once a term is negligible.
template <typename Visit>
void for_each_image(const SpinorGaussianPacket& p, double k, double x, double t, double beta,
                    double period, Visit&& visit) {
  const double c = p.center + beta * k * t;
  const auto j0 = static_cast<long>(std::llround((c - x) / period));
  double running = std::abs(visit(j0, x + static_cast<double>(j0) * period));
  bool up_open = true;
  bool down_open = true;
  for (long step = 1; step < kMaxImages && (up_open || down_open); ++step) {
    if (up_open) {
      const long j = j0 + step;
      const double mag = std::abs(visit(j, x + static_cast<double>(j) * period));
      up_open = mag >= kImageCutoff * running && mag > 0.0;
      running = std::max(running, mag);
    }
    if (down_open) {
      const long j = j0 - step;
      const double mag = std::abs(visit(j, x + static_cast<double>(j) * period));
      down_open = mag >= kImageCutoff * running && mag > 0.0;
      running = std::max(running, mag);
    }
  }
}

}  // namespace

const char* spin_name(Spin s) { return s == Spin::kUp ? "up" : "down"; }

double Domain1D::spacing() const {
  return periodic() ? length / static_cast<double>(n) : length / static_cast<double>(n - 1);
}

Axis Domain1D::axis() const { return Axis{origin, spacing(), n, periodic()}; }

void Domain1D::validate() const {
  if (!(length > 0.0)) throw ConfigError("domain.length must be positive");
  if (n < 4) throw ConfigError("domain.n must be at least 4");
  if (!std::isfinite(origin)) throw ConfigError("domain.origin must be finite");
}

void PhysicalConstants::validate() const {
  if (!(hbar > 0.0) || !(mass > 0.0)) {
    throw ConfigError("constants.hbar and constants.mass must be positive");
  }
}

void MixedEnsemble::validate() const {
  if (packets.empty()) throw ConfigError("ensemble has no packets");
  if (weights.size() != packets.size()) throw ConfigError("one weight per packet is required");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("ensemble weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "ensemble weights sum to " << sum << ", expected 1";
    throw ConfigError(os.str());
  }
  for (const auto& p : packets) check_packet(p);
  domain.validate();
  constants.validate();
}

cd evaluate_packet(const SpinorGaussianPacket& packet, Spin spin, double x, double t,
                   const PhysicalConstants& consts, const Domain1D& domain) {
  check_packet(packet);
  check_point(x, t, domain);
  const double k = packet.momentum(spin);
  const double beta = consts.hbar_over_mass();
  if (!domain.periodic()) {
    if (t == 0.0) return initial_value(packet, k, x);
    return line_term(packet, k, x, t, beta).value;
  }
  cd sum{0.0, 0.0};
  for_each_image(packet, k, x, t, beta, domain.length, [&](long, double y) {
    const cd v = t == 0.0 ? initial_value(packet, k, y) : line_term(packet, k, y, t, beta).value;
    sum += v;
    return std::abs(v);
  });
  return sum;
}

PointDerivatives packet_derivatives(const SpinorGaussianPacket& packet, Spin spin, double x,
                                    double t, const PhysicalConstants& consts,
                                    const Domain1D& domain) {
  check_packet(packet);
  check_point(x, t, domain);
  const double k = packet.momentum(spin);
  const double beta = consts.hbar_over_mass();
  PointDerivatives out{};
  auto accumulate = [&](double y) {
    const LineTerm term = line_term(packet, k, y, t, beta);
    out.value += term.value;
    out.d_x += term.value * term.log_dx;
    out.d_xx += term.value * (term.log_dx * term.log_dx - term.inv_s);
    out.d_t += term.value * term.log_dt;
    return std::abs(term.value);
  };
  if (!domain.periodic()) {
    accumulate(x);
  } else {
    for_each_image(packet, k, x, t, beta, domain.length,
                   [&](long, double y) { return accumulate(y); });
  }
  return out;
}

std::vector<cd> sample_packet(const SpinorGaussianPacket& packet, Spin spin, const Axis& axis,
                              double t, const PhysicalConstants& consts, const Domain1D& domain) {
  std::vector<cd> out(axis.n);
  for (std::size_t i = 0; i < axis.n; ++i) {
    out[i] = evaluate_packet(packet, spin, axis.coordinate(i), t, consts, domain);
  }
  return out;
}

double packet_norm(const SpinorGaussianPacket& packet, const Domain1D& domain) {
  check_packet(packet);
  if (!domain.periodic()) {
    const double a = packet.amplitude / packet.width;
    return 2.0 * a * a * packet.width * std::sqrt(std::numbers::pi);
  }
  // Trapezoid rule over one period; spectrally accurate for smooth periodic
  // integrands.
  const auto nq = static_cast<std::size_t>(
      std::max(4096.0, std::ceil(32.0 * domain.length / packet.width)));
  const double h = domain.length / static_cast<double>(nq);
  const PhysicalConstants unit;
  double sum = 0.0;
  for (std::size_t i = 0; i < nq; ++i) {
    const double x = domain.origin + static_cast<double>(i) * h;
    sum += std::norm(evaluate_packet(packet, Spin::kUp, x, 0.0, unit, domain)) +
           std::norm(evaluate_packet(packet, Spin::kDown, x, 0.0, unit, domain));
  }
  return sum * h;
}

SpinorGaussianPacket normalize_packet(const SpinorGaussianPacket& packet, const Domain1D& domain) {
  SpinorGaussianPacket unit = packet;
  unit.amplitude = 1.0;
  const double norm = packet_norm(unit, domain);
  unit.amplitude = 1.0 / std::sqrt(norm);
  return unit;
}

}  // namespace csx
