#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "csx/coherence.hpp"

namespace csx {

enum class KernelKind {
  kFreeLine,              // continuum free kernel on an open axis, dense
  kFreePeriodicImages,    // dense circulant kernel summed mode by mode
  kFreePeriodicSpectral,  // FFT, one phase factor per discrete momentum
};

const char* kernel_kind_name(KernelKind kind);

// Single-particle forward propagator exp(-i H tau / hbar) bound to one axis.
// A p = 1 coherence function is propagated by applying the conjugate kernel
// along its first argument and the plain kernel along its second.
class PropagationKernel {
 public:
  // Throws Error(kInvalidArgument) for tau < 0 or a kind that does not fit
  // the axis (periodic kinds need a periodic axis and vice versa).
  PropagationKernel(KernelKind kind, const Axis& axis, double tau,
                    const PhysicalConstants& consts = {});

  KernelKind kind() const { return kind_; }
  double tau() const { return tau_; }
  const Axis& axis() const { return axis_; }

  // In place: data <- K data, or conj(K) data.
  void apply(std::span<cd> data, bool conjugate) const;

 private:
  struct Fft;

  KernelKind kind_;
  Axis axis_;
  double tau_;
  std::vector<cd> dense_;        // n x n row-major (line) or first column (images)
  std::vector<cd> multipliers_;  // spectral symbol
  std::shared_ptr<const Fft> fft_;
};

// Reference route: every packet evolved exactly to time t.
CoherenceField evolve_ensemble_g1(const MixedEnsemble& ensemble, const Axis& axis_x,
                                  const Axis& axis_xp, double t,
                                  const std::vector<SpinPair>& pairs = all_spin_pairs());

// g(x1, x2; t + tau) = sum h^2 conj(K(x1, x1')) K(x2, x2') g(x1', x2'; t),
// done as two one-axis passes. The field must be equal-time and sampled on
// the kernel's axis in both arguments.
CoherenceField huygens_propagate_g1(const CoherenceField& g_initial,
                                    const PropagationKernel& kernel);

// Which time coordinate advances from slice to slice.
enum class StackMode { kEqualTime, kFirstOnly, kSecondOnly };

struct CoherenceStack {
  std::vector<CoherenceField> slices;
  StackMode mode = StackMode::kEqualTime;
  double dt = 0.0;

  double parameter(std::size_t i) const;  // the advancing time of slice i
  // Throws Error(kInvalidArgument) unless times advance by dt in the
  // declared coordinate and every slice has the same grid and spin pairs.
  void validate() const;
};

CoherenceStack build_stack(const MixedEnsemble& ensemble, const Axis& axis_x, const Axis& axis_xp,
                           double t_first, double t_second, double dt, std::size_t count,
                           StackMode mode, const std::vector<SpinPair>& pairs = all_spin_pairs());

enum class Argument { kFirst, kSecond };

struct WolfResidual {
  std::vector<CoherenceField> residual;  // one per interior slice
  double max_norm = 0.0;
  // Root mean square over interior slices of sqrt(h0 h1 sum |R|^2).
  double l2_norm = 0.0;
};

// Residual of (-/+ i hbar d_t + hbar^2/2m d_xx) on the chosen argument by
// central differences. The stack must advance that argument's time only;
// open axes drop their boundary rows. Needs at least three slices.
WolfResidual wolf_residual(const CoherenceStack& stack, Argument which,
                           const PhysicalConstants& consts = {});

// A wavefunction with analytic derivatives, weighted, for residual checks
// that avoid finite differences.
struct WeightedMode {
  double weight = 1.0;
  std::function<PointDerivatives(Spin, double x, double t)> eval;
};

std::vector<WeightedMode> modes_of(const MixedEnsemble& ensemble);

WolfResidual analytic_wolf_residual(const std::vector<WeightedMode>& modes, const Axis& axis_x,
                                    const Axis& axis_xp, double t, double t_prime, Argument which,
                                    const PhysicalConstants& consts = {},
                                    const std::vector<SpinPair>& pairs = all_spin_pairs());

struct SplitSlice {
  double t = 0.0;
  SpinPair pair{};
  Array2D<double> real_part;  // Euler-like
  Array2D<double> imag_part;  // continuity of coherence flux
  Array2D<std::uint8_t> defined;
};

struct HydrodynamicSplit {
  std::vector<SplitSlice> slices;
  // Integral of the imaginary part along the acted-on axis, largest
  // magnitude over the other coordinate, slices and pairs.
  double max_line_integral = 0.0;
  double max_abs_real = 0.0;  // over defined cells
  double max_abs_imag = 0.0;
};

// Re and Im of conj(g) L g. Cells with |g| below relative_floor times the
// slice maximum are flagged undefined.
HydrodynamicSplit hydrodynamic_split(const CoherenceStack& stack, Argument which,
                                     const PhysicalConstants& consts = {},
                                     double relative_floor = 1e-12);

}  // namespace csx
