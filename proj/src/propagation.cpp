#include "csx/propagation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "csx/errors.hpp"
#include "csx/parallel.hpp"

namespace csx {

namespace {

// FFTW's planner is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double mode_momentum(std::size_t m, std::size_t n, double period) {
  const auto half = static_cast<long>(n / 2);
  long q = static_cast<long>(m);
  if (q >= half) q -= static_cast<long>(n);
  // n even: index n/2 maps to -n/2; k^2 is the same either way.
  return 2.0 * std::numbers::pi * static_cast<double>(q) / period;
}

cd free_phase(double k, double tau, double beta) {
  const double a = -0.5 * beta * k * k * tau;
  return {std::cos(a), std::sin(a)};
}

}  // namespace

struct PropagationKernel::Fft {
  std::size_t n = 0;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Fft(std::size_t size) : n(size) {
    std::vector<fftw_complex> buf(n);
    std::lock_guard<std::mutex> lock(planner_mutex());
    const int len = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward = fftw_plan_dft_1d(len, buf.data(), buf.data(), FFTW_FORWARD, flags);
    backward = fftw_plan_dft_1d(len, buf.data(), buf.data(), FFTW_BACKWARD, flags);
  }
  ~Fft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
};

const char* kernel_kind_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::kFreeLine: return "free-line";
    case KernelKind::kFreePeriodicImages: return "free-periodic-images";
    case KernelKind::kFreePeriodicSpectral: return "free-periodic-spectral";
  }
  return "?";
}

PropagationKernel::PropagationKernel(KernelKind kind, const Axis& axis, double tau,
                                     const PhysicalConstants& consts)
    : kind_(kind), axis_(axis), tau_(tau) {
  if (!(tau >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "propagation runs forward in time only (tau >= 0)");
  }
  consts.validate();
  if ((kind == KernelKind::kFreeLine) == axis.periodic) {
    throw Error(ErrorKind::kInvalidArgument, std::string(kernel_kind_name(kind)) +
                                                 " kernel does not match the axis boundary");
  }
  const std::size_t n = axis.n;
  const double beta = consts.hbar_over_mass();
  if (tau == 0.0) return;  // identity

  switch (kind) {
    case KernelKind::kFreeLine: {
      // h * sqrt(1 / (2 pi i beta tau)) exp(i d^2 / (2 beta tau)).
      const cd pref = axis.spacing * std::sqrt(1.0 / cd{0.0, 2.0 * std::numbers::pi * beta * tau});
      dense_.resize(n * n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double d = axis.coordinate(i) - axis.coordinate(j);
          const double a = d * d / (2.0 * beta * tau);
          dense_[i * n + j] = pref * cd{std::cos(a), std::sin(a)};
        }
      }
      break;
    }
    case KernelKind::kFreePeriodicImages: {
      // Circulant: c_d = (1/n) sum_m exp(i k_m d h) exp(-i beta k_m^2 tau / 2).
      dense_.assign(n, cd{0.0, 0.0});
      const double period = axis.period();
      for (std::size_t d = 0; d < n; ++d) {
        cd sum{0.0, 0.0};
        for (std::size_t m = 0; m < n; ++m) {
          const double k = mode_momentum(m, n, period);
          const double a = k * static_cast<double>(d) * axis.spacing;
          sum += cd{std::cos(a), std::sin(a)} * free_phase(k, tau, beta);
        }
        dense_[d] = sum / static_cast<double>(n);
      }
      break;
    }
    case KernelKind::kFreePeriodicSpectral: {
      multipliers_.resize(n);
      const double period = axis.period();
      for (std::size_t m = 0; m < n; ++m) {
        multipliers_[m] = free_phase(mode_momentum(m, n, period), tau, beta) / static_cast<double>(n);
      }
      fft_ = std::make_shared<const Fft>(n);
      break;
    }
  }
}

void PropagationKernel::apply(std::span<cd> data, bool conjugate) const {
  if (data.size() != axis_.n) throw Error(ErrorKind::kInvalidArgument, "kernel length mismatch");
  if (tau_ == 0.0) return;
  const std::size_t n = axis_.n;
  auto maybe_conj = [conjugate](cd z) { return conjugate ? std::conj(z) : z; };
  switch (kind_) {
    case KernelKind::kFreeLine: {
      std::vector<cd> out(n);
      for (std::size_t i = 0; i < n; ++i) {
        cd sum{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) sum += maybe_conj(dense_[i * n + j]) * data[j];
        out[i] = sum;
      }
      std::copy(out.begin(), out.end(), data.begin());
      break;
    }
    case KernelKind::kFreePeriodicImages: {
      std::vector<cd> out(n);
      for (std::size_t i = 0; i < n; ++i) {
        cd sum{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) sum += maybe_conj(dense_[(i + n - j) % n]) * data[j];
        out[i] = sum;
      }
      std::copy(out.begin(), out.end(), data.begin());
      break;
    }
    case KernelKind::kFreePeriodicSpectral: {
      auto* buf = reinterpret_cast<fftw_complex*>(data.data());
      fftw_execute_dft(fft_->forward, buf, buf);
      for (std::size_t m = 0; m < n; ++m) data[m] *= maybe_conj(multipliers_[m]);
      fftw_execute_dft(fft_->backward, buf, buf);
      break;
    }
  }
}

CoherenceField evolve_ensemble_g1(const MixedEnsemble& ensemble, const Axis& axis_x,
                                  const Axis& axis_xp, double t,
                                  const std::vector<SpinPair>& pairs) {
  return eval_g1(ensemble, axis_x, axis_xp, t, t, pairs);
}

CoherenceField huygens_propagate_g1(const CoherenceField& g_initial,
                                    const PropagationKernel& kernel) {
  if (g_initial.order != 1 || !g_initial.equal_time()) {
    throw Error(ErrorKind::kInvalidArgument, "Huygens propagation needs an equal-time g1 field");
  }
  if (!(g_initial.axis0 == kernel.axis()) || !(g_initial.axis1 == kernel.axis())) {
    throw Error(ErrorKind::kInvalidArgument, "grid mismatch between field and kernel");
  }
  CoherenceField out = g_initial;
  for (double& t : out.times) t += kernel.tau();
  const std::size_t rows = out.axis0.n, cols = out.axis1.n;
  for (auto& g : out.values) {
    // Second (annihilation) argument: plain kernel along each row.
    parallel_for(static_cast<std::int64_t>(rows), [&](std::int64_t i) {
      kernel.apply(g.row(static_cast<std::size_t>(i)), false);
    });
    // First (creation) argument: conjugate kernel along each column.
    parallel_for(static_cast<std::int64_t>(cols), [&](std::int64_t js) {
      const auto j = static_cast<std::size_t>(js);
      std::vector<cd> column(rows);
      for (std::size_t i = 0; i < rows; ++i) column[i] = g(i, j);
      kernel.apply(column, true);
      for (std::size_t i = 0; i < rows; ++i) g(i, j) = column[i];
    });
  }
  return out;
}

double CoherenceStack::parameter(std::size_t i) const {
  const auto& times = slices.at(i).times;
  return mode == StackMode::kFirstOnly ? times.at(0) : times.at(1);
}

void CoherenceStack::validate() const {
  if (slices.empty()) throw Error(ErrorKind::kInvalidArgument, "empty coherence stack");
  const auto& ref = slices.front();
  for (std::size_t i = 0; i < slices.size(); ++i) {
    const auto& s = slices[i];
    if (s.order != 1 || s.times.size() != 2) {
      throw Error(ErrorKind::kInvalidArgument, "stack slices must be g1 fields");
    }
    if (!(s.axis0 == ref.axis0) || !(s.axis1 == ref.axis1) || s.components != ref.components) {
      throw Error(ErrorKind::kInvalidArgument, "stack slices must share grid and spin pairs");
    }
    if (mode == StackMode::kEqualTime && s.times[0] != s.times[1]) {
      throw Error(ErrorKind::kInvalidArgument, "equal-time stack holds unequal times");
    }
    if (mode == StackMode::kFirstOnly && s.times[1] != ref.times[1]) {
      throw Error(ErrorKind::kInvalidArgument, "stack advances the second time unexpectedly");
    }
    if (mode == StackMode::kSecondOnly && s.times[0] != ref.times[0]) {
      throw Error(ErrorKind::kInvalidArgument, "stack advances the first time unexpectedly");
    }
    if (i > 0) {
      const double step = parameter(i) - parameter(i - 1);
      if (!(step > 0.0) || std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
        throw Error(ErrorKind::kInvalidArgument, "stack times must increase by a uniform dt");
      }
    }
  }
}

CoherenceStack build_stack(const MixedEnsemble& ensemble, const Axis& axis_x, const Axis& axis_xp,
                           double t_first, double t_second, double dt, std::size_t count,
                           StackMode mode, const std::vector<SpinPair>& pairs) {
  if (!(dt > 0.0)) throw Error(ErrorKind::kInvalidArgument, "stack dt must be positive");
  if (count == 0) throw Error(ErrorKind::kInvalidArgument, "stack needs at least one slice");
  if (mode == StackMode::kEqualTime && t_first != t_second) {
    throw Error(ErrorKind::kInvalidArgument, "equal-time stack needs t_first == t_second");
  }
  CoherenceStack stack;
  stack.mode = mode;
  stack.dt = dt;
  for (std::size_t k = 0; k < count; ++k) {
    const double step = static_cast<double>(k) * dt;
    const double t1 = mode == StackMode::kSecondOnly ? t_first : t_first + step;
    const double t2 = mode == StackMode::kFirstOnly ? t_second : t_second + step;
    stack.slices.push_back(eval_g1(ensemble, axis_x, axis_xp, t1, t2, pairs));
  }
  return stack;
}

namespace {

struct OperatorSetup {
  StackMode required;
  bool along_rows;  // second derivative along the column index (axis1)
  double time_sign;
};

OperatorSetup setup_for(Argument which) {
  if (which == Argument::kSecond) return {StackMode::kSecondOnly, true, +1.0};
  return {StackMode::kFirstOnly, false, -1.0};
}

void check_stack(const CoherenceStack& stack, Argument which) {
  stack.validate();
  if (stack.slices.size() < 3) {
    throw Error(ErrorKind::kInvalidArgument, "residual needs at least three slices");
  }
  if (stack.mode != setup_for(which).required) {
    throw Error(ErrorKind::kInvalidArgument,
                "stack must advance only the time of the argument being checked");
  }
}

// L g at interior slice k for component c; `valid` marks cells where the
// spatial stencil fits.
void apply_operator(const CoherenceStack& stack, std::size_t k, std::size_t c, Argument which,
                    const PhysicalConstants& consts, Array2D<cd>& out,
                    Array2D<std::uint8_t>& valid) {
  const OperatorSetup op = setup_for(which);
  const auto& prev = stack.slices[k - 1].values[c];
  const auto& cur = stack.slices[k].values[c];
  const auto& next = stack.slices[k + 1].values[c];
  const Axis& axis = op.along_rows ? stack.slices[k].axis1 : stack.slices[k].axis0;
  const std::size_t rows = cur.rows(), cols = cur.cols();
  const double h2 = axis.spacing * axis.spacing;
  const double disp = consts.hbar * consts.hbar / (2.0 * consts.mass);
  const cd time_coef{0.0, op.time_sign * consts.hbar / (2.0 * stack.dt)};
  out = Array2D<cd>(rows, cols);
  valid = Array2D<std::uint8_t>(rows, cols, 0);
  const std::size_t len = op.along_rows ? cols : rows;
  parallel_for(static_cast<std::int64_t>(rows), [&](std::int64_t is) {
    const auto i = static_cast<std::size_t>(is);
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t idx = op.along_rows ? j : i;
      if (!axis.periodic && (idx == 0 || idx + 1 == len)) continue;
      const std::size_t lo = (idx + len - 1) % len, hi = (idx + 1) % len;
      const cd left = op.along_rows ? cur(i, lo) : cur(lo, j);
      const cd right = op.along_rows ? cur(i, hi) : cur(hi, j);
      const cd lap = (left - 2.0 * cur(i, j) + right) / h2;
      out(i, j) = time_coef * (next(i, j) - prev(i, j)) + disp * lap;
      valid(i, j) = 1;
    }
  });
}

void accumulate_norms(const Array2D<cd>& r, const Array2D<std::uint8_t>& valid, double cell,
                      double& max_norm, double& sum_sq) {
  double local = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!valid.data()[i]) continue;
    const double a = std::norm(r.data()[i]);
    local += a;
    max_norm = std::max(max_norm, std::sqrt(a));
  }
  sum_sq += local * cell;
}

}  // namespace

WolfResidual wolf_residual(const CoherenceStack& stack, Argument which,
                           const PhysicalConstants& consts) {
  check_stack(stack, which);
  consts.validate();
  WolfResidual result;
  const auto& ref = stack.slices.front();
  const double cell = ref.axis0.spacing * ref.axis1.spacing;
  double mean_sq = 0.0;
  for (std::size_t k = 1; k + 1 < stack.slices.size(); ++k) {
    CoherenceField field = stack.slices[k];
    double sum_sq = 0.0;
    for (std::size_t c = 0; c < field.values.size(); ++c) {
      Array2D<std::uint8_t> valid;
      apply_operator(stack, k, c, which, consts, field.values[c], valid);
      accumulate_norms(field.values[c], valid, cell, result.max_norm, sum_sq);
    }
    mean_sq += sum_sq;
    result.residual.push_back(std::move(field));
  }
  result.l2_norm = std::sqrt(mean_sq / static_cast<double>(result.residual.size()));
  return result;
}

std::vector<WeightedMode> modes_of(const MixedEnsemble& ensemble) {
  std::vector<WeightedMode> out;
  for (std::size_t n = 0; n < ensemble.size(); ++n) {
    out.push_back({ensemble.weights[n], [&ensemble, n](Spin s, double x, double t) {
                     return packet_derivatives(ensemble.packets[n], s, x, t, ensemble.constants,
                                               ensemble.domain);
                   }});
  }
  return out;
}

WolfResidual analytic_wolf_residual(const std::vector<WeightedMode>& modes, const Axis& axis_x,
                                    const Axis& axis_xp, double t, double t_prime, Argument which,
                                    const PhysicalConstants& consts,
                                    const std::vector<SpinPair>& pairs) {
  consts.validate();
  const cd ih{0.0, consts.hbar};
  const double disp = consts.hbar * consts.hbar / (2.0 * consts.mass);
  // Per mode and spin: the residual factor on the acted-on axis and the
  // plain factor on the other one.
  struct Factors {
    std::array<std::vector<cd>, 2> acted, other;
  };
  std::vector<Factors> f(modes.size());
  for (std::size_t n = 0; n < modes.size(); ++n) {
    for (Spin s : {Spin::kUp, Spin::kDown}) {
      const int si = static_cast<int>(s);
      auto& acted = f[n].acted[si];
      auto& other = f[n].other[si];
      const Axis& a_axis = which == Argument::kSecond ? axis_xp : axis_x;
      const Axis& o_axis = which == Argument::kSecond ? axis_x : axis_xp;
      const double a_t = which == Argument::kSecond ? t_prime : t;
      const double o_t = which == Argument::kSecond ? t : t_prime;
      for (std::size_t i = 0; i < a_axis.n; ++i) {
        const PointDerivatives d = modes[n].eval(s, a_axis.coordinate(i), a_t);
        acted.push_back(which == Argument::kSecond
                            ? ih * d.d_t + disp * d.d_xx
                            : -ih * std::conj(d.d_t) + disp * std::conj(d.d_xx));
      }
      for (std::size_t i = 0; i < o_axis.n; ++i) {
        const cd v = modes[n].eval(s, o_axis.coordinate(i), o_t).value;
        other.push_back(which == Argument::kSecond ? std::conj(v) : v);
      }
    }
  }
  WolfResidual result;
  CoherenceField field;
  field.order = 1;
  field.axis0 = axis_x;
  field.axis1 = axis_xp;
  field.times = {t, t_prime};
  double sum_sq = 0.0;
  const double cell = axis_x.spacing * axis_xp.spacing;
  for (const SpinPair& pair : pairs) {
    field.components.push_back({pair.first, pair.second});
    Array2D<cd> r(axis_x.n, axis_xp.n);
    const int s1 = static_cast<int>(pair.first), s2 = static_cast<int>(pair.second);
    for (std::size_t i = 0; i < axis_x.n; ++i) {
      for (std::size_t j = 0; j < axis_xp.n; ++j) {
        cd sum{0.0, 0.0};
        for (std::size_t n = 0; n < modes.size(); ++n) {
          sum += modes[n].weight * (which == Argument::kSecond
                                        ? f[n].other[s1][i] * f[n].acted[s2][j]
                                        : f[n].acted[s1][i] * f[n].other[s2][j]);
        }
        r(i, j) = sum;
      }
    }
    Array2D<std::uint8_t> all(axis_x.n, axis_xp.n, 1);
    accumulate_norms(r, all, cell, result.max_norm, sum_sq);
    field.values.push_back(std::move(r));
  }
  result.l2_norm = std::sqrt(sum_sq);
  result.residual.push_back(std::move(field));
  return result;
}

HydrodynamicSplit hydrodynamic_split(const CoherenceStack& stack, Argument which,
                                     const PhysicalConstants& consts, double relative_floor) {
  check_stack(stack, which);
  consts.validate();
  HydrodynamicSplit out;
  for (std::size_t k = 1; k + 1 < stack.slices.size(); ++k) {
    const auto& slice = stack.slices[k];
    const Axis& acted = which == Argument::kSecond ? slice.axis1 : slice.axis0;
    for (std::size_t c = 0; c < slice.values.size(); ++c) {
      const auto& g = slice.values[c];
      Array2D<cd> lg;
      Array2D<std::uint8_t> valid;
      apply_operator(stack, k, c, which, consts, lg, valid);
      double peak = 0.0;
      for (const cd& z : g.data()) peak = std::max(peak, std::abs(z));
      const double floor = relative_floor * peak;

      SplitSlice s;
      s.t = stack.parameter(k);
      s.pair = {slice.components[c][0], slice.components[c][1]};
      s.real_part = Array2D<double>(g.rows(), g.cols());
      s.imag_part = Array2D<double>(g.rows(), g.cols());
      s.defined = Array2D<std::uint8_t>(g.rows(), g.cols(), 0);
      for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = 0; j < g.cols(); ++j) {
          const cd v = std::conj(g(i, j)) * lg(i, j);
          s.real_part(i, j) = v.real();
          s.imag_part(i, j) = v.imag();
          if (valid(i, j) && std::abs(g(i, j)) >= floor) {
            s.defined(i, j) = 1;
            out.max_abs_real = std::max(out.max_abs_real, std::abs(v.real()));
            out.max_abs_imag = std::max(out.max_abs_imag, std::abs(v.imag()));
          }
        }
      }
      // Integral of the continuity part along the acted-on axis.
      const bool along_rows = which == Argument::kSecond;
      const std::size_t lines = along_rows ? g.rows() : g.cols();
      const std::size_t len = along_rows ? g.cols() : g.rows();
      for (std::size_t a = 0; a < lines; ++a) {
        double sum = 0.0;
        for (std::size_t b = 0; b < len; ++b) {
          sum += along_rows ? s.imag_part(a, b) : s.imag_part(b, a);
        }
        out.max_line_integral = std::max(out.max_line_integral, std::abs(sum * acted.spacing));
      }
      out.slices.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace csx
