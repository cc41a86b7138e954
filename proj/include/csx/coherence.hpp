#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csx/array2d.hpp"
#include "csx/ensemble.hpp"
#include "csx/grid.hpp"

namespace csx {

struct SpinPair {
  Spin first = Spin::kUp;
  Spin second = Spin::kUp;

  // Canonical order (up,up), (up,down), (down,up), (down,down).
  int index() const { return 2 * static_cast<int>(first) + static_cast<int>(second); }
  std::string name() const;  // "uu", "ud", "du", "dd"
  static SpinPair from_index(int i);
  static SpinPair parse(const std::string& name);  // throws ConfigError

  bool operator==(const SpinPair&) const = default;
};

std::vector<SpinPair> all_spin_pairs();

// Spin labels of one tensor component: one spin for p = 0, two for p = 1,
// four for a p = 2 slice (creation spins first).
using SpinTuple = std::vector<Spin>;

// A coherence function sampled on a 2D grid. Rows run along axis0 (the
// first free coordinate), columns along axis1. For p = 0 axis1 has a single
// sample.
struct CoherenceField {
  int order = 1;
  std::vector<SpinTuple> components;
  Axis axis0;
  Axis axis1;
  std::vector<double> times;  // one per coordinate
  std::vector<Array2D<cd>> values;
  // p = 2 slices: the values of the coordinates that were held fixed,
  // NaN for the two free ones.
  std::vector<double> fixed_coordinates;

  std::size_t component_count() const { return components.size(); }
  bool has(SpinPair pair) const;
  const Array2D<cd>& component(SpinPair pair) const;  // p = 1 only
  Array2D<cd>& component(SpinPair pair);
  std::vector<SpinPair> spin_pairs() const;  // p = 1 only
  bool equal_time() const;
  bool same_axes() const { return axis0 == axis1; }
};

// Pointwise coherence of an ensemble, used by loop oracles and samplers.
class CoherenceSampler {
 public:
  CoherenceSampler(const MixedEnsemble& ensemble, double t, double t_prime);

  // sum_n w_n conj(psi_n,s(x, t)) psi_n,s'(x', t').
  cd operator()(SpinPair pair, double x, double x_prime) const;

 private:
  const MixedEnsemble* ensemble_;
  double t_;
  double t_prime_;
};

// p = 0: the spinor wavefunction of one member. A multi-member ensemble
// needs an explicit member index.
CoherenceField eval_g0(const MixedEnsemble& ensemble, const Axis& axis, double t,
                       std::optional<std::size_t> member = std::nullopt);

// p = 1 tensor g_{ss'}(x, x') on axis_x by axis_xp with times (t, t').
CoherenceField eval_g1(const MixedEnsemble& ensemble, const Axis& axis_x, const Axis& axis_xp,
                       double t, double t_prime,
                       const std::vector<SpinPair>& pairs = all_spin_pairs());

// One coordinate of a p = 2 evaluation. Exactly one coordinate must be the
// row axis and one the column axis; the others are fixed.
struct G2Coordinate {
  enum class Role { kRow, kColumn, kFixed };
  Role role = Role::kFixed;
  double value = 0.0;  // used when fixed
  double time = 0.0;
  Spin spin = Spin::kUp;
};

// sum_n w_n conj(psi(x1)) conj(psi(x2)) psi(x3) psi(x4) on a 2D slice.
CoherenceField eval_g2(const MixedEnsemble& ensemble, const Axis& row_axis,
                       const Axis& column_axis, const std::array<G2Coordinate, 4>& coords);

// Full 4D p = 2 tensor for one spin assignment, index order (x1, x2, x3, x4)
// row-major. Throws Error(kNumerical) if the storage exceeds budget_bytes.
struct G2Volume {
  Axis axis;
  std::array<Spin, 4> spins{};
  std::vector<cd> values;
  cd at(std::size_t i1, std::size_t i2, std::size_t i3, std::size_t i4) const {
    const std::size_t n = axis.n;
    return values[((i1 * n + i2) * n + i3) * n + i4];
  }
};
G2Volume eval_g2_full(const MixedEnsemble& ensemble, const Axis& axis,
                      const std::array<double, 4>& times, const std::array<Spin, 4>& spins,
                      std::size_t budget_bytes);

struct DegreeOfCoherenceField {
  Axis axis0;
  Axis axis1;
  std::vector<SpinPair> pairs;
  std::vector<Array2D<cd>> values;
  std::vector<Array2D<std::uint8_t>> defined;
  double floor = 0.0;
};

// g / (sqrt(g_ss(x,x)) sqrt(g_s's'(x',x'))). Cells where either diagonal is
// below 1e-12 of the largest diagonal are marked undefined and left zero.
// Needs an equal-time field on identical axes with the diagonal pairs.
DegreeOfCoherenceField degree_of_coherence(const CoherenceField& g1);

}  // namespace csx
