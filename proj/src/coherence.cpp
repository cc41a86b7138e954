#include "csx/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "csx/errors.hpp"
#include "csx/parallel.hpp"

namespace csx {

namespace {

// conj(a) * b, written out so the result is symmetric in the sense that
// conj(conj(a) * b) == conj(b) * a bit for bit.
inline cd conj_mul(cd a, cd b) {
  return {a.real() * b.real() + a.imag() * b.imag(), a.real() * b.imag() - a.imag() * b.real()};
}

inline cd mul(cd a, cd b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// psi[member][spin] sampled on an axis.
using Samples = std::vector<std::array<std::vector<cd>, 2>>;

Samples sample_members(const MixedEnsemble& ens, const Axis& axis, double t) {
  Samples out(ens.size());
  for (std::size_t n = 0; n < ens.size(); ++n) {
    for (Spin s : {Spin::kUp, Spin::kDown}) {
      out[n][static_cast<int>(s)] =
          sample_packet(ens.packets[n], s, axis, t, ens.constants, ens.domain);
    }
  }
  return out;
}

void require_members(const MixedEnsemble& ens) {
  if (ens.packets.empty()) throw Error(ErrorKind::kInvalidArgument, "empty ensemble");
  if (ens.weights.size() != ens.packets.size()) {
    throw Error(ErrorKind::kInvalidArgument, "ensemble weights do not match packets");
  }
}

}  // namespace

std::string SpinPair::name() const {
  std::string s;
  s += first == Spin::kUp ? 'u' : 'd';
  s += second == Spin::kUp ? 'u' : 'd';
  return s;
}

SpinPair SpinPair::from_index(int i) {
  return {static_cast<Spin>((i >> 1) & 1), static_cast<Spin>(i & 1)};
}

SpinPair SpinPair::parse(const std::string& name) {
  for (const SpinPair& p : all_spin_pairs()) {
    if (p.name() == name) return p;
  }
  throw ConfigError("unknown spin pair '" + name + "' (expected uu, ud, du or dd)");
}

std::vector<SpinPair> all_spin_pairs() {
  return {SpinPair::from_index(0), SpinPair::from_index(1), SpinPair::from_index(2),
          SpinPair::from_index(3)};
}

bool CoherenceField::has(SpinPair pair) const {
  if (order != 1) return false;
  for (const auto& c : components) {
    if (c.size() == 2 && c[0] == pair.first && c[1] == pair.second) return true;
  }
  return false;
}

const Array2D<cd>& CoherenceField::component(SpinPair pair) const {
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& c = components[i];
    if (c.size() == 2 && c[0] == pair.first && c[1] == pair.second) return values[i];
  }
  throw Error(ErrorKind::kInvalidArgument, "field has no spin pair " + pair.name());
}

Array2D<cd>& CoherenceField::component(SpinPair pair) {
  return const_cast<Array2D<cd>&>(std::as_const(*this).component(pair));
}

std::vector<SpinPair> CoherenceField::spin_pairs() const {
  std::vector<SpinPair> out;
  for (const auto& c : components) {
    if (c.size() == 2) out.push_back({c[0], c[1]});
  }
  return out;
}

bool CoherenceField::equal_time() const {
  return std::all_of(times.begin(), times.end(), [&](double t) { return t == times.front(); });
}

CoherenceSampler::CoherenceSampler(const MixedEnsemble& ensemble, double t, double t_prime)
    : ensemble_(&ensemble), t_(t), t_prime_(t_prime) {
  require_members(ensemble);
}

cd CoherenceSampler::operator()(SpinPair pair, double x, double x_prime) const {
  const auto& ens = *ensemble_;
  cd sum{0.0, 0.0};
  for (std::size_t n = 0; n < ens.size(); ++n) {
    const cd a = evaluate_packet(ens.packets[n], pair.first, x, t_, ens.constants, ens.domain);
    const cd b =
        evaluate_packet(ens.packets[n], pair.second, x_prime, t_prime_, ens.constants, ens.domain);
    sum += ens.weights[n] * conj_mul(a, b);
  }
  return sum;
}

CoherenceField eval_g0(const MixedEnsemble& ensemble, const Axis& axis, double t,
                       std::optional<std::size_t> member) {
  require_members(ensemble);
  if (!member) {
    if (ensemble.size() != 1) {
      throw Error(ErrorKind::kInvalidArgument,
                  "g0 of a multi-member ensemble is ambiguous; designate a member");
    }
    member = 0;
  }
  if (*member >= ensemble.size()) throw Error(ErrorKind::kInvalidArgument, "no such member");
  const auto& packet = ensemble.packets[*member];

  CoherenceField f;
  f.order = 0;
  f.axis0 = axis;
  f.axis1 = Axis{0.0, 1.0, 1, false};
  f.times = {t};
  for (Spin s : {Spin::kUp, Spin::kDown}) {
    f.components.push_back({s});
    Array2D<cd> a(axis.n, 1);
    const auto v = sample_packet(packet, s, axis, t, ensemble.constants, ensemble.domain);
    std::copy(v.begin(), v.end(), a.data().begin());
    f.values.push_back(std::move(a));
  }
  return f;
}

CoherenceField eval_g1(const MixedEnsemble& ensemble, const Axis& axis_x, const Axis& axis_xp,
                       double t, double t_prime, const std::vector<SpinPair>& pairs) {
  require_members(ensemble);
  if (pairs.empty()) throw Error(ErrorKind::kInvalidArgument, "no spin pairs requested");
  const Samples left = sample_members(ensemble, axis_x, t);
  const Samples right = sample_members(ensemble, axis_xp, t_prime);

  CoherenceField f;
  f.order = 1;
  f.axis0 = axis_x;
  f.axis1 = axis_xp;
  f.times = {t, t_prime};
  for (const SpinPair& pair : pairs) {
    f.components.push_back({pair.first, pair.second});
    Array2D<cd> g(axis_x.n, axis_xp.n);
    const int s1 = static_cast<int>(pair.first);
    const int s2 = static_cast<int>(pair.second);
    parallel_for(static_cast<std::int64_t>(axis_x.n), [&](std::int64_t i) {
      auto row = g.row(static_cast<std::size_t>(i));
      for (std::size_t j = 0; j < axis_xp.n; ++j) {
        cd sum{0.0, 0.0};
        for (std::size_t n = 0; n < ensemble.size(); ++n) {
          sum += ensemble.weights[n] * conj_mul(left[n][s1][i], right[n][s2][j]);
        }
        row[j] = sum;
      }
    });
    f.values.push_back(std::move(g));
  }
  return f;
}

CoherenceField eval_g2(const MixedEnsemble& ensemble, const Axis& row_axis,
                       const Axis& column_axis, const std::array<G2Coordinate, 4>& coords) {
  require_members(ensemble);
  int rows = 0;
  int cols = 0;
  for (const auto& c : coords) {
    rows += c.role == G2Coordinate::Role::kRow;
    cols += c.role == G2Coordinate::Role::kColumn;
  }
  if (rows != 1 || cols != 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "g2 slice needs exactly one row and one column coordinate");
  }

  // Per member: a fixed scalar factor, a row vector and a column vector.
  const std::size_t members = ensemble.size();
  std::vector<cd> fixed(members, cd{1.0, 0.0});
  std::vector<std::vector<cd>> row_vals(members), col_vals(members);
  for (std::size_t n = 0; n < members; ++n) {
    const auto& packet = ensemble.packets[n];
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& c = coords[k];
      const bool conjugate = k < 2;
      auto prep = [&](cd v) { return conjugate ? std::conj(v) : v; };
      switch (c.role) {
        case G2Coordinate::Role::kFixed:
          fixed[n] = mul(fixed[n], prep(evaluate_packet(packet, c.spin, c.value, c.time,
                                                        ensemble.constants, ensemble.domain)));
          break;
        case G2Coordinate::Role::kRow: {
          auto v = sample_packet(packet, c.spin, row_axis, c.time, ensemble.constants,
                                 ensemble.domain);
          for (auto& z : v) z = prep(z);
          row_vals[n] = std::move(v);
          break;
        }
        case G2Coordinate::Role::kColumn: {
          auto v = sample_packet(packet, c.spin, column_axis, c.time, ensemble.constants,
                                 ensemble.domain);
          for (auto& z : v) z = prep(z);
          col_vals[n] = std::move(v);
          break;
        }
      }
    }
  }

  CoherenceField f;
  f.order = 2;
  f.axis0 = row_axis;
  f.axis1 = column_axis;
  f.components.push_back({coords[0].spin, coords[1].spin, coords[2].spin, coords[3].spin});
  for (const auto& c : coords) {
    f.times.push_back(c.time);
    f.fixed_coordinates.push_back(c.role == G2Coordinate::Role::kFixed
                                      ? c.value
                                      : std::numeric_limits<double>::quiet_NaN());
  }
  Array2D<cd> g(row_axis.n, column_axis.n);
  parallel_for(static_cast<std::int64_t>(row_axis.n), [&](std::int64_t i) {
    auto row = g.row(static_cast<std::size_t>(i));
    for (std::size_t j = 0; j < column_axis.n; ++j) {
      cd sum{0.0, 0.0};
      for (std::size_t n = 0; n < members; ++n) {
        sum += ensemble.weights[n] * mul(fixed[n], mul(row_vals[n][i], col_vals[n][j]));
      }
      row[j] = sum;
    }
  });
  f.values.push_back(std::move(g));
  return f;
}

G2Volume eval_g2_full(const MixedEnsemble& ensemble, const Axis& axis,
                      const std::array<double, 4>& times, const std::array<Spin, 4>& spins,
                      std::size_t budget_bytes) {
  require_members(ensemble);
  const double cells = std::pow(static_cast<double>(axis.n), 4.0);
  if (cells * sizeof(cd) > static_cast<double>(budget_bytes)) {
    std::ostringstream os;
    os << "full g2 grid of " << axis.n << "^4 cells needs " << cells * sizeof(cd)
       << " bytes, over the budget of " << budget_bytes;
    throw Error(ErrorKind::kNumerical, os.str());
  }
  const std::size_t n = axis.n;
  std::vector<std::array<std::vector<cd>, 4>> psi(ensemble.size());
  for (std::size_t m = 0; m < ensemble.size(); ++m) {
    for (std::size_t k = 0; k < 4; ++k) {
      psi[m][k] = sample_packet(ensemble.packets[m], spins[k], axis, times[k], ensemble.constants,
                                ensemble.domain);
      if (k < 2) {
        for (auto& z : psi[m][k]) z = std::conj(z);
      }
    }
  }
  G2Volume vol{axis, spins, std::vector<cd>(n * n * n * n)};
  parallel_for(static_cast<std::int64_t>(n), [&](std::int64_t i1s) {
    const auto i1 = static_cast<std::size_t>(i1s);
    for (std::size_t i2 = 0; i2 < n; ++i2)
      for (std::size_t i3 = 0; i3 < n; ++i3)
        for (std::size_t i4 = 0; i4 < n; ++i4) {
          cd sum{0.0, 0.0};
          for (std::size_t m = 0; m < ensemble.size(); ++m) {
            sum += ensemble.weights[m] * mul(mul(psi[m][0][i1], psi[m][1][i2]),
                                             mul(psi[m][2][i3], psi[m][3][i4]));
          }
          vol.values[((i1 * n + i2) * n + i3) * n + i4] = sum;
        }
  });
  return vol;
}

DegreeOfCoherenceField degree_of_coherence(const CoherenceField& g1) {
  if (g1.order != 1) throw Error(ErrorKind::kInvalidArgument, "degree of coherence needs p = 1");
  if (!g1.same_axes() || !g1.equal_time()) {
    throw Error(ErrorKind::kInvalidArgument,
                "degree of coherence needs an equal-time field on identical axes");
  }
  const std::size_t n = g1.axis0.n;
  std::array<std::vector<double>, 2> diag;
  double max_diag = 0.0;
  for (Spin s : {Spin::kUp, Spin::kDown}) {
    const SpinPair dp{s, s};
    bool needed = false;
    for (const auto& p : g1.spin_pairs()) needed |= p.first == s || p.second == s;
    if (!needed) continue;
    if (!g1.has(dp)) {
      throw Error(ErrorKind::kInvalidArgument, "degree of coherence needs diagonal pair " +
                                                   dp.name());
    }
    const auto& g = g1.component(dp);
    auto& d = diag[static_cast<int>(s)];
    d.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = g(i, i).real();
      max_diag = std::max(max_diag, d[i]);
    }
  }

  DegreeOfCoherenceField out;
  out.axis0 = g1.axis0;
  out.axis1 = g1.axis1;
  out.floor = 1e-12 * max_diag;
  for (const SpinPair& pair : g1.spin_pairs()) {
    const auto& g = g1.component(pair);
    const auto& d1 = diag[static_cast<int>(pair.first)];
    const auto& d2 = diag[static_cast<int>(pair.second)];
    Array2D<cd> v(n, n);
    Array2D<std::uint8_t> ok(n, n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (d1[i] < out.floor || d2[j] < out.floor || max_diag <= 0.0) continue;
        v(i, j) = g(i, j) / (std::sqrt(d1[i]) * std::sqrt(d2[j]));
        ok(i, j) = 1;
      }
    }
    out.pairs.push_back(pair);
    out.values.push_back(std::move(v));
    out.defined.push_back(std::move(ok));
  }
  return out;
}

}  // namespace csx
