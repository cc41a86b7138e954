#include "csx/topology.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <numbers>
#include <queue>
#include <sstream>

#include "csx/errors.hpp"
#include "csx/parallel.hpp"

namespace csx {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t plaquette_count(const Axis& axis) { return axis.periodic ? axis.n : axis.n - 1; }

double peak_modulus(const Array2D<cd>& a) {
  double peak = 0.0;
  for (const cd& z : a.data()) peak = std::max(peak, std::abs(z));
  return peak;
}

double wrap_into(const Axis& axis, double x) {
  if (!axis.periodic) return x;
  const double p = axis.period();
  double r = std::fmod(x - axis.origin, p);
  if (r < 0.0) r += p;
  return axis.origin + r;
}

// Sum of an integer array over a rectangle of plaquettes [r0, r0+nr) x
// [c0, c0+nc), wrapping on periodic dimensions.
class BoxSums {
 public:
  BoxSums(const Array2D<int>& a, bool wrap_rows, bool wrap_cols)
      : rows_(a.rows()), cols_(a.cols()), wrap_rows_(wrap_rows), wrap_cols_(wrap_cols),
        table_(a.rows() + 1, a.cols() + 1, 0) {
    for (std::size_t r = 0; r < rows_; ++r) {
      long acc = 0;
      for (std::size_t c = 0; c < cols_; ++c) {
        acc += a(r, c);
        table_(r + 1, c + 1) = table_(r, c + 1) + acc;
      }
    }
  }

  // Returns nullopt when the box leaves a non-periodic array.
  std::optional<long> sum(long r0, long nr, long c0, long nc) const {
    const auto rs = split(r0, nr, rows_, wrap_rows_);
    const auto cs = split(c0, nc, cols_, wrap_cols_);
    if (rs.empty() || cs.empty()) return std::nullopt;
    long total = 0;
    for (const auto& [ra, rb] : rs)
      for (const auto& [ca, cb] : cs) total += rect(ra, rb, ca, cb);
    return total;
  }

 private:
  using Range = std::pair<std::size_t, std::size_t>;  // [a, b)

  static std::vector<Range> split(long start, long count, std::size_t n, bool wrap) {
    const long len = static_cast<long>(n);
    if (count > len) return {};
    if (!wrap) {
      if (start < 0 || start + count > len) return {};
      return {{static_cast<std::size_t>(start), static_cast<std::size_t>(start + count)}};
    }
    long a = ((start % len) + len) % len;
    if (a + count <= len) return {{static_cast<std::size_t>(a), static_cast<std::size_t>(a + count)}};
    return {{static_cast<std::size_t>(a), n}, {0, static_cast<std::size_t>(a + count - len)}};
  }

  long rect(std::size_t ra, std::size_t rb, std::size_t ca, std::size_t cb) const {
    return table_(rb, cb) - table_(ra, cb) - table_(rb, ca) + table_(ra, ca);
  }

  std::size_t rows_, cols_;
  bool wrap_rows_, wrap_cols_;
  Array2D<long> table_;
};

}  // namespace

double wrap_phase(double d) {
  double r = std::remainder(d, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

Madelung madelung_decompose(const Array2D<cd>& field) {
  Madelung m{Array2D<double>(field.rows(), field.cols()),
             Array2D<double>(field.rows(), field.cols()),
             Array2D<std::uint8_t>(field.rows(), field.cols(), 1)};
  for (std::size_t r = 0; r < field.rows(); ++r) {
    for (std::size_t c = 0; c < field.cols(); ++c) {
      const cd f = field(r, c);
      m.modulus(r, c) = std::abs(f);
      if (f == cd{0.0, 0.0}) {
        m.phase(r, c) = 0.0;
        m.defined(r, c) = 0;
      } else {
        double p = std::arg(f);
        if (p == -std::numbers::pi) p = std::numbers::pi;
        m.phase(r, c) = p;
      }
    }
  }
  return m;
}

void PhaseSlice::validate() const {
  if (values.rows() < 2 || values.cols() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "degenerate slice: need at least 2x2 samples");
  }
  if (values.rows() != v_axis.n || values.cols() != u_axis.n) {
    throw Error(ErrorKind::kInvalidArgument, "slice axes do not match the sample array");
  }
  for (const cd& z : values.data()) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(ErrorKind::kInvalidArgument, "slice contains non-finite values");
    }
  }
}

PhaseSlice slice_of(const CoherenceField& field, std::size_t component) {
  if (component >= field.values.size()) {
    throw Error(ErrorKind::kInvalidArgument, "no such field component");
  }
  PhaseSlice s;
  s.values = field.values[component];
  s.v_axis = field.axis0;
  s.u_axis = field.axis1;
  if (field.order == 2) {
    static const char* names[] = {"x1", "x2", "x3", "x4"};
    s.u_label.clear();
    s.v_label.clear();
    for (std::size_t k = 0; k < field.fixed_coordinates.size(); ++k) {
      if (!std::isnan(field.fixed_coordinates[k])) s.fixed.emplace_back(names[k], field.fixed_coordinates[k]);
    }
  }
  return s;
}

PhaseSlice slice_of(const CoherenceField& field, SpinPair pair) {
  for (std::size_t i = 0; i < field.components.size(); ++i) {
    const auto& c = field.components[i];
    if (c.size() == 2 && c[0] == pair.first && c[1] == pair.second) return slice_of(field, i);
  }
  throw Error(ErrorKind::kInvalidArgument, "field has no spin pair " + pair.name());
}

long WindingMap::net() const {
  long sum = 0;
  for (std::size_t i = 0; i < charge.size(); ++i) {
    if (!indeterminate.data()[i]) sum += charge.data()[i];
  }
  return sum;
}

std::size_t WindingMap::nonzero() const {
  return static_cast<std::size_t>(
      std::count_if(charge.data().begin(), charge.data().end(), [](int m) { return m != 0; }));
}

double default_amplitude_floor(const PhaseSlice& slice) {
  return 1e-12 * peak_modulus(slice.values);
}

WindingMap plaquette_winding(const PhaseSlice& slice) {
  return plaquette_winding(slice, default_amplitude_floor(slice));
}

WindingMap plaquette_winding(const PhaseSlice& slice, double amplitude_floor) {
  slice.validate();
  const std::size_t rows = slice.values.rows();
  const std::size_t cols = slice.values.cols();
  const std::size_t pr = plaquette_count(slice.v_axis);
  const std::size_t pc = plaquette_count(slice.u_axis);

  Array2D<double> phase(rows, cols);
  Array2D<std::uint8_t> weak(rows, cols, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      phase(r, c) = std::arg(slice.values(r, c));
      weak(r, c) = std::abs(slice.values(r, c)) < amplitude_floor;
    }
  }
  // Each edge difference is wrapped once and shared by its two plaquettes,
  // so the total over a torus telescopes to exactly zero.
  Array2D<double> horiz(rows, pc);  // (r, c) -> (r, c+1)
  Array2D<double> vert(pr, cols);   // (r, c) -> (r+1, c)
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < pc; ++c) horiz(r, c) = wrap_phase(phase(r, (c + 1) % cols) - phase(r, c));
  for (std::size_t r = 0; r < pr; ++r)
    for (std::size_t c = 0; c < cols; ++c) vert(r, c) = wrap_phase(phase((r + 1) % rows, c) - phase(r, c));

  WindingMap map;
  map.amplitude_floor = amplitude_floor;
  map.charge = Array2D<int>(pr, pc, 0);
  map.indeterminate = Array2D<std::uint8_t>(pr, pc, 0);
  parallel_for(static_cast<std::int64_t>(pr), [&](std::int64_t rs) {
    const auto r = static_cast<std::size_t>(rs);
    const std::size_t r1 = (r + 1) % rows;
    for (std::size_t c = 0; c < pc; ++c) {
      const std::size_t c1 = (c + 1) % cols;
      if (weak(r, c) && weak(r, c1) && weak(r1, c) && weak(r1, c1)) {
        map.indeterminate(r, c) = 1;
        continue;
      }
      const double sum = horiz(r, c) + vert(r, c1) - horiz(r1, c) - vert(r, c);
      map.charge(r, c) = static_cast<int>(std::lround(sum / kTwoPi));
    }
  });
  return map;
}

int loop_circulation(const Sampler& sampler, const std::vector<Point2>& polyline,
                     const LoopOptions& options) {
  if (polyline.size() < 4) {
    throw Error(ErrorKind::kInvalidArgument, "loop needs at least three distinct vertices");
  }
  if (polyline.front().u != polyline.back().u || polyline.front().v != polyline.back().v) {
    throw Error(ErrorKind::kInvalidArgument, "loop polyline is not closed");
  }
  auto sample = [&](Point2 p) {
    const cd f = sampler(p.u, p.v);
    if (!(std::abs(f) > options.zero_modulus) || !std::isfinite(std::abs(f))) {
      std::ostringstream os;
      os << "loop vertex (" << p.u << ", " << p.v << ") lies on a core; perturb the path";
      throw OnCoreError(os.str());
    }
    return f;
  };

  // Adaptive bisection keeps every accumulated step below max_phase_step.
  double total = 0.0;
  std::function<void(Point2, cd, Point2, cd, int)> segment = [&](Point2 a, cd fa, Point2 b, cd fb,
                                                                 int depth) {
    const double step = wrap_phase(std::arg(fb) - std::arg(fa));
    if (std::abs(step) < options.max_phase_step) {
      total += step;
      return;
    }
    if (depth >= options.max_depth) {
      throw OnCoreError("loop refinement did not converge near a core; perturb the path");
    }
    const Point2 mid{0.5 * (a.u + b.u), 0.5 * (a.v + b.v)};
    const cd fm = sample(mid);
    segment(a, fa, mid, fm, depth + 1);
    segment(mid, fm, b, fb, depth + 1);
  };

  cd prev = sample(polyline.front());
  const cd first = prev;
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const cd next = i + 1 == polyline.size() ? first : sample(polyline[i]);
    segment(polyline[i - 1], prev, polyline[i], next, 0);
    prev = next;
  }
  const double turns = total / kTwoPi;
  const long m = std::lround(turns);
  if (std::abs(turns - static_cast<double>(m)) > 1e-9) {
    throw Error(ErrorKind::kNumerical, "loop circulation is not an integer");
  }
  return static_cast<int>(m);
}

std::vector<Point2> square_loop(Point2 center, double half_width, std::size_t per_side) {
  per_side = std::max<std::size_t>(per_side, 1);
  const double lo_u = center.u - half_width, hi_u = center.u + half_width;
  const double lo_v = center.v - half_width, hi_v = center.v + half_width;
  std::vector<Point2> out;
  out.reserve(4 * per_side + 1);
  auto lerp = [](double a, double b, std::size_t k, std::size_t n) {
    return a + (b - a) * static_cast<double>(k) / static_cast<double>(n);
  };
  for (std::size_t k = 0; k < per_side; ++k) out.push_back({lerp(lo_u, hi_u, k, per_side), lo_v});
  for (std::size_t k = 0; k < per_side; ++k) out.push_back({hi_u, lerp(lo_v, hi_v, k, per_side)});
  for (std::size_t k = 0; k < per_side; ++k) out.push_back({lerp(hi_u, lo_u, k, per_side), hi_v});
  for (std::size_t k = 0; k < per_side; ++k) out.push_back({lo_u, lerp(hi_v, lo_v, k, per_side)});
  out.push_back(out.front());
  return out;
}

Sampler bilinear_sampler(const PhaseSlice& slice) {
  slice.validate();
  auto held = std::make_shared<const PhaseSlice>(slice);
  return [held](double u, double v) -> cd {
    const PhaseSlice& slice = *held;
    auto locate = [](const Axis& axis, double x, std::size_t& i0, std::size_t& i1, double& s) {
      double q = (x - axis.origin) / axis.spacing;
      const double n = static_cast<double>(axis.n);
      if (axis.periodic) {
        q = std::fmod(q, n);
        if (q < 0.0) q += n;
      } else {
        if (q < -1e-9 || q > n - 1.0 + 1e-9) {
          throw Error(ErrorKind::kInvalidArgument, "sample point outside the slice");
        }
        q = std::clamp(q, 0.0, n - 1.0);
      }
      double fl = std::floor(q);
      if (!axis.periodic && fl >= n - 1.0) fl = n - 2.0;
      i0 = static_cast<std::size_t>(fl) % axis.n;
      i1 = (i0 + 1) % axis.n;
      s = q - fl;
    };
    std::size_t c0, c1, r0, r1;
    double s, r;
    locate(slice.u_axis, u, c0, c1, s);
    locate(slice.v_axis, v, r0, r1, r);
    const auto& a = slice.values;
    return (1.0 - s) * (1.0 - r) * a(r0, c0) + s * (1.0 - r) * a(r0, c1) +
           (1.0 - s) * r * a(r1, c0) + s * r * a(r1, c1);
  };
}

std::vector<Core> locate_cores(const PhaseSlice& slice, const WindingMap& map) {
  std::vector<Core> cores;
  const std::size_t rows = slice.values.rows();
  const std::size_t cols = slice.values.cols();
  for (std::size_t r = 0; r < map.charge.rows(); ++r) {
    for (std::size_t c = 0; c < map.charge.cols(); ++c) {
      const int m = map.charge(r, c);
      if (m == 0 || map.indeterminate(r, c)) continue;
      const std::size_t r1 = (r + 1) % rows, c1 = (c + 1) % cols;
      const cd f00 = slice.values(r, c), f01 = slice.values(r, c1);
      const cd f10 = slice.values(r1, c), f11 = slice.values(r1, c1);
      // f(s, t) = c0 + c1 s + c2 t + c3 s t with s along u, t along v.
      const double a0 = f00.real(), a1 = f01.real() - f00.real(), a2 = f10.real() - f00.real(),
                   a3 = f00.real() - f01.real() - f10.real() + f11.real();
      const double b0 = f00.imag(), b1 = f01.imag() - f00.imag(), b2 = f10.imag() - f00.imag(),
                   b3 = f00.imag() - f01.imag() - f10.imag() + f11.imag();
      const double qa = b2 * a3 - b3 * a2;
      const double qb = b0 * a3 + b2 * a1 - b1 * a2 - b3 * a0;
      const double qc = b0 * a1 - b1 * a0;
      std::vector<double> roots;
      const double scale = std::abs(qa) + std::abs(qb) + std::abs(qc);
      if (std::abs(qa) <= 1e-14 * scale) {
        if (qb != 0.0) roots.push_back(-qc / qb);
      } else {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
          const double sq = std::sqrt(disc);
          const double q = -0.5 * (qb + std::copysign(sq, qb));
          roots.push_back(q / qa);
          if (q != 0.0) roots.push_back(qc / q);
        }
      }
      constexpr double kEdge = 1e-9;
      double best_s = 0.5, best_t = 0.5, best_d = std::numeric_limits<double>::infinity();
      for (double t : roots) {
        if (t < -kEdge || t > 1.0 + kEdge) continue;
        const double den_a = a1 + a3 * t, den_b = b1 + b3 * t;
        double s;
        if (std::abs(den_a) >= std::abs(den_b)) {
          if (den_a == 0.0) continue;
          s = -(a0 + a2 * t) / den_a;
        } else {
          s = -(b0 + b2 * t) / den_b;
        }
        if (s < -kEdge || s > 1.0 + kEdge) continue;
        const double d = std::hypot(s - 0.5, t - 0.5);
        if (d < best_d) {
          best_d = d;
          best_s = std::clamp(s, 0.0, 1.0);
          best_t = std::clamp(t, 0.0, 1.0);
        }
      }
      Core core;
      core.charge = m;
      core.row = r;
      core.col = c;
      core.pair = map.pair;
      core.confident = std::isfinite(best_d);
      core.u = wrap_into(slice.u_axis, slice.u_axis.coordinate(c) + best_s * slice.u_axis.spacing);
      core.v = wrap_into(slice.v_axis, slice.v_axis.coordinate(r) + best_t * slice.v_axis.spacing);
      cores.push_back(core);
    }
  }
  return cores;
}

std::vector<WindingMap> winding_maps(const CoherenceField& field, double relative_floor) {
  std::vector<WindingMap> maps;
  for (std::size_t k = 0; k < field.components.size(); ++k) {
    const PhaseSlice slice = slice_of(field, k);
    WindingMap map = plaquette_winding(slice, relative_floor * peak_modulus(slice.values));
    const auto& c = field.components[k];
    if (c.size() == 2) map.pair = {c[0], c[1]};
    map.cores = locate_cores(slice, map);
    maps.push_back(std::move(map));
  }
  return maps;
}

std::vector<int> winding_vector(const CoherenceField& g1, double x, double x_prime,
                                double radius) {
  if (g1.order != 1) throw Error(ErrorKind::kInvalidArgument, "winding vector needs a g1 field");
  auto inside = [&](const Axis& axis, double centre) {
    return axis.periodic ||
           (centre - radius >= axis.origin - 1e-12 && centre + radius <= axis.upper() + 1e-12);
  };
  if (!inside(g1.axis0, x) || !inside(g1.axis1, x_prime)) {
    throw Error(ErrorKind::kInvalidArgument, "winding loop leaves the grid");
  }
  const double h = std::min(g1.axis0.spacing, g1.axis1.spacing);
  const auto per_side = static_cast<std::size_t>(std::max(4.0, std::ceil(4.0 * radius / h)));
  std::vector<int> out;
  for (std::size_t k = 0; k < g1.components.size(); ++k) {
    const PhaseSlice slice = slice_of(g1, k);
    out.push_back(loop_circulation(bilinear_sampler(slice),
                                   square_loop({x_prime, x}, radius, per_side)));
  }
  return out;
}

std::vector<int> winding_vector(const CoherenceSampler& sampler,
                                const std::vector<SpinPair>& pairs, double x, double x_prime,
                                double radius, std::size_t per_side) {
  std::vector<int> out;
  const auto loop = square_loop({x_prime, x}, radius, per_side);
  for (const SpinPair& pair : pairs) {
    out.push_back(loop_circulation(
        [&](double u, double v) { return sampler(pair, v, u); }, loop));
  }
  return out;
}

std::vector<DefectRecord> scan_defects(const CoherenceField& g1,
                                       const std::vector<WindingMap>& maps,
                                       const std::vector<int>& radii_cells) {
  if (maps.size() != g1.components.size()) {
    throw Error(ErrorKind::kInvalidArgument, "one winding map per field component is required");
  }
  const std::size_t rows = g1.axis0.n, cols = g1.axis1.n;
  const std::size_t comps = maps.size();
  std::vector<BoxSums> charge_sums, bad_sums;
  for (const auto& m : maps) {
    charge_sums.emplace_back(m.charge, g1.axis0.periodic, g1.axis1.periodic);
    Array2D<int> bad(m.indeterminate.rows(), m.indeterminate.cols());
    for (std::size_t i = 0; i < bad.size(); ++i) bad.data()[i] = m.indeterminate.data()[i];
    bad_sums.emplace_back(bad, g1.axis0.periodic, g1.axis1.periodic);
  }

  std::vector<DefectRecord> out;
  for (int radius : radii_cells) {
    if (radius < 1) throw Error(ErrorKind::kInvalidArgument, "scan radius must be >= 1 cell");
    // Winding vector of the box around every grid node; empty when the box
    // is not usable.
    std::vector<std::vector<int>> w(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        std::vector<int> vec(comps);
        bool usable = true, nonzero = false;
        for (std::size_t k = 0; k < comps && usable; ++k) {
          const long r0 = static_cast<long>(i) - radius, c0 = static_cast<long>(j) - radius;
          const auto bad = bad_sums[k].sum(r0, 2 * radius, c0, 2 * radius);
          const auto m = charge_sums[k].sum(r0, 2 * radius, c0, 2 * radius);
          if (!bad || !m || *bad != 0) {
            usable = false;
            break;
          }
          vec[k] = static_cast<int>(*m);
          nonzero |= vec[k] != 0;
        }
        if (usable && nonzero) w[i * cols + j] = std::move(vec);
      }
    }
    // Connected regions of identical vectors.
    std::vector<std::uint8_t> seen(rows * cols, 0);
    for (std::size_t start = 0; start < rows * cols; ++start) {
      if (w[start].empty() || seen[start]) continue;
      std::vector<std::size_t> members;
      std::queue<std::size_t> todo;
      todo.push(start);
      seen[start] = 1;
      while (!todo.empty()) {
        const std::size_t cur = todo.front();
        todo.pop();
        members.push_back(cur);
        const std::size_t i = cur / cols, j = cur % cols;
        const std::size_t nb[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
        for (const auto& q : nb) {
          if (q[0] >= rows || q[1] >= cols) continue;  // unsigned wrap covers i-1 < 0
          const std::size_t id = q[0] * cols + q[1];
          if (!seen[id] && w[id] == w[start]) {
            seen[id] = 1;
            todo.push(id);
          }
        }
      }
      double ci = 0.0, cj = 0.0;
      for (std::size_t id : members) {
        ci += static_cast<double>(id / cols);
        cj += static_cast<double>(id % cols);
      }
      ci /= static_cast<double>(members.size());
      cj /= static_cast<double>(members.size());
      std::size_t best = members.front();
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t id : members) {
        const double d = std::hypot(static_cast<double>(id / cols) - ci,
                                    static_cast<double>(id % cols) - cj);
        if (d < best_d) {
          best_d = d;
          best = id;
        }
      }
      DefectRecord rec;
      rec.row = best / cols;
      rec.col = best % cols;
      rec.x = g1.axis0.coordinate(rec.row);
      rec.x_prime = g1.axis1.coordinate(rec.col);
      rec.radius_cells = radius;
      rec.winding = w[start];
      out.push_back(std::move(rec));
    }
  }
  return out;
}

std::string format_winding(const std::vector<int>& w) {
  std::string s = "{";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(w[i]);
  }
  return s + "}";
}

const char* defect_kind_name(DefectKind kind) {
  switch (kind) {
    case DefectKind::kVortical: return "vortical";
    case DefectKind::kSolitonic: return "solitonic";
    case DefectKind::kHigherOrder: return "higher-order";
  }
  return "?";
}

int embedding_dimension(int dimension, int order) {
  return order == 0 ? dimension : 2 * order * dimension;
}

namespace {

HierarchyEntry make_entry(int dimension, int order, int consumed) {
  if (dimension < 1 || order < 0 || consumed < 1) {
    throw Error(ErrorKind::kInvalidArgument, "codimension needs D >= 1, p >= 0 and N >= 1");
  }
  HierarchyEntry e;
  e.dimension = dimension;
  e.order = order;
  e.consumed = consumed;
  e.embedding = embedding_dimension(dimension, order);
  e.codimension = e.embedding - consumed;
  e.kind = consumed == 2   ? DefectKind::kVortical
           : consumed == 1 ? DefectKind::kSolitonic
                           : DefectKind::kHigherOrder;
  e.representable = e.codimension >= 0;
  return e;
}

}  // namespace

HierarchyEntry codimension(int dimension, int order, int consumed) {
  HierarchyEntry e = make_entry(dimension, order, consumed);
  if (!e.representable) {
    std::ostringstream os;
    os << defect_kind_name(e.kind) << " defect with N = " << consumed
       << " is not representable in M = " << e.embedding << " (D = " << dimension
       << ", p = " << order << ")";
    throw NotRepresentableError(os.str());
  }
  return e;
}

std::vector<HierarchyEntry> hierarchy_table(int d_max, int p_max) {
  if (d_max < 1 || p_max < 0) {
    throw Error(ErrorKind::kInvalidArgument, "hierarchy needs D_max >= 1 and p_max >= 0");
  }
  std::vector<HierarchyEntry> out;
  for (int d = 1; d <= d_max; ++d) {
    for (int p = 0; p <= p_max; ++p) {
      out.push_back(make_entry(d, p, 2));
      out.push_back(make_entry(d, p, 1));
    }
  }
  return out;
}

std::string hierarchy_text(const std::vector<HierarchyEntry>& table) {
  std::ostringstream os;
  os << std::setw(3) << "D" << std::setw(4) << "p" << std::setw(5) << "M" << std::setw(10)
     << "C_v" << std::setw(10) << "C_s" << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& e = table[i];
    if (e.consumed != 2) continue;
    const HierarchyEntry* sol = nullptr;
    for (const auto& f : table) {
      if (f.dimension == e.dimension && f.order == e.order && f.consumed == 1) sol = &f;
    }
    auto cell = [](const HierarchyEntry* x) {
      if (!x || !x->representable) return std::string("-");
      return std::to_string(x->codimension);
    };
    os << std::setw(3) << e.dimension << std::setw(4) << e.order << std::setw(5) << e.embedding
       << std::setw(10) << cell(&e) << std::setw(10) << cell(sol) << '\n';
  }
  return os.str();
}

std::string hierarchy_csv(const std::vector<HierarchyEntry>& table) {
  std::ostringstream os;
  os << "D,p,M,N,C,kind,representable\n";
  for (const auto& e : table) {
    os << e.dimension << ',' << e.order << ',' << e.embedding << ',' << e.consumed << ','
       << e.codimension << ',' << defect_kind_name(e.kind) << ','
       << (e.representable ? "yes" : "no") << '\n';
  }
  return os.str();
}

}  // namespace csx
