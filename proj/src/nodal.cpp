#include "csx/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <tuple>

#include "csx/errors.hpp"

namespace csx {

namespace {

double distance(const Axis& ax, const Axis& axp, const NodalPoint& a, const NodalPoint& b) {
  return std::hypot(ax.separation(a.x, b.x), axp.separation(a.x_prime, b.x_prime));
}

double wrap_coordinate(const Axis& axis, double x) {
  if (!axis.periodic) return x;
  const double p = axis.period();
  double r = std::fmod(x - axis.origin, p);
  if (r < 0.0) r += p;
  return axis.origin + r;
}

NodalPoint midpoint(const Axis& ax, const Axis& axp, const NodalPoint& a, const NodalPoint& b) {
  NodalPoint m = a;
  m.x = wrap_coordinate(ax, a.x + 0.5 * ax.separation(a.x, b.x));
  m.x_prime = wrap_coordinate(axp, a.x_prime + 0.5 * axp.separation(a.x_prime, b.x_prime));
  return m;
}

struct Candidate {
  double d;
  std::size_t a;
  std::size_t b;
  bool operator<(const Candidate& o) const { return std::tie(d, a, b) < std::tie(o.d, o.a, o.b); }
};

// Greedy assignment over distance-sorted candidates.
std::vector<Candidate> greedy(std::vector<Candidate> cands, std::size_t na, std::size_t nb) {
  std::sort(cands.begin(), cands.end());
  std::vector<std::uint8_t> used_a(na, 0), used_b(nb, 0);
  std::vector<Candidate> out;
  for (const auto& c : cands) {
    if (used_a[c.a] || used_b[c.b]) continue;
    used_a[c.a] = used_b[c.b] = 1;
    out.push_back(c);
  }
  return out;
}

// Opposite-charge pairs among `ids` of `points` within radius.
std::vector<Candidate> pair_up(const std::vector<NodalPoint>& points,
                               const std::vector<std::size_t>& ids, const Axis& ax,
                               const Axis& axp, double radius) {
  std::vector<Candidate> cands;
  for (std::size_t i : ids) {
    if (points[i].charge != 1) continue;
    for (std::size_t j : ids) {
      if (points[j].charge != -1) continue;
      const double d = distance(ax, axp, points[i], points[j]);
      if (d <= radius) cands.push_back({d, i, j});
    }
  }
  return greedy(std::move(cands), points.size(), points.size());
}

}  // namespace

const char* line_topology_name(LineTopology t) { return t == LineTopology::kLoop ? "loop" : "open"; }

const char* event_kind_name(EventKind k) {
  return k == EventKind::kCreation ? "creation" : "annihilation";
}

std::size_t NodalLineSet::count(LineTopology t) const {
  return static_cast<std::size_t>(std::count_if(
      lines.begin(), lines.end(), [t](const NodalLine& l) { return l.topology == t; }));
}

std::size_t NodalLineSet::count(EventKind k) const {
  return static_cast<std::size_t>(std::count_if(
      events.begin(), events.end(), [k](const NodalEvent& e) { return e.kind == k; }));
}

SliceCores extract_slice_cores(const CoherenceField& slice, SpinPair pair, double relative_floor) {
  if (!slice.equal_time()) {
    throw Error(ErrorKind::kInvalidArgument, "core extraction expects equal-time slices");
  }
  const PhaseSlice ps = slice_of(slice, pair);
  double peak = 0.0;
  for (const cd& z : ps.values.data()) peak = std::max(peak, std::abs(z));
  WindingMap map = plaquette_winding(ps, relative_floor * peak);
  map.pair = pair;
  SliceCores out;
  out.t = slice.times.front();
  out.plaquette_sum = map.net();
  for (const Core& c : locate_cores(ps, map)) {
    NodalPoint p;
    p.t = out.t;
    p.x = c.v;
    p.x_prime = c.u;
    p.pair = pair;
    p.confident = c.confident;
    p.charge = c.charge > 0 ? 1 : -1;
    for (int k = 0; k < std::abs(c.charge); ++k) out.points.push_back(p);
  }
  return out;
}

namespace {

// Assignments between two consecutive slices.
struct Step {
  std::vector<Candidate> matches;        // prev index -> next index
  std::vector<Candidate> annihilations;  // (+1, -1) among prev
  std::vector<Candidate> creations;      // (+1, -1) among next
  std::vector<std::size_t> lost;         // prev cores neither continued nor paired
  std::vector<std::size_t> found;        // next cores neither continued nor paired
};

Step link_step(const std::vector<NodalPoint>& prev, const std::vector<NodalPoint>& next,
               const Axis& ax, const Axis& axp, double match_r, double pair_r) {
  Step st;
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    for (std::size_t j = 0; j < next.size(); ++j) {
      if (prev[i].charge != next[j].charge) continue;
      const double d = distance(ax, axp, prev[i], next[j]);
      if (d <= match_r) cands.push_back({d, i, j});
    }
  }
  st.matches = greedy(std::move(cands), prev.size(), next.size());
  std::vector<std::uint8_t> prev_done(prev.size(), 0), next_done(next.size(), 0);
  for (const auto& c : st.matches) prev_done[c.a] = next_done[c.b] = 1;

  std::vector<std::size_t> died, born;
  for (std::size_t i = 0; i < prev.size(); ++i)
    if (!prev_done[i]) died.push_back(i);
  for (std::size_t j = 0; j < next.size(); ++j)
    if (!next_done[j]) born.push_back(j);
  st.annihilations = pair_up(prev, died, ax, axp, pair_r);
  st.creations = pair_up(next, born, ax, axp, pair_r);
  for (const auto& c : st.annihilations) prev_done[c.a] = prev_done[c.b] = 1;
  for (const auto& c : st.creations) next_done[c.a] = next_done[c.b] = 1;
  for (std::size_t i : died)
    if (!prev_done[i]) st.lost.push_back(i);
  for (std::size_t j : born)
    if (!next_done[j]) st.found.push_back(j);
  return st;
}

constexpr std::size_t kNoLine = static_cast<std::size_t>(-1);

}  // namespace

NodalLineSet link_cores(const std::vector<SliceCores>& slices, const Axis& axis_x,
                        const Axis& axis_xp, double dt, SpinPair pair,
                        const TrackingParams& params) {
  if (slices.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "tracking needs at least two slices");
  }
  if (!(dt > 0.0)) throw Error(ErrorKind::kInvalidArgument, "tracking needs dt > 0");
  for (std::size_t k = 0; k + 1 < slices.size(); ++k) {
    if (!(slices[k + 1].t > slices[k].t)) {
      throw Error(ErrorKind::kInvalidArgument, "slice times must increase");
    }
  }
  const double cell = std::max(axis_x.spacing, axis_xp.spacing);
  const double match_r = params.match_radius_cells * cell;
  const double pair_r = params.pair_radius_cells * cell;

  NodalLineSet set;
  set.pair = pair;
  set.axis_x = axis_x;
  set.axis_xp = axis_xp;
  set.dt = dt;
  set.params = params;

  // Line id carried by each point of the current slice.
  std::vector<std::size_t> owner;
  auto start_line = [&](const NodalPoint& p) {
    set.lines.push_back(NodalLine{{p}, LineTopology::kOpen, 0});
    return set.lines.size() - 1;
  };
  for (const auto& p : slices.front().points) owner.push_back(start_line(p));

  std::vector<double> speeds;
  for (std::size_t k = 0; k + 1 < slices.size(); ++k) {
    const auto& prev = slices[k].points;
    const auto& next = slices[k + 1].points;
    const double step_t = slices[k + 1].t - slices[k].t;
    const double t_event = 0.5 * (slices[k].t + slices[k + 1].t);
    const Step st = link_step(prev, next, axis_x, axis_xp, match_r, pair_r);

    std::vector<std::size_t> next_owner(next.size(), kNoLine);
    for (const auto& c : st.matches) {
      next_owner[c.b] = owner[c.a];
      set.lines[owner[c.a]].points.push_back(next[c.b]);
      speeds.push_back(c.d / step_t);
    }
    for (const auto& c : st.annihilations) {
      const NodalPoint m = midpoint(axis_x, axis_xp, prev[c.a], prev[c.b]);
      set.events.push_back({t_event, m.x, m.x_prime, EventKind::kAnnihilation, owner[c.a],
                            owner[c.b]});
    }
    for (std::size_t i : st.lost) {
      set.anomalies.push_back({slices[k].t, prev[i].x, prev[i].x_prime, prev[i].charge, false});
    }
    for (const auto& c : st.creations) {
      next_owner[c.a] = start_line(next[c.a]);
      next_owner[c.b] = start_line(next[c.b]);
      const NodalPoint m = midpoint(axis_x, axis_xp, next[c.a], next[c.b]);
      set.events.push_back({t_event, m.x, m.x_prime, EventKind::kCreation, next_owner[c.a],
                            next_owner[c.b]});
    }
    for (std::size_t j : st.found) {
      next_owner[j] = start_line(next[j]);
      set.anomalies.push_back({slices[k + 1].t, next[j].x, next[j].x_prime, next[j].charge, true});
    }
    owner = std::move(next_owner);
  }

  if (!speeds.empty()) {
    std::sort(speeds.begin(), speeds.end());
    const auto idx = static_cast<std::size_t>(0.95 * static_cast<double>(speeds.size() - 1));
    set.estimated_core_speed = speeds[idx];
  }
  if (set.anomalies.size() > params.max_anomalies) {
    std::ostringstream os;
    os << "under-resolved stack: " << set.anomalies.size()
       << " cores could not be continued or paired (first at t = " << set.anomalies.front().t
       << "); estimated core speed " << set.estimated_core_speed << " x dt " << dt
       << " against match radius " << match_r
       << "; reduce dt, raise the match radius or enable refinement";
    throw UnderResolvedError(os.str());
  }
  return classify_lines(std::move(set));
}

std::vector<SliceCores> refine_slices(const std::vector<SliceCores>& base, const SliceSource& source,
                                      const Axis& axis_x, const Axis& axis_xp,
                                      const TrackingParams& params) {
  const double cell = std::max(axis_x.spacing, axis_xp.spacing);
  const double match_r = params.match_radius_cells * cell;
  const double pair_r = params.pair_radius_cells * cell;
  std::vector<SliceCores> out;
  // Depth-first bisection; each accepted slice is appended in time order.
  auto descend = [&](auto&& self, const SliceCores& a, const SliceCores& b, int depth) -> void {
    const Step st = link_step(a.points, b.points, axis_x, axis_xp, match_r, pair_r);
    if (depth >= params.refine_depth || (st.lost.empty() && st.found.empty())) {
      out.push_back(b);
      return;
    }
    const SliceCores mid = source(0.5 * (a.t + b.t));
    self(self, a, mid, depth + 1);
    self(self, mid, b, depth + 1);
  };
  if (base.empty()) return out;
  out.push_back(base.front());
  for (std::size_t k = 0; k + 1 < base.size(); ++k) descend(descend, base[k], base[k + 1], 0);
  return out;
}

NodalLineSet track(const CoherenceStack& stack, SpinPair pair, const TrackingParams& params) {
  stack.validate();
  if (stack.mode != StackMode::kEqualTime) {
    throw Error(ErrorKind::kInvalidArgument, "tracking expects an equal-time stack");
  }
  std::vector<SliceCores> cores;
  for (const auto& s : stack.slices) cores.push_back(extract_slice_cores(s, pair));
  const auto& ref = stack.slices.front();
  return link_cores(cores, ref.axis0, ref.axis1, stack.dt, pair, params);
}

RefinedTrack track_ensemble(const MixedEnsemble& ensemble, const Axis& axis_x, const Axis& axis_xp,
                            double t_start, double dt, std::size_t count, SpinPair pair,
                            const TrackingParams& params, double relative_floor) {
  const SliceSource source = [&](double t) {
    return extract_slice_cores(evolve_ensemble_g1(ensemble, axis_x, axis_xp, t, {pair}), pair,
                               relative_floor);
  };
  std::vector<SliceCores> base;
  for (std::size_t k = 0; k < count; ++k) base.push_back(source(t_start + static_cast<double>(k) * dt));
  RefinedTrack out;
  out.base_slices = base.size();
  out.slices = refine_slices(base, source, axis_x, axis_xp, params);
  out.set = link_cores(out.slices, axis_x, axis_xp, dt, pair, params);
  return out;
}

NodalLineSet classify_lines(NodalLineSet set) {
  const std::size_t n = set.lines.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::vector<std::uint8_t> start_joined(n, 0), end_joined(n, 0);
  for (const auto& e : set.events) {
    if (e.positive_line >= n || e.negative_line >= n) continue;
    auto& flags = e.kind == EventKind::kCreation ? start_joined : end_joined;
    flags[e.positive_line] = flags[e.negative_line] = 1;
    const std::size_t a = find(e.positive_line), b = find(e.negative_line);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::uint8_t> closed(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!start_joined[i] || !end_joined[i]) closed[find(i)] = 0;
  }
  // Components numbered by their smallest line id.
  std::vector<std::size_t> label(n, static_cast<std::size_t>(-1));
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (label[r] == static_cast<std::size_t>(-1)) label[r] = next++;
    set.lines[i].component = label[r];
    set.lines[i].topology = closed[r] ? LineTopology::kLoop : LineTopology::kOpen;
  }
  return set;
}

ConservationReport conservation_report(const NodalLineSet& set,
                                       const std::vector<SliceCores>& slices) {
  ConservationReport rep;
  for (const auto& s : slices) {
    SliceBalance b;
    b.t = s.t;
    b.plaquette_sum = s.plaquette_sum;
    for (const auto& line : set.lines) {
      for (const auto& p : line.points) {
        if (p.t != s.t) continue;
        (p.charge > 0 ? b.positive : b.negative) += 1;
      }
    }
    b.net = b.positive - b.negative;
    b.consistent = b.net == b.plaquette_sum;
    if (!b.consistent) {
      rep.slices_consistent = false;
      std::ostringstream os;
      os << "slice t = " << s.t << ": tracked net " << b.net << " != plaquette sum "
         << b.plaquette_sum;
      rep.violations.push_back(os.str());
    }
    if (!rep.slices.empty() && b.net != rep.slices.front().net) {
      rep.net_constant = false;
      std::ostringstream os;
      os << "slice t = " << s.t << ": net winding " << b.net << " differs from initial "
         << rep.slices.front().net;
      rep.violations.push_back(os.str());
    }
    rep.slices.push_back(b);
  }
  for (const auto& e : set.events) {
    const bool ok = e.positive_line < set.lines.size() && e.negative_line < set.lines.size() &&
                    set.lines[e.positive_line].charge() == 1 &&
                    set.lines[e.negative_line].charge() == -1;
    if (!ok) {
      rep.events_balanced = false;
      std::ostringstream os;
      os << event_kind_name(e.kind) << " at t = " << e.t << " does not pair +1 with -1";
      rep.violations.push_back(os.str());
    }
  }
  return rep;
}

ConservationReport conservation_report(const NodalLineSet& set, const CoherenceStack& stack) {
  std::vector<SliceCores> slices;
  for (const auto& s : stack.slices) {
    const PhaseSlice ps = slice_of(s, set.pair);
    SliceCores c;
    c.t = s.times.front();
    c.plaquette_sum = plaquette_winding(ps).net();
    slices.push_back(std::move(c));
  }
  return conservation_report(set, slices);
}

std::string lines_csv(const NodalLineSet& set) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "line_id,t,x,x_prime,m,spin_pair,topology,component\n";
  for (std::size_t id = 0; id < set.lines.size(); ++id) {
    const auto& line = set.lines[id];
    for (const auto& p : line.points) {
      os << id << ',' << p.t << ',' << p.x << ',' << p.x_prime << ',' << p.charge << ','
         << p.pair.name() << ',' << line_topology_name(line.topology) << ',' << line.component
         << '\n';
    }
  }
  return os.str();
}

std::string events_csv(const NodalLineSet& set) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "t,x,x_prime,kind,line_ids\n";
  for (const auto& e : set.events) {
    os << e.t << ',' << e.x << ',' << e.x_prime << ',' << event_kind_name(e.kind) << ','
       << e.positive_line << ';' << e.negative_line << '\n';
  }
  return os.str();
}

std::string anomalies_csv(const NodalLineSet& set) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "t,x,x_prime,m,kind\n";
  for (const auto& a : set.anomalies) {
    os << a.t << ',' << a.x << ',' << a.x_prime << ',' << a.charge << ','
       << (a.appeared ? "appeared" : "disappeared") << '\n';
  }
  return os.str();
}

std::string conservation_text(const ConservationReport& report, const NodalLineSet& set) {
  std::ostringstream os;
  os << "# spin pair " << set.pair.name() << ", match radius " << set.params.match_radius_cells
     << " cells, pair radius " << set.params.pair_radius_cells << " cells\n";
  os << "lines: " << set.lines.size() << " (" << set.count(LineTopology::kLoop) << " in loops, "
     << set.count(LineTopology::kOpen) << " open)\n";
  os << "events: " << set.count(EventKind::kCreation) << " creations, "
     << set.count(EventKind::kAnnihilation) << " annihilations\n";
  os << "anomalies: " << set.anomalies.size() << "\n";
  os << "net winding constant: " << (report.net_constant ? "yes" : "NO") << "\n";
  os << "slices consistent with plaquette sums: " << (report.slices_consistent ? "yes" : "NO")
     << "\n";
  os << "events pair +1 with -1: " << (report.events_balanced ? "yes" : "NO") << "\n";
  os << "t,positive,negative,net,plaquette_sum\n";
  os << std::setprecision(10);
  for (const auto& s : report.slices) {
    os << s.t << ',' << s.positive << ',' << s.negative << ',' << s.net << ',' << s.plaquette_sum
       << '\n';
  }
  for (const auto& v : report.violations) os << "VIOLATION: " << v << '\n';
  return os.str();
}

}  // namespace csx
