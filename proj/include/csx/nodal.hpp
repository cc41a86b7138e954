#pragma once

#include <functional>
#include <string>
#include <vector>

#include "csx/coherence.hpp"
#include "csx/propagation.hpp"
#include "csx/topology.hpp"

namespace csx {

// A nodal line piercing one equal-time slice; position is (x, x').
struct NodalPoint {
  double t = 0.0;
  double x = 0.0;
  double x_prime = 0.0;
  int charge = 0;  // +1 or -1
  SpinPair pair{};
  bool confident = true;
};

enum class LineTopology { kOpen, kLoop };
enum class EventKind { kCreation, kAnnihilation };

const char* line_topology_name(LineTopology t);
const char* event_kind_name(EventKind k);

// One tracked branch: consecutive slices, constant charge.
struct NodalLine {
  std::vector<NodalPoint> points;
  LineTopology topology = LineTopology::kOpen;
  std::size_t component = 0;  // lines joined through events share a component
  int charge() const { return points.empty() ? 0 : points.front().charge; }
};

struct NodalEvent {
  double t = 0.0;  // midway between the two slices that bracket it
  double x = 0.0;
  double x_prime = 0.0;
  EventKind kind = EventKind::kCreation;
  std::size_t positive_line = 0;
  std::size_t negative_line = 0;
};

// Core that could be neither continued nor paired.
struct TrackingAnomaly {
  double t = 0.0;
  double x = 0.0;
  double x_prime = 0.0;
  int charge = 0;
  bool appeared = true;  // false: disappeared
};

// Cores of one slice and the independent plaquette-winding total.
struct SliceCores {
  double t = 0.0;
  std::vector<NodalPoint> points;  // unit charges
  long plaquette_sum = 0;
};

struct TrackingParams {
  double match_radius_cells = 3.0;
  double pair_radius_cells = 5.0;
  std::size_t max_anomalies = 0;
  // Bisection levels allowed when refining an interval that leaves cores
  // unmatched; 0 disables refinement.
  int refine_depth = 0;
};

struct NodalLineSet {
  std::vector<NodalLine> lines;
  std::vector<NodalEvent> events;
  std::vector<TrackingAnomaly> anomalies;
  SpinPair pair{};
  Axis axis_x;
  Axis axis_xp;
  double dt = 0.0;
  TrackingParams params;
  double estimated_core_speed = 0.0;  // 95th percentile of matched steps / dt

  std::size_t count(LineTopology t) const;
  std::size_t count(EventKind k) const;
};

// Cores of one spin pair of a g1 slice, higher charges split into unit
// cores at the same position.
SliceCores extract_slice_cores(const CoherenceField& slice, SpinPair pair,
                               double relative_floor = 1e-12);

// Links per-slice cores into lines. Throws UnderResolvedError when more
// than params.max_anomalies cores can be neither continued nor paired.
NodalLineSet link_cores(const std::vector<SliceCores>& slices, const Axis& axis_x,
                        const Axis& axis_xp, double dt, SpinPair pair,
                        const TrackingParams& params = {});

NodalLineSet track(const CoherenceStack& stack, SpinPair pair, const TrackingParams& params = {});

// Cores of the slice at time t, for refinement.
using SliceSource = std::function<SliceCores(double t)>;

// Inserts slices from `source` by bisecting every interval whose linking
// step leaves a core neither continued nor paired, up to
// params.refine_depth levels. The base slices are kept.
std::vector<SliceCores> refine_slices(const std::vector<SliceCores>& base, const SliceSource& source,
                                      const Axis& axis_x, const Axis& axis_xp,
                                      const TrackingParams& params);

struct RefinedTrack {
  NodalLineSet set;
  std::vector<SliceCores> slices;  // base and inserted, in time order
  std::size_t base_slices = 0;
};

// Tracks the ensemble's g1 component on count slices t_start + k dt,
// refining from the ensemble where needed.
RefinedTrack track_ensemble(const MixedEnsemble& ensemble, const Axis& axis_x, const Axis& axis_xp,
                            double t_start, double dt, std::size_t count, SpinPair pair,
                            const TrackingParams& params = {}, double relative_floor = 1e-12);

// Lines joined through creation/annihilation events into a cycle are loops;
// every other line is open.
NodalLineSet classify_lines(NodalLineSet set);

struct SliceBalance {
  double t = 0.0;
  long positive = 0;
  long negative = 0;
  long net = 0;
  long plaquette_sum = 0;
  bool consistent = true;  // net == plaquette_sum
};

struct ConservationReport {
  std::vector<SliceBalance> slices;
  bool net_constant = true;
  bool slices_consistent = true;
  bool events_balanced = true;
  std::vector<std::string> violations;

  bool ok() const { return net_constant && slices_consistent && events_balanced; }
};

// Per-slice signed counts of the tracked points against the independent
// per-slice plaquette totals, plus event parity. Never throws on violation.
ConservationReport conservation_report(const NodalLineSet& set,
                                       const std::vector<SliceCores>& slices);
ConservationReport conservation_report(const NodalLineSet& set, const CoherenceStack& stack);

std::string lines_csv(const NodalLineSet& set);
std::string events_csv(const NodalLineSet& set);
std::string anomalies_csv(const NodalLineSet& set);
std::string conservation_text(const ConservationReport& report, const NodalLineSet& set);

}  // namespace csx
