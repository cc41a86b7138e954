#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "csx/array2d.hpp"
#include "csx/coherence.hpp"
#include "csx/grid.hpp"

namespace csx {

// Polar form f = modulus * exp(i phase), phase in (-pi, pi]. Exact zeros
// have undefined phase (stored as 0, flagged in `defined`).
struct Madelung {
  Array2D<double> modulus;
  Array2D<double> phase;
  Array2D<std::uint8_t> defined;
};

Madelung madelung_decompose(const Array2D<cd>& field);

// Maps a phase difference to (-pi, pi].
double wrap_phase(double d);

// A 2D complex slice. Columns run along the horizontal u axis, rows along
// the vertical v axis; circulation is counted counterclockwise in (u, v).
// For a g1 component, rows are x and columns are x'.
struct PhaseSlice {
  Array2D<cd> values;
  Axis u_axis;  // columns
  Axis v_axis;  // rows
  std::string u_label = "x'";
  std::string v_label = "x";
  std::vector<std::pair<std::string, double>> fixed;  // constrained coordinates

  // Throws Error(kInvalidArgument) for non-finite data or fewer than 2x2
  // samples, or when the axes do not match the array shape.
  void validate() const;
};

PhaseSlice slice_of(const CoherenceField& field, std::size_t component);
PhaseSlice slice_of(const CoherenceField& field, SpinPair pair);

struct Core {
  double u = 0.0;
  double v = 0.0;
  int charge = 0;
  std::size_t row = 0;  // plaquette indices
  std::size_t col = 0;
  bool confident = true;
  SpinPair pair{};
};

// Plaquette (r, c) has corners (r, c), (r, c+1), (r+1, c+1), (r+1, c); on a
// periodic axis the last plaquette wraps to index 0.
struct WindingMap {
  Array2D<int> charge;
  Array2D<std::uint8_t> indeterminate;
  double amplitude_floor = 0.0;
  SpinPair pair{};
  std::vector<Core> cores;

  long net() const;          // sum over determinate plaquettes
  std::size_t nonzero() const;
};

// Default floor: 1e-12 times the slice's largest modulus.
double default_amplitude_floor(const PhaseSlice& slice);

WindingMap plaquette_winding(const PhaseSlice& slice, double amplitude_floor);
WindingMap plaquette_winding(const PhaseSlice& slice);

// Winding map of every component with cores located. The floor is given
// relative to each slice's largest modulus.
std::vector<WindingMap> winding_maps(const CoherenceField& field, double relative_floor = 1e-12);

using Sampler = std::function<cd(double u, double v)>;

struct Point2 {
  double u = 0.0;
  double v = 0.0;
};

struct LoopOptions {
  // Segments are bisected until neighbouring phase jumps are below this.
  double max_phase_step = 1.5707963267948966;
  int max_depth = 40;
  // Absolute modulus treated as a zero of the sampled field.
  double zero_modulus = 0.0;
};

// Winding number of the sampled field around a closed polyline (first
// point repeated at the end). Throws OnCoreError when a vertex sits on a
// zero and Error(kInvalidArgument) when the polyline is not closed.
int loop_circulation(const Sampler& sampler, const std::vector<Point2>& polyline,
                     const LoopOptions& options = {});

// Counterclockwise axis-aligned square, `per_side` segments per edge.
std::vector<Point2> square_loop(Point2 center, double half_width, std::size_t per_side);

// Bilinear interpolation of the slice; periodic axes wrap.
Sampler bilinear_sampler(const PhaseSlice& slice);

// Subpixel cores of every nonzero plaquette: intersection of the bilinear
// Re = 0 and Im = 0 curves inside the cell, or the cell centre flagged
// low-confidence when none exists.
std::vector<Core> locate_cores(const PhaseSlice& slice, const WindingMap& map);

// Loop winding of each spin pair of a g1 field around a square of the given
// half-width centred at (x, x'). Order follows field.spin_pairs().
std::vector<int> winding_vector(const CoherenceField& g1, double x, double x_prime,
                                double radius);
std::vector<int> winding_vector(const CoherenceSampler& sampler,
                                const std::vector<SpinPair>& pairs, double x, double x_prime,
                                double radius, std::size_t per_side = 64);

// A location whose square loop of `radius_cells` carries a nonzero winding
// vector, one row per connected region of equal vectors.
struct DefectRecord {
  double x = 0.0;
  double x_prime = 0.0;
  std::size_t row = 0;  // grid node at the loop centre
  std::size_t col = 0;
  int radius_cells = 0;
  std::vector<int> winding;  // over the field's spin pairs
};

std::vector<DefectRecord> scan_defects(const CoherenceField& g1,
                                       const std::vector<WindingMap>& maps,
                                       const std::vector<int>& radii_cells);

std::string format_winding(const std::vector<int>& w);  // "{1,1,1,1}"

// --- codimension hierarchy ---

enum class DefectKind { kVortical, kSolitonic, kHigherOrder };

const char* defect_kind_name(DefectKind kind);

struct HierarchyEntry {
  int dimension = 1;   // D
  int order = 0;       // p
  int embedding = 1;   // M
  int consumed = 2;    // N
  int codimension = 0; // C = M - N
  DefectKind kind = DefectKind::kVortical;
  bool representable = true;
};

int embedding_dimension(int dimension, int order);

// Throws NotRepresentableError when C < 0 and Error(kInvalidArgument) for
// D < 1, p < 0 or N < 1.
HierarchyEntry codimension(int dimension, int order, int consumed);

// Vortical (N = 2) and solitonic (N = 1) entries for D = 1..d_max and
// p = 0..p_max, D-major. Non-representable entries are kept and flagged.
std::vector<HierarchyEntry> hierarchy_table(int d_max, int p_max);

std::string hierarchy_text(const std::vector<HierarchyEntry>& table);
std::string hierarchy_csv(const std::vector<HierarchyEntry>& table);

}  // namespace csx
