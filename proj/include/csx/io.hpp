#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "csx/coherence.hpp"
#include "csx/propagation.hpp"
#include "csx/topology.hpp"

namespace csx {

// Grid dump, little-endian throughout. 64-byte header:
//   0  char[4]  magic "CSGD"
//   4  u8       version (1)
//   5  u8       order p (0 or 1)
//   6  u8       low nibble: component mask, high nibble: component count
//   7  u8       bit 0: axis0 periodic, bit 1: axis1 periodic
//   8  u32      n0 (rows)
//   12 u32      n1 (columns)
//   16 f64 x4   lo0, hi0, lo1, hi1
//   48 f64 x2   t1, t2
// then (re, im) f64 pairs ordered [component][row][column]. hi is the last
// sample on an open axis and lo + period on a periodic one. For p = 1 the
// mask bit of pair (s, s') is 2 s + s'; for p = 0 it is the spin.
inline constexpr std::size_t kDumpHeaderBytes = 64;
inline constexpr std::uint8_t kDumpVersion = 1;

std::vector<std::uint8_t> encode_dump(const CoherenceField& field);
CoherenceField decode_dump(const std::vector<std::uint8_t>& bytes, const std::string& origin = "<memory>");

void write_dump(const std::filesystem::path& path, const CoherenceField& field);
CoherenceField read_dump(const std::filesystem::path& path);

// One manifest line: "slice <index> <t1> <t2> <file>", file relative to
// the manifest's directory. '#' lines are comments.
struct ManifestEntry {
  std::size_t index = 0;
  double t1 = 0.0;
  double t2 = 0.0;
  std::string file;
};

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

// Every slice of a manifest as an equal-time stack.
CoherenceStack load_stack(const std::filesystem::path& manifest);

// Nonzero plaquettes: i, j, x, x_prime, m, spin_pair (i along x, j along x').
std::string winding_csv(const std::vector<WindingMap>& maps, const Axis& axis_x, const Axis& axis_xp);
std::string cores_csv(const std::vector<WindingMap>& maps);
std::string defects_csv(const std::vector<DefectRecord>& defects, const std::vector<SpinPair>& pairs);

void write_text(const std::filesystem::path& path, const std::string& text);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

}  // namespace csx
