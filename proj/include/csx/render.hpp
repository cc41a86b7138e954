#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "csx/coherence.hpp"

namespace csx {

enum class Colormap { kCyclicPhase, kSequentialDensity };

using Rgb = std::array<std::uint8_t, 3>;

struct RasterImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // RGB8, row-major, top row first
  Colormap colormap = Colormap::kCyclicPhase;

  Rgb at(std::size_t x, std::size_t y) const;
  void set(std::size_t x, std::size_t y, Rgb c);
};

// Hue wheel with full saturation and value; -pi and pi share a colour.
Rgb phase_color(double phase);
// Dark blue through green to yellow for v in [0, 1]; clamps outside.
Rgb density_color(double v);

enum class RenderKind { kDensity, kPhase };
RenderKind parse_render_kind(const std::string& name);  // throws Error(kInvalidArgument)

// One tile per component, tiled 2x2 in canonical spin-pair order. x' runs
// left to right, x bottom to top. Density tiles are |g| normalized to
// their own maximum; a zero tile renders in the minimum colour.
RasterImage render_field(const CoherenceField& field, RenderKind kind, std::size_t gap = 4);

std::vector<std::uint8_t> encode_ppm(const RasterImage& image);
bool png_available();
// Writes PNG for a .png path when libpng is present, otherwise PPM. Returns
// the path actually written.
std::filesystem::path write_image(const std::filesystem::path& path, const RasterImage& image);

}  // namespace csx
