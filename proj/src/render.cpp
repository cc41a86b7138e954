#include "csx/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#ifdef CSX_HAVE_PNG
#include <png.h>
#endif

#include "csx/errors.hpp"

namespace csx {

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

// Viridis samples at quarter steps.
constexpr std::array<std::array<double, 3>, 5> kViridis{{
    {0.267, 0.005, 0.329},
    {0.231, 0.322, 0.545},
    {0.129, 0.569, 0.549},
    {0.369, 0.788, 0.384},
    {0.993, 0.906, 0.144},
}};

}  // namespace

Rgb RasterImage::at(std::size_t x, std::size_t y) const {
  const std::size_t k = 3 * (y * width + x);
  return {pixels[k], pixels[k + 1], pixels[k + 2]};
}

void RasterImage::set(std::size_t x, std::size_t y, Rgb c) {
  const std::size_t k = 3 * (y * width + x);
  pixels[k] = c[0];
  pixels[k + 1] = c[1];
  pixels[k + 2] = c[2];
}

Rgb phase_color(double phase) {
  double h = std::fmod((phase + std::numbers::pi) / (2.0 * std::numbers::pi), 1.0) * 6.0;
  if (h < 0.0) h += 6.0;
  if (h >= 6.0) h = 0.0;
  const int sector = static_cast<int>(h);
  const double f = h - sector;
  double r = 0, g = 0, b = 0;
  switch (sector) {
    case 0: r = 1; g = f; break;
    case 1: r = 1 - f; g = 1; break;
    case 2: g = 1; b = f; break;
    case 3: g = 1 - f; b = 1; break;
    case 4: r = f; b = 1; break;
    default: r = 1; b = 1 - f; break;
  }
  return {to_byte(r), to_byte(g), to_byte(b)};
}

Rgb density_color(double v) {
  if (!(v > 0.0)) v = 0.0;
  v = std::min(v, 1.0) * 4.0;
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(v), 3);
  const double f = v - static_cast<double>(i);
  Rgb out{};
  for (int c = 0; c < 3; ++c) out[c] = to_byte(kViridis[i][c] * (1 - f) + kViridis[i + 1][c] * f);
  return out;
}

RenderKind parse_render_kind(const std::string& name) {
  if (name == "density") return RenderKind::kDensity;
  if (name == "phase") return RenderKind::kPhase;
  throw Error(ErrorKind::kInvalidArgument, "unknown render kind '" + name + "' (density|phase)");
}

RasterImage render_field(const CoherenceField& field, RenderKind kind, std::size_t gap) {
  const std::size_t rows = field.axis0.n, cols = field.axis1.n;
  const std::size_t tiles = field.values.size();
  const std::size_t across = tiles > 1 ? 2 : 1;
  const std::size_t down = (tiles + across - 1) / across;
  RasterImage img;
  img.colormap = kind == RenderKind::kPhase ? Colormap::kCyclicPhase : Colormap::kSequentialDensity;
  img.width = across * cols + (across - 1) * gap;
  img.height = down * rows + (down - 1) * gap;
  img.pixels.assign(img.width * img.height * 3, 255);
  for (std::size_t k = 0; k < tiles; ++k) {
    const auto& a = field.values[k];
    const std::size_t x0 = (k % across) * (cols + gap);
    const std::size_t y0 = (k / across) * (rows + gap);
    double peak = 0.0;
    for (const cd& z : a.data()) peak = std::max(peak, std::abs(z));
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t y = y0 + (rows - 1 - r);
      for (std::size_t c = 0; c < cols; ++c) {
        const cd z = a(r, c);
        const Rgb col = kind == RenderKind::kPhase
                            ? phase_color(std::arg(z))
                            : density_color(peak > 0.0 ? std::abs(z) / peak : 0.0);
        img.set(x0 + c, y, col);
      }
    }
  }
  return img;
}

std::vector<std::uint8_t> encode_ppm(const RasterImage& image) {
  const std::string head =
      "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(head.begin(), head.end());
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

bool png_available() {
#ifdef CSX_HAVE_PNG
  return true;
#else
  return false;
#endif
}

std::filesystem::path write_image(const std::filesystem::path& path, const RasterImage& image) {
#ifdef CSX_HAVE_PNG
  if (path.extension() == ".png") {
    FILE* fp = std::fopen(path.string().c_str(), "wb");
    if (!fp) throw IoError("cannot write " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info || setjmp(png_jmpbuf(png))) {
      png_destroy_write_struct(&png, &info);
      std::fclose(fp);
      throw IoError("libpng failed writing " + path.string());
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t y = 0; y < image.height; ++y) {
      png_write_row(png, const_cast<png_bytep>(image.pixels.data() + 3 * y * image.width));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fclose(fp) != 0) throw IoError("short write to " + path.string());
    return path;
  }
#endif
  std::filesystem::path target = path;
  if (target.extension() != ".ppm") target.replace_extension(".ppm");
  const auto bytes = encode_ppm(image);
  std::ofstream out(target, std::ios::binary);
  if (!out) throw IoError("cannot write " + target.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + target.string());
  return target;
}

}  // namespace csx
