#include "csx/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "csx/errors.hpp"

namespace csx {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::size_t at, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out[at + b] = static_cast<std::uint8_t>(v >> (8 * b));
}

void put_f64(std::vector<std::uint8_t>& out, std::size_t at, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out[at + b] = static_cast<std::uint8_t>(bits >> (8 * b));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(in[at + b]) << (8 * b);
  return v;
}

double get_f64(const std::vector<std::uint8_t>& in, std::size_t at) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(in[at + b]) << (8 * b);
  return std::bit_cast<double>(v);
}

// Spacing whose upper() reproduces hi exactly, when one exists nearby.
Axis axis_from_range(double lo, double hi, std::uint32_t n, bool periodic) {
  Axis a;
  a.origin = lo;
  a.n = n;
  a.periodic = periodic;
  if (n == 1 && !periodic) return a;  // spacing unused
  const double span = periodic ? static_cast<double>(n) : static_cast<double>(n - 1);
  const double guess = (hi - lo) / span;
  for (double toward : {INFINITY, -INFINITY}) {
    a.spacing = guess;
    for (int k = 0; k < 4; ++k) {
      if (a.upper() == hi) return a;
      a.spacing = std::nextafter(a.spacing, toward);
    }
  }
  a.spacing = guess;
  return a;
}

}  // namespace

std::vector<std::uint8_t> encode_dump(const CoherenceField& field) {
  if (field.order != 0 && field.order != 1) {
    throw Error(ErrorKind::kInvalidArgument, "grid dumps hold p = 0 or p = 1 fields only");
  }
  const std::size_t rows = field.axis0.n, cols = field.axis1.n;
  std::uint8_t mask = 0;
  int last = -1;
  for (const auto& comp : field.components) {
    const int bit = field.order == 0 ? static_cast<int>(comp.at(0)) : SpinPair{comp.at(0), comp.at(1)}.index();
    if (bit <= last) throw Error(ErrorKind::kInvalidArgument, "dump components must be in canonical order");
    last = bit;
    mask |= static_cast<std::uint8_t>(1u << bit);
  }
  std::vector<std::uint8_t> out(kDumpHeaderBytes + field.values.size() * rows * cols * 16, 0);
  std::memcpy(out.data(), "CSGD", 4);
  out[4] = kDumpVersion;
  out[5] = static_cast<std::uint8_t>(field.order);
  out[6] = static_cast<std::uint8_t>(mask | (field.components.size() << 4));
  out[7] = static_cast<std::uint8_t>((field.axis0.periodic ? 1 : 0) | (field.axis1.periodic ? 2 : 0));
  put_u32(out, 8, static_cast<std::uint32_t>(rows));
  put_u32(out, 12, static_cast<std::uint32_t>(cols));
  put_f64(out, 16, field.axis0.origin);
  put_f64(out, 24, field.axis0.upper());
  put_f64(out, 32, field.axis1.origin);
  put_f64(out, 40, field.axis1.upper());
  const double t1 = field.times.at(0);
  put_f64(out, 48, t1);
  put_f64(out, 56, field.times.size() > 1 ? field.times[1] : t1);
  std::size_t at = kDumpHeaderBytes;
  for (const auto& arr : field.values) {
    for (const cd& z : arr.data()) {
      put_f64(out, at, z.real());
      put_f64(out, at + 8, z.imag());
      at += 16;
    }
  }
  return out;
}

CoherenceField decode_dump(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
  if (bytes.size() < kDumpHeaderBytes || std::memcmp(bytes.data(), "CSGD", 4) != 0) {
    throw IoError(origin + ": not a grid dump");
  }
  if (bytes[4] != kDumpVersion) throw IoError(origin + ": unsupported dump version");
  CoherenceField f;
  f.order = bytes[5];
  if (f.order > 1) throw IoError(origin + ": unsupported order");
  const std::uint8_t mask = bytes[6] & 0x0f;
  const std::size_t count = bytes[6] >> 4;
  const std::uint32_t rows = get_u32(bytes, 8), cols = get_u32(bytes, 12);
  if (rows < 1 || cols < 1) throw IoError(origin + ": empty grid");
  f.axis0 = axis_from_range(get_f64(bytes, 16), get_f64(bytes, 24), rows, bytes[7] & 1);
  f.axis1 = axis_from_range(get_f64(bytes, 32), get_f64(bytes, 40), cols, bytes[7] & 2);
  const double t1 = get_f64(bytes, 48), t2 = get_f64(bytes, 56);
  f.times = f.order == 0 ? std::vector<double>{t1} : std::vector<double>{t1, t2};
  for (int bit = 0; bit < 4; ++bit) {
    if (!(mask & (1u << bit))) continue;
    if (f.order == 0) {
      if (bit > 1) throw IoError(origin + ": bad component mask");
      f.components.push_back({static_cast<Spin>(bit)});
    } else {
      const SpinPair p = SpinPair::from_index(bit);
      f.components.push_back({p.first, p.second});
    }
  }
  if (f.components.size() != count) throw IoError(origin + ": component count disagrees with mask");
  const std::size_t expect = kDumpHeaderBytes + count * rows * cols * 16;
  if (bytes.size() != expect) {
    throw IoError(origin + ": expected " + std::to_string(expect) + " bytes, found " +
                  std::to_string(bytes.size()));
  }
  std::size_t at = kDumpHeaderBytes;
  for (std::size_t c = 0; c < count; ++c) {
    Array2D<cd> arr(rows, cols);
    for (cd& z : arr.data()) {
      z = {get_f64(bytes, at), get_f64(bytes, at + 8)};
      at += 16;
    }
    f.values.push_back(std::move(arr));
  }
  return f;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_dump(const std::filesystem::path& path, const CoherenceField& field) {
  const auto bytes = encode_dump(field);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

CoherenceField read_dump(const std::filesystem::path& path) {
  return decode_dump(read_bytes(path), path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("short write to " + path.string());
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
  std::ostringstream os;
  os << "# csx stack manifest: slice index t1 t2 file\n" << std::setprecision(17);
  for (const auto& e : entries) {
    os << "slice " << e.index << ' ' << e.t1 << ' ' << e.t2 << ' ' << e.file << '\n';
  }
  write_text(path, os.str());
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::vector<ManifestEntry> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ManifestEntry e;
    if (!(ls >> tag >> e.index >> e.t1 >> e.t2 >> e.file) || tag != "slice") {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": malformed manifest line");
    }
    out.push_back(e);
  }
  return out;
}

CoherenceStack load_stack(const std::filesystem::path& manifest) {
  const auto entries = read_manifest(manifest);
  const auto dir = manifest.parent_path();
  CoherenceStack stack;
  for (const auto& e : entries) stack.slices.push_back(read_dump(dir / e.file));
  if (stack.slices.size() >= 2) stack.dt = entries[1].t1 - entries[0].t1;
  return stack;
}

std::string winding_csv(const std::vector<WindingMap>& maps, const Axis& axis_x, const Axis& axis_xp) {
  std::ostringstream os;
  os << std::setprecision(17) << "i,j,x,x_prime,m,spin_pair\n";
  for (const auto& map : maps) {
    const std::string name = map.pair.name();
    for (std::size_t i = 0; i < map.charge.rows(); ++i) {
      for (std::size_t j = 0; j < map.charge.cols(); ++j) {
        const int m = map.charge(i, j);
        if (m == 0 || map.indeterminate(i, j)) continue;
        os << i << ',' << j << ',' << axis_x.coordinate(i) + 0.5 * axis_x.spacing << ','
           << axis_xp.coordinate(j) + 0.5 * axis_xp.spacing << ',' << m << ',' << name << '\n';
      }
    }
  }
  return os.str();
}

std::string cores_csv(const std::vector<WindingMap>& maps) {
  std::ostringstream os;
  os << std::setprecision(17) << "x,x_prime,m,spin_pair,confident\n";
  for (const auto& map : maps) {
    for (const auto& c : map.cores) {
      os << c.v << ',' << c.u << ',' << c.charge << ',' << map.pair.name() << ','
         << (c.confident ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

std::string defects_csv(const std::vector<DefectRecord>& defects, const std::vector<SpinPair>& pairs) {
  std::ostringstream os;
  os << std::setprecision(17) << "x,x_prime,radius_cells";
  for (const auto& p : pairs) os << ",m_" << p.name();
  os << ",w\n";
  for (const auto& d : defects) {
    os << d.x << ',' << d.x_prime << ',' << d.radius_cells;
    for (int m : d.winding) os << ',' << m;
    os << ",\"" << format_winding(d.winding) << "\"\n";
  }
  return os.str();
}

}  // namespace csx
