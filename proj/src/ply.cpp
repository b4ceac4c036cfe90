#include "shm/ply.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <optional>
#include <sstream>
#include <vector>

#include "shm/io.hpp"

namespace shm {
namespace {

static_assert(std::endian::native == std::endian::little, "binary PLY I/O assumes a little-endian host");

enum class ScalarType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<ScalarType> parse_scalar_type(std::string_view s) {
  if (s == "char" || s == "int8") return ScalarType::Int8;
  if (s == "uchar" || s == "uint8") return ScalarType::UInt8;
  if (s == "short" || s == "int16") return ScalarType::Int16;
  if (s == "ushort" || s == "uint16") return ScalarType::UInt16;
  if (s == "int" || s == "int32") return ScalarType::Int32;
  if (s == "uint" || s == "uint32") return ScalarType::UInt32;
  if (s == "float" || s == "float32") return ScalarType::Float32;
  if (s == "double" || s == "float64") return ScalarType::Float64;
  return std::nullopt;
}

std::size_t size_of(ScalarType t) {
  switch (t) {
    case ScalarType::Int8:
    case ScalarType::UInt8: return 1;
    case ScalarType::Int16:
    case ScalarType::UInt16: return 2;
    case ScalarType::Int32:
    case ScalarType::UInt32:
    case ScalarType::Float32: return 4;
    case ScalarType::Float64: return 8;
  }
  return 0;
}

bool is_integral(ScalarType t) { return t != ScalarType::Float32 && t != ScalarType::Float64; }

struct Property {
  std::string name;
  ScalarType type;
  std::optional<ScalarType> list_count;  // set for `property list`
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

struct Header {
  PlyEncoding encoding = PlyEncoding::Ascii;
  std::vector<Element> elements;
  std::string name;
  std::size_t body_offset = 0;
};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::MalformedHeader, "PLY header: " + what); }

Header parse_header(std::string_view bytes) {
  Header h;
  std::size_t pos = 0;
  auto next_line = [&]() -> std::optional<std::string_view> {
    if (pos >= bytes.size()) return std::nullopt;
    std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) return std::nullopt;
    std::string_view line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };

  auto first = next_line();
  if (!first || *first != "ply") malformed("missing 'ply' magic");

  bool have_format = false;
  bool ended = false;
  while (auto line = next_line()) {
    auto tok = split_ws(*line);
    if (tok.empty()) continue;
    if (tok[0] == "comment" || tok[0] == "obj_info") {
      if (tok.size() >= 3 && tok[0] == "comment" && tok[1] == "name") {
        std::string_view rest = *line;
        rest.remove_prefix(rest.find("name") + 4);
        while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
        h.name = std::string(rest);
      }
      continue;
    }
    if (tok[0] == "format") {
      if (have_format || tok.size() != 3) malformed("bad format line");
      if (tok[2] != "1.0") malformed("unsupported PLY version");
      if (tok[1] == "ascii") h.encoding = PlyEncoding::Ascii;
      else if (tok[1] == "binary_little_endian") h.encoding = PlyEncoding::BinaryLittleEndian;
      else if (tok[1] == "binary_big_endian") throw Error(Errc::UnsupportedEncoding, "big-endian PLY is not supported");
      else malformed("unknown format");
      have_format = true;
      continue;
    }
    if (tok[0] == "element") {
      if (tok.size() != 3) malformed("bad element line");
      if (tok[1] != "vertex" && tok[1] != "face") malformed("unsupported element '" + std::string(tok[1]) + "'");
      for (const auto& e : h.elements)
        if (e.name == tok[1]) malformed("duplicate element");
      std::size_t count = 0;
      auto [p, ec] = std::from_chars(tok[2].data(), tok[2].data() + tok[2].size(), count);
      if (ec != std::errc{} || p != tok[2].data() + tok[2].size()) malformed("bad element count");
      h.elements.push_back({std::string(tok[1]), count, {}});
      continue;
    }
    if (tok[0] == "property") {
      if (h.elements.empty()) malformed("property before element");
      Element& e = h.elements.back();
      Property prop;
      if (tok.size() == 5 && tok[1] == "list") {
        auto ct = parse_scalar_type(tok[2]);
        auto it = parse_scalar_type(tok[3]);
        if (!ct || !it || !is_integral(*ct)) malformed("bad list property");
        prop = {std::string(tok[4]), *it, ct};
      } else if (tok.size() == 3) {
        auto t = parse_scalar_type(tok[1]);
        if (!t) malformed("unknown property type '" + std::string(tok[1]) + "'");
        prop = {std::string(tok[2]), *t, std::nullopt};
      } else {
        malformed("bad property line");
      }
      if (e.name == "vertex") {
        const bool coord = prop.name == "x" || prop.name == "y" || prop.name == "z";
        const bool color = prop.name == "red" || prop.name == "green" || prop.name == "blue";
        if (prop.list_count) malformed("list property on vertex");
        if (coord && prop.type != ScalarType::Float32 && prop.type != ScalarType::Float64)
          malformed("coordinate property must be float32 or float64");
        if (color && prop.type != ScalarType::UInt8) malformed("color property must be uint8");
        if (!coord && !color) malformed("unsupported vertex property '" + prop.name + "'");
      }
      for (const auto& other : e.properties)
        if (other.name == prop.name) malformed("duplicate property '" + prop.name + "'");
      e.properties.push_back(std::move(prop));
      continue;
    }
    if (tok[0] == "end_header") {
      ended = true;
      break;
    }
    malformed("unexpected line '" + std::string(*line) + "'");
  }
  if (!ended) malformed("missing end_header");
  if (!have_format) malformed("missing format line");

  const Element* vertex = nullptr;
  for (const auto& e : h.elements)
    if (e.name == "vertex") vertex = &e;
  if (!vertex) malformed("missing vertex element");

  auto has = [&](std::string_view n) {
    for (const auto& p : vertex->properties)
      if (p.name == n) return true;
    return false;
  };
  if (!has("x") || !has("y") || !has("z"))
    throw Error(Errc::MissingCoordinateProperty, "vertex element lacks x, y or z");
  const int colors = has("red") + has("green") + has("blue");
  if (colors != 0 && colors != 3) malformed("partial color properties");

  h.body_offset = pos;
  return h;
}

// Maps vertex property name to a slot: 0..2 coordinates, 3..5 colors.
int slot_of(const std::string& name) {
  static constexpr std::array<std::string_view, 6> names{"x", "y", "z", "red", "green", "blue"};
  for (int i = 0; i < 6; ++i)
    if (names[static_cast<std::size_t>(i)] == name) return i;
  return -1;
}

template <typename T>
T read_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

double read_scalar(const char* p, ScalarType t) {
  switch (t) {
    case ScalarType::Int8: return read_le<std::int8_t>(p);
    case ScalarType::UInt8: return read_le<std::uint8_t>(p);
    case ScalarType::Int16: return read_le<std::int16_t>(p);
    case ScalarType::UInt16: return read_le<std::uint16_t>(p);
    case ScalarType::Int32: return read_le<std::int32_t>(p);
    case ScalarType::UInt32: return read_le<std::uint32_t>(p);
    case ScalarType::Float32: return read_le<float>(p);
    case ScalarType::Float64: return read_le<double>(p);
  }
  return 0.0;
}

[[noreturn]] void truncated(const std::string& what) { throw Error(Errc::TruncatedBody, "PLY body: " + what); }

void check_finite(const PointCloud& pc) {
  if (!pc.points.allFinite()) truncated("non-finite coordinate");
}

PointCloud read_binary(std::string_view body, const Header& h, PointCloud pc) {
  std::size_t pos = 0;
  for (const auto& e : h.elements) {
    if (e.name == "vertex") {
      std::size_t stride = 0;
      for (const auto& p : e.properties) stride += size_of(p.type);
      if (e.count > 0 && (body.size() - pos) / stride < e.count)
        truncated("expected " + std::to_string(e.count) + " vertices");
      for (std::size_t i = 0; i < e.count; ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        for (const auto& p : e.properties) {
          const int slot = slot_of(p.name);
          const char* at = body.data() + pos;
          if (slot < 3) pc.points(slot, col) = read_scalar(at, p.type);
          else (*pc.colors)(slot - 3, col) = static_cast<std::uint8_t>(*at);
          pos += size_of(p.type);
        }
      }
    } else {
      for (std::size_t i = 0; i < e.count; ++i) {
        for (const auto& p : e.properties) {
          if (p.list_count) {
            const std::size_t cs = size_of(*p.list_count);
            if (body.size() - pos < cs) truncated("face list count");
            const double n = read_scalar(body.data() + pos, *p.list_count);
            if (n < 0) truncated("negative list count");
            pos += cs;
            const std::size_t bytes = static_cast<std::size_t>(n) * size_of(p.type);
            if (body.size() - pos < bytes) truncated("face list items");
            pos += bytes;
          } else {
            if (body.size() - pos < size_of(p.type)) truncated("face property");
            pos += size_of(p.type);
          }
        }
      }
    }
  }
  check_finite(pc);
  return pc;
}

PointCloud read_ascii(std::string_view body, const Header& h, PointCloud pc) {
  std::size_t pos = 0;
  auto next_tokens = [&]() -> std::optional<std::vector<std::string_view>> {
    while (pos < body.size()) {
      std::size_t nl = body.find('\n', pos);
      if (nl == std::string_view::npos) nl = body.size();
      auto tok = split_ws(body.substr(pos, nl - pos));
      pos = nl + 1;
      if (!tok.empty()) return tok;
    }
    return std::nullopt;
  };

  for (const auto& e : h.elements) {
    for (std::size_t i = 0; i < e.count; ++i) {
      auto tok = next_tokens();
      if (!tok) truncated("expected " + std::to_string(e.count) + " " + e.name + " lines, got " + std::to_string(i));
      if (e.name != "vertex") continue;
      if (tok->size() < e.properties.size()) truncated("short vertex line");
      const auto col = static_cast<Eigen::Index>(i);
      for (std::size_t k = 0; k < e.properties.size(); ++k) {
        const auto& p = e.properties[k];
        const std::string_view t = (*tok)[k];
        const int slot = slot_of(p.name);
        if (slot < 3) {
          double v = 0.0;
          auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
          if (ec != std::errc{} || end != t.data() + t.size()) truncated("bad coordinate '" + std::string(t) + "'");
          if (p.type == ScalarType::Float32) v = static_cast<float>(v);
          pc.points(slot, col) = v;
        } else {
          unsigned v = 0;
          auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
          if (ec != std::errc{} || end != t.data() + t.size() || v > 255) truncated("bad color '" + std::string(t) + "'");
          (*pc.colors)(slot - 3, col) = static_cast<std::uint8_t>(v);
        }
      }
    }
  }
  check_finite(pc);
  return pc;
}

}  // namespace

PointCloud load_ply(std::string_view bytes) {
  const Header h = parse_header(bytes);
  const Element* vertex = nullptr;
  for (const auto& e : h.elements)
    if (e.name == "vertex") vertex = &e;

  PointCloud pc;
  pc.name = h.name;
  pc.precision = CoordinatePrecision::Float32;
  bool has_color = false;
  for (const auto& p : vertex->properties) {
    if (slot_of(p.name) < 3 && p.type == ScalarType::Float64) pc.precision = CoordinatePrecision::Float64;
    if (slot_of(p.name) >= 3) has_color = true;
  }
  const auto n = static_cast<Eigen::Index>(vertex->count);
  // Guard against absurd counts before allocating.
  const std::size_t body_size = bytes.size() - h.body_offset;
  if (h.encoding == PlyEncoding::BinaryLittleEndian) {
    std::size_t stride = 0;
    for (const auto& p : vertex->properties) stride += size_of(p.type);
    if (vertex->count > body_size / stride) truncated("expected " + std::to_string(vertex->count) + " vertices");
  } else if (vertex->count > body_size) {
    truncated("expected " + std::to_string(vertex->count) + " vertices");
  }
  pc.points.resize(3, n);
  if (has_color) pc.colors = Colors3u8(3, n);

  const std::string_view body = bytes.substr(h.body_offset);
  if (h.encoding == PlyEncoding::BinaryLittleEndian) return read_binary(body, h, std::move(pc));
  return read_ascii(body, h, std::move(pc));
}

std::string save_ply(const PointCloud& pc, PlyEncoding encoding) {
  validate(pc);
  const bool f32 = pc.precision == CoordinatePrecision::Float32;
  std::ostringstream out;
  out << "ply\n"
      << "format " << (encoding == PlyEncoding::Ascii ? "ascii" : "binary_little_endian") << " 1.0\n";
  if (!pc.name.empty() && pc.name.find('\n') == std::string::npos) out << "comment name " << pc.name << "\n";
  out << "element vertex " << pc.size() << "\n";
  for (const char* axis : {"x", "y", "z"}) out << "property " << (f32 ? "float" : "double") << " " << axis << "\n";
  if (pc.colors) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "end_header\n";

  std::string s = std::move(out).str();
  if (encoding == PlyEncoding::BinaryLittleEndian) {
    const std::size_t stride = (f32 ? 12 : 24) + (pc.colors ? 3 : 0);
    const std::size_t header_size = s.size();
    s.resize(header_size + stride * static_cast<std::size_t>(pc.size()));
    char* p = s.data() + header_size;
    for (Eigen::Index i = 0; i < pc.size(); ++i) {
      for (int a = 0; a < 3; ++a) {
        if (f32) {
          const auto v = static_cast<float>(pc.points(a, i));
          std::memcpy(p, &v, 4);
          p += 4;
        } else {
          const double v = pc.points(a, i);
          std::memcpy(p, &v, 8);
          p += 8;
        }
      }
      if (pc.colors)
        for (int c = 0; c < 3; ++c) *p++ = static_cast<char>((*pc.colors)(c, i));
    }
    return s;
  }

  std::string body;
  char buf[64];
  for (Eigen::Index i = 0; i < pc.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      if (a) body += ' ';
      auto [end, ec] = f32 ? std::to_chars(buf, buf + sizeof buf, static_cast<float>(pc.points(a, i)))
                           : std::to_chars(buf, buf + sizeof buf, pc.points(a, i));
      body.append(buf, end);
    }
    if (pc.colors)
      for (int c = 0; c < 3; ++c) body += ' ' + std::to_string(static_cast<unsigned>((*pc.colors)(c, i)));
    body += '\n';
  }
  return s + body;
}

PointCloud read_ply_file(const std::filesystem::path& path) {
  PointCloud pc = load_ply(read_file(path));
  if (pc.name.empty()) pc.name = path.stem().string();
  return pc;
}

void write_ply_file(const std::filesystem::path& path, const PointCloud& pc, PlyEncoding encoding) {
  write_file(path, save_ply(pc, encoding));
}

}  // namespace shm
