#include "bonefrag/ply.hpp"

#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

#include "bonefrag/csv.hpp"
#include "bonefrag/error.hpp"

namespace bonefrag {
namespace {

enum class Scalar { i8, u8, i16, u16, i32, u32, f32, f64 };

struct Property {
  std::string name;
  Scalar type = Scalar::f32;
  bool is_list = false;
  Scalar count_type = Scalar::u8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

struct Header {
  PlyFormat format = PlyFormat::ascii;
  std::vector<Element> elements;
  std::size_t body_offset = 0;
};

Scalar parse_scalar(std::string_view token, const std::string& where) {
  if (token == "char" || token == "int8") return Scalar::i8;
  if (token == "uchar" || token == "uint8") return Scalar::u8;
  if (token == "short" || token == "int16") return Scalar::i16;
  if (token == "ushort" || token == "uint16") return Scalar::u16;
  if (token == "int" || token == "int32") return Scalar::i32;
  if (token == "uint" || token == "uint32") return Scalar::u32;
  if (token == "float" || token == "float32") return Scalar::f32;
  if (token == "double" || token == "float64") return Scalar::f64;
  throw DataError(where + ": unknown PLY scalar type '" + std::string(token) + "'");
}

std::size_t scalar_size(Scalar s) {
  switch (s) {
    case Scalar::i8:
    case Scalar::u8:
      return 1;
    case Scalar::i16:
    case Scalar::u16:
      return 2;
    case Scalar::i32:
    case Scalar::u32:
    case Scalar::f32:
      return 4;
    case Scalar::f64:
      return 8;
  }
  return 0;
}

Header parse_header(const std::string& bytes, const std::string& source) {
  Header header;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool saw_magic = false;
  bool saw_format = false;
  auto next_line = [&]() -> std::string_view {
    const std::size_t end = bytes.find('\n', pos);
    if (end == std::string::npos) {
      throw DataError(source + ": malformed PLY header at byte " + std::to_string(pos) +
                      ": missing end_header");
    }
    std::string_view line(bytes.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };

  while (true) {
    const std::size_t line_start = pos;
    const std::string_view line = next_line();
    const std::string where = source + ": header byte " + std::to_string(line_start);
    std::istringstream tokens{std::string(line)};
    std::string keyword;
    tokens >> keyword;
    if (!saw_magic) {
      if (keyword != "ply") throw DataError(where + ": not a PLY file (missing 'ply' magic)");
      saw_magic = true;
      continue;
    }
    if (keyword.empty() || keyword == "comment" || keyword == "obj_info") continue;
    if (keyword == "format") {
      std::string fmt;
      std::string version;
      tokens >> fmt >> version;
      if (fmt == "ascii") {
        header.format = PlyFormat::ascii;
      } else if (fmt == "binary_little_endian") {
        header.format = PlyFormat::binary_little_endian;
      } else {
        throw DataError(where + ": unsupported PLY format '" + fmt + "'");
      }
      if (version != "1.0") throw DataError(where + ": unsupported PLY version '" + version + "'");
      saw_format = true;
    } else if (keyword == "element") {
      Element element;
      long long count = -1;
      tokens >> element.name >> count;
      if (element.name.empty() || !tokens || count < 0) {
        throw DataError(where + ": malformed element declaration");
      }
      element.count = static_cast<std::size_t>(count);
      header.elements.push_back(std::move(element));
    } else if (keyword == "property") {
      if (header.elements.empty()) throw DataError(where + ": property before any element");
      Property prop;
      std::string type;
      tokens >> type;
      if (type == "list") {
        std::string count_type;
        std::string item_type;
        tokens >> count_type >> item_type >> prop.name;
        prop.is_list = true;
        prop.count_type = parse_scalar(count_type, where);
        prop.type = parse_scalar(item_type, where);
      } else {
        prop.type = parse_scalar(type, where);
        tokens >> prop.name;
      }
      if (prop.name.empty()) throw DataError(where + ": property without a name");
      header.elements.back().properties.push_back(std::move(prop));
    } else if (keyword == "end_header") {
      break;
    } else {
      throw DataError(where + ": unexpected header keyword '" + keyword + "'");
    }
  }
  if (!saw_format) throw DataError(source + ": malformed PLY header: missing format line");
  header.body_offset = pos;
  return header;
}

// Uniform access to ASCII tokens and little-endian binary values.
class BodyReader {
 public:
  BodyReader(const std::string& bytes, std::size_t offset, PlyFormat format, std::string source)
      : bytes_(bytes), pos_(offset), format_(format), source_(std::move(source)) {}

  double read(Scalar type, const std::string& element, std::size_t index) {
    return format_ == PlyFormat::ascii ? read_ascii(element, index) : read_binary(type, element, index);
  }

  std::size_t offset() const { return pos_; }

 private:
  [[noreturn]] void fail(const std::string& element, std::size_t index, const std::string& what) const {
    throw DataError(source_ + ": " + what + " in element '" + element + "' #" + std::to_string(index) +
                    " at byte " + std::to_string(pos_));
  }

  double read_ascii(const std::string& element, std::size_t index) {
    while (pos_ < bytes_.size() && std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (pos_ >= bytes_.size()) fail(element, index, "unexpected end of data");
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    double value = 0.0;
    if (!csv::parse_double(std::string_view(bytes_).substr(start, pos_ - start), value)) {
      pos_ = start;
      fail(element, index, "unparseable number");
    }
    return value;
  }

  template <typename T>
  T load() {
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
      auto* raw = reinterpret_cast<unsigned char*>(&value);
      for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
    }
    pos_ += sizeof(T);
    return value;
  }

  double read_binary(Scalar type, const std::string& element, std::size_t index) {
    if (pos_ + scalar_size(type) > bytes_.size()) fail(element, index, "unexpected end of data");
    switch (type) {
      case Scalar::i8:
        return load<std::int8_t>();
      case Scalar::u8:
        return load<std::uint8_t>();
      case Scalar::i16:
        return load<std::int16_t>();
      case Scalar::u16:
        return load<std::uint16_t>();
      case Scalar::i32:
        return load<std::int32_t>();
      case Scalar::u32:
        return load<std::uint32_t>();
      case Scalar::f32:
        return load<float>();
      case Scalar::f64:
        return load<double>();
    }
    return 0.0;
  }

  const std::string& bytes_;
  std::size_t pos_;
  PlyFormat format_;
  std::string source_;
};

bool is_index_list(const Property& p) {
  return p.is_list && (p.name == "vertex_indices" || p.name == "vertex_index");
}

}  // namespace

TriangleMesh parse_ply(const std::string& bytes, std::string fragment_id, const std::string& source_name) {
  const Header header = parse_header(bytes, source_name);

  const Element* vertex_el = nullptr;
  const Element* face_el = nullptr;
  for (const auto& el : header.elements) {
    if (el.name == "vertex") vertex_el = &el;
    if (el.name == "face") face_el = &el;
  }
  if (vertex_el == nullptr) throw DataError(source_name + ": malformed PLY header: no 'vertex' element");
  if (face_el == nullptr) throw DataError(source_name + ": malformed PLY header: no 'face' element");
  int xyz[3] = {-1, -1, -1};
  for (std::size_t i = 0; i < vertex_el->properties.size(); ++i) {
    const auto& p = vertex_el->properties[i];
    if (p.is_list) continue;
    if (p.name == "x") xyz[0] = static_cast<int>(i);
    if (p.name == "y") xyz[1] = static_cast<int>(i);
    if (p.name == "z") xyz[2] = static_cast<int>(i);
  }
  if (xyz[0] < 0 || xyz[1] < 0 || xyz[2] < 0) {
    throw DataError(source_name + ": malformed PLY header: vertex element lacks x/y/z");
  }
  int index_prop = -1;
  for (std::size_t i = 0; i < face_el->properties.size(); ++i) {
    if (is_index_list(face_el->properties[i])) index_prop = static_cast<int>(i);
  }
  if (index_prop < 0) {
    throw DataError(source_name + ": malformed PLY header: face element lacks vertex_indices list");
  }

  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  vertices.reserve(vertex_el->count);
  faces.reserve(face_el->count);

  BodyReader reader(bytes, header.body_offset, header.format, source_name);
  for (const auto& el : header.elements) {
    for (std::size_t item = 0; item < el.count; ++item) {
      Vec3 point = Vec3::Zero();
      std::vector<long long> polygon;
      for (std::size_t pi = 0; pi < el.properties.size(); ++pi) {
        const auto& prop = el.properties[pi];
        if (prop.is_list) {
          const std::size_t at = reader.offset();
          const double count = reader.read(prop.count_type, el.name, item);
          if (count < 0 || count != static_cast<double>(static_cast<long long>(count))) {
            throw DataError(source_name + ": invalid list length in element '" + el.name + "' #" +
                            std::to_string(item) + " at byte " + std::to_string(at));
          }
          const bool keep = &el == face_el && static_cast<int>(pi) == index_prop;
          for (long long k = 0; k < static_cast<long long>(count); ++k) {
            const double v = reader.read(prop.type, el.name, item);
            if (keep) {
              if (v < 0 || v != static_cast<double>(static_cast<long long>(v))) {
                throw DataError(source_name + ": invalid vertex index in face #" + std::to_string(item) +
                                " at byte " + std::to_string(reader.offset()));
              }
              polygon.push_back(static_cast<long long>(v));
            }
          }
        } else {
          const double v = reader.read(prop.type, el.name, item);
          if (&el == vertex_el) {
            for (int c = 0; c < 3; ++c) {
              if (static_cast<int>(pi) == xyz[c]) point[c] = v;
            }
          }
        }
      }
      if (&el == vertex_el) {
        vertices.push_back(point);
      } else if (&el == face_el) {
        if (polygon.size() < 3) {
          throw DataError(source_name + ": non-triangulatable face #" + std::to_string(item) + " with " +
                          std::to_string(polygon.size()) + " vertices");
        }
        for (const auto idx : polygon) {
          if (idx >= static_cast<long long>(vertex_el->count)) {
            throw DataError(source_name + ": face #" + std::to_string(item) + " vertex index " +
                            std::to_string(idx) + " out of range (vertex count " +
                            std::to_string(vertex_el->count) + ")");
          }
        }
        for (std::size_t k = 1; k + 1 < polygon.size(); ++k) {
          faces.push_back({static_cast<std::uint32_t>(polygon[0]), static_cast<std::uint32_t>(polygon[k]),
                           static_cast<std::uint32_t>(polygon[k + 1])});
        }
      }
    }
  }
  try {
    return TriangleMesh(std::move(vertices), std::move(faces), std::move(fragment_id));
  } catch (const ContractViolation& e) {
    throw DataError(source_name + ": " + e.what());
  }
}

TriangleMesh load_mesh(const std::filesystem::path& path, std::string fragment_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open mesh file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_ply(buffer.str(), std::move(fragment_id), path.string());
}

namespace {

template <typename T>
void append_le(std::string& out, T value) {
  char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
  }
  out.append(raw, sizeof(T));
}

}  // namespace

std::string to_ply(const TriangleMesh& mesh, PlyFormat format) {
  std::string out = "ply\nformat ";
  out += format == PlyFormat::ascii ? "ascii" : "binary_little_endian";
  out += " 1.0\nelement vertex " + std::to_string(mesh.vertices().size()) +
         "\nproperty double x\nproperty double y\nproperty double z\nelement face " +
         std::to_string(mesh.faces().size()) + "\nproperty list uchar int vertex_indices\nend_header\n";
  if (format == PlyFormat::ascii) {
    for (const auto& v : mesh.vertices()) {
      out += csv::format_double(v.x()) + ' ' + csv::format_double(v.y()) + ' ' + csv::format_double(v.z()) + '\n';
    }
    for (const auto& f : mesh.faces()) {
      out += "3 " + std::to_string(f[0]) + ' ' + std::to_string(f[1]) + ' ' + std::to_string(f[2]) + '\n';
    }
  } else {
    for (const auto& v : mesh.vertices()) {
      for (int c = 0; c < 3; ++c) append_le<double>(out, v[c]);
    }
    for (const auto& f : mesh.faces()) {
      append_le<std::uint8_t>(out, 3);
      for (auto idx : f) append_le<std::int32_t>(out, static_cast<std::int32_t>(idx));
    }
  }
  return out;
}

void write_ply(const TriangleMesh& mesh, const std::filesystem::path& path, PlyFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write mesh file '" + path.string() + "'");
  out << to_ply(mesh, format);
}

}  // namespace bonefrag
