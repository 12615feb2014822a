#include "octmesh/geometry.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <utility>

namespace octmesh {
namespace {

constexpr std::size_t kHeaderBytes = 80;
constexpr std::size_t kRecordBytes = 50;

std::uint32_t read_u32_le(const std::byte* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

float read_f32_le(const std::byte* p) { return std::bit_cast<float>(read_u32_le(p)); }

void put_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f32_le(std::string& out, float f) { put_u32_le(out, std::bit_cast<std::uint32_t>(f)); }

std::vector<std::byte> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> bytes(raw.size());
  std::memcpy(bytes.data(), raw.data(), raw.size());
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorKind::IoError, "short write to " + path.string());
}

TriangleSoup parse_binary(std::span<const std::byte> bytes) {
  if (bytes.size() < kHeaderBytes + 4) {
    throw Error(ErrorKind::MalformedStl, "binary file shorter than its 84-byte header");
  }
  const std::uint32_t count = read_u32_le(bytes.data() + kHeaderBytes);
  const std::size_t expected = kHeaderBytes + 4 + kRecordBytes * std::size_t{count};
  if (bytes.size() < expected) {
    throw Error(ErrorKind::MalformedStl, "truncated record: header announces " + std::to_string(count) +
                                             " triangles, file has " + std::to_string(bytes.size()) +
                                             " bytes");
  }
  if (bytes.size() != expected) {
    throw Error(ErrorKind::MalformedStl, "count mismatch: " + std::to_string(bytes.size() - expected) +
                                             " trailing bytes after " + std::to_string(count) +
                                             " triangles");
  }
  if (count == 0) throw Error(ErrorKind::EmptyGeometry, "STL holds no triangles");

  TriangleSoup soup;
  std::string header(reinterpret_cast<const char*>(bytes.data()), kHeaderBytes);
  soup.name = header.substr(0, header.find('\0'));
  soup.triangles.resize(count);
  const std::byte* p = bytes.data() + kHeaderBytes + 4;
  for (auto& t : soup.triangles) {
    for (int i = 0; i < 3; ++i) t.normal[i] = read_f32_le(p + 4 * i);
    for (int v = 0; v < 3; ++v) {
      for (int i = 0; i < 3; ++i) t.v[v][i] = read_f32_le(p + 12 + 12 * v + 4 * i);
    }
    t.attribute = static_cast<std::uint16_t>(static_cast<unsigned>(p[48]) | static_cast<unsigned>(p[49]) << 8);
    p += kRecordBytes;
  }
  soup.update_bbox();
  return soup;
}

// Whitespace tokenizer over the ASCII body.
class Tokens {
 public:
  explicit Tokens(std::string_view text) : text_(text) {}

  std::string_view next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  std::string_view rest_of_line() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    std::string_view line = text_.substr(start, pos_ - start);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    return line;
  }

  void expect(std::string_view word) {
    const auto tok = next();
    if (tok != word) {
      throw Error(ErrorKind::MalformedStl,
                  "expected '" + std::string(word) + "', found '" + std::string(tok) + "'");
    }
  }

  float number() {
    const auto tok = next();
    float value = 0.0f;
    const auto* first = tok.data();
    const auto* last = tok.data() + tok.size();
    // from_chars rejects a leading '+'.
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (tok.empty() || ec != std::errc() || ptr != last) {
      throw Error(ErrorKind::MalformedStl, "bad number '" + std::string(tok) + "'");
    }
    return value;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

TriangleSoup parse_ascii(std::string_view text) {
  TriangleSoup soup;
  Tokens tok(text);
  tok.expect("solid");
  soup.name = std::string(tok.rest_of_line());
  for (;;) {
    const auto word = tok.next();
    if (word == "facet") {
      Triangle t;
      tok.expect("normal");
      for (int i = 0; i < 3; ++i) t.normal[i] = tok.number();
      tok.expect("outer");
      tok.expect("loop");
      for (int v = 0; v < 3; ++v) {
        tok.expect("vertex");
        for (int i = 0; i < 3; ++i) t.v[v][i] = tok.number();
      }
      tok.expect("endloop");
      tok.expect("endfacet");
      soup.triangles.push_back(t);
    } else if (word == "endsolid") {
      (void)tok.rest_of_line();
      const auto after = tok.next();
      if (after.empty()) break;
      // Several solids in one file are concatenated.
      if (after != "solid") {
        throw Error(ErrorKind::MalformedStl, "unexpected '" + std::string(after) + "' after endsolid");
      }
      (void)tok.rest_of_line();
    } else if (word.empty()) {
      throw Error(ErrorKind::MalformedStl, "missing endsolid");
    } else {
      throw Error(ErrorKind::MalformedStl, "unexpected token '" + std::string(word) + "'");
    }
  }
  if (soup.triangles.empty()) throw Error(ErrorKind::EmptyGeometry, "STL holds no triangles");
  soup.update_bbox();
  return soup;
}

void append_float(std::string& out, float f) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, f);
  out.append(buf, ptr);
}

std::array<double, 3> normalized(std::array<double, 3> v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

}  // namespace

Point Triangle::centroid() const {
  Point c{};
  for (std::size_t i = 0; i < 3; ++i) {
    c[i] = (static_cast<double>(v[0][i]) + static_cast<double>(v[1][i]) + static_cast<double>(v[2][i])) / 3.0;
  }
  return c;
}

void TriangleSoup::update_bbox() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  bbox_min = {inf, inf, inf};
  bbox_max = {-inf, -inf, -inf};
  for (const auto& t : triangles) {
    for (const auto& v : t.v) {
      for (std::size_t i = 0; i < 3; ++i) {
        bbox_min[i] = std::min(bbox_min[i], static_cast<double>(v[i]));
        bbox_max[i] = std::max(bbox_max[i], static_cast<double>(v[i]));
      }
    }
  }
}

TriangleSoup parse_stl(std::span<const std::byte> bytes) {
  const bool solid_prefix =
      bytes.size() >= 5 && std::memcmp(bytes.data(), "solid", 5) == 0;
  bool binary_size_matches = false;
  if (bytes.size() >= kHeaderBytes + 4) {
    const std::uint32_t count = read_u32_le(bytes.data() + kHeaderBytes);
    binary_size_matches = bytes.size() == kHeaderBytes + 4 + kRecordBytes * std::size_t{count};
  }
  if (solid_prefix && !binary_size_matches) {
    return parse_ascii(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }
  return parse_binary(bytes);
}

TriangleSoup load_stl(const std::filesystem::path& path) { return parse_stl(read_file(path)); }

void write_stl_binary(const TriangleSoup& soup, const std::filesystem::path& path) {
  std::string out;
  out.reserve(kHeaderBytes + 4 + kRecordBytes * soup.size());
  std::string header = soup.name.substr(0, kHeaderBytes);
  // A binary header starting with "solid" is legal; the size check on load
  // keeps it binary.
  header.resize(kHeaderBytes, '\0');
  out += header;
  put_u32_le(out, static_cast<std::uint32_t>(soup.size()));
  for (const auto& t : soup.triangles) {
    for (float f : t.normal) put_f32_le(out, f);
    for (const auto& v : t.v) {
      for (float f : v) put_f32_le(out, f);
    }
    out.push_back(static_cast<char>(t.attribute & 0xffu));
    out.push_back(static_cast<char>(t.attribute >> 8));
  }
  write_file(path, out);
}

void write_stl_ascii(const TriangleSoup& soup, const std::filesystem::path& path) {
  std::string out = "solid " + soup.name + "\n";
  for (const auto& t : soup.triangles) {
    out += "  facet normal ";
    for (int i = 0; i < 3; ++i) {
      if (i) out += ' ';
      append_float(out, t.normal[i]);
    }
    out += "\n    outer loop\n";
    for (const auto& v : t.v) {
      out += "      vertex ";
      for (int i = 0; i < 3; ++i) {
        if (i) out += ' ';
        append_float(out, v[i]);
      }
      out += '\n';
    }
    out += "    endloop\n  endfacet\n";
  }
  out += "endsolid " + soup.name + "\n";
  write_file(path, out);
}

std::vector<Point> parse_points_2d(std::string_view text) {
  std::vector<Point> points;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    Tokens tok(line);
    const auto xs = tok.next();
    if (xs.empty()) continue;
    const auto ys = tok.next();
    double xy[2];
    const std::string_view parts[2] = {xs, ys};
    for (int i = 0; i < 2; ++i) {
      const auto [ptr, ec] = std::from_chars(parts[i].data(), parts[i].data() + parts[i].size(), xy[i]);
      if (parts[i].empty() || ec != std::errc() || ptr != parts[i].data() + parts[i].size()) {
        throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected 'x y'");
      }
    }
    if (!tok.next().empty()) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": extra tokens");
    }
    points.push_back({xy[0], xy[1], 0.0});
  }
  if (points.empty()) throw Error(ErrorKind::EmptyGeometry, "point list is empty");
  return points;
}

std::vector<Point> load_points_2d(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_points_2d(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

TriangleSoup make_icosphere(int subdivisions, double radius, Point center) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<std::array<double, 3>> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
  };
  for (auto& v : verts) v = normalized(v);
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
      {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
  };
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoints;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      if (auto it = midpoints.find(key); it != midpoints.end()) return it->second;
      const auto& va = verts[static_cast<std::size_t>(a)];
      const auto& vb = verts[static_cast<std::size_t>(b)];
      verts.push_back(normalized({va[0] + vb[0], va[1] + vb[1], va[2] + vb[2]}));
      const int id = static_cast<int>(verts.size() - 1);
      midpoints.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = midpoint(f[0], f[1]);
      const int bc = midpoint(f[1], f[2]);
      const int ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  TriangleSoup soup;
  soup.name = "icosphere";
  soup.triangles.reserve(faces.size());
  for (const auto& f : faces) {
    Triangle tri;
    std::array<double, 3> sum{};
    for (int v = 0; v < 3; ++v) {
      const auto& p = verts[static_cast<std::size_t>(f[static_cast<std::size_t>(v)])];
      for (std::size_t i = 0; i < 3; ++i) {
        tri.v[static_cast<std::size_t>(v)][i] = static_cast<float>(center[i] + radius * p[i]);
        sum[i] += p[i];
      }
    }
    const auto n = normalized(sum);
    for (std::size_t i = 0; i < 3; ++i) tri.normal[i] = static_cast<float>(n[i]);
    soup.triangles.push_back(tri);
  }
  soup.update_bbox();
  return soup;
}

DomainBox fit_domain(std::span<const Point> points, int dim, double pad_factor) {
  if (points.empty()) throw Error(ErrorKind::EmptyGeometry, "no points to fit a domain around");
  if (!(pad_factor >= 1.0)) throw Error(ErrorKind::InvalidConfig, "padding factor must be >= 1");
  Point lo = points.front();
  Point hi = points.front();
  for (const auto& p : points) {
    for (std::size_t i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  }
  double extent = 0.0;
  for (int k = 0; k < dim; ++k) {
    extent = std::max(extent, hi[static_cast<std::size_t>(k)] - lo[static_cast<std::size_t>(k)]);
  }
  // A single point still needs a box.
  if (extent == 0.0) extent = 1.0;
  DomainBox box;
  for (int k = 0; k < 3; ++k) {
    const auto i = static_cast<std::size_t>(k);
    box.center[i] = k < dim ? 0.5 * (lo[i] + hi[i]) : 0.0;
    box.lengths[i] = k < dim ? pad_factor * extent : 1.0;
  }
  return box;
}

DomainBox fit_domain(const TriangleSoup& soup, double pad_factor) {
  if (soup.triangles.empty()) throw Error(ErrorKind::EmptyGeometry, "no triangles to fit a domain around");
  const Point corners[2] = {soup.bbox_min, soup.bbox_max};
  return fit_domain(corners, 3, pad_factor);
}

GeometryPoints parse_geometry_points(std::string_view text) {
  if (text == "centroids") return GeometryPoints::Centroids;
  if (text == "all") return GeometryPoints::All;
  throw Error(ErrorKind::ParseError, "unknown geometry point mode '" + std::string(text) + "'");
}

std::vector<Point> geometry_points(const TriangleSoup& soup, GeometryPoints mode) {
  std::vector<Point> pts;
  pts.reserve(soup.size() * (mode == GeometryPoints::All ? 4 : 1));
  for (const auto& t : soup.triangles) pts.push_back(t.centroid());
  if (mode == GeometryPoints::All) {
    for (const auto& t : soup.triangles) {
      for (const auto& v : t.v) pts.push_back({v[0], v[1], v[2]});
    }
  }
  return pts;
}

TagSets::TagSets(std::span<const MortonKey> fine_keys, int dim, Level max_level, std::size_t points_encoded)
    : dim_(dim),
      max_level_(max_level),
      points_encoded_(points_encoded),
      fullres_(fine_keys.begin(), fine_keys.end()),
      per_level_(static_cast<std::size_t>(max_level + 1)),
      built_(std::make_unique<std::once_flag[]>(static_cast<std::size_t>(max_level + 1))) {}

const KeySet& TagSets::level_set(Level level) const {
  if (level < 0 || level > max_level_) {
    throw Error(ErrorKind::LevelOutOfRange, "tag level " + std::to_string(level));
  }
  const auto i = static_cast<std::size_t>(level);
  if (level == max_level_) return fullres_;
  std::call_once(built_[i], [&] {
    KeySet& set = per_level_[i];
    set.reserve(fullres_.size());
    for (const auto& k : fullres_) set.insert(morton::truncate_to_level(k, dim_, level));
  });
  return per_level_[i];
}

TagSets encode_geometry(std::span<const Point> points, const DomainBox& domain, const MeshConfig& cfg) {
  const auto keys = morton::encode_points(points, domain, cfg, cfg.max_level);
  return TagSets(keys, cfg.dim, cfg.max_level, points.size());
}

TagSets encode_geometry(const TriangleSoup& soup, const DomainBox& domain, const MeshConfig& cfg,
                        GeometryPoints mode) {
  const auto pts = geometry_points(soup, mode);
  return encode_geometry(pts, domain, cfg);
}

VoxelIndex voxelize(const TriangleSoup& soup, const DomainBox& domain, const MeshConfig& cfg,
                    Level voxel_level) {
  if (voxel_level < 1 || voxel_level > cfg.max_level) {
    throw Error(ErrorKind::LevelOutOfRange, "voxel level " + std::to_string(voxel_level));
  }
  const auto pts = geometry_points(soup, GeometryPoints::Centroids);
  const auto keys = morton::encode_points(pts, domain, cfg, voxel_level);
  VoxelIndex index;
  index.dim = cfg.dim;
  index.voxel_level = voxel_level;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    index.voxels[keys[i]].push_back(static_cast<std::uint32_t>(i));
  }
  return index;
}

std::vector<std::uint32_t> query_voxel(const VoxelIndex& index, const MortonKey& key, Level level) {
  std::vector<std::uint32_t> out;
  if (level >= index.voxel_level) {
    const auto it = index.voxels.find(morton::truncate_to_level(key, index.dim, index.voxel_level));
    if (it != index.voxels.end()) out = it->second;
    return out;
  }
  const MortonKey prefix = morton::truncate_to_level(key, index.dim, level);
  for (const auto& [voxel, tris] : index.voxels) {
    if (morton::truncate_to_level(voxel, index.dim, level) == prefix) {
      out.insert(out.end(), tris.begin(), tris.end());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace octmesh
