#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "octmesh/morton.hpp"

namespace octmesh {

using Vec3f = std::array<float, 3>;

// One STL facet, stored at file precision.
struct Triangle {
  Vec3f normal{};
  std::array<Vec3f, 3> v{};
  std::uint16_t attribute = 0;

  Point centroid() const;
  friend bool operator==(const Triangle&, const Triangle&) = default;
};

struct TriangleSoup {
  std::vector<Triangle> triangles;
  Point bbox_min{};
  Point bbox_max{};
  std::string name;  // ASCII solid name or binary header text

  void update_bbox();
  std::size_t size() const { return triangles.size(); }
};

// Binary (80-byte header, LE uint32 count, 50-byte records) or ASCII STL.
// A file is ASCII iff it starts with "solid" and its size is not
// 84 + 50 * count. Throws MalformedStl, EmptyGeometry, IoError.
TriangleSoup load_stl(const std::filesystem::path& path);
TriangleSoup parse_stl(std::span<const std::byte> bytes);

void write_stl_binary(const TriangleSoup& soup, const std::filesystem::path& path);
void write_stl_ascii(const TriangleSoup& soup, const std::filesystem::path& path);

// Plain-text 2D point list: one "x y" per line, '#' starts a comment.
std::vector<Point> load_points_2d(const std::filesystem::path& path);
std::vector<Point> parse_points_2d(std::string_view text);

// Closed icosahedron subdivided `subdivisions` times (20 * 4^s triangles),
// vertices projected onto the sphere.
TriangleSoup make_icosphere(int subdivisions, double radius = 1.0, Point center = {0.0, 0.0, 0.0});

// Cube centred on the bounding box with edge pad_factor * largest extent.
// Throws EmptyGeometry, InvalidConfig (pad_factor < 1).
DomainBox fit_domain(const TriangleSoup& soup, double pad_factor = 1.5);
DomainBox fit_domain(std::span<const Point> points, int dim, double pad_factor = 1.5);

enum class GeometryPoints { Centroids, All };
GeometryPoints parse_geometry_points(std::string_view text);

// Points that drive refinement: centroids, or centroids followed by the three
// vertices of each triangle.
std::vector<Point> geometry_points(const TriangleSoup& soup, GeometryPoints mode);

using KeySet = std::unordered_set<MortonKey, MortonKeyHash>;

// Geometry points encoded once at the finest level. Tag sets for coarser
// levels are truncations of those keys, built on first use.
class TagSets {
 public:
  TagSets(std::span<const MortonKey> fine_keys, int dim, Level max_level, std::size_t points_encoded);

  const KeySet& fullres() const { return fullres_; }
  // Keys of every level-`level` element holding at least one point.
  const KeySet& level_set(Level level) const;
  // `key` must be the element's own key (bits past `level` zero).
  bool is_tagged(const MortonKey& key, Level level) const { return level_set(level).count(key) != 0; }

  int dim() const { return dim_; }
  Level max_level() const { return max_level_; }
  std::size_t points_encoded() const { return points_encoded_; }

 private:
  int dim_;
  Level max_level_;
  std::size_t points_encoded_;
  KeySet fullres_;
  mutable std::vector<KeySet> per_level_;
  mutable std::unique_ptr<std::once_flag[]> built_;
};

// Throws PointOutsideDomain.
TagSets encode_geometry(std::span<const Point> points, const DomainBox& domain, const MeshConfig& cfg);
TagSets encode_geometry(const TriangleSoup& soup, const DomainBox& domain, const MeshConfig& cfg,
                        GeometryPoints mode = GeometryPoints::Centroids);

inline bool is_tagged(const TagSets& tags, const MortonKey& key, Level level) {
  return tags.is_tagged(key, level);
}

// Coarse, unbalanced voxel index: level-V voxel key -> triangles whose
// centroid it holds. Empty voxels are not stored.
struct VoxelIndex {
  int dim = 3;
  Level voxel_level = 1;
  std::unordered_map<MortonKey, std::vector<std::uint32_t>, MortonKeyHash> voxels;
};

// Throws LevelOutOfRange (voxel_level outside [1, max_level]), PointOutsideDomain.
VoxelIndex voxelize(const TriangleSoup& soup, const DomainBox& domain, const MeshConfig& cfg,
                    Level voxel_level);

// Triangles of the voxels covering element (key, level), ascending.
std::vector<std::uint32_t> query_voxel(const VoxelIndex& index, const MortonKey& key, Level level);

}  // namespace octmesh
