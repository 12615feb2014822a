#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "octmesh/morton_key.hpp"
#include "octmesh/types.hpp"

// Store-independent algebra on Morton keys. Every function here is pure.
namespace octmesh::morton {

// Up to 2^3 keys or corners, sized by the dimension.
template <class T>
struct PerChild {
  std::array<T, 8> items{};
  int count = 0;

  const T* begin() const { return items.data(); }
  const T* end() const { return items.data() + count; }
  const T& operator[](int i) const { return items[static_cast<std::size_t>(i)]; }
  int size() const { return count; }
};

inline int bit_position(int dim, Level level, int axis) { return dim * (level - 1) + axis; }

inline bool axis_bit(const MortonKey& key, int dim, Level level, int axis) {
  return key.test(bit_position(dim, level, axis));
}

// Bisection encoding of p at `level`. Per axis and level the current interval
// is split at 0.5 * (hi + lo); p < mid takes the lower half (bit 0), anything
// else the upper half (bit 1). Throws PointOutsideDomain, LevelOutOfRange.
MortonKey encode_point(const Point& p, const DomainBox& domain, const MeshConfig& cfg, Level level);

// Batched encode_point. Uses the fastest kernel available on this CPU.
std::vector<MortonKey> encode_points(std::span<const Point> points, const DomainBox& domain,
                                     const MeshConfig& cfg, Level level);

MortonKey truncate_to_level(const MortonKey& key, int dim, Level level);

// Level of the finest non-zero group, 0 for the zero key. A lower bound only:
// trailing zero groups are indistinguishable from padding.
Level scan_level(const MortonKey& key, const MeshConfig& cfg);

MortonKey sibling_key(const MortonKey& key, const MeshConfig& cfg, Level level, int axis);

// Bit-flip level: the finest level above `level` whose axis bit differs
// from the bit at `level`. nullopt means no flip, i.e. a domain boundary.
std::optional<Level> flip_level(const MortonKey& key, const MeshConfig& cfg, Level level, int axis);

// Same-level face neighbor; nullopt when the face lies on the domain boundary.
std::optional<MortonKey> same_level_neighbor_key(const MortonKey& key, const MeshConfig& cfg,
                                                 Level level, FaceDirection dir);

bool is_boundary(const MortonKey& key, const MeshConfig& cfg, Level level, FaceDirection dir);

// l0 / 2^level per axis. Level 0 is the root box.
Point edge_length(const MeshConfig& cfg, Level level, const DomainBox& domain);

Point centroid(const MortonKey& key, const MeshConfig& cfg, Level level, const DomainBox& domain);

// 2^dim corners. Corner c takes the upper coordinate on axis k iff bit k of c
// is set (axis 0 varies fastest).
PerChild<Point> vertices(const MortonKey& key, const MeshConfig& cfg, Level level,
                         const DomainBox& domain);

// First dim*level bits as a big-endian unsigned integer. Throws Overflow when
// dim*level > target_width (target_width <= 64).
std::uint64_t to_integer(const MortonKey& key, int dim, Level level, int target_width = 64);

// Children in ascending key order; child i carries group value i at level+1.
// Throws MaxDepthExceeded when level == max_level.
PerChild<MortonKey> child_keys(const MortonKey& key, const MeshConfig& cfg, Level level);

}  // namespace octmesh::morton
