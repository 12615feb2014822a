#pragma once

// Test-only oracles. Nothing here goes through the library's neighbor,
// level-inference or balance code: leaves are rebuilt as integer boxes and
// levels come from gaps between consecutive Z-order keys.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "octmesh/octree.hpp"

namespace oracle {

using octmesh::Level;
using octmesh::MortonKey;

using Coords = std::array<std::int64_t, 3>;

// Integer anchor (lower corner) of a key at max_level resolution.
inline Coords anchor_of(const MortonKey& key, int dim, Level max_level) {
  Coords c{0, 0, 0};
  for (Level j = 1; j <= max_level; ++j) {
    for (int k = 0; k < dim; ++k) {
      c[static_cast<std::size_t>(k)] = 2 * c[static_cast<std::size_t>(k)] + (key.test(dim * (j - 1) + k) ? 1 : 0);
    }
  }
  return c;
}

inline MortonKey key_of(const Coords& anchor, Level level, int dim, Level max_level) {
  MortonKey key;
  for (Level j = 1; j <= level; ++j) {
    for (int k = 0; k < dim; ++k) {
      if ((anchor[static_cast<std::size_t>(k)] >> (max_level - j)) & 1) key.set(dim * (j - 1) + k);
    }
  }
  return key;
}

// 256-bit a - b (mod 2^256) on big-endian word arrays.
inline std::array<std::uint64_t, 4> sub256(const std::array<std::uint64_t, 4>& a,
                                           const std::array<std::uint64_t, 4>& b) {
  std::array<std::uint64_t, 4> r{};
  std::uint64_t borrow = 0;
  for (int i = 3; i >= 0; --i) {
    const auto ai = a[static_cast<std::size_t>(i)];
    const auto bi = b[static_cast<std::size_t>(i)];
    const std::uint64_t d = ai - bi - borrow;
    borrow = (ai < bi) || (ai - bi < borrow) ? 1 : 0;
    r[static_cast<std::size_t>(i)] = d;
  }
  return r;
}

// Levels of a tiling leaf set from Z-order gaps: a level-L leaf spans
// 2^(dim*(maxL-L)) finest cells on the curve, i.e. 2^(256 - dim*L) in raw
// 256-bit key units. Throws if a gap is not such a power.
inline std::vector<Level> levels_from_gaps(const std::vector<MortonKey>& sorted, int dim) {
  std::vector<Level> levels(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const std::array<std::uint64_t, 4> next = i + 1 < sorted.size() ? sorted[i + 1].words()
                                                                     : std::array<std::uint64_t, 4>{};
    const auto gap = sub256(next, sorted[i].words());
    int set_bits = 0;
    int exponent = -1;
    for (int w = 0; w < 4; ++w) {
      const auto word = gap[static_cast<std::size_t>(w)];
      set_bits += std::popcount(word);
      if (word) exponent = 64 * (3 - w) + std::countr_zero(word);
    }
    if (set_bits == 0 && i + 1 == sorted.size() && sorted[i].is_zero()) exponent = 256;
    if (set_bits > 1 || exponent < 0 || (256 - exponent) % dim != 0) {
      throw std::runtime_error("leaf keys do not tile the Z-order curve");
    }
    levels[i] = (256 - exponent) / dim;
  }
  return levels;
}

struct Leaf {
  MortonKey key;
  Level level;
  Coords anchor;
};

// Leaf set rebuilt as integer boxes at max_level resolution (max_level <= 60).
class ShadowMesh {
 public:
  template <class Payload>
  explicit ShadowMesh(const octmesh::Octree<Payload>& tree)
      : dim_(tree.config().dim), max_level_(tree.config().max_level) {
    auto keys = tree.store().keys();
    std::sort(keys.begin(), keys.end(), octmesh::MortonKeyLess{});
    const auto levels = levels_from_gaps(keys, dim_);
    leaves_.reserve(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
      leaves_.push_back({keys[i], levels[i], anchor_of(keys[i], dim_, max_level_)});
      index_.emplace(box_id(leaves_.back().anchor, levels[i]), i);
      by_key_.emplace(keys[i], i);
    }
  }

  int dim() const { return dim_; }
  Level max_level() const { return max_level_; }
  const std::vector<Leaf>& leaves() const { return leaves_; }
  std::int64_t cells_per_axis() const { return std::int64_t{1} << max_level_; }
  std::int64_t size_at(Level level) const { return std::int64_t{1} << (max_level_ - level); }

  std::optional<std::size_t> find(const MortonKey& key) const {
    auto it = by_key_.find(key);
    if (it == by_key_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::size_t> leaf_box(const Coords& anchor, Level level) const {
    auto it = index_.find(box_id(anchor, level));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Leaf holding finest cell q.
  std::optional<std::size_t> locate(const Coords& q) const {
    for (int k = 0; k < dim_; ++k) {
      const auto v = q[static_cast<std::size_t>(k)];
      if (v < 0 || v >= cells_per_axis()) return std::nullopt;
    }
    for (Level l = 1; l <= max_level_; ++l) {
      Coords a = q;
      for (int k = 0; k < dim_; ++k) a[static_cast<std::size_t>(k)] &= ~(size_at(l) - 1);
      if (auto hit = leaf_box(a, l)) return hit;
    }
    return std::nullopt;
  }

  // Every leaf sharing a face (positive measure) with leaf i in direction dir.
  std::vector<std::size_t> face_neighbors(std::size_t i, octmesh::FaceDirection dir) const {
    const Leaf& leaf = leaves_[i];
    const auto s = size_at(leaf.level);
    Coords region = leaf.anchor;
    const auto ax = static_cast<std::size_t>(dir.axis);
    region[ax] += dir.positive() ? s : -s;
    if (region[ax] < 0 || region[ax] >= cells_per_axis()) return {};
    std::vector<std::size_t> out;
    collect(region, leaf.level, dir, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  // Leaves inside the box (anchor, level) that touch its face looking back
  // against dir, or the one coarser leaf covering it.
  void collect(const Coords& anchor, Level level, octmesh::FaceDirection dir, std::vector<std::size_t>& out) const {
    if (auto hit = leaf_box(anchor, level)) {
      out.push_back(*hit);
      return;
    }
    if (level == max_level_ || !has_descendant(anchor, level)) {
      if (auto hit = locate(anchor)) out.push_back(*hit);
      return;
    }
    const auto half = size_at(level + 1);
    const auto ax = static_cast<std::size_t>(dir.axis);
    for (int c = 0; c < (1 << dim_); ++c) {
      Coords child = anchor;
      for (int k = 0; k < dim_; ++k) {
        if ((c >> k) & 1) child[static_cast<std::size_t>(k)] += half;
      }
      const bool upper = child[ax] != anchor[ax];
      // Facing children sit on the side the query comes from.
      if (upper == dir.positive()) continue;
      collect(child, level + 1, dir, out);
    }
  }

  // Some leaf strictly inside box (anchor, level)?
  bool has_descendant(const Coords& anchor, Level level) const {
    auto hit = locate(anchor);
    return hit && leaves_[*hit].level > level;
  }

  using BoxId = std::array<std::int64_t, 4>;
  struct BoxHash {
    std::size_t operator()(const BoxId& b) const {
      std::uint64_t h = 0xcbf29ce484222325ull;
      for (auto v : b) h = (h ^ static_cast<std::uint64_t>(v)) * 0x100000001b3ull;
      return static_cast<std::size_t>(h);
    }
  };

  static BoxId box_id(const Coords& a, Level level) { return {a[0], a[1], a[2], level}; }

  int dim_;
  Level max_level_;
  std::vector<Leaf> leaves_;
  std::unordered_map<BoxId, std::size_t, BoxHash> index_;
  std::unordered_map<MortonKey, std::size_t, octmesh::MortonKeyHash> by_key_;
};

// Least fixpoint of "leaf X must be refined if a face neighbor in the set is
// finer than X", by rescanning every leaf until nothing changes.
inline std::set<MortonKey> closure_fixpoint(const ShadowMesh& mesh, const std::vector<MortonKey>& seed) {
  std::set<MortonKey> in(seed.begin(), seed.end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < mesh.leaves().size(); ++i) {
      const auto& x = mesh.leaves()[i];
      if (in.count(x.key)) continue;
      bool needed = false;
      for (int f = 0; f < 2 * mesh.dim() && !needed; ++f) {
        for (auto j : mesh.face_neighbors(i, octmesh::face_direction(f))) {
          const auto& y = mesh.leaves()[j];
          if (y.level > x.level && in.count(y.key)) {
            needed = true;
            break;
          }
        }
      }
      if (needed) {
        in.insert(x.key);
        changed = true;
      }
    }
  }
  return in;
}

// Every face-adjacent leaf pair differs by at most one level.
inline bool balanced(const ShadowMesh& mesh) {
  for (std::size_t i = 0; i < mesh.leaves().size(); ++i) {
    for (int f = 0; f < 2 * mesh.dim(); ++f) {
      for (auto j : mesh.face_neighbors(i, octmesh::face_direction(f))) {
        if (std::abs(mesh.leaves()[i].level - mesh.leaves()[j].level) > 1) return false;
      }
    }
  }
  return true;
}

inline std::vector<octmesh::Point> random_points(std::mt19937_64& rng, std::size_t n, int dim,
                                                 const octmesh::DomainBox& box) {
  std::vector<octmesh::Point> pts(n);
  for (auto& p : pts) {
    for (int k = 0; k < dim; ++k) {
      std::uniform_real_distribution<double> u(box.lower(k), box.upper(k));
      p[static_cast<std::size_t>(k)] = u(rng);
    }
  }
  return pts;
}

}  // namespace oracle
