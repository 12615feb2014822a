#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "octmesh/leaf_store.hpp"
#include "octmesh/morton.hpp"

namespace octmesh {

struct EmptyPayload {
  friend bool operator==(const EmptyPayload&, const EmptyPayload&) = default;
};

struct LeafRef {
  MortonKey key;
  Level level = 0;
  friend bool operator==(const LeafRef&, const LeafRef&) = default;
};

struct NeighborResult {
  enum class Kind { Boundary, Coarser, Same, Finer };

  Kind kind = Kind::Boundary;
  // Coarser / Same: the neighbor leaf.
  LeafRef leaf;
  // Finer: the 2^(dim-1) leaves at level + 1 sharing the face.
  morton::PerChild<MortonKey> finer;
};

std::string_view to_string(NeighborResult::Kind kind);

// Linear octree over a single root box. Leaves are stored by their padded key
// bits only; levels are recovered on demand with infer_level().
template <class Payload = EmptyPayload>
class Octree {
 public:
  // Fills children[0..2^dim) from the parent payload.
  using SplitFn = std::function<void(const Payload& parent, std::span<Payload> children)>;
  // Called once with the 2^dim child payloads in child order.
  using MergeFn = std::function<Payload(std::span<const Payload> children)>;

  // The root refined once: 2^dim level-1 leaves with default payloads.
  Octree(const MeshConfig& cfg, const DomainBox& domain, Backend backend,
         std::size_t expected_leaves = 0)
      : cfg_(cfg), domain_(domain), store_(backend) {
    cfg_.validate();
    domain_.validate(cfg_.dim);
    const std::size_t n = static_cast<std::size_t>(cfg_.children_per_node());
    store_.reserve(n * std::max(expected_leaves, n));
    for (const auto& child : morton::child_keys(MortonKey{}, cfg_, 0)) store_.insert(child, Payload{});
  }

  const MeshConfig& config() const { return cfg_; }
  const DomainBox& domain() const { return domain_; }
  Backend backend() const { return store_.backend(); }
  const LeafStore<Payload>& store() const { return store_; }
  // Direct store access bypasses every tree invariant.
  LeafStore<Payload>& mutable_store() { return store_; }
  std::size_t size() const { return store_.size(); }

  // Exact level of a stored key. Probes flipped-axis-0 siblings above the
  // scanned lower bound: a probe at level L is stored iff L <= true level, so
  // the scan stops at the first miss. Throws KeyNotFound.
  Level infer_level(const MortonKey& key) const {
    if (!store_.contains(key)) {
      throw Error(ErrorKind::KeyNotFound, "key " + format_key(key, cfg_.dim, cfg_.max_level) +
                                              " is not stored");
    }
    return infer_level_unchecked(key);
  }

  void refine_leaf(const MortonKey& key, Level level, const SplitFn& split = {}) {
    if (level >= cfg_.max_level) {
      throw Error(ErrorKind::MaxDepthExceeded,
                  "leaf already at max level " + std::to_string(cfg_.max_level));
    }
    require_leaf(key, level);
    const auto children = morton::child_keys(key, cfg_, level);
    const int n = children.size();
    std::array<Payload, 8> payloads{};
    Payload* parent = store_.lookup(key);
    if (split) {
      split(*parent, std::span<Payload>(payloads.data(), static_cast<std::size_t>(n)));
    } else {
      std::fill_n(payloads.begin(), n, *parent);
    }
    // Child 0 shares the parent's padded bits.
    *parent = std::move(payloads[0]);
    for (int c = 1; c < n; ++c) store_.insert(children[c], std::move(payloads[static_cast<std::size_t>(c)]));
  }

  void coarsen_family(const MortonKey& parent, Level parent_level, const MergeFn& merge = {}) {
    if (parent_level < 1 || parent_level >= cfg_.max_level) {
      throw Error(ErrorKind::LevelOutOfRange, "parent level " + std::to_string(parent_level));
    }
    const auto children = morton::child_keys(parent, cfg_, parent_level);
    const Level child_level = parent_level + 1;
    for (const auto& child : children) {
      if (!store_.contains(child) || infer_level_unchecked(child) != child_level) {
        throw Error(ErrorKind::ChildrenNotLeaves,
                    "child " + format_key(child, cfg_.dim, child_level) + " is not a leaf");
      }
    }
    // The parent's outer faces are exactly the children's outward faces.
    for (int c = 0; c < children.size(); ++c) {
      for (int k = 0; k < cfg_.dim; ++k) {
        const bool upper = (c >> (cfg_.dim - 1 - k)) & 1;
        const FaceDirection out{k, upper ? Sign::Plus : Sign::Minus};
        if (resolve(children[c], child_level, out, false).kind == NeighborResult::Kind::Finer) {
          throw Error(ErrorKind::WouldViolateBalance,
                      "neighbor of " + format_key(parent, cfg_.dim, parent_level) +
                          " is two levels finer");
        }
      }
    }
    std::array<Payload, 8> payloads{};
    for (int c = 0; c < children.size(); ++c) payloads[static_cast<std::size_t>(c)] = *store_.lookup(children[c]);
    Payload merged = merge ? merge(std::span<const Payload>(payloads.data(), static_cast<std::size_t>(children.size())))
                           : Payload{};
    for (int c = 1; c < children.size(); ++c) store_.remove(children[c]);
    *store_.lookup(children[0]) = std::move(merged);
  }

  // Face neighbor of a leaf in a 2:1 balanced tree: Boundary, Same, Coarser by
  // one level, or the 2^(dim-1) leaves one level finer.
  // Throws UnbalancedTree or InconsistentPartition when the tree breaks those
  // assumptions.
  NeighborResult resolve_neighbor(const MortonKey& key, Level level, FaceDirection dir) const {
    return resolve(key, level, dir, true);
  }

  // Leaf whose half-open box holds p; nullopt outside the domain.
  std::optional<LeafRef> locate_leaf(const Point& p) const {
    for (int k = 0; k < cfg_.dim; ++k) {
      const auto i = static_cast<std::size_t>(k);
      if (!(p[i] >= domain_.lower(k) && p[i] <= domain_.upper(k))) return std::nullopt;
    }
    const MortonKey fine = morton::encode_point(p, domain_, cfg_, cfg_.max_level);
    for (Level l = 1; l <= cfg_.max_level; ++l) {
      const MortonKey probe = morton::truncate_to_level(fine, cfg_.dim, l);
      if (store_.contains(probe) && infer_level_unchecked(probe) == l) return LeafRef{probe, l};
    }
    return std::nullopt;
  }

  // All leaves with their levels, in store order.
  std::vector<LeafRef> leaves() const {
    std::vector<LeafRef> out;
    out.reserve(store_.size());
    store_.for_each([&](const MortonKey& k, const Payload&) { out.push_back({k, infer_level_unchecked(k)}); });
    return out;
  }

  // Internal form of resolve_neighbor. With verify_finer unset, a Finer result
  // is reported without checking that the facing children are leaves (enough
  // for the neighbor-level comparison in balance closure).
  NeighborResult resolve(const MortonKey& key, Level level, FaceDirection dir, bool verify_finer) const {
    NeighborResult result;
    const auto same = morton::same_level_neighbor_key(key, cfg_, level, dir);
    if (!same) return result;

    if (store_.contains(*same)) {
      const Level found = infer_level_unchecked(*same);
      if (found == level) {
        result.kind = NeighborResult::Kind::Same;
        result.leaf = {*same, level};
        return result;
      }
      // Deeper than level + 1 only says the neighbor's zero-corner child is
      // refined; that child faces the query just for positive directions.
      if (found > level) {
        result.kind = NeighborResult::Kind::Finer;
        result.finer = facing_children(*same, level, dir);
        if (verify_finer) {
          for (const auto& child : result.finer) {
            if (!store_.contains(child) || infer_level_unchecked(child) != level + 1) {
              throw Error(ErrorKind::UnbalancedTree,
                          "neighbor of " + format_key(key, cfg_.dim, level) + " is refined past level " +
                              std::to_string(level + 1));
            }
          }
        }
        return result;
      }
      if (found == level - 1) {
        result.kind = NeighborResult::Kind::Coarser;
        result.leaf = {*same, level - 1};
        return result;
      }
      throw Error(ErrorKind::UnbalancedTree,
                  "neighbor of " + format_key(key, cfg_.dim, level) + " is at level " +
                      std::to_string(found) + ", leaf is at " + std::to_string(level));
    }

    // Coarser neighbor: eliminate the finest group. Anything coarser breaks 2:1.
    for (Level l = level - 1; l >= 1; --l) {
      const MortonKey probe = morton::truncate_to_level(*same, cfg_.dim, l);
      if (store_.contains(probe) && infer_level_unchecked(probe) == l) {
        if (l != level - 1) {
          throw Error(ErrorKind::UnbalancedTree,
                      "neighbor of " + format_key(key, cfg_.dim, level) + " is at level " +
                          std::to_string(l));
        }
        result.kind = NeighborResult::Kind::Coarser;
        result.leaf = {probe, l};
        return result;
      }
    }
    throw Error(ErrorKind::InconsistentPartition,
                "no leaf covers the neighbor of " + format_key(key, cfg_.dim, level));
  }

 private:
  Level infer_level_unchecked(const MortonKey& key) const {
    const Level lower = morton::scan_level(key, cfg_);
    Level level = std::max(lower, 1);
    for (Level l = lower + 1; l <= cfg_.max_level; ++l) {
      MortonKey probe = key;
      probe.flip(morton::bit_position(cfg_.dim, l, 0));
      if (!store_.contains(probe)) break;
      level = l;
    }
    return level;
  }

  void require_leaf(const MortonKey& key, Level level) const {
    if (level < 1 || !key.zero_from(cfg_.dim * level) || !store_.contains(key) ||
        infer_level_unchecked(key) != level) {
      throw Error(ErrorKind::NotALeaf,
                  format_key(key, cfg_.dim, std::max(level, 1)) + " at level " + std::to_string(level) +
                      " is not a leaf");
    }
  }

  // Children of the same-level neighbor whose face points back at the query.
  morton::PerChild<MortonKey> facing_children(const MortonKey& neighbor, Level level,
                                              FaceDirection dir) const {
    const auto all = morton::child_keys(neighbor, cfg_, level);
    const bool want = !dir.positive();
    morton::PerChild<MortonKey> out;
    for (const auto& child : all) {
      if (morton::axis_bit(child, cfg_.dim, level + 1, dir.axis) == want) {
        out.items[static_cast<std::size_t>(out.count++)] = child;
      }
    }
    return out;
  }

  MeshConfig cfg_;
  DomainBox domain_;
  LeafStore<Payload> store_;
};

// Membership policies for the refinement list: a hash set (the list of the
// balance algorithm) or a linear scan over the list itself.
class HashedMembership {
 public:
  bool contains(const MortonKey& key, std::span<const LeafRef>) const { return set_.count(key) != 0; }
  void add(const MortonKey& key) { set_.insert(key); }
  void reserve(std::size_t n) { set_.reserve(n); }
  std::size_t size() const { return set_.size(); }

 private:
  std::unordered_set<MortonKey, MortonKeyHash> set_;
};

class LinearScanMembership {
 public:
  bool contains(const MortonKey& key, std::span<const LeafRef> order) const {
    return std::any_of(order.begin(), order.end(), [&](const LeafRef& e) { return e.key == key; });
  }
  void add(const MortonKey&) {}
  void reserve(std::size_t) {}
};

// Insertion-ordered list of leaves to refine, without duplicates.
template <class Membership>
class BasicRefineQueue {
 public:
  BasicRefineQueue() = default;
  BasicRefineQueue(std::initializer_list<LeafRef> entries) {
    for (const auto& e : entries) push(e.key, e.level);
  }

  bool push(const MortonKey& key, Level level) {
    if (members_.contains(key, order_)) return false;
    members_.add(key);
    order_.push_back({key, level});
    return true;
  }
  bool contains(const MortonKey& key) const { return members_.contains(key, order_); }

  void reserve(std::size_t n) {
    order_.reserve(n);
    members_.reserve(n);
  }

  const std::vector<LeafRef>& entries() const { return order_; }
  std::size_t size() const { return order_.size(); }
  bool empty() const { return order_.empty(); }
  const LeafRef& operator[](std::size_t i) const { return order_[i]; }
  auto begin() const { return order_.begin(); }
  auto end() const { return order_.end(); }

  const Membership& membership() const { return members_; }

 private:
  std::vector<LeafRef> order_;
  Membership members_;
};

using RefineQueue = BasicRefineQueue<HashedMembership>;
using LinearScanQueue = BasicRefineQueue<LinearScanMembership>;

// 2:1 balanced refinement-list generation. Sweeps the newly appended segment
// of the list; every face neighbor coarser than the element being examined is
// appended once. Stops when a sweep adds nothing.
template <class Payload, class Membership>
BasicRefineQueue<Membership> balance_closure(const Octree<Payload>& tree, BasicRefineQueue<Membership> queue) {
  const int faces = tree.config().faces_per_node();
  std::size_t begin = 0;
  std::size_t end = queue.size();
  bool added = true;
  while (added) {
    added = false;
    for (std::size_t i = begin; i < end; ++i) {
      const LeafRef current = queue[i];
      for (int f = 0; f < faces; ++f) {
        const auto nb = tree.resolve(current.key, current.level, face_direction(f), false);
        if (nb.kind != NeighborResult::Kind::Coarser) continue;
        if (queue.push(nb.leaf.key, nb.leaf.level)) added = true;
      }
    }
    begin = end;
    end = queue.size();
  }
  return queue;
}

// Refines every listed leaf once. The list should come from balance_closure.
template <class Payload, class Membership>
void apply_refinement(Octree<Payload>& tree, const BasicRefineQueue<Membership>& queue,
                      const typename Octree<Payload>::SplitFn& split = {}) {
  for (const auto& e : queue) tree.refine_leaf(e.key, e.level, split);
}

// Every leaf/face pair differs by at most one level. Checked twice: through
// resolve_neighbor, and by locating the leaves just across each face at the
// centres of its 2^(dim-1) sub-faces.
template <class Payload>
bool validate_balance(const Octree<Payload>& tree) {
  const MeshConfig& cfg = tree.config();
  const DomainBox& domain = tree.domain();
  const auto all = tree.leaves();
  const int sub_faces = 1 << (cfg.dim - 1);
  for (const auto& leaf : all) {
    const Point c = morton::centroid(leaf.key, cfg, leaf.level, domain);
    const Point len = morton::edge_length(cfg, leaf.level, domain);
    for (int f = 0; f < cfg.faces_per_node(); ++f) {
      const FaceDirection dir = face_direction(f);
      try {
        (void)tree.resolve_neighbor(leaf.key, leaf.level, dir);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::UnbalancedTree || e.kind() == ErrorKind::InconsistentPartition) {
          return false;
        }
        throw;
      }
      const auto a = static_cast<std::size_t>(dir.axis);
      const double eps = 0.25 * domain.lengths[a] * std::ldexp(1.0, -cfg.max_level);
      for (int s = 0; s < sub_faces; ++s) {
        Point probe = c;
        probe[a] += (dir.positive() ? 1.0 : -1.0) * (0.5 * len[a] + eps);
        int t = 0;
        for (int k = 0; k < cfg.dim; ++k) {
          if (k == dir.axis) continue;
          const auto i = static_cast<std::size_t>(k);
          probe[i] += ((s >> t++) & 1 ? 0.25 : -0.25) * len[i];
        }
        const auto hit = tree.locate_leaf(probe);
        if (!hit) continue;
        if (std::abs(hit->level - leaf.level) > 1) return false;
      }
    }
  }
  return true;
}

// Leaf boxes tile the domain: volumes sum to the domain volume and, in key
// order, no leaf lies inside its predecessor (Z-order intervals disjoint).
template <class Payload>
bool validate_partition(const Octree<Payload>& tree) {
  const MeshConfig& cfg = tree.config();
  std::vector<LeafRef> sorted = tree.leaves();
  std::sort(sorted.begin(), sorted.end(),
            [](const LeafRef& a, const LeafRef& b) { return compare_keys(a.key, b.key) < 0; });
  const int pad_from = cfg.dim * cfg.max_level;
  double volume = 0.0;
  const double domain_volume = tree.domain().volume(cfg.dim);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& leaf = sorted[i];
    if (!leaf.key.zero_from(pad_from) || !leaf.key.zero_from(cfg.dim * leaf.level)) return false;
    volume += domain_volume * std::ldexp(1.0, -cfg.dim * leaf.level);
    if (i > 0) {
      const auto& prev = sorted[i - 1];
      if (morton::truncate_to_level(leaf.key, cfg.dim, prev.level) == prev.key) return false;
    }
  }
  return std::abs(volume - domain_volume) <= 1e-9 * domain_volume;
}

template <class Payload>
struct ZOrderEntry {
  MortonKey key;
  Level level = 0;
  const Payload* payload = nullptr;
};

// In-order walk of the ordered backend. Throws UnsupportedBackend for hashed
// stores; use sorted_leaves() there.
template <class Payload>
std::vector<ZOrderEntry<Payload>> iterate_zorder(const Octree<Payload>& tree) {
  const auto& map = tree.store().ordered_map();
  std::vector<ZOrderEntry<Payload>> out;
  out.reserve(map.size());
  for (const auto& [key, payload] : map) out.push_back({key, tree.infer_level(key), &payload});
  return out;
}

// Z-order listing for any backend, sorting explicitly when needed.
template <class Payload>
std::vector<ZOrderEntry<Payload>> sorted_leaves(const Octree<Payload>& tree) {
  if (tree.backend() == Backend::Ordered) return iterate_zorder(tree);
  std::vector<ZOrderEntry<Payload>> out;
  out.reserve(tree.size());
  tree.store().for_each([&](const MortonKey& k, const Payload& p) { out.push_back({k, 0, &p}); });
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return compare_keys(a.key, b.key) < 0; });
  for (auto& e : out) e.level = tree.infer_level(e.key);
  return out;
}

using Mesh = Octree<EmptyPayload>;

}  // namespace octmesh
