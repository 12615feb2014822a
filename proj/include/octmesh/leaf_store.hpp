#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "octmesh/morton_key.hpp"
#include "octmesh/types.hpp"

namespace octmesh {

// Leaf container keyed by padded Morton bits. The ordered backend is a
// red-black tree (std::map) and iterates in Z-order; the hashed backend is a
// hash table with unspecified iteration order.
template <class Payload>
class LeafStore {
 public:
  using OrderedMap = std::map<MortonKey, Payload, MortonKeyLess>;
  using HashedMap = std::unordered_map<MortonKey, Payload, MortonKeyHash>;

  explicit LeafStore(Backend backend) : backend_(backend) {}

  Backend backend() const { return backend_; }

  // False if the key was already present (payload left untouched).
  bool insert(const MortonKey& key, Payload payload) {
    if (ordered()) return ordered_.emplace(key, std::move(payload)).second;
    return hashed_.emplace(key, std::move(payload)).second;
  }

  bool remove(const MortonKey& key) {
    return ordered() ? ordered_.erase(key) != 0 : hashed_.erase(key) != 0;
  }

  bool contains(const MortonKey& key) const {
    return ordered() ? ordered_.find(key) != ordered_.end() : hashed_.find(key) != hashed_.end();
  }

  const Payload* lookup(const MortonKey& key) const {
    if (ordered()) {
      auto it = ordered_.find(key);
      return it == ordered_.end() ? nullptr : &it->second;
    }
    auto it = hashed_.find(key);
    return it == hashed_.end() ? nullptr : &it->second;
  }
  Payload* lookup(const MortonKey& key) {
    return const_cast<Payload*>(std::as_const(*this).lookup(key));
  }

  std::size_t size() const { return ordered() ? ordered_.size() : hashed_.size(); }
  bool empty() const { return size() == 0; }

  // No-op for the ordered backend.
  void reserve(std::size_t n) {
    if (!ordered()) hashed_.reserve(n);
  }

  void clear() {
    ordered_.clear();
    hashed_.clear();
  }

  // Visits (key, payload) in backend order.
  template <class F>
  void for_each(F&& fn) const {
    if (ordered()) {
      for (const auto& [k, v] : ordered_) fn(k, v);
    } else {
      for (const auto& [k, v] : hashed_) fn(k, v);
    }
  }

  // Ordered backend only; throws UnsupportedBackend otherwise.
  const OrderedMap& ordered_map() const {
    if (!ordered()) {
      throw Error(ErrorKind::UnsupportedBackend, "hashed store has no in-order iteration");
    }
    return ordered_;
  }

  std::vector<MortonKey> keys() const {
    std::vector<MortonKey> out;
    out.reserve(size());
    for_each([&](const MortonKey& k, const Payload&) { out.push_back(k); });
    return out;
  }

  std::vector<MortonKey> sorted_keys() const {
    auto out = keys();
    if (!ordered()) std::sort(out.begin(), out.end(), MortonKeyLess{});
    return out;
  }

 private:
  bool ordered() const { return backend_ == Backend::Ordered; }

  Backend backend_;
  OrderedMap ordered_;
  HashedMap hashed_;
};

}  // namespace octmesh
