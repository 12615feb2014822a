#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "octmesh/types.hpp"

namespace octmesh {

// Fixed-capacity bit string. Logical position 0 is the leftmost (most
// significant) bit; position p lives in word p / 64 at bit 63 - p % 64, so
// comparing words in order is the lexicographic order of the bit string.
//
// Position dim * j + k holds the axis-k bit of level j + 1. The root (level 0)
// has no bits.
class MortonKey {
 public:
  static constexpr int kWords = kMaxKeyBits / 64;

  constexpr MortonKey() = default;

  constexpr bool test(int pos) const {
    return (words_[static_cast<std::size_t>(pos >> 6)] >> (63 - (pos & 63))) & 1u;
  }
  constexpr void set(int pos, bool value = true) {
    const std::uint64_t mask = std::uint64_t{1} << (63 - (pos & 63));
    auto& w = words_[static_cast<std::size_t>(pos >> 6)];
    w = value ? (w | mask) : (w & ~mask);
  }
  constexpr void flip(int pos) {
    words_[static_cast<std::size_t>(pos >> 6)] ^= std::uint64_t{1} << (63 - (pos & 63));
  }

  // Zero every position >= pos.
  constexpr void clear_from(int pos) {
    for (int w = 0; w < kWords; ++w) {
      const int first = w * 64;
      if (pos <= first) {
        words_[static_cast<std::size_t>(w)] = 0;
      } else if (pos < first + 64) {
        const int keep = pos - first;
        words_[static_cast<std::size_t>(w)] &= ~std::uint64_t{0} << (64 - keep);
      }
    }
  }

  // True when no bit at a position >= pos is set.
  constexpr bool zero_from(int pos) const {
    MortonKey cut = *this;
    cut.clear_from(pos);
    return cut == *this;
  }

  constexpr bool is_zero() const {
    for (auto w : words_) {
      if (w != 0) return false;
    }
    return true;
  }

  constexpr const std::array<std::uint64_t, kWords>& words() const { return words_; }
  constexpr std::array<std::uint64_t, kWords>& words() { return words_; }

  // The d-bit group of `level` (1-based), axis 0 in the most significant bit.
  constexpr unsigned group(int dim, Level level) const {
    unsigned g = 0;
    const int base = dim * (level - 1);
    for (int k = 0; k < dim; ++k) g = (g << 1) | (test(base + k) ? 1u : 0u);
    return g;
  }
  constexpr void set_group(int dim, Level level, unsigned value) {
    const int base = dim * (level - 1);
    for (int k = 0; k < dim; ++k) set(base + k, (value >> (dim - 1 - k)) & 1u);
  }

  friend constexpr bool operator==(const MortonKey&, const MortonKey&) = default;
  friend constexpr std::strong_ordering operator<=>(const MortonKey& a, const MortonKey& b) {
    return a.words_ <=> b.words_;
  }

 private:
  std::array<std::uint64_t, kWords> words_{};
};

// Word-wise xor scan; first differing word decides.
inline std::strong_ordering compare_keys(const MortonKey& a, const MortonKey& b) {
  const auto& wa = a.words();
  const auto& wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    if (wa[i] ^ wb[i]) return wa[i] < wb[i] ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

struct MortonKeyLess {
  bool operator()(const MortonKey& a, const MortonKey& b) const { return compare_keys(a, b) < 0; }
};

struct MortonKeyHash {
  std::size_t operator()(const MortonKey& key) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (auto w : key.words()) {
      std::uint64_t z = w + h;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      h = z ^ (z >> 31);
    }
    return static_cast<std::size_t>(h);
  }
};

// "001,000,101": `levels` comma-separated groups of `dim` bits, coarsest first.
std::string format_key(const MortonKey& key, int dim, Level levels);

// Inverse of format_key. Whitespace is not accepted; groups must have exactly
// `dim` digits. Throws ParseError, or InvalidConfig if the key needs more
// than kMaxKeyBits.
MortonKey parse_key(std::string_view text, int dim);

// Number of groups in a key string (without parsing the bits).
Level count_groups(std::string_view text);

}  // namespace octmesh

template <>
struct std::hash<octmesh::MortonKey> : octmesh::MortonKeyHash {};
