#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "octmesh/error.hpp"

namespace octmesh {

inline constexpr int kMaxKeyBits = 256;

using Level = int;
using Point = std::array<double, 3>;

struct MeshConfig {
  int dim = 3;
  int key_bits = 128;
  int max_level = 1;

  // Throws InvalidConfig.
  void validate() const;

  int children_per_node() const { return 1 << dim; }
  int faces_per_node() const { return 2 * dim; }
  // Deepest level the key width can hold for this dimension.
  static int level_capacity(int dim, int key_bits) { return key_bits / dim; }
};

// Root box. Only the first `dim` components are meaningful.
struct DomainBox {
  Point center{0.0, 0.0, 0.0};
  Point lengths{1.0, 1.0, 1.0};

  double lower(int axis) const { return center[axis] - 0.5 * lengths[axis]; }
  double upper(int axis) const { return center[axis] + 0.5 * lengths[axis]; }
  double volume(int dim) const;
  void validate(int dim) const;
};

enum class Sign : std::uint8_t { Minus, Plus };

struct FaceDirection {
  int axis = 0;
  Sign sign = Sign::Plus;

  bool positive() const { return sign == Sign::Plus; }
  FaceDirection opposite() const { return {axis, positive() ? Sign::Minus : Sign::Plus}; }
  friend bool operator==(const FaceDirection&, const FaceDirection&) = default;
};

// All 2*dim face directions, ordered -x,+x,-y,+y,-z,+z.
inline FaceDirection face_direction(int index) {
  return {index / 2, (index % 2) ? Sign::Plus : Sign::Minus};
}

enum class Backend : std::uint8_t { Ordered, Hashed };

std::string_view to_string(Backend backend);
Backend parse_backend(std::string_view text);

}  // namespace octmesh
