#pragma once

#include <span>
#include <string_view>

#include "octmesh/morton_key.hpp"
#include "octmesh/types.hpp"

// Bisection point-encoding kernels. The scalar kernel is the reference; the
// vector kernels must produce bit-identical keys (same midpoint arithmetic and
// the same "p < mid goes low" comparison, NaN included).
namespace octmesh::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

// What this CPU and build support, best first.
Isa best_isa();
bool isa_available(Isa isa);

struct EncodeBox {
  const double* lower;  // dim entries
  const double* upper;  // dim entries
  int dim;
};

// `out` must hold points.size() zeroed keys. No range checking here.
void encode_points_scalar(std::span<const Point> points, EncodeBox box, Level level,
                          std::span<MortonKey> out);

#if defined(OCTMESH_HAVE_AVX2)
void encode_points_avx2(std::span<const Point> points, EncodeBox box, Level level,
                        std::span<MortonKey> out);
#endif

// Dispatches to `isa`, falling back to scalar when it is unavailable.
void encode_points(std::span<const Point> points, EncodeBox box, Level level,
                   std::span<MortonKey> out, Isa isa);

}  // namespace octmesh::simd
