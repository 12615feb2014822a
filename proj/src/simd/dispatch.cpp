#include "octmesh/simd/encode_kernels.hpp"

namespace octmesh::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(OCTMESH_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa best_isa() {
  static const Isa best = isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
  return best;
}

void encode_points(std::span<const Point> points, EncodeBox box, Level level,
                   std::span<MortonKey> out, Isa isa) {
#if defined(OCTMESH_HAVE_AVX2)
  if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) {
    encode_points_avx2(points, box, level, out);
    return;
  }
#endif
  (void)isa;
  encode_points_scalar(points, box, level, out);
}

}  // namespace octmesh::simd
