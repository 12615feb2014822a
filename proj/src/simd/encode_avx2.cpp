#include <immintrin.h>

#include "octmesh/simd/encode_kernels.hpp"

namespace octmesh::simd {

// Four points per iteration along one axis. _CMP_NLT_UQ is "not (p < mid)",
// the exact complement of the scalar branch including unordered inputs.
void encode_points_avx2(std::span<const Point> points, EncodeBox box, Level level,
                        std::span<MortonKey> out) {
  const int dim = box.dim;
  const std::size_t n = points.size();
  const std::size_t full = n - n % 4;
  const __m256d half = _mm256_set1_pd(0.5);

  for (std::size_t i = 0; i < full; i += 4) {
    for (int k = 0; k < dim; ++k) {
      const auto a = static_cast<std::size_t>(k);
      const __m256d xp =
          _mm256_set_pd(points[i + 3][a], points[i + 2][a], points[i + 1][a], points[i][a]);
      __m256d lo = _mm256_set1_pd(box.lower[k]);
      __m256d hi = _mm256_set1_pd(box.upper[k]);
      for (Level l = 0; l < level; ++l) {
        const __m256d xc = _mm256_mul_pd(half, _mm256_add_pd(hi, lo));
        const __m256d upper = _mm256_cmp_pd(xp, xc, _CMP_NLT_UQ);
        lo = _mm256_blendv_pd(lo, xc, upper);
        hi = _mm256_blendv_pd(xc, hi, upper);
        const int mask = _mm256_movemask_pd(upper);
        if (mask == 0) continue;
        const int pos = dim * l + k;
        for (int lane = 0; lane < 4; ++lane) {
          if ((mask >> lane) & 1) out[i + static_cast<std::size_t>(lane)].set(pos);
        }
      }
    }
  }
  if (full < n) {
    encode_points_scalar(points.subspan(full), box, level, out.subspan(full));
  }
}

}  // namespace octmesh::simd
