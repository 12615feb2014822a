#include "octmesh/simd/encode_kernels.hpp"

namespace octmesh::simd {

void encode_points_scalar(std::span<const Point> points, EncodeBox box, Level level,
                          std::span<MortonKey> out) {
  const int dim = box.dim;
  for (std::size_t i = 0; i < points.size(); ++i) {
    MortonKey& key = out[i];
    for (int k = 0; k < dim; ++k) {
      const double xp = points[i][static_cast<std::size_t>(k)];
      double lo = box.lower[k];
      double hi = box.upper[k];
      for (Level l = 0; l < level; ++l) {
        const double xc = 0.5 * (hi + lo);
        if (xp < xc) {
          hi = xc;
        } else {
          key.set(dim * l + k);
          lo = xc;
        }
      }
    }
  }
}

}  // namespace octmesh::simd
