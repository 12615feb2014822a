#include "octmesh/morton.hpp"

#include <cmath>
#include <string>

#include "octmesh/simd/encode_kernels.hpp"

namespace octmesh::morton {
namespace {

void require_level(const MeshConfig& cfg, Level level, Level min_level) {
  if (level < min_level || level > cfg.max_level) {
    throw Error(ErrorKind::LevelOutOfRange,
                "level " + std::to_string(level) + " outside [" + std::to_string(min_level) + ", " +
                    std::to_string(cfg.max_level) + "]");
  }
}

void require_inside(const Point& p, const DomainBox& domain, int dim) {
  for (int k = 0; k < dim; ++k) {
    const auto i = static_cast<std::size_t>(k);
    // Negated form so NaN is rejected too.
    if (!(p[i] >= domain.lower(k) && p[i] <= domain.upper(k))) {
      throw Error(ErrorKind::PointOutsideDomain,
                  "coordinate " + std::to_string(p[i]) + " on axis " + std::to_string(k) +
                      " outside [" + std::to_string(domain.lower(k)) + ", " +
                      std::to_string(domain.upper(k)) + "]");
    }
  }
}

}  // namespace

MortonKey encode_point(const Point& p, const DomainBox& domain, const MeshConfig& cfg, Level level) {
  require_level(cfg, level, 1);
  require_inside(p, domain, cfg.dim);
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
  for (int k = 0; k < cfg.dim; ++k) {
    lo[static_cast<std::size_t>(k)] = domain.lower(k);
    hi[static_cast<std::size_t>(k)] = domain.upper(k);
  }
  MortonKey key;
  simd::encode_points_scalar({&p, 1}, {lo.data(), hi.data(), cfg.dim}, level, {&key, 1});
  return key;
}

std::vector<MortonKey> encode_points(std::span<const Point> points, const DomainBox& domain,
                                     const MeshConfig& cfg, Level level) {
  require_level(cfg, level, 1);
  for (const auto& p : points) require_inside(p, domain, cfg.dim);
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
  for (int k = 0; k < cfg.dim; ++k) {
    lo[static_cast<std::size_t>(k)] = domain.lower(k);
    hi[static_cast<std::size_t>(k)] = domain.upper(k);
  }
  std::vector<MortonKey> keys(points.size());
  simd::encode_points(points, {lo.data(), hi.data(), cfg.dim}, level, keys, simd::best_isa());
  return keys;
}

MortonKey truncate_to_level(const MortonKey& key, int dim, Level level) {
  MortonKey out = key;
  out.clear_from(dim * (level < 0 ? 0 : level));
  return out;
}

Level scan_level(const MortonKey& key, const MeshConfig& cfg) {
  for (Level l = cfg.max_level; l >= 1; --l) {
    if (key.group(cfg.dim, l) != 0) return l;
  }
  return 0;
}

MortonKey sibling_key(const MortonKey& key, const MeshConfig& cfg, Level level, int axis) {
  require_level(cfg, level, 1);
  MortonKey out = key;
  out.flip(bit_position(cfg.dim, level, axis));
  return out;
}

std::optional<Level> flip_level(const MortonKey& key, const MeshConfig& cfg, Level level, int axis) {
  const bool b = axis_bit(key, cfg.dim, level, axis);
  for (Level l = level - 1; l >= 1; --l) {
    if (axis_bit(key, cfg.dim, l, axis) != b) return l;
  }
  return std::nullopt;
}

std::optional<MortonKey> same_level_neighbor_key(const MortonKey& key, const MeshConfig& cfg,
                                                 Level level, FaceDirection dir) {
  const bool b = axis_bit(key, cfg.dim, level, dir.axis);
  if (dir.positive() != b) return sibling_key(key, cfg, level, dir.axis);
  const auto f = flip_level(key, cfg, level, dir.axis);
  if (!f) return std::nullopt;
  MortonKey out = key;
  for (Level l = level; l >= *f; --l) out.flip(bit_position(cfg.dim, l, dir.axis));
  return out;
}

bool is_boundary(const MortonKey& key, const MeshConfig& cfg, Level level, FaceDirection dir) {
  const bool want = dir.positive();
  for (Level l = 1; l <= level; ++l) {
    if (axis_bit(key, cfg.dim, l, dir.axis) != want) return false;
  }
  return true;
}

Point edge_length(const MeshConfig& cfg, Level level, const DomainBox& domain) {
  require_level(cfg, level, 0);
  Point out{};
  const double scale = std::ldexp(1.0, -level);
  for (int k = 0; k < cfg.dim; ++k) {
    out[static_cast<std::size_t>(k)] = domain.lengths[static_cast<std::size_t>(k)] * scale;
  }
  return out;
}

Point centroid(const MortonKey& key, const MeshConfig& cfg, Level level, const DomainBox& domain) {
  require_level(cfg, level, 1);
  Point out{};
  for (int k = 0; k < cfg.dim; ++k) {
    // Dyadic partial sums are exact up to 52 levels.
    double sum = 0.0;
    for (Level j = 0; j < level; ++j) {
      const double term = std::ldexp(1.0, -(j + 2));
      sum += axis_bit(key, cfg.dim, j + 1, k) ? term : -term;
    }
    const auto i = static_cast<std::size_t>(k);
    out[i] = domain.center[i] + domain.lengths[i] * sum;
  }
  return out;
}

PerChild<Point> vertices(const MortonKey& key, const MeshConfig& cfg, Level level,
                         const DomainBox& domain) {
  require_level(cfg, level, 1);
  // Corner offsets from the domain centre as exact dyadic fractions, so a
  // corner shared by several cells always comes out as the same double.
  std::array<double, 3> low{};
  for (int k = 0; k < cfg.dim; ++k) {
    double sum = -0.5;
    for (Level j = 1; j <= level; ++j) {
      if (axis_bit(key, cfg.dim, j, k)) sum += std::ldexp(1.0, -j);
    }
    low[static_cast<std::size_t>(k)] = sum;
  }
  const double step = std::ldexp(1.0, -level);
  PerChild<Point> out;
  out.count = 1 << cfg.dim;
  for (int corner = 0; corner < out.count; ++corner) {
    Point v{};
    for (int k = 0; k < cfg.dim; ++k) {
      const auto i = static_cast<std::size_t>(k);
      const double offset = ((corner >> k) & 1) ? low[i] + step : low[i];
      v[i] = domain.center[i] + domain.lengths[i] * offset;
    }
    out.items[static_cast<std::size_t>(corner)] = v;
  }
  return out;
}

std::uint64_t to_integer(const MortonKey& key, int dim, Level level, int target_width) {
  if (target_width < 1 || target_width > 64) {
    throw Error(ErrorKind::InvalidConfig, "integer target width must be in [1, 64]");
  }
  const int bits = dim * level;
  if (bits > target_width) {
    throw Error(ErrorKind::Overflow, std::to_string(bits) + " key bits do not fit a " +
                                         std::to_string(target_width) + "-bit integer");
  }
  std::uint64_t value = 0;
  for (int p = 0; p < bits; ++p) value = (value << 1) | (key.test(p) ? 1u : 0u);
  return value;
}

PerChild<MortonKey> child_keys(const MortonKey& key, const MeshConfig& cfg, Level level) {
  if (level >= cfg.max_level) {
    throw Error(ErrorKind::MaxDepthExceeded,
                "cannot refine past level " + std::to_string(cfg.max_level));
  }
  if (level < 0) throw Error(ErrorKind::LevelOutOfRange, "negative level");
  PerChild<MortonKey> out;
  out.count = 1 << cfg.dim;
  const MortonKey base = truncate_to_level(key, cfg.dim, level);
  for (int c = 0; c < out.count; ++c) {
    MortonKey child = base;
    child.set_group(cfg.dim, level + 1, static_cast<unsigned>(c));
    out.items[static_cast<std::size_t>(c)] = child;
  }
  return out;
}

}  // namespace octmesh::morton
