#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "octmesh/geometry.hpp"
#include "octmesh/octree.hpp"

namespace octmesh {

struct GenerateConfig {
  std::filesystem::path stl_path;
  std::filesystem::path points_path;  // 2D point list, used instead of an STL
  int dim = 3;
  int key_bits = 128;
  Level max_level = 6;
  Backend backend = Backend::Ordered;
  std::optional<DomainBox> domain;  // fitted around the geometry when unset
  double padding = 1.5;
  GeometryPoints geometry_points = GeometryPoints::Centroids;
  std::optional<Level> voxel_level;
  std::filesystem::path vtk_out;
  std::filesystem::path stats_out;
  std::filesystem::path zorder_out;
  bool merge_points = false;
  // Also run every balance closure with a linear-scan membership list and
  // compare the two outputs.
  bool check_linear_closure = false;

  MeshConfig mesh_config() const { return {dim, key_bits, max_level}; }
};

struct PhaseTimes {
  double load = 0;
  double encode = 0;
  double tag = 0;
  double balance = 0;
  double refine = 0;
  double export_ = 0;

  double total() const { return load + encode + tag + balance + refine + export_; }
};

struct RunStats {
  PhaseTimes phases;                 // milliseconds
  std::vector<std::size_t> per_level;  // per_level[i] = leaves at level i + 1
  std::size_t total_leaves = 0;
  Backend backend = Backend::Ordered;
  int dim = 3;
  int key_bits = 128;
  Level max_level = 0;
  int passes = 0;
  std::size_t points_encoded = 0;
  std::size_t tagged_keys = 0;  // distinct finest-level keys
  std::size_t voxels = 0;
  std::size_t estimated_bytes = 0;
  std::string isa;
  std::optional<double> linear_balance_ms;
  std::optional<bool> linear_closure_equal;
};

// Assumed per-leaf payload: one pointer into the application's solution data.
inline constexpr std::size_t kPayloadBytesEstimate = sizeof(void*);

inline std::size_t estimate_store_bytes(std::size_t entries, int key_bits) {
  return entries * (static_cast<std::size_t>(key_bits) / 8 + kPayloadBytesEstimate);
}

struct GenerateResult {
  Mesh mesh;
  DomainBox domain;
  RunStats stats;
  std::optional<VoxelIndex> voxels;
};

// Loads the geometry named in the config, meshes it and writes any requested
// outputs.
GenerateResult generate(const GenerateConfig& config);

// Meshes in-memory geometry points; the config's input paths are ignored.
// Without a configured domain the box is fitted around the points.
GenerateResult generate_from_points(std::span<const Point> points, const GenerateConfig& config);

// Refinement passes shared by both entry points: raise every tagged leaf
// below max level by one level (plus its balance closure) until none is left.
// Returns the number of passes.
int refine_to_tags(Mesh& mesh, const TagSets& tags, RunStats& stats, bool check_linear_closure);

std::vector<std::size_t> level_histogram(const Mesh& mesh);

struct BenchConfig {
  GenerateConfig base;
  std::vector<Level> levels;
  std::vector<Backend> backends{Backend::Ordered, Backend::Hashed};
  int repeat = 3;
  bool linear_closure = true;
};

struct BenchCell {
  Level level = 0;
  Backend backend = Backend::Ordered;
  std::vector<RunStats> samples;
  PhaseTimes median;  // per phase, over samples
  std::size_t leaves = 0;
  std::size_t estimated_bytes = 0;
  std::optional<double> linear_balance_ms;
  std::optional<bool> linear_closure_equal;
};

struct BenchReport {
  std::vector<BenchCell> cells;
  // Every level produced the same leaf count on every backend.
  bool backends_agree = true;
};

BenchReport bench(const BenchConfig& config);

double median(std::vector<double> values);

}  // namespace octmesh
