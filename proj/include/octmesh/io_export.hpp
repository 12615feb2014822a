#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "octmesh/pipeline.hpp"

namespace octmesh {

// Legacy ASCII VTK unstructured grid: hexahedra (type 12) in 3D, quads
// (type 9) in 2D, one integer "level" scalar per cell. Cells are written in
// Z-order. Without merging every cell owns its 2^dim points.
void write_vtk(const Mesh& mesh, std::ostream& out, bool merge_points);
void write_vtk(const Mesh& mesh, const std::filesystem::path& path, bool merge_points);

// One key per line in comma-grouped notation, Z-order. Ordered backend only
// (UnsupportedBackend otherwise).
void dump_zorder(const Mesh& mesh, std::ostream& out);
void dump_zorder(const Mesh& mesh, const std::filesystem::path& path);

inline constexpr int kStatsSchemaVersion = 1;

struct StatsDocument {
  int schema_version = kStatsSchemaVersion;
  std::map<std::string, std::string> config;  // echoed settings
  std::map<std::string, double> phases_ms;    // load, encode, tag, balance, refine, export
  std::vector<std::size_t> per_level_counts;  // index i = level i + 1
  std::size_t total_leaves = 0;
  std::string backend;
  int key_bits = 0;
  std::size_t estimated_bytes = 0;

  friend bool operator==(const StatsDocument&, const StatsDocument&) = default;
};

StatsDocument make_stats_document(const RunStats& stats, const GenerateConfig& config);
std::string stats_to_json(const StatsDocument& doc);
StatsDocument stats_from_json(const std::string& text);
void write_stats_json(const StatsDocument& doc, const std::filesystem::path& path);
StatsDocument read_stats_json(const std::filesystem::path& path);

std::string bench_to_json(const BenchReport& report);
void write_bench_json(const BenchReport& report, const std::filesystem::path& path);
// Fixed-width text table of the median timings.
void print_bench_table(const BenchReport& report, std::ostream& out);

}  // namespace octmesh
