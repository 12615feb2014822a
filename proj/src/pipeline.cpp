#include "octmesh/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "octmesh/io_export.hpp"
#include "octmesh/simd/encode_kernels.hpp"

namespace octmesh {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct LoadedGeometry {
  std::optional<TriangleSoup> soup;
  std::vector<Point> points;  // refinement points
  std::vector<Point> extent;  // what the fitted domain has to enclose
};

LoadedGeometry load_geometry(const GenerateConfig& config) {
  LoadedGeometry geo;
  if (!config.points_path.empty()) {
    if (config.dim != 2) {
      throw Error(ErrorKind::InvalidConfig, "point lists are a 2D input; use --dim 2");
    }
    geo.points = load_points_2d(config.points_path);
    geo.extent = geo.points;
    return geo;
  }
  if (config.stl_path.empty()) throw Error(ErrorKind::InvalidConfig, "no geometry given");
  geo.soup = load_stl(config.stl_path);
  geo.points = geometry_points(*geo.soup, config.geometry_points);
  for (const auto& t : geo.soup->triangles) {
    for (const auto& v : t.v) geo.extent.push_back({v[0], v[1], v[2]});
  }
  return geo;
}

DomainBox choose_domain(const GenerateConfig& config, std::span<const Point> extent) {
  if (config.domain) return *config.domain;
  return fit_domain(extent, config.dim, config.padding);
}

void finish_stats(const Mesh& mesh, RunStats& stats) {
  stats.per_level = level_histogram(mesh);
  stats.total_leaves = mesh.size();
  stats.estimated_bytes = estimate_store_bytes(mesh.size(), mesh.config().key_bits);
}

void write_outputs(const GenerateConfig& config, GenerateResult& result) {
  const auto start = Clock::now();
  if (!config.vtk_out.empty()) write_vtk(result.mesh, config.vtk_out, config.merge_points);
  if (!config.zorder_out.empty()) {
    if (result.mesh.backend() == Backend::Ordered) {
      dump_zorder(result.mesh, config.zorder_out);
    } else {
      throw Error(ErrorKind::UnsupportedBackend, "Z-order dump needs the ordered backend");
    }
  }
  result.stats.phases.export_ = ms_since(start);
  if (!config.stats_out.empty()) {
    write_stats_json(make_stats_document(result.stats, config), config.stats_out);
  }
}

GenerateResult mesh_points(std::span<const Point> points, const DomainBox& domain,
                           const GenerateConfig& config, const TriangleSoup* soup, double load_ms) {
  const MeshConfig mesh_cfg = config.mesh_config();
  mesh_cfg.validate();
  domain.validate(mesh_cfg.dim);

  RunStats stats;
  stats.backend = config.backend;
  stats.dim = config.dim;
  stats.key_bits = config.key_bits;
  stats.max_level = config.max_level;
  stats.phases.load = load_ms;
  stats.isa = std::string(simd::to_string(simd::best_isa()));

  auto start = Clock::now();
  TagSets tags = encode_geometry(points, domain, mesh_cfg);
  std::optional<VoxelIndex> voxels;
  if (config.voxel_level) {
    if (!soup) throw Error(ErrorKind::InvalidConfig, "voxelization needs triangle geometry");
    voxels = voxelize(*soup, domain, mesh_cfg, *config.voxel_level);
    stats.voxels = voxels->voxels.size();
  }
  stats.phases.encode = ms_since(start);
  stats.points_encoded = tags.points_encoded();
  stats.tagged_keys = tags.fullres().size();

  GenerateResult result{Mesh(mesh_cfg, domain, config.backend), domain, std::move(stats), std::move(voxels)};
  result.stats.passes = refine_to_tags(result.mesh, tags, result.stats, config.check_linear_closure);
  finish_stats(result.mesh, result.stats);
  write_outputs(config, result);
  return result;
}

template <class A, class B>
bool same_entry_set(const A& a, const B& b) {
  if (a.size() != b.size()) return false;
  std::set<MortonKey, MortonKeyLess> left;
  for (const auto& e : a) left.insert(e.key);
  for (const auto& e : b) {
    if (!left.count(e.key)) return false;
  }
  return true;
}

}  // namespace

std::vector<std::size_t> level_histogram(const Mesh& mesh) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(mesh.config().max_level), 0);
  for (const auto& leaf : mesh.leaves()) ++counts[static_cast<std::size_t>(leaf.level - 1)];
  return counts;
}

int refine_to_tags(Mesh& mesh, const TagSets& tags, RunStats& stats, bool check_linear_closure) {
  const Level max_level = mesh.config().max_level;
  int passes = 0;
  for (;;) {
    auto start = Clock::now();
    RefineQueue queue;
    for (const auto& leaf : mesh.leaves()) {
      if (leaf.level < max_level && tags.is_tagged(leaf.key, leaf.level)) queue.push(leaf.key, leaf.level);
    }
    stats.phases.tag += ms_since(start);
    if (queue.empty()) break;
    if (passes >= max_level) {
      throw Error(ErrorKind::NonTermination, "refinement still running after " +
                                                 std::to_string(passes) + " passes");
    }

    if (check_linear_closure) {
      LinearScanQueue linear;
      for (const auto& e : queue) linear.push(e.key, e.level);
      start = Clock::now();
      linear = balance_closure(mesh, std::move(linear));
      stats.linear_balance_ms = stats.linear_balance_ms.value_or(0.0) + ms_since(start);
      start = Clock::now();
      queue = balance_closure(mesh, std::move(queue));
      stats.phases.balance += ms_since(start);
      const bool equal = same_entry_set(queue, linear);
      stats.linear_closure_equal = stats.linear_closure_equal.value_or(true) && equal;
    } else {
      start = Clock::now();
      queue = balance_closure(mesh, std::move(queue));
      stats.phases.balance += ms_since(start);
    }

    start = Clock::now();
    apply_refinement(mesh, queue);
    stats.phases.refine += ms_since(start);
    ++passes;
  }
  return passes;
}

GenerateResult generate(const GenerateConfig& config) {
  const auto start = Clock::now();
  LoadedGeometry geo = load_geometry(config);
  const double load_ms = ms_since(start);
  const DomainBox domain = choose_domain(config, geo.extent);
  return mesh_points(geo.points, domain, config, geo.soup ? &*geo.soup : nullptr, load_ms);
}

GenerateResult generate_from_points(std::span<const Point> points, const GenerateConfig& config) {
  if (points.empty()) throw Error(ErrorKind::EmptyGeometry, "no geometry points");
  const DomainBox domain = choose_domain(config, points);
  return mesh_points(points, domain, config, nullptr, 0.0);
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

BenchReport bench(const BenchConfig& config) {
  if (config.repeat < 1) throw Error(ErrorKind::InvalidConfig, "repeat must be >= 1");
  if (config.levels.empty() || config.backends.empty()) {
    throw Error(ErrorKind::InvalidConfig, "bench needs at least one level and one backend");
  }
  BenchReport report;
  for (const Level level : config.levels) {
    std::optional<std::size_t> reference_leaves;
    for (const Backend backend : config.backends) {
      BenchCell cell;
      cell.level = level;
      cell.backend = backend;
      for (int r = 0; r < config.repeat; ++r) {
        GenerateConfig run = config.base;
        run.max_level = level;
        run.backend = backend;
        run.vtk_out.clear();
        run.stats_out.clear();
        run.zorder_out.clear();
        // The linear-scan closure is quadratic; one sample per cell is enough.
        run.check_linear_closure = config.linear_closure && r == 0;
        auto result = generate(run);
        if (run.check_linear_closure) {
          cell.linear_balance_ms = result.stats.linear_balance_ms;
          cell.linear_closure_equal = result.stats.linear_closure_equal;
        }
        cell.samples.push_back(std::move(result.stats));
      }
      auto pick = [&](double PhaseTimes::*field) {
        std::vector<double> v;
        for (const auto& s : cell.samples) v.push_back(s.phases.*field);
        return median(std::move(v));
      };
      cell.median.load = pick(&PhaseTimes::load);
      cell.median.encode = pick(&PhaseTimes::encode);
      cell.median.tag = pick(&PhaseTimes::tag);
      cell.median.balance = pick(&PhaseTimes::balance);
      cell.median.refine = pick(&PhaseTimes::refine);
      cell.median.export_ = pick(&PhaseTimes::export_);
      cell.leaves = cell.samples.front().total_leaves;
      cell.estimated_bytes = cell.samples.front().estimated_bytes;
      for (const auto& s : cell.samples) {
        if (s.total_leaves != cell.leaves) report.backends_agree = false;
      }
      if (reference_leaves && *reference_leaves != cell.leaves) report.backends_agree = false;
      reference_leaves = cell.leaves;
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace octmesh
