#include "octmesh/io_export.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

namespace octmesh {
namespace {

using nlohmann::json;

constexpr int kVtkHexahedron = 12;
constexpr int kVtkQuad = 9;

// VTK corner order in terms of the corner index used by morton::vertices
// (bit k set = upper side on axis k).
constexpr int kHexCorners[8] = {0, 1, 3, 2, 4, 5, 7, 6};
constexpr int kQuadCorners[4] = {0, 1, 3, 2};

void append_double(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  return out;
}

void check_stream(const std::ostream& out, const std::filesystem::path& path) {
  if (!out) throw Error(ErrorKind::IoError, "write to " + path.string() + " failed");
}

json phases_json(const PhaseTimes& p) {
  return {{"load", p.load},     {"encode", p.encode}, {"tag", p.tag},
          {"balance", p.balance}, {"refine", p.refine}, {"export", p.export_}};
}

std::string domain_text(const DomainBox& d, int dim) {
  std::string out;
  for (int k = 0; k < dim; ++k) {
    if (!out.empty()) out += ',';
    append_double(out, d.center[static_cast<std::size_t>(k)]);
  }
  for (int k = 0; k < dim; ++k) {
    out += ',';
    append_double(out, d.lengths[static_cast<std::size_t>(k)]);
  }
  return out;
}

}  // namespace

void write_vtk(const Mesh& mesh, std::ostream& out, bool merge_points) {
  const MeshConfig& cfg = mesh.config();
  const DomainBox& domain = mesh.domain();
  const auto leaves = sorted_leaves(mesh);
  const int corners = cfg.children_per_node();
  const int* order = cfg.dim == 3 ? kHexCorners : kQuadCorners;

  std::vector<Point> points;
  std::vector<std::size_t> connectivity;
  connectivity.reserve(leaves.size() * static_cast<std::size_t>(corners));

  // Merge quantum: 1e-12 of the domain edge, or an eighth of the finest cell
  // when that is smaller (deep 3D levels go below 1e-12).
  std::array<double, 3> quantum{1, 1, 1};
  for (int k = 0; k < cfg.dim; ++k) {
    const double edge = domain.lengths[static_cast<std::size_t>(k)];
    quantum[static_cast<std::size_t>(k)] =
        std::min(1e-12 * edge, edge * std::ldexp(1.0, -(cfg.max_level + 3)));
  }
  std::map<std::array<double, 3>, std::size_t> merged;

  for (const auto& leaf : leaves) {
    const auto verts = morton::vertices(leaf.key, cfg, leaf.level, domain);
    for (int c = 0; c < corners; ++c) {
      const Point& p = verts[order[c]];
      if (!merge_points) {
        connectivity.push_back(points.size());
        points.push_back(p);
        continue;
      }
      std::array<double, 3> q{};
      for (int k = 0; k < cfg.dim; ++k) {
        const auto i = static_cast<std::size_t>(k);
        q[i] = std::nearbyint((p[i] - domain.lower(k)) / quantum[i]);
      }
      auto [it, inserted] = merged.emplace(q, points.size());
      if (inserted) points.push_back(p);
      connectivity.push_back(it->second);
    }
  }

  std::string buf;
  buf.reserve(points.size() * 48 + connectivity.size() * 8);
  buf += "# vtk DataFile Version 3.0\n";
  buf += "octmesh " + std::to_string(cfg.dim) + "D balanced octree, max level " +
         std::to_string(cfg.max_level) + "\n";
  buf += "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  buf += "POINTS " + std::to_string(points.size()) + " double\n";
  for (const auto& p : points) {
    append_double(buf, p[0]);
    buf += ' ';
    append_double(buf, p[1]);
    buf += ' ';
    append_double(buf, cfg.dim == 3 ? p[2] : 0.0);
    buf += '\n';
  }
  const std::size_t cells = leaves.size();
  buf += "CELLS " + std::to_string(cells) + " " + std::to_string(cells * static_cast<std::size_t>(corners + 1)) + "\n";
  for (std::size_t i = 0; i < cells; ++i) {
    buf += std::to_string(corners);
    for (int c = 0; c < corners; ++c) {
      buf += ' ';
      buf += std::to_string(connectivity[i * static_cast<std::size_t>(corners) + static_cast<std::size_t>(c)]);
    }
    buf += '\n';
  }
  buf += "CELL_TYPES " + std::to_string(cells) + "\n";
  const std::string type = std::to_string(cfg.dim == 3 ? kVtkHexahedron : kVtkQuad) + "\n";
  for (std::size_t i = 0; i < cells; ++i) buf += type;
  buf += "CELL_DATA " + std::to_string(cells) + "\n";
  buf += "SCALARS level int 1\nLOOKUP_TABLE default\n";
  for (const auto& leaf : leaves) {
    buf += std::to_string(leaf.level);
    buf += '\n';
  }
  out << buf;
}

void write_vtk(const Mesh& mesh, const std::filesystem::path& path, bool merge_points) {
  auto out = open_out(path);
  write_vtk(mesh, out, merge_points);
  check_stream(out, path);
}

void dump_zorder(const Mesh& mesh, std::ostream& out) {
  const int dim = mesh.config().dim;
  for (const auto& e : iterate_zorder(mesh)) out << format_key(e.key, dim, e.level) << '\n';
}

void dump_zorder(const Mesh& mesh, const std::filesystem::path& path) {
  // Fail before creating the file.
  (void)mesh.store().ordered_map();
  auto out = open_out(path);
  dump_zorder(mesh, out);
  check_stream(out, path);
}

StatsDocument make_stats_document(const RunStats& stats, const GenerateConfig& config) {
  StatsDocument doc;
  doc.config["geometry"] = !config.points_path.empty() ? config.points_path.string() : config.stl_path.string();
  doc.config["dim"] = std::to_string(config.dim);
  doc.config["key_bits"] = std::to_string(config.key_bits);
  doc.config["max_level"] = std::to_string(config.max_level);
  doc.config["backend"] = std::string(to_string(config.backend));
  doc.config["padding"] = std::to_string(config.padding);
  doc.config["geometry_points"] = config.geometry_points == GeometryPoints::All ? "all" : "centroids";
  if (config.domain) doc.config["domain"] = domain_text(*config.domain, config.dim);
  if (config.voxel_level) doc.config["voxel_level"] = std::to_string(*config.voxel_level);
  doc.config["merge_points"] = config.merge_points ? "true" : "false";
  doc.config["isa"] = stats.isa;
  doc.phases_ms = {{"load", stats.phases.load},     {"encode", stats.phases.encode},
                   {"tag", stats.phases.tag},       {"balance", stats.phases.balance},
                   {"refine", stats.phases.refine}, {"export", stats.phases.export_}};
  doc.per_level_counts = stats.per_level;
  doc.total_leaves = stats.total_leaves;
  doc.backend = std::string(to_string(stats.backend));
  doc.key_bits = stats.key_bits;
  doc.estimated_bytes = stats.estimated_bytes;
  return doc;
}

std::string stats_to_json(const StatsDocument& doc) {
  json j;
  j["schemaVersion"] = doc.schema_version;
  j["config"] = doc.config;
  j["phasesMs"] = doc.phases_ms;
  j["perLevelCounts"] = doc.per_level_counts;
  j["totalLeaves"] = doc.total_leaves;
  j["backend"] = doc.backend;
  j["keyBits"] = doc.key_bits;
  j["estimatedBytes"] = doc.estimated_bytes;
  return j.dump(2) + "\n";
}

StatsDocument stats_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    StatsDocument doc;
    doc.schema_version = j.at("schemaVersion").get<int>();
    doc.config = j.at("config").get<std::map<std::string, std::string>>();
    doc.phases_ms = j.at("phasesMs").get<std::map<std::string, double>>();
    doc.per_level_counts = j.at("perLevelCounts").get<std::vector<std::size_t>>();
    doc.total_leaves = j.at("totalLeaves").get<std::size_t>();
    doc.backend = j.at("backend").get<std::string>();
    doc.key_bits = j.at("keyBits").get<int>();
    doc.estimated_bytes = j.at("estimatedBytes").get<std::size_t>();
    return doc;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("stats document: ") + e.what());
  }
}

void write_stats_json(const StatsDocument& doc, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << stats_to_json(doc);
  check_stream(out, path);
}

StatsDocument read_stats_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return stats_from_json(ss.str());
}

std::string bench_to_json(const BenchReport& report) {
  json cells = json::array();
  for (const auto& cell : report.cells) {
    json samples = json::array();
    for (const auto& s : cell.samples) {
      samples.push_back({{"phasesMs", phases_json(s.phases)}, {"totalLeaves", s.total_leaves}});
    }
    json c = {{"level", cell.level},
              {"backend", std::string(to_string(cell.backend))},
              {"samples", samples},
              {"medianMs", phases_json(cell.median)},
              {"medianTotalMs", cell.median.total()},
              {"leaves", cell.leaves},
              {"perLevelCounts", cell.samples.empty() ? std::vector<std::size_t>{} : cell.samples.front().per_level},
              {"estimatedBytes", cell.estimated_bytes}};
    if (cell.linear_balance_ms) c["linearScanBalanceMs"] = *cell.linear_balance_ms;
    if (cell.linear_closure_equal) c["linearScanClosureEqual"] = *cell.linear_closure_equal;
    cells.push_back(std::move(c));
  }
  json j = {{"schemaVersion", kStatsSchemaVersion}, {"backendsAgree", report.backends_agree}, {"cells", cells}};
  return j.dump(2) + "\n";
}

void write_bench_json(const BenchReport& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << bench_to_json(report);
  check_stream(out, path);
}

void print_bench_table(const BenchReport& report, std::ostream& out) {
  out << std::left << std::setw(6) << "level" << std::setw(9) << "backend" << std::right << std::setw(11)
      << "leaves" << std::setw(11) << "encode" << std::setw(11) << "tag" << std::setw(11) << "balance"
      << std::setw(11) << "refine" << std::setw(11) << "total" << std::setw(13) << "lin.balance"
      << std::setw(8) << "equal" << "\n";
  out << std::fixed << std::setprecision(2);
  for (const auto& c : report.cells) {
    out << std::left << std::setw(6) << c.level << std::setw(9) << to_string(c.backend) << std::right
        << std::setw(11) << c.leaves << std::setw(11) << c.median.encode << std::setw(11) << c.median.tag
        << std::setw(11) << c.median.balance << std::setw(11) << c.median.refine << std::setw(11)
        << c.median.total();
    if (c.linear_balance_ms) {
      out << std::setw(13) << *c.linear_balance_ms << std::setw(8)
          << (c.linear_closure_equal.value_or(false) ? "yes" : "NO");
    } else {
      out << std::setw(13) << "-" << std::setw(8) << "-";
    }
    out << "\n";
  }
  out << "times in ms (median of " << (report.cells.empty() ? 0 : report.cells.front().samples.size())
      << " runs); backends agree: " << (report.backends_agree ? "yes" : "NO") << "\n";
}

}  // namespace octmesh
