#include "octmesh/cli.hpp"

#include <charconv>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "octmesh/io_export.hpp"
#include "octmesh/pipeline.hpp"

namespace octmesh::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

double parse_double(const std::string& s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError("not a number: '" + s + "'");
  }
  return v;
}

// "cx,cy[,cz],lx,ly[,lz]"
DomainBox parse_domain(const std::string& text, int dim) {
  const auto parts = split(text, ',');
  if (parts.size() != static_cast<std::size_t>(2 * dim)) {
    throw UsageError("--domain needs " + std::to_string(2 * dim) + " comma-separated numbers");
  }
  DomainBox box;
  for (int k = 0; k < dim; ++k) {
    box.center[static_cast<std::size_t>(k)] = parse_double(parts[static_cast<std::size_t>(k)]);
    box.lengths[static_cast<std::size_t>(k)] = parse_double(parts[static_cast<std::size_t>(dim + k)]);
  }
  return box;
}

std::string fmt(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string fmt_point(const Point& p, int dim) {
  std::string out = "(";
  for (int k = 0; k < dim; ++k) {
    if (k) out += ", ";
    out += fmt(p[static_cast<std::size_t>(k)]);
  }
  return out + ")";
}

constexpr const char* kAxisNames = "xyz";

std::string face_name(FaceDirection dir) {
  return std::string(dir.positive() ? "+" : "-") + kAxisNames[dir.axis];
}

struct GenerateArgs {
  std::string stl;
  std::string points;
  int dim = 3;
  int max_level = 6;
  int key_bits = 128;
  std::string backend = "ordered";
  std::string domain;
  double padding = 1.5;
  std::string geometry_points = "centroids";
  int voxel_level = 0;
  std::string out;
  std::string stats;
  std::string zorder;
  bool merge = false;
};

struct BenchArgs {
  std::string stl;
  std::string levels;
  std::string backends = "ordered,hashed";
  int repeat = 3;
  std::string stats;
  int key_bits = 128;
  double padding = 1.5;
};

struct InspectArgs {
  int dim = 3;
  std::string key;
  std::string domain;
  int key_bits = 128;
  std::string axis;
  std::string sign;
};

int do_generate(const GenerateArgs& a, CLI::App& sub, std::ostream& out, std::ostream& err) {
  if (a.stl.empty() == a.points.empty()) {
    err << "generate: exactly one of --stl or --points is required\n" << sub.help();
    return 1;
  }
  GenerateConfig cfg;
  cfg.stl_path = a.stl;
  cfg.points_path = a.points;
  cfg.dim = a.dim;
  cfg.max_level = a.max_level;
  cfg.key_bits = a.key_bits;
  cfg.backend = parse_backend(a.backend);
  if (!a.domain.empty()) cfg.domain = parse_domain(a.domain, a.dim);
  cfg.padding = a.padding;
  cfg.geometry_points = parse_geometry_points(a.geometry_points);
  if (a.voxel_level > 0) cfg.voxel_level = a.voxel_level;
  cfg.vtk_out = a.out;
  cfg.stats_out = a.stats;
  cfg.zorder_out = a.zorder;
  cfg.merge_points = a.merge;

  const auto result = generate(cfg);
  const auto& s = result.stats;
  out << "leaves " << s.total_leaves << " passes " << s.passes << " backend " << to_string(s.backend)
      << " key_bits " << s.key_bits << "\n";
  for (std::size_t i = 0; i < s.per_level.size(); ++i) {
    if (s.per_level[i]) out << "  level " << (i + 1) << ": " << s.per_level[i] << "\n";
  }
  out << "ms load " << fmt(s.phases.load) << " encode " << fmt(s.phases.encode) << " tag "
      << fmt(s.phases.tag) << " balance " << fmt(s.phases.balance) << " refine " << fmt(s.phases.refine)
      << " export " << fmt(s.phases.export_) << "\n";
  return 0;
}

int do_bench(const BenchArgs& a, std::ostream& out) {
  BenchConfig cfg;
  cfg.base.stl_path = a.stl;
  cfg.base.key_bits = a.key_bits;
  cfg.base.padding = a.padding;
  for (const auto& l : split(a.levels, ',')) cfg.levels.push_back(static_cast<Level>(parse_double(l)));
  cfg.backends.clear();
  for (const auto& b : split(a.backends, ',')) cfg.backends.push_back(parse_backend(b));
  cfg.repeat = a.repeat;
  const auto report = bench(cfg);
  print_bench_table(report, out);
  if (!a.stats.empty()) write_bench_json(report, a.stats);
  return 0;
}

int do_inspect(const InspectArgs& a, std::ostream& out) {
  if (a.dim != 2 && a.dim != 3) throw UsageError("--dim must be 2 or 3");
  const MortonKey key = parse_key(a.key, a.dim);
  const Level level = count_groups(a.key);
  if (level < 1) throw UsageError("--key must hold at least one group");
  MeshConfig cfg{a.dim, a.key_bits, MeshConfig::level_capacity(a.dim, a.key_bits)};
  cfg.validate();
  if (level > cfg.max_level || !key.zero_from(a.dim * cfg.max_level)) {
    throw Error(ErrorKind::LevelOutOfRange, "key does not fit " + std::to_string(a.key_bits) + " bits");
  }
  DomainBox domain;
  if (!a.domain.empty()) domain = parse_domain(a.domain, a.dim);
  domain.validate(a.dim);

  out << "key " << format_key(key, a.dim, level) << "\n";
  out << "level " << level << "\n";
  out << "scan_level " << morton::scan_level(key, cfg) << "\n";
  out << "centroid " << fmt_point(morton::centroid(key, cfg, level, domain), a.dim) << "\n";
  out << "edge " << fmt_point(morton::edge_length(cfg, level, domain), a.dim) << "\n";
  out << "vertices";
  for (const auto& v : morton::vertices(key, cfg, level, domain)) out << " " << fmt_point(v, a.dim);
  out << "\n";
  try {
    out << "integer " << morton::to_integer(key, a.dim, level, 64) << "\n";
  } catch (const Error&) {
    out << "integer overflow (" << a.dim * level << " bits > 64)\n";
  }
  for (int k = 0; k < a.dim; ++k) {
    out << "sibling " << kAxisNames[k] << " " << format_key(morton::sibling_key(key, cfg, level, k), a.dim, level)
        << "\n";
  }

  std::vector<FaceDirection> dirs;
  if (!a.axis.empty() || !a.sign.empty()) {
    const auto pos = std::string(kAxisNames).find(a.axis);
    if (a.axis.size() != 1 || pos == std::string::npos || static_cast<int>(pos) >= a.dim) {
      throw UsageError("--axis must be one of x, y" + std::string(a.dim == 3 ? ", z" : ""));
    }
    if (a.sign != "+" && a.sign != "-") throw UsageError("--sign must be + or -");
    dirs.push_back({static_cast<int>(pos), a.sign == "+" ? Sign::Plus : Sign::Minus});
  } else {
    for (int f = 0; f < 2 * a.dim; ++f) dirs.push_back(face_direction(f));
  }
  for (const auto dir : dirs) {
    const auto flip = morton::flip_level(key, cfg, level, dir.axis);
    const auto nb = morton::same_level_neighbor_key(key, cfg, level, dir);
    out << "face " << face_name(dir) << " boundary " << (morton::is_boundary(key, cfg, level, dir) ? "yes" : "no")
        << " flip_level " << (flip ? std::to_string(*flip) : std::string("none")) << " neighbor "
        << (nb ? format_key(*nb, a.dim, level) : std::string("boundary")) << "\n";
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Balanced Cartesian octree mesh generator with Morton-keyed leaf stores", "octmesh"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Mesh an STL (or 2D point list) to a 2:1 balanced octree");
  g->add_option("--stl", gen.stl, "Geometry as binary or ASCII STL");
  g->add_option("--points", gen.points, "2D point list, one 'x y' per line");
  g->add_option("--dim", gen.dim, "Dimension")->check(CLI::IsMember({2, 3}));
  g->add_option("--max-level", gen.max_level, "Target refinement level")->check(CLI::PositiveNumber);
  g->add_option("--key-bits", gen.key_bits, "Morton key width in bits")->check(CLI::Range(2, kMaxKeyBits));
  g->add_option("--backend", gen.backend, "Leaf store")->check(CLI::IsMember({"ordered", "hashed"}));
  g->add_option("--domain", gen.domain, "Root box as cx,cy[,cz],lx,ly[,lz]; fitted when omitted");
  g->add_option("--padding", gen.padding, "Fitted domain edge / largest bbox extent");
  g->add_option("--geometry-points", gen.geometry_points, "Refinement points")
      ->check(CLI::IsMember({"centroids", "all"}));
  g->add_option("--voxel-level", gen.voxel_level, "Also build a coarse voxel index at this level");
  g->add_option("--out", gen.out, "Legacy VTK output");
  g->add_option("--stats", gen.stats, "Run statistics (JSON)");
  g->add_option("--zorder", gen.zorder, "Z-order key dump (ordered backend)");
  g->add_flag("--merge-points", gen.merge, "Share coincident VTK points between cells");

  BenchArgs bn;
  auto* b = app.add_subcommand("bench", "Time generation per level and backend");
  b->add_option("--stl", bn.stl, "Geometry as binary or ASCII STL")->required();
  b->add_option("--levels", bn.levels, "Comma-separated max levels")->required();
  b->add_option("--backends", bn.backends, "Comma-separated backends");
  b->add_option("--repeat", bn.repeat, "Runs per cell")->check(CLI::PositiveNumber);
  b->add_option("--key-bits", bn.key_bits, "Morton key width in bits")->check(CLI::Range(2, kMaxKeyBits));
  b->add_option("--padding", bn.padding, "Fitted domain edge / largest bbox extent");
  b->add_option("--stats", bn.stats, "Bench report (JSON)");

  InspectArgs in;
  auto* i = app.add_subcommand("inspect", "Decode a Morton key");
  i->add_option("--dim", in.dim, "Dimension")->check(CLI::IsMember({2, 3}));
  i->add_option("--key", in.key, "Key as comma-separated groups, e.g. 001,000,101")->required();
  i->add_option("--domain", in.domain, "Root box as cx,cy[,cz],lx,ly[,lz]");
  i->add_option("--key-bits", in.key_bits, "Morton key width in bits")->check(CLI::Range(2, kMaxKeyBits));
  i->add_option("--axis", in.axis, "Restrict neighbor output to this axis (x, y, z)");
  i->add_option("--sign", in.sign, "Direction along --axis (+ or -)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (*g) return do_generate(gen, *g, out, err);
    if (*b) return do_bench(bn, out);
    return do_inspect(in, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::ParseError ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace octmesh::cli
