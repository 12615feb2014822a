#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "octmesh/io_export.hpp"
#include "support/helpers.hpp"

using namespace octmesh;
using testing::key;

namespace {

struct VtkFile {
  std::vector<Point> points;
  std::vector<std::vector<std::size_t>> cells;
  std::vector<int> types;
  std::vector<int> levels;
};

// Minimal reader for the subset the writer emits.
VtkFile read_vtk(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "# vtk DataFile Version 3.0");
  std::getline(in, line);
  std::getline(in, line);
  REQUIRE(line == "ASCII");
  std::getline(in, line);
  REQUIRE(line == "DATASET UNSTRUCTURED_GRID");
  VtkFile f;
  std::string word, type;
  std::size_t n = 0, total = 0;
  in >> word >> n >> type;
  REQUIRE(word == "POINTS");
  REQUIRE(type == "double");
  f.points.resize(n);
  for (auto& p : f.points) in >> p[0] >> p[1] >> p[2];
  in >> word >> n >> total;
  REQUIRE(word == "CELLS");
  f.cells.resize(n);
  for (auto& c : f.cells) {
    std::size_t m = 0;
    in >> m;
    c.resize(m);
    for (auto& i : c) in >> i;
  }
  in >> word >> n;
  REQUIRE(word == "CELL_TYPES");
  f.types.resize(n);
  for (auto& t : f.types) in >> t;
  in >> word >> n;
  REQUIRE(word == "CELL_DATA");
  std::getline(in, line);
  std::getline(in, line);
  REQUIRE(line == "SCALARS level int 1");
  std::getline(in, line);
  f.levels.resize(n);
  for (auto& l : f.levels) in >> l;
  return f;
}

std::string vtk_text(const Mesh& m, bool merge) {
  std::ostringstream out;
  write_vtk(m, out, merge);
  return out.str();
}

const DomainBox kUnit{{0, 0, 0}, {1, 1, 1}};

}  // namespace

TEST_CASE("VTK of the initial 2D mesh") {
  const Mesh m(MeshConfig{2, 128, 3}, kUnit, Backend::Ordered);
  const auto plain = read_vtk(vtk_text(m, false));
  CHECK(plain.cells.size() == 4);
  CHECK(plain.points.size() == 16);
  CHECK(std::all_of(plain.types.begin(), plain.types.end(), [](int t) { return t == 9; }));
  const auto merged = read_vtk(vtk_text(m, true));
  CHECK(merged.points.size() == 9);
  CHECK(merged.cells.size() == 4);
}

TEST_CASE("VTK cells match vertices and levels") {
  for (int dim : {2, 3}) {
    Mesh m(MeshConfig{dim, 128, 4}, DomainBox{{0.3, -2, 5}, {2, 3, 0.5}}, Backend::Hashed);
    m.refine_leaf(MortonKey{}, 1);
    m.refine_leaf(MortonKey{}, 2);
    const auto leaves = sorted_leaves(m);
    const auto plain = read_vtk(vtk_text(m, false));
    const auto merged = read_vtk(vtk_text(m, true));
    REQUIRE(plain.cells.size() == leaves.size());
    REQUIRE(merged.cells.size() == leaves.size());
    CHECK(merged.points.size() < plain.points.size());
    const int expect_type = dim == 3 ? 12 : 9;
    const std::vector<int> order = dim == 3 ? std::vector<int>{0, 1, 3, 2, 4, 5, 7, 6} : std::vector<int>{0, 1, 3, 2};
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      CHECK(plain.types[i] == expect_type);
      CHECK(plain.levels[i] == leaves[i].level);
      const auto verts = morton::vertices(leaves[i].key, m.config(), leaves[i].level, m.domain());
      for (std::size_t c = 0; c < order.size(); ++c) {
        const Point& want = verts[order[c]];
        // Shortest round-trip formatting: exact after reading back.
        CHECK(plain.points[plain.cells[i][c]] == want);
        CHECK(merged.points[merged.cells[i][c]] == want);
      }
    }
  }
}

TEST_CASE("VTK merge at deep levels keeps distinct corners") {
  Mesh m(MeshConfig{3, 128, 42}, kUnit, Backend::Ordered);
  MortonKey k;
  for (Level l = 1; l < 42; ++l) m.refine_leaf(k, l);
  const auto plain = read_vtk(vtk_text(m, false));
  const auto merged = read_vtk(vtk_text(m, true));
  // Each refinement of the zero corner adds 19 lattice points to the 27 of a 3x3x3 block.
  CHECK(merged.points.size() == 27 + 19 * 41);
  CHECK(plain.cells.size() == m.size());
}

TEST_CASE("stats document") {
  const std::vector<Point> pts = {{0.1, 0.2, 0.3}};
  GenerateConfig cfg;
  cfg.max_level = 4;
  cfg.domain = kUnit;
  auto result = generate_from_points(pts, cfg);
  const auto doc = make_stats_document(result.stats, cfg);
  CHECK(doc.per_level_counts.size() == 4);
  CHECK(doc.total_leaves == result.mesh.size());
  CHECK(doc.key_bits == 128);
  CHECK(doc.backend == "ordered");
  CHECK(doc.phases_ms.size() == 6);
  CHECK(doc.config.at("domain") == "0,0,0,1,1,1");
  CHECK(stats_from_json(stats_to_json(doc)) == doc);

  testing::TempDir dir;
  write_stats_json(doc, dir / "s.json");
  CHECK(read_stats_json(dir / "s.json") == doc);
  CHECK_THROWS_KIND(stats_from_json("{\"schemaVersion\": 1}"), ErrorKind::ParseError);
  CHECK_THROWS_KIND(stats_from_json("not json"), ErrorKind::ParseError);
  CHECK_THROWS_KIND(write_stats_json(doc, dir / "missing" / "s.json"), ErrorKind::IoError);

  // Same run: stats totals match the VTK cell count.
  cfg.vtk_out = dir / "m.vtk";
  cfg.stats_out = dir / "m.json";
  generate_from_points(pts, cfg);
  std::ifstream in(cfg.vtk_out);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(read_vtk(ss.str()).cells.size() == read_stats_json(cfg.stats_out).total_leaves);
}

TEST_CASE("Z-order dump") {
  Mesh m(MeshConfig{2, 4, 2}, kUnit, Backend::Ordered);
  m.refine_leaf(key("10", 2), 1);
  std::ostringstream out;
  dump_zorder(m, out);
  CHECK(out.str() == "00\n01\n10,00\n10,01\n10,10\n10,11\n11\n");

  std::vector<std::string> lines;
  std::istringstream in(out.str());
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  CHECK(std::is_sorted(lines.begin(), lines.end()));

  Mesh h(MeshConfig{2, 4, 2}, kUnit, Backend::Hashed);
  std::ostringstream sink;
  CHECK_THROWS_KIND(dump_zorder(h, sink), ErrorKind::UnsupportedBackend);
  testing::TempDir dir;
  CHECK_THROWS_KIND(dump_zorder(h, dir / "z.txt"), ErrorKind::UnsupportedBackend);
  CHECK_FALSE(std::filesystem::exists(dir / "z.txt"));
}

TEST_CASE("bench report serialization") {
  BenchReport report;
  BenchCell cell;
  cell.level = 3;
  cell.samples.resize(2);
  cell.samples[0].per_level = {8, 0, 0};
  cell.leaves = 8;
  cell.linear_balance_ms = 0.5;
  cell.linear_closure_equal = true;
  report.cells.push_back(cell);
  const auto j = bench_to_json(report);
  CHECK(j.find("\"linearScanClosureEqual\": true") != std::string::npos);
  CHECK(j.find("\"backendsAgree\": true") != std::string::npos);
  std::ostringstream table;
  print_bench_table(report, table);
  CHECK(table.str().find("ordered") != std::string::npos);
}
