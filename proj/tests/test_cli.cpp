#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "octmesh/cli.hpp"
#include "octmesh/geometry.hpp"
#include "octmesh/io_export.hpp"
#include "support/helpers.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "octmesh");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = octmesh::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli inspect") {
  const auto r = run({"inspect", "--dim", "3", "--key", "001,000,101", "--domain", "0,0,0,1,1,1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("level 3\n") != std::string::npos);
  CHECK(r.out.find("centroid (-0.3125, -0.4375, 0.1875)") != std::string::npos);
  CHECK(r.out.find("sibling x 001,000,001") != std::string::npos);
  CHECK(r.out.find("face -y boundary yes") != std::string::npos);
  CHECK(r.out.find("face +x boundary no flip_level 2 neighbor 001,100,001") != std::string::npos);
  CHECK(r.out.find("integer 69") != std::string::npos);

  const auto one = run({"inspect", "--dim", "2", "--key", "10,01,01", "--domain", "2,2,4,4", "--axis", "x", "--sign", "-"});
  CHECK(one.code == 0);
  CHECK(one.out.find("face -x boundary no flip_level 1 neighbor 00,11,11") != std::string::npos);
  CHECK(one.out.find("face +x") == std::string::npos);

  CHECK(run({"inspect", "--dim", "3", "--key", "0012"}).code == 1);
  CHECK(run({"inspect", "--dim", "3"}).code == 1);
}

TEST_CASE("cli generate") {
  testing::TempDir dir;
  octmesh::write_stl_binary(octmesh::make_icosphere(1), dir / "sphere.stl");
  const std::string stl = (dir / "sphere.stl").string();
  const auto vtk = dir / "m.vtk";
  const auto stats = dir / "s.json";
  const auto zorder = dir / "z.txt";
  auto args = std::vector<std::string>{"generate", "--stl", stl, "--max-level", "4", "--backend", "ordered",
                                       "--out", vtk.string(), "--stats", stats.string(), "--zorder", zorder.string()};
  const auto r = run(args);
  REQUIRE(r.code == 0);
  CHECK(std::filesystem::exists(vtk));
  CHECK(std::filesystem::exists(stats));
  const auto doc = octmesh::read_stats_json(stats);
  CHECK(r.out.find("leaves " + std::to_string(doc.total_leaves)) != std::string::npos);

  // Same invocation twice: byte-identical mesh and dump.
  const auto first_vtk = slurp(vtk);
  const auto first_z = slurp(zorder);
  REQUIRE(run(args).code == 0);
  CHECK(slurp(vtk) == first_vtk);
  CHECK(slurp(zorder) == first_z);

  const auto missing = run({"generate", "--max-level", "3"});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("Usage") != std::string::npos);
  CHECK(run({"generate", "--stl", stl, "--points", stl}).code == 1);
  CHECK(run({"generate", "--stl", stl, "--bogus"}).code == 1);
  CHECK(run({"generate", "--stl", stl, "--backend", "btree"}).code == 1);
  CHECK(run({"generate", "--stl", (dir / "none.stl").string()}).code == 2);
  CHECK(run({"generate", "--stl", stl, "--max-level", "50"}).code == 2);
  CHECK(run({"generate", "--stl", stl, "--domain", "1,2"}).code == 1);
}

TEST_CASE("cli generate 2D points") {
  testing::TempDir dir;
  {
    std::ofstream f(dir / "p.txt");
    f << "0.1 0.2\n0.7 0.4\n";
  }
  const auto r = run({"generate", "--points", (dir / "p.txt").string(), "--dim", "2", "--max-level", "5",
                      "--out", (dir / "m.vtk").string(), "--merge-points"});
  CHECK(r.code == 0);
  CHECK(slurp(dir / "m.vtk").find("CELL_TYPES") != std::string::npos);
}

TEST_CASE("cli bench") {
  testing::TempDir dir;
  octmesh::write_stl_binary(octmesh::make_icosphere(0), dir / "s.stl");
  const auto r = run({"bench", "--stl", (dir / "s.stl").string(), "--levels", "2,3", "--repeat", "1",
                      "--stats", (dir / "b.json").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("backends agree: yes") != std::string::npos);
  CHECK(slurp(dir / "b.json").find("\"cells\"") != std::string::npos);
  CHECK(run({"bench", "--stl", (dir / "s.stl").string()}).code == 1);
  CHECK(run({"bench", "--stl", (dir / "s.stl").string(), "--levels", "2", "--backends", "tree"}).code != 0);
}

TEST_CASE("cli without a subcommand") {
  CHECK(run({}).code == 1);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"frobnicate"}).code == 1);
}
