#pragma once

#include <doctest.h>

#include <filesystem>
#include <random>
#include <string>

#include "octmesh/morton.hpp"

#define CHECK_THROWS_KIND(expr, k)                            \
  do {                                                        \
    bool thrown_ = false;                                     \
    try {                                                     \
      (void)(expr);                                           \
    } catch (const octmesh::Error& e_) {                      \
      thrown_ = true;                                         \
      CHECK_MESSAGE(e_.kind() == (k), e_.what());             \
    }                                                         \
    CHECK_MESSAGE(thrown_, "expected " #k " from " #expr);    \
  } while (0)

namespace testing {

inline octmesh::MortonKey key(const char* text, int dim) { return octmesh::parse_key(text, dim); }

inline octmesh::MortonKey random_key(std::mt19937_64& rng, int dim, octmesh::Level level) {
  octmesh::MortonKey k;
  std::bernoulli_distribution coin(0.5);
  for (int p = 0; p < dim * level; ++p) k.set(p, coin(rng));
  return k;
}

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("octmesh_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
