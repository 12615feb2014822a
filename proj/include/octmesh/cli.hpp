#pragma once

#include <ostream>

namespace octmesh::cli {

// Exit codes: 0 success, 1 usage error, 2 runtime error. Data goes to `out`,
// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace octmesh::cli
