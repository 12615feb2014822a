#include "octmesh/octree.hpp"

namespace octmesh {

std::string_view to_string(NeighborResult::Kind kind) {
  switch (kind) {
    case NeighborResult::Kind::Boundary: return "boundary";
    case NeighborResult::Kind::Coarser: return "coarser";
    case NeighborResult::Kind::Same: return "same";
    case NeighborResult::Kind::Finer: return "finer";
  }
  return "unknown";
}

}  // namespace octmesh
