#include "octmesh/types.hpp"

#include <cmath>
#include <string>

namespace octmesh {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorKind::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::MaxDepthExceeded: return "MaxDepthExceeded";
    case ErrorKind::NotALeaf: return "NotALeaf";
    case ErrorKind::KeyNotFound: return "KeyNotFound";
    case ErrorKind::ChildrenNotLeaves: return "ChildrenNotLeaves";
    case ErrorKind::WouldViolateBalance: return "WouldViolateBalance";
    case ErrorKind::InconsistentPartition: return "InconsistentPartition";
    case ErrorKind::UnbalancedTree: return "UnbalancedTree";
    case ErrorKind::UnsupportedBackend: return "UnsupportedBackend";
    case ErrorKind::MalformedStl: return "MalformedStl";
    case ErrorKind::EmptyGeometry: return "EmptyGeometry";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::NonTermination: return "NonTermination";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

void MeshConfig::validate() const {
  if (dim != 2 && dim != 3) {
    throw Error(ErrorKind::InvalidConfig, "dimension must be 2 or 3, got " + std::to_string(dim));
  }
  if (key_bits < dim || key_bits > kMaxKeyBits) {
    throw Error(ErrorKind::InvalidConfig,
                "key width must be in [" + std::to_string(dim) + ", " + std::to_string(kMaxKeyBits) +
                    "], got " + std::to_string(key_bits));
  }
  if (max_level < 1) {
    throw Error(ErrorKind::InvalidConfig, "max level must be >= 1");
  }
  if (dim * max_level > key_bits) {
    throw Error(ErrorKind::InvalidConfig,
                std::to_string(max_level) + " levels need " + std::to_string(dim * max_level) +
                    " bits but the key holds " + std::to_string(key_bits));
  }
}

double DomainBox::volume(int dim) const {
  double v = 1.0;
  for (int k = 0; k < dim; ++k) v *= lengths[static_cast<std::size_t>(k)];
  return v;
}

void DomainBox::validate(int dim) const {
  for (int k = 0; k < dim; ++k) {
    const auto i = static_cast<std::size_t>(k);
    if (!(lengths[i] > 0.0) || !std::isfinite(lengths[i]) || !std::isfinite(center[i])) {
      throw Error(ErrorKind::InvalidConfig, "domain lengths must be positive and finite");
    }
  }
}

std::string_view to_string(Backend backend) {
  return backend == Backend::Ordered ? "ordered" : "hashed";
}

Backend parse_backend(std::string_view text) {
  if (text == "ordered") return Backend::Ordered;
  if (text == "hashed") return Backend::Hashed;
  throw Error(ErrorKind::ParseError, "unknown backend '" + std::string(text) + "'");
}

}  // namespace octmesh
