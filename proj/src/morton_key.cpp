#include "octmesh/morton_key.hpp"

namespace octmesh {

std::string format_key(const MortonKey& key, int dim, Level levels) {
  std::string out;
  out.reserve(static_cast<std::size_t>(levels * (dim + 1)));
  for (Level l = 0; l < levels; ++l) {
    if (l) out.push_back(',');
    for (int k = 0; k < dim; ++k) out.push_back(key.test(dim * l + k) ? '1' : '0');
  }
  return out;
}

Level count_groups(std::string_view text) {
  if (text.empty()) return 0;
  Level n = 1;
  for (char c : text) n += (c == ',');
  return n;
}

MortonKey parse_key(std::string_view text, int dim) {
  MortonKey key;
  if (text.empty()) return key;
  int pos = 0;
  int in_group = 0;
  bool group_has_one = false;
  for (char c : text) {
    if (c == ',') {
      if (in_group != dim) {
        throw Error(ErrorKind::ParseError, "group of " + std::to_string(in_group) +
                                               " digits in '" + std::string(text) + "'");
      }
      in_group = 0;
      group_has_one = false;
      continue;
    }
    if (c != '0' && c != '1') {
      throw Error(ErrorKind::ParseError, "bad key character in '" + std::string(text) + "'");
    }
    if (in_group == dim) {
      throw Error(ErrorKind::ParseError, "group longer than " + std::to_string(dim) + " in '" +
                                             std::string(text) + "'");
    }
    if (pos >= kMaxKeyBits) {
      throw Error(ErrorKind::InvalidConfig, "key longer than " + std::to_string(kMaxKeyBits) + " bits");
    }
    key.set(pos++, c == '1');
    group_has_one |= (c == '1');
    ++in_group;
  }
  // A short final group is accepted only as zero padding ("...,000,0").
  if (in_group != dim && group_has_one) {
    throw Error(ErrorKind::ParseError, "trailing group of " + std::to_string(in_group) +
                                           " digits in '" + std::string(text) + "'");
  }
  return key;
}

}  // namespace octmesh
