#pragma once

#include <boost/dynamic_bitset.hpp>

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace ising {

// Vertex subsets double as spin configurations.
using VertexSet = boost::dynamic_bitset<uint64_t>;

inline VertexSet make_set(size_t n, std::initializer_list<int> verts) {
  VertexSet s(n);
  for (int v : verts) s.set(static_cast<size_t>(v));
  return s;
}

inline std::vector<int> set_to_indices(const VertexSet& s) {
  std::vector<int> out;
  for (auto v = s.find_first(); v != VertexSet::npos; v = s.find_next(v))
    out.push_back(static_cast<int>(v));
  return out;
}

// mask fast path for exhaustive sweeps (state spaces up to 2^32)
inline uint32_t set_to_mask(const VertexSet& s) {
  if (s.size() > 32) throw std::logic_error("set_to_mask: more than 32 vertices");
  uint32_t m = 0;
  for (auto v = s.find_first(); v != VertexSet::npos; v = s.find_next(v))
    m |= uint32_t{1} << v;
  return m;
}

inline VertexSet mask_to_set(size_t n, uint32_t mask) {
  VertexSet s(n);
  while (mask) {
    const int v = __builtin_ctz(mask);
    mask &= mask - 1;
    s.set(static_cast<size_t>(v));
  }
  return s;
}

}  // namespace ising
