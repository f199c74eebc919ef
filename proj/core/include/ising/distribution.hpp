#pragma once

#include <stdexcept>
#include <vector>

#include "ising/numeric.hpp"

namespace ising {

// Probability vector over all 2^n vertex subsets, indexed by bitmask.
template <class S>
struct Distribution {
  int n = 0;
  std::vector<S> p;

  S sum() const {
    S t = num::zero<S>();
    for (const auto& x : p) t += x;
    return t;
  }
};

template <class S>
S total_variation(const Distribution<S>& a, const Distribution<S>& b) {
  if (a.p.size() != b.p.size()) throw std::invalid_argument("TV: mismatched state spaces");
  S acc = num::zero<S>();
  for (size_t i = 0; i < a.p.size(); ++i) acc += num::abs(a.p[i] - b.p[i]);
  return acc / num::from_ratio<S>(2, 1);
}

}  // namespace ising
