#include "ising/polymer.hpp"

#include <algorithm>

namespace ising {

bool polymer_closure_ok(const BipartiteGraph& g, int closure_size) {
  // |[A]| <= (3/4) |D| with |D| = n/2
  return 4 * closure_size <= 3 * (g.n / 2);
}

std::vector<Polymer> enumerate_polymers(const BipartiteGraph& g, Side side, int k) {
  if (k < 1) throw ValidationError("enumerate_polymers: k must be >= 1");
  const VertexSet& mask = g.side_mask(side);
  const auto a2 = g.side_square_adjacency(side);
  std::vector<Polymer> out;
  VertexSet allowed = mask;
  for (auto root = mask.find_first(); root != VertexSet::npos; root = mask.find_next(root)) {
    // sets whose minimum vertex is root
    enumerate_connected_sets(a2, allowed, static_cast<int>(root), k, [&](const VertexSet& a) {
      const VertexSet cl = closure(g, a, side);
      const int cl_size = static_cast<int>(cl.count());
      if (!polymer_closure_ok(g, cl_size)) return;
      Polymer poly;
      poly.a = a;
      poly.side = side;
      poly.closure_size = cl_size;
      poly.neighborhood = g.neighborhood(a);
      out.push_back(std::move(poly));
    });
    allowed.reset(root);
  }
  std::sort(out.begin(), out.end(), [](const Polymer& x, const Polymer& y) {
    if (x.a.count() != y.a.count()) return x.a.count() < y.a.count();
    return x.a < y.a;
  });
  return out;
}

bool incompatible(const BipartiteGraph& g, const Polymer& a1, const Polymer& a2) {
  (void)g;
  if (a1.side != a2.side)
    throw ValidationError("incompatibility is defined for polymers of one side");
  if ((a1.a & a2.a).any()) return true;
  return (a1.neighborhood & a2.neighborhood).any();
}

std::optional<PolymerConfiguration> recover_configuration(const BipartiteGraph& g,
                                                          const VertexSet& s, Side side) {
  PolymerConfiguration config;
  for (const auto& comp : two_linked_components(g, s, side)) {
    const int cl_size = static_cast<int>(closure(g, comp, side).count());
    if (!polymer_closure_ok(g, cl_size)) return std::nullopt;
    DecoratedPolymer dp;
    dp.polymer.a = comp;
    dp.polymer.side = side;
    dp.polymer.closure_size = cl_size;
    dp.polymer.neighborhood = g.neighborhood(comp);
    dp.b = s & dp.polymer.neighborhood;
    config.push_back(std::move(dp));
  }
  return config;
}

PolymerSystem PolymerSystem::build(const BipartiteGraph& g, Side side, int kmax) {
  PolymerSystem sys;
  sys.g = &g;
  sys.side = side;
  sys.kmax = kmax;
  sys.polymers = enumerate_polymers(g, side, kmax);
  const size_t p = sys.polymers.size();
  sys.size.resize(p);
  sys.incompat.assign(p, VertexSet(p));
  for (size_t i = 0; i < p; ++i) sys.size[i] = static_cast<int>(sys.polymers[i].a.count());
  for (size_t i = 0; i < p; ++i) {
    sys.incompat[i].set(i);
    for (size_t j = i + 1; j < p; ++j) {
      if (incompatible(g, sys.polymers[i], sys.polymers[j])) {
        sys.incompat[i].set(j);
        sys.incompat[j].set(i);
      }
    }
  }
  sys.containing.assign(g.n, VertexSet(p));
  for (size_t i = 0; i < p; ++i)
    for (auto v = sys.polymers[i].a.find_first(); v != VertexSet::npos;
         v = sys.polymers[i].a.find_next(v))
      sys.containing[v].set(i);
  return sys;
}

}  // namespace ising
