#pragma once

#include <optional>
#include <vector>

#include "ising/budgets.hpp"
#include "ising/graph.hpp"
#include "ising/params.hpp"

namespace ising {

// 2-linked one-sided set with |[A]| <= (3/4) * side size
struct Polymer {
  VertexSet a;
  Side side = Side::Even;
  int closure_size = 0;
  VertexSet neighborhood;  // N(a)
};

struct DecoratedPolymer {
  Polymer polymer;
  VertexSet b;  // subset of N(a)
};

// pairwise compatible decorated polymers, ordered by minimum vertex of a
using PolymerConfiguration = std::vector<DecoratedPolymer>;

// all polymers with |a| <= k, each exactly once, canonically ordered by
// (|a|, vertex set)
std::vector<Polymer> enumerate_polymers(const BipartiteGraph& g, Side side, int k);

bool polymer_closure_ok(const BipartiteGraph& g, int closure_size);

// true iff a1 and a2 share a vertex or a common neighbor, i.e. a1 ∪ a2 is
// 2-linked; in particular every polymer is incompatible with itself
bool incompatible(const BipartiteGraph& g, const Polymer& a1, const Polymer& a2);

// maximal 2-linked components of s∩side decorated with b = s∩N(a); nullopt if
// any component breaks the closure constraint
std::optional<PolymerConfiguration> recover_configuration(const BipartiteGraph& g,
                                                          const VertexSet& s, Side side);

enum class WeightMode { Product, Sum };

// omega(A): product form lambda^|A| prod_{v in N(A)} (1+lambda q^{d_A(v)})/(1+lambda),
// or the literal 2^|N(A)| sum over decorations
template <class S>
S polymer_weight(const BipartiteGraph& g, const Polymer& poly, const IsingParams& p,
                 WeightMode mode = WeightMode::Product,
                 const Budgets& budgets = Budgets{}) {
  const S lam = p.lambda_as<S>();
  const S q = p.q_as<S>();
  const S one = num::one<S>();
  if (mode == WeightMode::Product) {
    S w = num::pow(lam, static_cast<long>(poly.a.count()));
    for (auto v = poly.neighborhood.find_first(); v != VertexSet::npos;
         v = poly.neighborhood.find_next(v)) {
      const int deg_in_a = static_cast<int>((g.adj[v] & poly.a).count());
      w *= (one + lam * num::pow(q, deg_in_a)) / (one + lam);
    }
    return w;
  }
  const auto nb = set_to_indices(poly.neighborhood);
  if (static_cast<int>(nb.size()) > budgets.sum_mode_neighborhood)
    throw BudgetError("polymer_weight: sum mode refused, |N(A)| = " + std::to_string(nb.size()) +
                      " exceeds budget " + std::to_string(budgets.sum_mode_neighborhood));
  std::vector<int> deg(nb.size());
  for (size_t i = 0; i < nb.size(); ++i)
    deg[i] = static_cast<int>((g.adj[nb[i]] & poly.a).count());
  const S denom = num::pow(one + lam, static_cast<long>(nb.size()));
  S total = num::zero<S>();
  for (uint64_t bs = 0; bs < (uint64_t{1} << nb.size()); ++bs) {
    int cross_edges = 0;
    for (uint64_t rest = bs; rest;) {
      const int i = __builtin_ctzll(rest);
      rest &= rest - 1;
      cross_edges += deg[i];
    }
    total += num::pow(lam, static_cast<long>(poly.a.count()) + __builtin_popcountll(bs)) *
             num::pow(q, cross_edges);
  }
  return total / denom;
}

// omega(A,B) = lambda^{|A|+|B|} q^{|E(A,B)|} / (1+lambda)^{|N(A)|}
template <class S>
S decorated_weight(const BipartiteGraph& g, const DecoratedPolymer& dp, const IsingParams& p) {
  if (!dp.b.is_subset_of(dp.polymer.neighborhood))
    throw ValidationError("decorated polymer: B must lie inside N(A)");
  int cross_edges = 0;
  for (auto v = dp.b.find_first(); v != VertexSet::npos; v = dp.b.find_next(v))
    cross_edges += static_cast<int>((g.adj[v] & dp.polymer.a).count());
  const S lam = p.lambda_as<S>();
  return num::pow(lam, static_cast<long>(dp.polymer.a.count() + dp.b.count())) *
         num::pow(p.q_as<S>(), cross_edges) /
         num::pow(num::one<S>() + lam, static_cast<long>(dp.polymer.neighborhood.count()));
}

// Polymer list of one side with the pairwise incompatibility relation, the
// shared substrate for cluster expansion and sampling.
struct PolymerSystem {
  const BipartiteGraph* g = nullptr;
  Side side = Side::Even;
  int kmax = 0;
  std::vector<Polymer> polymers;
  std::vector<int> size;             // |a| per polymer
  std::vector<VertexSet> incompat;   // bitset over polymer indices, self bit set
  std::vector<VertexSet> containing; // per graph vertex: polymers whose a contains it

  size_t count() const { return polymers.size(); }

  static PolymerSystem build(const BipartiteGraph& g, Side side, int kmax);
};

}  // namespace ising
