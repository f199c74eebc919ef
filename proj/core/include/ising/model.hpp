#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ising/budgets.hpp"
#include "ising/distribution.hpp"
#include "ising/graph.hpp"
#include "ising/parallel.hpp"
#include "ising/params.hpp"

namespace ising {

// number of edges induced by s
inline int induced_edges(const BipartiteGraph& g, const VertexSet& s) {
  int twice = 0;
  for (auto v = s.find_first(); v != VertexSet::npos; v = s.find_next(v))
    twice += static_cast<int>((g.adj[v] & s).count());
  return twice / 2;
}

// w(S) = lambda^|S| q^|E(S)|
template <class S>
S config_weight(const BipartiteGraph& g, const VertexSet& s, const IsingParams& p) {
  return num::pow(p.lambda_as<S>(), static_cast<long>(s.count())) *
         num::pow(p.q_as<S>(), induced_edges(g, s));
}

// The partition function as a bivariate polynomial: count[k][m] subsets with
// k vertices and m induced edges. The counting is pure integer work; the
// (lambda, q) evaluation happens in whichever scalar mode is active.
struct PartitionPoly {
  int n = 0;
  int max_edges = 0;
  std::vector<std::vector<uint64_t>> count;  // count[k][m]

  template <class S>
  S evaluate(const IsingParams& p) const {
    const S lam = p.lambda_as<S>();
    const S q = p.q_as<S>();
    S total = num::zero<S>();
    for (int k = 0; k <= n; ++k) {
      S lam_k = num::pow(lam, k);
      for (int m = 0; m <= max_edges; ++m) {
        if (count[k][m] == 0) continue;
        S term = num::from_ratio<S>(static_cast<long>(count[k][m]), 1) * lam_k * num::pow(q, m);
        total += term;
      }
    }
    return total;
  }
};

inline PartitionPoly partition_polynomial(const BipartiteGraph& g, const Budgets& budgets,
                                          int threads = 1) {
  require_state_budget(g.n, budgets.exhaustive_n, "partition_exact");
  const auto adj = g.adjacency_masks();
  const int n = g.n;
  // adjacency restricted to higher-indexed vertices: counts each edge once
  std::vector<uint32_t> adj_above(n);
  for (int v = 0; v < n; ++v)
    adj_above[v] = v + 1 < 32 ? (adj[v] & ~((uint32_t{2} << v) - 1)) : 0;

  const int me = static_cast<int>(g.edge_count());
  const uint64_t states = uint64_t{1} << n;
  std::vector<std::vector<std::vector<uint64_t>>> partial(
      std::max(threads, 1),
      std::vector<std::vector<uint64_t>>(n + 1, std::vector<uint64_t>(me + 1, 0)));
  parallel_chunks(states, threads, [&](uint64_t begin, uint64_t end, int chunk) {
    auto& mine = partial[chunk];
    for (uint64_t mask = begin; mask < end; ++mask) {
      const auto m32 = static_cast<uint32_t>(mask);
      int edges = 0;
      for (uint32_t rest = m32; rest;) {
        const int v = __builtin_ctz(rest);
        rest &= rest - 1;
        edges += __builtin_popcount(adj_above[v] & m32);
      }
      ++mine[__builtin_popcount(m32)][edges];
    }
  });
  PartitionPoly poly;
  poly.n = n;
  poly.max_edges = me;
  poly.count.assign(n + 1, std::vector<uint64_t>(me + 1, 0));
  for (const auto& part : partial)
    for (int k = 0; k <= n; ++k)
      for (int m = 0; m <= me; ++m) poly.count[k][m] += part[k][m];
  return poly;
}

// Z_G(lambda, q) = sum over all subsets, exactly
template <class S>
S partition_exact(const BipartiteGraph& g, const IsingParams& p, const Budgets& budgets,
                  int threads = 1) {
  return partition_polynomial(g, budgets, threads).evaluate<S>(p);
}

template <class S>
Distribution<S> gibbs_exact(const BipartiteGraph& g, const IsingParams& p,
                            const Budgets& budgets) {
  require_state_budget(g.n, budgets.exhaustive_n, "gibbs_exact");
  const auto adj = g.adjacency_masks();
  const int n = g.n;
  std::vector<uint32_t> adj_above(n);
  for (int v = 0; v < n; ++v)
    adj_above[v] = v + 1 < 32 ? (adj[v] & ~((uint32_t{2} << v) - 1)) : 0;
  const S lam = p.lambda_as<S>();
  const S q = p.q_as<S>();

  Distribution<S> dist;
  dist.n = n;
  dist.p.reserve(size_t{1} << n);
  S total = num::zero<S>();
  for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
    const auto m32 = static_cast<uint32_t>(mask);
    int edges = 0;
    for (uint32_t rest = m32; rest;) {
      const int v = __builtin_ctz(rest);
      rest &= rest - 1;
      edges += __builtin_popcount(adj_above[v] & m32);
    }
    S w = num::pow(lam, __builtin_popcount(m32)) * num::pow(q, edges);
    total += w;
    dist.p.push_back(std::move(w));
  }
  for (auto& x : dist.p) x /= total;
  return dist;
}

// E[Z_{G_p}(lambda)] via the literal sum over retained edge sets F:
// sum_F p^|F| (1-p)^(|E|-|F|) * (independence polynomial of (V,F) at lambda).
// The (F, S) sweep is aggregated into integer counts first.
template <class S>
S percolation_expectation(const BipartiteGraph& g, const Rational& lambda,
                          const Rational& p_edge, const Budgets& budgets) {
  if (sgn(p_edge) < 0 || p_edge > 1) throw ValidationError("edge probability must lie in [0,1]");
  const int me = static_cast<int>(g.edge_count());
  if (me > budgets.edge_budget)
    throw BudgetError("percolation_expectation: " + std::to_string(me) +
                      " edges exceed the edge budget " + std::to_string(budgets.edge_budget));
  require_state_budget(g.n, budgets.exhaustive_n, "percolation_expectation");
  if (me + g.n > 30)
    throw BudgetError("percolation_expectation: 2^(|E|+n) sweep too large");

  // edge index masks
  const auto adj = g.adjacency_masks();
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < g.n; ++u)
    for (auto v = g.adj[u].find_next(u); v != VertexSet::npos; v = g.adj[u].find_next(v))
      edges.emplace_back(u, static_cast<int>(v));
  // for each vertex subset, the set of graph edges it induces
  const uint32_t nstates = uint32_t{1} << g.n;
  std::vector<uint32_t> edge_mask(nstates, 0);
  for (uint32_t mask = 1; mask < nstates; ++mask) {
    for (size_t e = 0; e < edges.size(); ++e) {
      const uint32_t both = (uint32_t{1} << edges[e].first) | (uint32_t{1} << edges[e].second);
      if ((mask & both) == both) edge_mask[mask] |= uint32_t{1} << e;
    }
  }

  // cnt[f][k] = #(F, S) pairs with |F| = f and S independent in (V, F), |S| = k
  std::vector<std::vector<uint64_t>> cnt(me + 1, std::vector<uint64_t>(g.n + 1, 0));
  for (uint32_t f = 0; f < (uint32_t{1} << me); ++f) {
    const int fsize = __builtin_popcount(f);
    for (uint32_t mask = 0; mask < nstates; ++mask)
      if ((f & edge_mask[mask]) == 0) ++cnt[fsize][__builtin_popcount(mask)];
  }

  const S lam = num::from_rational<S>(lambda);
  const S pe = num::from_rational<S>(p_edge);
  const S pc = num::one<S>() - pe;
  S total = num::zero<S>();
  for (int f = 0; f <= me; ++f)
    for (int k = 0; k <= g.n; ++k) {
      if (cnt[f][k] == 0) continue;
      total += num::from_ratio<S>(static_cast<long>(cnt[f][k]), 1) * num::pow(pe, f) *
               num::pow(pc, me - f) * num::pow(lam, k);
    }
  return total;
}

// classical Ising couplings equivalent to the lattice-gas (lambda, beta)
// parameterization on a d-regular graph:
//   J = -beta/4,  h = log(lambda)/2 - beta*d/4,  per-vertex shift beta*d/8 - log(lambda)/2.
struct ClassicalParams {
  double coupling_j = 0;
  double field_h = 0;
  double shift_per_vertex = 0;
};

inline ClassicalParams classical_params(double lambda, double beta, int d) {
  if (d < 1) throw ValidationError("classical_params: degree must be >= 1");
  if (lambda <= 0) throw ValidationError("classical_params: lambda must be positive");
  ClassicalParams c;
  c.coupling_j = -beta / 4.0;
  c.field_h = std::log(lambda) / 2.0 - beta * d / 4.0;
  c.shift_per_vertex = beta * d / 8.0 - std::log(lambda) / 2.0;
  return c;
}

}  // namespace ising
