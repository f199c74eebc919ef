#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ising/budgets.hpp"
#include "ising/distribution.hpp"
#include "ising/graph.hpp"
#include "ising/model.hpp"
#include "ising/params.hpp"
#include "ising/rng.hpp"

namespace ising {

enum class ChainKind { Glauber, GlauberWithFlips };

struct ChainSpec {
  ChainKind kind = ChainKind::Glauber;
  IsingParams params;
  uint64_t seed = 0;
  // side-swapping automorphism for the flips move; empty = use the graph's
  // built-in first-coordinate flip
  std::vector<int> flip_automorphism;
};

// checks bijection, adjacency preservation and that the map swaps the sides
void validate_flip_automorphism(const BipartiteGraph& g, const std::vector<int>& sigma);

// the automorphism the spec will actually use (explicit or built-in)
std::vector<int> resolve_flip(const BipartiteGraph& g, const ChainSpec& spec);

// one heat-bath update: uniform vertex, then include with probability
// lambda q^j / (1 + lambda q^j), j = |N(v) ∩ S|
VertexSet glauber_step(const BipartiteGraph& g, const VertexSet& s, const IsingParams& p,
                       CounterRng& rng);

// glauber step, then with probability 1/2 the image under sigma
VertexSet flip_step(const BipartiteGraph& g, const VertexSet& s, const IsingParams& p,
                    const std::vector<int>& sigma, CounterRng& rng);

// t steps with the chain's own seeded stream; reproducible from (seed, s0, t)
VertexSet run_chain(const BipartiteGraph& g, const ChainSpec& spec, const VertexSet& s0,
                    uint64_t t);

namespace detail {

template <class S>
struct GlauberTables {
  std::vector<uint32_t> adj;
  std::vector<S> p_add;   // p_add[j] = lambda q^j / (1 + lambda q^j)
  std::vector<S> p_drop;  // 1 - p_add[j]
  S inv_n;
};

template <class S>
GlauberTables<S> make_glauber_tables(const BipartiteGraph& g, const IsingParams& p) {
  GlauberTables<S> t;
  t.adj = g.adjacency_masks();
  const S lam = p.lambda_as<S>();
  const S q = p.q_as<S>();
  const S one = num::one<S>();
  for (int j = 0; j <= g.d; ++j) {
    const S w = lam * num::pow(q, j);
    t.p_add.push_back(w / (one + w));
    t.p_drop.push_back(one / (one + w));
  }
  t.inv_n = num::from_ratio<S>(1, g.n);
  return t;
}

}  // namespace detail

// dist' = dist P for the Glauber kernel, on the full 2^n state space
template <class S>
std::vector<S> apply_glauber_operator(const BipartiteGraph& g, const IsingParams& p,
                                      const std::vector<S>& dist) {
  const auto t = detail::make_glauber_tables<S>(g, p);
  const int n = g.n;
  std::vector<S> out(dist.size(), num::zero<S>());
  for (uint32_t x = 0; x < dist.size(); ++x) {
    if (num::is_zero(dist[x])) continue;
    const S share = dist[x] * t.inv_n;
    for (int v = 0; v < n; ++v) {
      const uint32_t bit = uint32_t{1} << v;
      const int j = __builtin_popcount(t.adj[v] & x & ~bit);
      out[x | bit] += share * t.p_add[j];
      out[x & ~bit] += share * t.p_drop[j];
    }
  }
  return out;
}

// dist' = dist * (1/2)(I + I_sigma)
template <class S>
std::vector<S> apply_flip_average(const BipartiteGraph& g, const std::vector<int>& sigma,
                                  const std::vector<S>& dist) {
  const S half = num::from_ratio<S>(1, 2);
  std::vector<S> out(dist.size(), num::zero<S>());
  for (uint32_t x = 0; x < dist.size(); ++x) {
    if (num::is_zero(dist[x])) continue;
    uint32_t y = 0;
    for (int v = 0; v < g.n; ++v)
      if (x >> v & 1u) y |= uint32_t{1} << sigma[v];
    const S share = dist[x] * half;
    out[x] += share;
    out[y] += share;
  }
  return out;
}

// one step of the selected chain applied to a distribution vector
template <class S>
std::vector<S> apply_chain_operator(const BipartiteGraph& g, const ChainSpec& spec,
                                    const std::vector<S>& dist) {
  auto next = apply_glauber_operator<S>(g, spec.params, dist);
  if (spec.kind == ChainKind::GlauberWithFlips)
    next = apply_flip_average<S>(g, resolve_flip(g, spec), next);
  return next;
}

// P(from, to) for the plain Glauber kernel (masks differing in <= 1 vertex)
template <class S>
S glauber_transition(const BipartiteGraph& g, const IsingParams& p, uint32_t from, uint32_t to) {
  const auto t = detail::make_glauber_tables<S>(g, p);
  const uint32_t diff = from ^ to;
  if (__builtin_popcount(diff) > 1) return num::zero<S>();
  if (diff != 0) {
    const int v = __builtin_ctz(diff);
    const int j = __builtin_popcount(t.adj[v] & from & ~diff);
    return t.inv_n * ((to & diff) ? t.p_add[j] : t.p_drop[j]);
  }
  S stay = num::zero<S>();
  for (int v = 0; v < g.n; ++v) {
    const uint32_t bit = uint32_t{1} << v;
    const int j = __builtin_popcount(t.adj[v] & from & ~bit);
    stay += (from & bit) ? t.p_add[j] : t.p_drop[j];
  }
  return stay * t.inv_n;
}

template <class S>
struct TvPoint {
  int t = 0;
  S tv = num::zero<S>();
};

// ||P^t(s0, .) - mu||_TV for t = 0..t_max
template <class S>
std::vector<TvPoint<S>> exact_tv_curve(const BipartiteGraph& g, const ChainSpec& spec,
                                       const VertexSet& s0, int t_max, const Budgets& budgets) {
  require_state_budget(g.n, budgets.tv_n, "exact_tv_curve");
  const auto mu = gibbs_exact<S>(g, spec.params, budgets);
  std::vector<S> dist(size_t{1} << g.n, num::zero<S>());
  dist[set_to_mask(s0)] = num::one<S>();
  const S half = num::from_ratio<S>(1, 2);
  std::vector<TvPoint<S>> curve;
  for (int t = 0;; ++t) {
    S acc = num::zero<S>();
    for (size_t x = 0; x < dist.size(); ++x) acc += num::abs(dist[x] - mu.p[x]);
    curve.push_back({t, acc * half});
    if (t == t_max) break;
    dist = apply_chain_operator<S>(g, spec, dist);
  }
  return curve;
}

// tau_mix(eps) = max over starting states of the first t with TV <= eps;
// nullopt if some start has not mixed within t_cap
template <class S>
std::optional<int> tau_mix_exact(const BipartiteGraph& g, const ChainSpec& spec, const S& eps,
                                 int t_cap, const Budgets& budgets) {
  require_state_budget(g.n, budgets.tv_n, "tau_mix_exact");
  const auto mu = gibbs_exact<S>(g, spec.params, budgets);
  const S half = num::from_ratio<S>(1, 2);
  int worst = 0;
  for (uint32_t s0 = 0; s0 < (uint32_t{1} << g.n); ++s0) {
    std::vector<S> dist(size_t{1} << g.n, num::zero<S>());
    dist[s0] = num::one<S>();
    int t = 0;
    for (;; ++t) {
      S acc = num::zero<S>();
      for (size_t x = 0; x < dist.size(); ++x) acc += num::abs(dist[x] - mu.p[x]);
      if (acc * half <= eps) break;  // TV is nonincreasing in t, first hit is tau
      if (t == t_cap) return std::nullopt;
      dist = apply_chain_operator<S>(g, spec, dist);
    }
    worst = std::max(worst, t);
  }
  return worst;
}

template <class S>
struct MixingReport {
  S partition = num::zero<S>();       // Z
  S weight_se = num::zero<S>();       // w(S_E)
  S weight_so = num::zero<S>();
  S weight_balanced = num::zero<S>(); // w(S_bal)
  S q_cut_z = num::zero<S>();         // Z * Q(S_E, S_E^c)
  S mu_se = num::zero<S>();
  S phi_se = num::zero<S>();          // Q(S_E,S_E^c)/mu(S_E)
  S bound_rhs = num::zero<S>();       // w(S_bal) / (1+lambda)^(n/2)
};

// exact even/odd bottleneck quantities of the plain Glauber chain
template <class S>
MixingReport<S> conductance_exact(const BipartiteGraph& g, const IsingParams& p,
                                  const Budgets& budgets) {
  require_state_budget(g.n, budgets.exhaustive_n, "conductance_exact");
  const auto tables = detail::make_glauber_tables<S>(g, p);
  const int n = g.n;
  const uint32_t even_mask = set_to_mask(g.even);
  const S lam = p.lambda_as<S>();
  const S q = p.q_as<S>();

  auto majority = [&](uint32_t x) {
    const int e = __builtin_popcount(x & even_mask);
    const int o = __builtin_popcount(x & ~even_mask);
    return e > o ? 1 : (o > e ? -1 : 0);
  };

  MixingReport<S> rep;
  std::vector<uint32_t> adj_above(n);
  for (int v = 0; v < n; ++v)
    adj_above[v] = v + 1 < 32 ? (tables.adj[v] & ~((uint32_t{2} << v) - 1)) : 0;
  for (uint64_t xi = 0; xi < (uint64_t{1} << n); ++xi) {
    const auto x = static_cast<uint32_t>(xi);
    int edges = 0;
    for (uint32_t rest = x; rest;) {
      const int v = __builtin_ctz(rest);
      rest &= rest - 1;
      edges += __builtin_popcount(adj_above[v] & x);
    }
    const S w = num::pow(lam, __builtin_popcount(x)) * num::pow(q, edges);
    rep.partition += w;
    const int side = majority(x);
    if (side == 0) rep.weight_balanced += w;
    if (side > 0) rep.weight_se += w;
    if (side < 0) rep.weight_so += w;
    if (side > 0) {
      // escape probability into balanced sets (single-site moves only)
      for (int v = 0; v < n; ++v) {
        const uint32_t bit = uint32_t{1} << v;
        const uint32_t y = x ^ bit;
        if (majority(y) == 1) continue;
        const int j = __builtin_popcount(tables.adj[v] & x & ~bit);
        rep.q_cut_z += w * tables.inv_n * ((y & bit) ? tables.p_add[j] : tables.p_drop[j]);
      }
    }
  }
  rep.mu_se = rep.weight_se / rep.partition;
  rep.phi_se = rep.q_cut_z / rep.weight_se;
  rep.bound_rhs =
      rep.weight_balanced / num::pow(num::one<S>() + lam, g.n / 2);
  return rep;
}

}  // namespace ising
