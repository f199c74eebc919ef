#include "ising/mcmc.hpp"

#include <algorithm>

namespace ising {

void validate_flip_automorphism(const BipartiteGraph& g, const std::vector<int>& sigma) {
  if (static_cast<int>(sigma.size()) != g.n)
    throw ValidationError("flip automorphism: wrong length");
  std::vector<char> hit(g.n, 0);
  for (int v = 0; v < g.n; ++v) {
    const int w = sigma[v];
    if (w < 0 || w >= g.n || hit[w]) throw ValidationError("flip automorphism: not a bijection");
    hit[w] = 1;
    if (g.side_of(v) == g.side_of(w))
      throw ValidationError("flip automorphism: must swap the odd and even sides");
  }
  for (int v = 0; v < g.n; ++v)
    for (auto u = g.adj[v].find_first(); u != VertexSet::npos; u = g.adj[v].find_next(u))
      if (!g.adj[sigma[v]].test(sigma[u]))
        throw ValidationError("flip automorphism: does not preserve adjacency");
}

std::vector<int> resolve_flip(const BipartiteGraph& g, const ChainSpec& spec) {
  const std::vector<int>& sigma =
      spec.flip_automorphism.empty() ? g.builtin_flip : spec.flip_automorphism;
  if (sigma.empty())
    throw ValidationError(
        "graph has no built-in side-swapping automorphism; supply one explicitly");
  validate_flip_automorphism(g, sigma);
  return sigma;
}

VertexSet glauber_step(const BipartiteGraph& g, const VertexSet& s, const IsingParams& p,
                       CounterRng& rng) {
  const int v = static_cast<int>(rng.below(g.n));
  VertexSet next = s;
  next.reset(v);
  const int j = static_cast<int>((g.adj[v] & next).count());
  const Rational w = p.lambda * num::pow(p.q, j);
  if (exact_bernoulli(w / (1 + w), rng)) next.set(v);
  return next;
}

VertexSet flip_step(const BipartiteGraph& g, const VertexSet& s, const IsingParams& p,
                    const std::vector<int>& sigma, CounterRng& rng) {
  VertexSet next = glauber_step(g, s, p, rng);
  if (rng.bit()) {
    VertexSet flipped(g.n);
    for (auto v = next.find_first(); v != VertexSet::npos; v = next.find_next(v))
      flipped.set(sigma[v]);
    return flipped;
  }
  return next;
}

VertexSet run_chain(const BipartiteGraph& g, const ChainSpec& spec, const VertexSet& s0,
                    uint64_t t) {
  if (static_cast<int>(s0.size()) != g.n) throw ValidationError("run_chain: bad start state");
  CounterRng rng(spec.seed);
  VertexSet s = s0;
  if (spec.kind == ChainKind::GlauberWithFlips) {
    const auto sigma = resolve_flip(g, spec);
    for (uint64_t i = 0; i < t; ++i) s = flip_step(g, s, spec.params, sigma, rng);
  } else {
    for (uint64_t i = 0; i < t; ++i) s = glauber_step(g, s, spec.params, rng);
  }
  return s;
}

}  // namespace ising
