#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "ising/budgets.hpp"
#include "ising/polymer.hpp"

namespace ising {

// adjacency-mask graph small enough for Ursell computations
struct SmallGraph {
  int m = 0;
  std::vector<uint32_t> adj;  // bit j of adj[i]: edge ij

  static SmallGraph empty(int m) { return SmallGraph{m, std::vector<uint32_t>(m, 0)}; }
  void add_edge(int i, int j) {
    adj[i] |= uint32_t{1} << j;
    adj[j] |= uint32_t{1} << i;
  }
};

// phi(H) = (1/m!) sum over connected spanning edge sets F of (-1)^|F|
Rational ursell(const SmallGraph& h, const Budgets& budgets = Budgets{});

// independent deletion-contraction route for m! * phi(H)
long long ursell_delcon_signed_count(int m, std::vector<std::pair<int, int>> edges);
Rational ursell_delcon(const SmallGraph& h);

// Cluster as a multiset: ordered-tuple sums are recovered through the
// orderings factor m!/prod(c_i!).
struct Cluster {
  std::vector<int> support;       // distinct polymer indices, ascending
  std::vector<int> multiplicity;  // per support entry, >= 1
  int size = 0;                   // sum multiplicity_i * |A_i|
  int copies = 0;                 // sum multiplicity_i
  uint64_t orderings = 0;         // m! / prod c_i!
  SmallGraph incompat_graph;      // on the copies
};

// Streams every cluster of total size <= kmax whose incompatibility graph is
// connected. Deterministic order: supports in canonical enumeration order,
// multiplicities lexicographic.
void enumerate_clusters(const PolymerSystem& sys, int kmax,
                        const std::function<void(const Cluster&)>& visit,
                        const VertexSet* allowed = nullptr);

template <class S>
struct ClusterTruncation {
  Side side = Side::Even;
  int k = 0;
  S value = num::zero<S>();            // L_{<=k}
  std::vector<S> per_size;             // per_size[j] = L_j, j = 1..k (index 0 unused)
  uint64_t ledger_count = 0;           // clusters (multisets) summed
};

struct UrsellCache {
  Budgets budgets;
  std::unordered_map<std::string, Rational> memo;

  const Rational& get(const SmallGraph& h) {
    std::string key(reinterpret_cast<const char*>(h.adj.data()), h.adj.size() * sizeof(uint32_t));
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(std::move(key), ursell(h, budgets)).first;
    return it->second;
  }
};

// L_{D,<=k}: truncated cluster expansion of one side's polymer model. When
// `allowed` is given, only that polymer subset participates (restricted
// models share the machinery).
template <class S>
ClusterTruncation<S> compute_L(const PolymerSystem& sys, const IsingParams& p, int k,
                               const Budgets& budgets = Budgets{},
                               const VertexSet* allowed = nullptr) {
  ClusterTruncation<S> out;
  out.side = sys.side;
  out.k = k;
  out.per_size.assign(k + 1, num::zero<S>());

  std::vector<S> w(sys.count());
  for (size_t i = 0; i < sys.count(); ++i)
    w[i] = polymer_weight<S>(*sys.g, sys.polymers[i], p, WeightMode::Product);

  UrsellCache cache{budgets, {}};
  std::vector<NeumaierSum> compensated;
  constexpr bool kDouble = std::is_same_v<S, double>;
  if constexpr (kDouble) compensated.assign(k + 1, NeumaierSum{});

  enumerate_clusters(
      sys, k,
      [&](const Cluster& c) {
        ++out.ledger_count;
        const Rational& phi = cache.get(c.incompat_graph);
        if (sgn(phi) == 0) return;
        S term = num::from_rational<S>(phi) *
                 num::from_ratio<S>(static_cast<long>(c.orderings), 1);
        for (size_t i = 0; i < c.support.size(); ++i)
          term *= num::pow(w[c.support[i]], c.multiplicity[i]);
        if constexpr (kDouble)
          compensated[c.size].add(term);
        else
          out.per_size[c.size] += term;
      },
      allowed);

  if constexpr (kDouble)
    for (int j = 1; j <= k; ++j) out.per_size[j] = compensated[j].value();
  for (int j = 1; j <= k; ++j) out.value += out.per_size[j];
  return out;
}

// Xi_D: exact sum over all sets of pairwise compatible polymers.
template <class S>
S xi_exact(const PolymerSystem& sys, const IsingParams& p, const Budgets& budgets,
           const VertexSet* allowed = nullptr) {
  std::vector<S> w(sys.count());
  for (size_t i = 0; i < sys.count(); ++i)
    w[i] = polymer_weight<S>(*sys.g, sys.polymers[i], p, WeightMode::Product);
  uint64_t configs = 0;
  const size_t np = sys.count();
  // avail holds addable polymer indices > the last chosen one
  std::function<S(const VertexSet&)> rec = [&](const VertexSet& avail) -> S {
    if (++configs > budgets.xi_configurations)
      throw BudgetError("xi_exact: configuration count exceeds budget");
    S total = num::one<S>();  // stop extending: one completed configuration
    for (auto u = avail.find_first(); u != VertexSet::npos; u = avail.find_next(u)) {
      VertexSet rest = avail - sys.incompat[u];
      // only higher indices keep each configuration enumerated once
      for (auto t = rest.find_first(); t != VertexSet::npos && t <= u; t = rest.find_next(t))
        rest.reset(t);
      total += w[u] * rec(rest);
    }
    return total;
  };
  VertexSet initial(np);
  initial.set();
  if (allowed) initial &= *allowed;
  return rec(initial);
}

// tail-bound inputs for the truncation-order selector
struct TailBoundInputs {
  long n = 0;
  int d = 0;
  double kappa = 0.5;
  int delta2 = 2;
  double lambda = 1.0;
  double q = 0.0;
  double epsilon = 0.1;
};

// piecewise tail exponent; alpha_tilde = (1+lambda)/(1+lambda q)
double g_tilde(double k, const TailBoundInputs& in);

struct K0Choice {
  long k0 = 1;
  bool certified = false;  // g_tilde(k0) cleared the tail threshold
  std::array<long, 3> candidates{};
  double threshold = 0;    // log(16 n / (eps d^{kappa+1}))
};

K0Choice select_k0(const TailBoundInputs& in);

}  // namespace ising
