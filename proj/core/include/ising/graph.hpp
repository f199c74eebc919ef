#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ising/bitset.hpp"
#include "ising/budgets.hpp"
#include "ising/numeric.hpp"

namespace ising {

enum class Side { Odd, Even };

inline Side opposite(Side s) { return s == Side::Odd ? Side::Even : Side::Odd; }
inline const char* side_name(Side s) { return s == Side::Odd ? "odd" : "even"; }

// Immutable d-regular bipartite graph with part labels. Construction goes
// through generate_graph / load_graph_file, which enforce the invariants:
// d-regularity, bipartiteness across (Odd, Even), equal sides, symmetry.
struct BipartiteGraph {
  int n = 0;
  int d = 0;
  std::vector<VertexSet> adj;
  VertexSet odd, even;
  std::string name;
  // side-swapping automorphism for coordinate graphs (first-coordinate flip);
  // empty for graphs where the user must supply one
  std::vector<int> builtin_flip;

  Side side_of(int v) const { return even.test(v) ? Side::Even : Side::Odd; }
  const VertexSet& side_mask(Side s) const { return s == Side::Even ? even : odd; }

  // external neighborhood N(A)
  VertexSet neighborhood(const VertexSet& a) const {
    VertexSet nb(n);
    for (auto v = a.find_first(); v != VertexSet::npos; v = a.find_next(v)) nb |= adj[v];
    return nb - a;
  }

  int codegree(int u, int v) const { return static_cast<int>((adj[u] & adj[v]).count()); }

  size_t edge_count() const { return static_cast<size_t>(n) * d / 2; }

  // adjacency as uint32 masks, for exhaustive sweeps (requires n <= 32)
  std::vector<uint32_t> adjacency_masks() const;

  // distance<=2 adjacency inside one side (share a common neighbor)
  std::vector<VertexSet> side_square_adjacency(Side side) const;

  // distance<=2 adjacency over all vertices (G^2, both distance 1 and 2)
  std::vector<VertexSet> square_adjacency() const;
};

// Generator specs:
//   hypercube:d        d >= 1
//   cycle:m            m even >= 4
//   torus:m^t          m even >= 4, t >= 1
//   middle-layer:d     d odd >= 3
//   cartesian:<a>x<b>  both factors bipartite regular
//   file:<path>        edge-list file, see load_graph_file
BipartiteGraph generate_graph(const std::string& spec);

// File format: first line "n d", then one "u v" edge per line, 0-indexed.
// Bipartition is inferred by 2-coloring (the class of vertex 0 is Even);
// non-bipartite or non-regular inputs are rejected.
BipartiteGraph load_graph_file(const std::string& path);
void write_graph_file(const BipartiteGraph& g, const std::string& path);

// Automorphism file: one line "i -> j" per vertex.
std::vector<int> load_automorphism_file(const BipartiteGraph& g, const std::string& path);

enum class TriState { Verified, Violated, Skipped };
inline const char* tri_state_name(TriState t) {
  switch (t) {
    case TriState::Verified: return "verified";
    case TriState::Violated: return "violated";
    default: return "skipped-beyond-budget";
  }
}

struct ClassReport {
  int max_codegree = 0;
  // condition (2)-style expansion |N(X)| > |X| for X up to 3n/8, per side;
  // the hidden constant makes only the strict inequality checkable
  TriState expansion_ok = TriState::Skipped;
  std::optional<VertexSet> expansion_witness;
  Rational expansion_ratio_min{1};   // min |N(X)|/|X| over checked sets
  double expansion_margin_min = 0;   // min (|N(X)|/|X| - 1) * d^kappa
  int expansion_checked_max = 0;     // largest |X| checked exhaustively
  // condition (4): |N(X)| >= sqrt(d)|X| for |X| <= d^3 log n
  TriState h_prime_ok = TriState::Skipped;
  std::optional<VertexSet> h_prime_witness;
  int h_prime_checked_max = 0;
  // n = Omega(d^6 log d) reported as a ratio, never asserted
  double n_over_d6_logd = 0;
};

ClassReport validate_class(const BipartiteGraph& g, int delta2, const Rational& kappa,
                           int budget);

// [A] = {v on A's side : N(v) subseteq N(A)}
VertexSet closure(const BipartiteGraph& g, const VertexSet& a, Side side);

// maximal components of s∩side under the distance<=2 relation, ordered by
// minimum vertex index
std::vector<VertexSet> two_linked_components(const BipartiteGraph& g, const VertexSet& s,
                                             Side side);

// exact number of 2-linked sets of size ell containing v
uint64_t count_two_linked(const BipartiteGraph& g, int v, int ell);

// Enumerates every connected superset of {root} within `allowed` (adjacency
// given per vertex), each exactly once, up to max_size vertices. Visit
// receives the current set; extension order is by vertex index, so the
// enumeration order is deterministic.
template <class Visit>
void enumerate_connected_sets(const std::vector<VertexSet>& adjacency, const VertexSet& allowed,
                              int root, int max_size, Visit&& visit) {
  const size_t n = allowed.size();
  VertexSet cur(n);
  cur.set(root);
  VertexSet nbhd = adjacency[root] & allowed;
  VertexSet banned(n);

  struct Frame {
    VertexSet cur, nbhd, banned;
  };
  // explicit stack to keep deep polymer enumerations cheap
  std::vector<Frame> stack;
  stack.push_back({cur, nbhd, banned});
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    visit(static_cast<const VertexSet&>(f.cur));
    if (static_cast<int>(f.cur.count()) >= max_size) continue;
    VertexSet cand = f.nbhd - f.cur - f.banned;
    VertexSet local_ban = f.banned;
    // push children in reverse so the smallest extension is explored first
    std::vector<size_t> ext = [&] {
      std::vector<size_t> e;
      for (auto u = cand.find_first(); u != VertexSet::npos; u = cand.find_next(u))
        e.push_back(u);
      return e;
    }();
    for (auto it = ext.rbegin(); it != ext.rend(); ++it) {
      const size_t u = *it;
      VertexSet nc = f.cur;
      nc.set(u);
      VertexSet nn = f.nbhd | (adjacency[u] & allowed);
      VertexSet nb = local_ban;
      for (auto jt = ext.begin(); *jt != u; ++jt) nb.set(*jt);
      stack.push_back({std::move(nc), std::move(nn), std::move(nb)});
    }
  }
}

}  // namespace ising
