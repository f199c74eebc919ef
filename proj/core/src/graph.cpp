#include "ising/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

namespace ising {

namespace {

void finalize_and_check(BipartiteGraph& g) {
  if (g.n <= 0 || g.n % 2 != 0)
    throw ValidationError(g.name + ": vertex count must be positive and even");
  if (static_cast<int>(g.adj.size()) != g.n) throw ValidationError(g.name + ": bad adjacency");
  for (int v = 0; v < g.n; ++v) {
    if (g.adj[v].test(v)) throw ValidationError(g.name + ": self loop at " + std::to_string(v));
    if (static_cast<int>(g.adj[v].count()) != g.d)
      throw ValidationError(g.name + ": vertex " + std::to_string(v) + " has degree " +
                            std::to_string(g.adj[v].count()) + ", expected " + std::to_string(g.d));
    for (auto u = g.adj[v].find_first(); u != VertexSet::npos; u = g.adj[v].find_next(u))
      if (!g.adj[u].test(v)) throw ValidationError(g.name + ": adjacency not symmetric");
  }
  if ((g.odd & g.even).any() || (g.odd | g.even).count() != static_cast<size_t>(g.n))
    throw ValidationError(g.name + ": parts do not partition the vertices");
  if (g.odd.count() != g.even.count())
    throw ValidationError(g.name + ": parts have unequal sizes");
  for (int v = 0; v < g.n; ++v) {
    const auto& own = g.even.test(v) ? g.even : g.odd;
    if ((g.adj[v] & own).any())
      throw ValidationError(g.name + ": edge inside one part at vertex " + std::to_string(v));
  }
  if (!g.builtin_flip.empty()) {
    // must be a side-swapping automorphism; generators guarantee this, assert anyway
    for (int v = 0; v < g.n; ++v) {
      const int w = g.builtin_flip[v];
      if (w < 0 || w >= g.n || g.side_of(v) == g.side_of(w))
        throw ValidationError(g.name + ": builtin flip is not side-swapping");
    }
  }
}

BipartiteGraph make_hypercube(int dim) {
  if (dim < 1) throw ValidationError("hypercube dimension must be >= 1");
  if (dim > 25) throw ValidationError("hypercube dimension too large");
  BipartiteGraph g;
  g.n = 1 << dim;
  g.d = dim;
  g.name = "hypercube:" + std::to_string(dim);
  g.adj.assign(g.n, VertexSet(g.n));
  g.odd = VertexSet(g.n);
  g.even = VertexSet(g.n);
  for (int v = 0; v < g.n; ++v) {
    for (int j = 0; j < dim; ++j) g.adj[v].set(v ^ (1 << j));
    (__builtin_popcount(static_cast<unsigned>(v)) % 2 == 0 ? g.even : g.odd).set(v);
  }
  // vertex names read as binary strings, most significant bit first; the
  // first-coordinate flip toggles that leading bit
  g.builtin_flip.resize(g.n);
  for (int v = 0; v < g.n; ++v) g.builtin_flip[v] = v ^ (1 << (dim - 1));
  return g;
}

BipartiteGraph make_cycle(int m) {
  if (m < 4 || m % 2 != 0) throw ValidationError("cycle length must be even and >= 4");
  BipartiteGraph g;
  g.n = m;
  g.d = 2;
  g.name = "cycle:" + std::to_string(m);
  g.adj.assign(m, VertexSet(m));
  g.odd = VertexSet(m);
  g.even = VertexSet(m);
  for (int v = 0; v < m; ++v) {
    g.adj[v].set((v + 1) % m);
    g.adj[v].set((v + m - 1) % m);
    // convention: vertex 0 lies on the odd side
    (v % 2 == 0 ? g.odd : g.even).set(v);
  }
  g.builtin_flip.resize(m);
  for (int v = 0; v < m; ++v) g.builtin_flip[v] = (v + 1) % m;
  return g;
}

BipartiteGraph make_torus(int m, int t) {
  if (m == 2) throw ValidationError("torus side 2 is degenerate (doubled edges); use hypercube");
  if (m < 4 || m % 2 != 0) throw ValidationError("torus side must be even and >= 4");
  if (t < 1) throw ValidationError("torus dimension must be >= 1");
  double size = 1;
  for (int j = 0; j < t; ++j) {
    size *= m;
    if (size > (1 << 25)) throw ValidationError("torus too large");
  }
  BipartiteGraph g;
  g.n = static_cast<int>(size);
  g.d = 2 * t;
  g.name = "torus:" + std::to_string(m) + "^" + std::to_string(t);
  g.adj.assign(g.n, VertexSet(g.n));
  g.odd = VertexSet(g.n);
  g.even = VertexSet(g.n);
  std::vector<int> stride(t, 1);
  for (int j = 1; j < t; ++j) stride[j] = stride[j - 1] * m;
  for (int v = 0; v < g.n; ++v) {
    int coord_sum = 0;
    for (int j = 0; j < t; ++j) {
      const int c = (v / stride[j]) % m;
      coord_sum += c;
      const int up = v + ((c + 1) % m - c) * stride[j];
      const int down = v + ((c + m - 1) % m - c) * stride[j];
      g.adj[v].set(up);
      g.adj[v].set(down);
    }
    (coord_sum % 2 == 0 ? g.even : g.odd).set(v);
  }
  // advance the leading coordinate by one; m is even so this swaps the sides
  g.builtin_flip.resize(g.n);
  const int lead = stride[t - 1];
  for (int v = 0; v < g.n; ++v) {
    const int c = (v / lead) % m;
    g.builtin_flip[v] = v + ((c + 1) % m - c) * lead;
  }
  return g;
}

BipartiteGraph make_middle_layer(int dim) {
  if (dim < 3 || dim % 2 == 0) throw ValidationError("middle-layer dimension must be odd and >= 3");
  if (dim > 25) throw ValidationError("middle-layer dimension too large");
  const int k = (dim - 1) / 2;
  std::vector<uint32_t> lower, upper;
  for (uint32_t s = 0; s < (uint32_t{1} << dim); ++s) {
    const int pc = __builtin_popcount(s);
    if (pc == k) lower.push_back(s);
    if (pc == k + 1) upper.push_back(s);
  }
  BipartiteGraph g;
  g.n = static_cast<int>(lower.size() + upper.size());
  g.d = k + 1;
  g.name = "middle-layer:" + std::to_string(dim);
  g.adj.assign(g.n, VertexSet(g.n));
  g.odd = VertexSet(g.n);
  g.even = VertexSet(g.n);
  const int off = static_cast<int>(lower.size());
  std::vector<int> upper_index(1 << dim, -1);
  for (size_t i = 0; i < upper.size(); ++i) upper_index[upper[i]] = static_cast<int>(i);
  for (size_t i = 0; i < lower.size(); ++i) {
    for (int j = 0; j < dim; ++j) {
      if (lower[i] & (uint32_t{1} << j)) continue;
      const int u = upper_index[lower[i] | (uint32_t{1} << j)];
      g.adj[i].set(off + u);
      g.adj[off + u].set(i);
    }
  }
  // side follows the parity of the layer cardinality, as in the hypercube
  auto& lower_side = (k % 2 == 0) ? g.even : g.odd;
  auto& upper_side = (k % 2 == 0) ? g.odd : g.even;
  for (size_t i = 0; i < lower.size(); ++i) lower_side.set(i);
  for (size_t i = 0; i < upper.size(); ++i) upper_side.set(off + i);
  // complementation swaps the two layers and preserves inclusion edges
  g.builtin_flip.assign(g.n, -1);
  const uint32_t full = (uint32_t{1} << dim) - 1;
  std::vector<int> lower_index(1 << dim, -1);
  for (size_t i = 0; i < lower.size(); ++i) lower_index[lower[i]] = static_cast<int>(i);
  for (size_t i = 0; i < lower.size(); ++i) g.builtin_flip[i] = off + upper_index[full & ~lower[i]];
  for (size_t i = 0; i < upper.size(); ++i) g.builtin_flip[off + i] = lower_index[full & ~upper[i]];
  return g;
}

BipartiteGraph make_cartesian(const BipartiteGraph& a, const BipartiteGraph& b,
                              const std::string& spec) {
  BipartiteGraph g;
  g.n = a.n * b.n;
  g.d = a.d + b.d;
  g.name = spec;
  g.adj.assign(g.n, VertexSet(g.n));
  g.odd = VertexSet(g.n);
  g.even = VertexSet(g.n);
  auto id = [&](int u, int v) { return u * b.n + v; };
  for (int u = 0; u < a.n; ++u)
    for (int v = 0; v < b.n; ++v) {
      const int x = id(u, v);
      for (auto w = a.adj[u].find_first(); w != VertexSet::npos; w = a.adj[u].find_next(w))
        g.adj[x].set(id(static_cast<int>(w), v));
      for (auto w = b.adj[v].find_first(); w != VertexSet::npos; w = b.adj[v].find_next(w))
        g.adj[x].set(id(u, static_cast<int>(w)));
      const bool even = (a.side_of(u) == Side::Even) == (b.side_of(v) == Side::Even);
      (even ? g.even : g.odd).set(x);
    }
  if (!a.builtin_flip.empty()) {
    g.builtin_flip.resize(g.n);
    for (int u = 0; u < a.n; ++u)
      for (int v = 0; v < b.n; ++v) g.builtin_flip[id(u, v)] = id(a.builtin_flip[u], v);
  } else if (!b.builtin_flip.empty()) {
    g.builtin_flip.resize(g.n);
    for (int u = 0; u < a.n; ++u)
      for (int v = 0; v < b.n; ++v) g.builtin_flip[id(u, v)] = id(u, b.builtin_flip[v]);
  }
  return g;
}

int parse_positive_int(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size() || v <= 0) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("bad " + what + " in graph spec: '" + s + "'");
  }
}

}  // namespace

BipartiteGraph generate_graph(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw ValidationError("malformed graph spec '" + spec + "' (expected kind:args)");
  const std::string kind = spec.substr(0, colon);
  const std::string args = spec.substr(colon + 1);
  BipartiteGraph g;
  if (kind == "hypercube") {
    g = make_hypercube(parse_positive_int(args, "dimension"));
  } else if (kind == "cycle") {
    g = make_cycle(parse_positive_int(args, "length"));
  } else if (kind == "torus") {
    const auto caret = args.find('^');
    if (caret == std::string::npos)
      throw ValidationError("torus spec must look like torus:m^t");
    g = make_torus(parse_positive_int(args.substr(0, caret), "torus side"),
                   parse_positive_int(args.substr(caret + 1), "torus dimension"));
  } else if (kind == "middle-layer") {
    g = make_middle_layer(parse_positive_int(args, "dimension"));
  } else if (kind == "cartesian") {
    // split at the 'x' that makes both factor specs parse
    for (size_t i = 1; i + 1 < args.size(); ++i) {
      if (args[i] != 'x') continue;
      try {
        BipartiteGraph a = generate_graph(args.substr(0, i));
        BipartiteGraph b = generate_graph(args.substr(i + 1));
        g = make_cartesian(a, b, spec);
        finalize_and_check(g);
        return g;
      } catch (const ValidationError&) {
        continue;
      }
    }
    throw ValidationError("could not split cartesian spec '" + spec + "' into two factors");
  } else if (kind == "file") {
    return load_graph_file(args);
  } else {
    throw ValidationError("unknown graph kind '" + kind + "'");
  }
  finalize_and_check(g);
  return g;
}

BipartiteGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open graph file: " + path);
  int n = 0, d = 0;
  if (!(in >> n >> d)) throw ValidationError("bad graph file header (expected 'n d'): " + path);
  if (n <= 0 || d <= 0) throw ValidationError("graph file: n and d must be positive");
  BipartiteGraph g;
  g.n = n;
  g.d = d;
  g.name = "file:" + path;
  g.adj.assign(n, VertexSet(n));
  int u, v;
  while (in >> u >> v) {
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw ValidationError("graph file: vertex out of range");
    if (u == v) throw ValidationError("graph file: self loop");
    if (g.adj[u].test(v)) throw ValidationError("graph file: duplicate edge");
    g.adj[u].set(v);
    g.adj[v].set(u);
  }
  // 2-color each component; the component root (lowest index) goes Even
  g.odd = VertexSet(n);
  g.even = VertexSet(n);
  std::vector<int> color(n, -1);
  for (int root = 0; root < n; ++root) {
    if (color[root] != -1) continue;
    color[root] = 0;
    std::deque<int> queue{root};
    while (!queue.empty()) {
      const int x = queue.front();
      queue.pop_front();
      for (auto w = g.adj[x].find_first(); w != VertexSet::npos; w = g.adj[x].find_next(w)) {
        if (color[w] == -1) {
          color[w] = 1 - color[x];
          queue.push_back(static_cast<int>(w));
        } else if (color[w] == color[x]) {
          throw ValidationError("graph file: not bipartite (odd cycle through vertex " +
                                std::to_string(x) + ")");
        }
      }
    }
  }
  for (int x = 0; x < n; ++x) (color[x] == 0 ? g.even : g.odd).set(x);
  finalize_and_check(g);
  return g;
}

void write_graph_file(const BipartiteGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write graph file: " + path);
  out << g.n << ' ' << g.d << '\n';
  for (int u = 0; u < g.n; ++u)
    for (auto v = g.adj[u].find_next(u); v != VertexSet::npos; v = g.adj[u].find_next(v))
      out << u << ' ' << v << '\n';
  if (!out) throw ValidationError("write failed: " + path);
}

std::vector<int> load_automorphism_file(const BipartiteGraph& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open automorphism file: " + path);
  std::vector<int> sigma(g.n, -1);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int i = 0;
    std::string arrow;
    int j = 0;
    if (!(ls >> i >> arrow >> j) || arrow != "->")
      throw ValidationError("automorphism file: bad line '" + line + "'");
    if (i < 0 || i >= g.n || j < 0 || j >= g.n || sigma[i] != -1)
      throw ValidationError("automorphism file: bad or repeated vertex");
    sigma[i] = j;
  }
  for (int i = 0; i < g.n; ++i)
    if (sigma[i] == -1) throw ValidationError("automorphism file: missing vertex " + std::to_string(i));
  return sigma;
}

std::vector<uint32_t> BipartiteGraph::adjacency_masks() const {
  if (n > 32) throw BudgetError("adjacency_masks: graph too large for mask sweeps");
  std::vector<uint32_t> m(n, 0);
  for (int v = 0; v < n; ++v)
    for (auto u = adj[v].find_first(); u != VertexSet::npos; u = adj[v].find_next(u))
      m[v] |= uint32_t{1} << u;
  return m;
}

std::vector<VertexSet> BipartiteGraph::side_square_adjacency(Side side) const {
  const VertexSet& mask = side_mask(side);
  std::vector<VertexSet> a2(n, VertexSet(n));
  for (auto v = mask.find_first(); v != VertexSet::npos; v = mask.find_next(v)) {
    VertexSet nn(n);
    for (auto u = adj[v].find_first(); u != VertexSet::npos; u = adj[v].find_next(u)) nn |= adj[u];
    nn &= mask;
    nn.reset(v);
    a2[v] = std::move(nn);
  }
  return a2;
}

std::vector<VertexSet> BipartiteGraph::square_adjacency() const {
  std::vector<VertexSet> a2(n, VertexSet(n));
  for (int v = 0; v < n; ++v) {
    VertexSet nn = adj[v];
    for (auto u = adj[v].find_first(); u != VertexSet::npos; u = adj[v].find_next(u)) nn |= adj[u];
    nn.reset(v);
    a2[v] = std::move(nn);
  }
  return a2;
}

VertexSet closure(const BipartiteGraph& g, const VertexSet& a, Side side) {
  const VertexSet& mask = g.side_mask(side);
  if (!a.is_subset_of(mask))
    throw ValidationError("closure: set contains vertices of the opposite side");
  const VertexSet na = g.neighborhood(a);
  VertexSet out(g.n);
  for (auto v = mask.find_first(); v != VertexSet::npos; v = mask.find_next(v))
    if (g.adj[v].is_subset_of(na)) out.set(v);
  return out;
}

std::vector<VertexSet> two_linked_components(const BipartiteGraph& g, const VertexSet& s,
                                             Side side) {
  const auto a2 = g.side_square_adjacency(side);
  VertexSet rem = s & g.side_mask(side);
  std::vector<VertexSet> comps;
  while (rem.any()) {
    const auto root = rem.find_first();
    VertexSet comp(g.n);
    comp.set(root);
    VertexSet frontier(g.n);
    frontier.set(root);
    rem.reset(root);
    while (frontier.any()) {
      VertexSet next(g.n);
      for (auto u = frontier.find_first(); u != VertexSet::npos; u = frontier.find_next(u))
        next |= a2[u];
      next &= rem;
      comp |= next;
      rem -= next;
      frontier = std::move(next);
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

uint64_t count_two_linked(const BipartiteGraph& g, int v, int ell) {
  if (ell < 1) throw ValidationError("count_two_linked: ell must be >= 1");
  // one-sided sets, as used by the polymer models
  const Side side = g.side_of(v);
  const auto a2 = g.side_square_adjacency(side);
  uint64_t count = 0;
  enumerate_connected_sets(a2, g.side_mask(side), v, ell, [&](const VertexSet& cur) {
    if (static_cast<int>(cur.count()) == ell) ++count;
  });
  return count;
}

ClassReport validate_class(const BipartiteGraph& g, int delta2, const Rational& kappa,
                           int budget) {
  ClassReport rep;
  (void)delta2;
  for (int u = 0; u < g.n; ++u)
    for (int v = u + 1; v < g.n; ++v)
      rep.max_codegree = std::max(rep.max_codegree, g.codegree(u, v));

  const double dk = std::pow(static_cast<double>(g.d), num::to_double(kappa));
  rep.n_over_d6_logd =
      g.d > 1 ? static_cast<double>(g.n) / (std::pow(g.d, 6) * std::log(g.d))
              : std::numeric_limits<double>::infinity();

  const int side_size = g.n / 2;
  // condition (2) range |X| <= 3n/8, clamped so singletons are always checked
  const int cond2_required = std::min(side_size, std::max(1, (3 * g.n) / 8));
  const int cond2_max = std::min(cond2_required, budget);
  // condition (4) range |X| <= d^3 log n
  const int cond4_required = std::min(
      side_size, static_cast<int>(std::min<double>(std::floor(std::pow(g.d, 3) * std::log(g.n)),
                                                   static_cast<double>(side_size))));
  const int cond4_max = std::min(cond4_required, budget);

  rep.expansion_ok = TriState::Verified;
  rep.h_prime_ok = TriState::Verified;
  rep.expansion_ratio_min = Rational(g.n);  // above any achievable ratio
  rep.expansion_margin_min = std::numeric_limits<double>::infinity();
  rep.expansion_checked_max = cond2_max;
  rep.h_prime_checked_max = cond4_max;

  const int scan_max = std::max(cond2_max, cond4_max);
  for (Side side : {Side::Odd, Side::Even}) {
    const auto verts = set_to_indices(g.side_mask(side));
    std::vector<int> chosen;
    VertexSet nbhd(g.n);
    // exhaustive subsets of one side up to scan_max, neighborhood grown incrementally
    auto rec = [&](auto&& self, size_t next, const VertexSet& nb) -> void {
      const int sz = static_cast<int>(chosen.size());
      if (sz > 0) {
        const int nsz = static_cast<int>(nb.count());
        if (sz <= cond2_max) {
          Rational ratio(nsz, sz);
          ratio.canonicalize();
          if (ratio < rep.expansion_ratio_min) rep.expansion_ratio_min = ratio;
          const double margin = (static_cast<double>(nsz) / sz - 1.0) * dk;
          rep.expansion_margin_min = std::min(rep.expansion_margin_min, margin);
          if (nsz <= sz && rep.expansion_ok != TriState::Violated) {
            rep.expansion_ok = TriState::Violated;
            VertexSet w(g.n);
            for (int x : chosen) w.set(x);
            rep.expansion_witness = w;
          }
        }
        if (sz <= cond4_max) {
          // |N(X)|^2 >= d |X|^2, exactly in integers
          if (static_cast<long>(nsz) * nsz < static_cast<long>(g.d) * sz * sz &&
              rep.h_prime_ok != TriState::Violated) {
            rep.h_prime_ok = TriState::Violated;
            VertexSet w(g.n);
            for (int x : chosen) w.set(x);
            rep.h_prime_witness = w;
          }
        }
      }
      if (sz == scan_max) return;
      for (size_t i = next; i < verts.size(); ++i) {
        chosen.push_back(verts[i]);
        self(self, i + 1, nb | g.adj[verts[i]]);
        chosen.pop_back();
      }
    };
    rec(rec, 0, nbhd);
  }

  if (rep.expansion_ok != TriState::Violated && cond2_max < cond2_required)
    rep.expansion_ok = TriState::Skipped;
  if (rep.h_prime_ok != TriState::Violated && cond4_max < cond4_required)
    rep.h_prime_ok = TriState::Skipped;
  return rep;
}

}  // namespace ising
