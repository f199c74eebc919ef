#include "ising/cluster.hpp"

#include <algorithm>
#include <cmath>

namespace ising {

namespace {

// factorials up to the largest cluster copy count we ever build
uint64_t factorial(int m) {
  uint64_t f = 1;
  for (int i = 2; i <= m; ++i) f *= static_cast<uint64_t>(i);
  return f;
}

}  // namespace

Rational ursell(const SmallGraph& h, const Budgets& budgets) {
  const int m = h.m;
  if (m <= 0) throw ValidationError("ursell: empty graph");
  if (m > budgets.ursell_vertices)
    throw BudgetError("ursell: " + std::to_string(m) + " vertices exceed budget " +
                      std::to_string(budgets.ursell_vertices));
  if (m == 1) return Rational(1);
  const uint32_t full = (uint32_t{1} << m) - 1;

  // T[S] = 1 iff S induces no edges; then Moebius inversion over the
  // component of the lowest vertex yields the signed connected count
  // C[S] = sum over connected spanning F of G[S] of (-1)^|F|.
  std::vector<int8_t> independent(full + 1);
  for (uint32_t s = 0; s <= full; ++s) {
    bool ok = true;
    for (uint32_t rest = s; rest && ok;) {
      const int v = __builtin_ctz(rest);
      rest &= rest - 1;
      ok = (h.adj[v] & s & ~(uint32_t{1} << v)) == 0;
    }
    independent[s] = ok ? 1 : 0;
  }
  std::vector<long long> connected(full + 1, 0);
  for (uint32_t s = 1; s <= full; ++s) {
    const uint32_t low = s & (~s + 1);
    long long c = independent[s];
    const uint32_t rest = s & ~low;
    // split off the connected piece through the lowest vertex
    for (uint32_t sub = rest;; sub = (sub - 1) & rest) {
      const uint32_t sp = low | sub;
      if (sp != s) c -= connected[sp] * independent[s & ~sp];
      if (sub == 0) break;
    }
    connected[s] = c;
  }
  Rational out(static_cast<long>(connected[full]));
  out /= static_cast<long>(factorial(m));
  return out;
}

long long ursell_delcon_signed_count(int m, std::vector<std::pair<int, int>> edges) {
  // loops cancel in sign pairs
  for (const auto& [u, v] : edges)
    if (u == v) return 0;
  if (edges.empty()) return m == 1 ? 1 : 0;
  auto e = edges.back();
  edges.pop_back();
  const long long without = ursell_delcon_signed_count(m, edges);
  // contract e: relabel the larger endpoint into the smaller
  const int keep = std::min(e.first, e.second);
  const int gone = std::max(e.first, e.second);
  std::vector<std::pair<int, int>> contracted;
  contracted.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u == gone) u = keep;
    if (v == gone) v = keep;
    if (u > gone) --u;
    if (v > gone) --v;
    contracted.emplace_back(u, v);
  }
  const long long with = ursell_delcon_signed_count(m - 1, contracted);
  return without - with;
}

Rational ursell_delcon(const SmallGraph& h) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < h.m; ++i)
    for (int j = i + 1; j < h.m; ++j)
      if (h.adj[i] >> j & 1u) edges.emplace_back(i, j);
  Rational out(static_cast<long>(ursell_delcon_signed_count(h.m, std::move(edges))));
  out /= static_cast<long>(factorial(h.m));
  return out;
}

namespace {

struct ClusterEnumerator {
  const PolymerSystem& sys;
  int kmax;
  const std::function<void(const Cluster&)>& visit;
  std::vector<int> support;
  std::vector<int> mult;

  bool support_connected() const {
    // connectivity of the distinct-polymer incompatibility graph
    const size_t s = support.size();
    if (s <= 1) return true;
    uint32_t seen = 1, frontier = 1;
    while (frontier) {
      uint32_t next = 0;
      for (size_t i = 0; i < s; ++i) {
        if (!(frontier >> i & 1u)) continue;
        for (size_t j = 0; j < s; ++j)
          if (!(seen >> j & 1u) && sys.incompat[support[i]].test(support[j]))
            next |= uint32_t{1} << j;
      }
      seen |= next;
      frontier = next;
    }
    return seen == (uint32_t{1} << s) - 1;
  }

  void emit_multiplicities(size_t pos, int used) {
    if (pos == support.size()) {
      Cluster c;
      c.support = support;
      c.multiplicity = mult;
      c.size = used;
      c.copies = 0;
      for (int m : mult) c.copies += m;
      uint64_t orderings = 1;
      for (int i = 2; i <= c.copies; ++i) orderings *= static_cast<uint64_t>(i);
      for (int m : mult)
        for (int i = 2; i <= m; ++i) orderings /= static_cast<uint64_t>(i);
      c.orderings = orderings;
      // blown-up incompatibility graph on the copies
      c.incompat_graph = SmallGraph::empty(c.copies);
      std::vector<int> owner;
      owner.reserve(c.copies);
      for (size_t i = 0; i < support.size(); ++i)
        for (int r = 0; r < mult[i]; ++r) owner.push_back(static_cast<int>(i));
      for (int a = 0; a < c.copies; ++a)
        for (int b = a + 1; b < c.copies; ++b)
          if (owner[a] == owner[b] ||
              sys.incompat[support[owner[a]]].test(support[owner[b]]))
            c.incompat_graph.add_edge(a, b);
      visit(c);
      return;
    }
    // remaining support entries need at least their own size once
    int reserve = 0;
    for (size_t i = pos + 1; i < support.size(); ++i) reserve += sys.size[support[i]];
    const int s = sys.size[support[pos]];
    for (int c = 1; used + c * s + reserve <= kmax; ++c) {
      mult.push_back(c);
      emit_multiplicities(pos + 1, used + c * s);
      mult.pop_back();
    }
  }

  // connected-support enumeration with weight pruning
  void grow(VertexSet ext, VertexSet banned, int weight) {
    if (support_connected()) {
      mult.clear();
      emit_multiplicities(0, 0);
    }
    for (auto u = ext.find_first(); u != VertexSet::npos; u = ext.find_next(u)) {
      ext.reset(u);
      if (weight + sys.size[u] > kmax) {
        banned.set(u);
        continue;
      }
      support.push_back(static_cast<int>(u));
      VertexSet next_ext = ext | (sys.incompat[u] - banned);
      for (const int s : support) next_ext.reset(s);
      grow(next_ext, banned, weight + sys.size[u]);
      support.pop_back();
      banned.set(u);
    }
  }
};

}  // namespace

void enumerate_clusters(const PolymerSystem& sys, int kmax,
                        const std::function<void(const Cluster&)>& visit,
                        const VertexSet* allowed) {
  if (kmax < 1) return;
  const size_t np = sys.count();
  if (np == 0) return;
  if (kmax > 20) throw BudgetError("enumerate_clusters: truncation order too large");
  ClusterEnumerator en{sys, kmax, visit, {}, {}};
  VertexSet banned(np);
  for (size_t root = 0; root < np; ++root) {
    if (allowed && !allowed->test(root)) continue;
    if (sys.size[root] > kmax) continue;
    en.support.assign(1, static_cast<int>(root));
    VertexSet ext = sys.incompat[root] - banned;
    ext.reset(root);
    if (allowed) ext &= *allowed;
    VertexSet root_banned = banned;
    if (allowed) root_banned |= ~*allowed;
    en.grow(ext, root_banned, sys.size[root]);
    banned.set(root);
  }
}

double g_tilde(double k, const TailBoundInputs& in) {
  if (k < 1) throw ValidationError("g_tilde: k must be >= 1");
  const double d = in.d;
  const double log_alpha_tilde = std::log((1 + in.lambda) / (1 + in.lambda * in.q));
  const double logd = std::log(d);
  const double first_boundary = logd > 0 && std::log(logd) > 0 ? d / std::log(logd) : -1;
  const double second_boundary = std::pow(d, 3) * std::log(static_cast<double>(in.n));
  if (first_boundary > 0 && k <= first_boundary)
    return (d * k - in.delta2 * k * k) * log_alpha_tilde - (in.kappa + 7) * k * logd;
  if (k <= second_boundary) return std::sqrt(d) * k / 2 * log_alpha_tilde;
  return k / std::pow(d, in.kappa + 1);
}

K0Choice select_k0(const TailBoundInputs& in) {
  if (in.epsilon <= 0) throw ValidationError("select_k0: epsilon must be positive");
  if (in.n < 2 || in.d < 1) throw ValidationError("select_k0: need n >= 2, d >= 1");
  K0Choice out;
  const double dk1 = std::pow(static_cast<double>(in.d), in.kappa + 1);
  out.threshold = std::log(16.0 * in.n / (in.epsilon * dk1));
  const double d3logn = std::pow(in.d, 3) * std::log(static_cast<double>(in.n));
  out.candidates[0] = std::max<long>(1, static_cast<long>(std::floor(d3logn)));
  out.candidates[1] = out.candidates[0] + 1;
  out.candidates[2] =
      std::max<long>(1, static_cast<long>(std::ceil(dk1 * out.threshold)));
  std::array<long, 3> sorted = out.candidates;
  std::sort(sorted.begin(), sorted.end());
  for (long cand : sorted) {
    const double g = g_tilde(static_cast<double>(cand), in);
    if (g >= 0 && g >= out.threshold) {
      out.k0 = cand;
      out.certified = true;
      return out;
    }
  }
  out.k0 = sorted.back();
  out.certified = false;
  return out;
}

}  // namespace ising
