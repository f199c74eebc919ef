#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include "ising/cluster.hpp"
#include "ising/distribution.hpp"
#include "ising/mcmc.hpp"
#include "ising/model.hpp"
#include "ising/polymer.hpp"
#include "ising/rng.hpp"

namespace ising {

struct SamplerConfig {
  double epsilon = 0.1;  // in (0,1]
  enum class Mode { ExactRestrictedZ, TruncatedRestrictedZ };
  Mode mode = Mode::ExactRestrictedZ;
  std::optional<long> k_override;
  uint64_t seed = 0;
  double kappa = 0.5;  // expansion exponent of the graph family
  int delta2 = 2;      // codegree bound of the graph family
  // defect-side coin on raw truncation values instead of their exponentials;
  // rejects when a truncation is nonpositive
  bool l_direct_side = false;
  // take the polymer route even when epsilon <= epsilon_0 would allow brute force
  bool force_polymer_path = false;

  void validate() const {
    if (!(epsilon > 0) || epsilon > 1)
      throw ValidationError("sampler epsilon must lie in (0,1]");
  }
};

// brute-force threshold epsilon_0 = exp(-n / (d^(kappa+4) log d))
inline double brute_force_epsilon(const BipartiteGraph& g, const SamplerConfig& cfg) {
  if (g.d < 2) return 0.0;
  return std::exp(-static_cast<double>(g.n) /
                  (std::pow(g.d, cfg.kappa + 4) * std::log(static_cast<double>(g.d))));
}

// truncation order for the restricted partition functions inside the nu
// sampler: eps' = eps^2/(160 n^2), candidates
// {floor(d^3 log n), floor(d^3 log n)+1, ceil(d^(kappa+1) log(160 n^3/(eps^2 d^(kappa+1))))}
K0Choice select_k0_prime(const TailBoundInputs& in);

// P(Theta, S): polymers allowed next to an anchored configuration
struct RestrictedModel {
  const PolymerSystem* sys = nullptr;
  VertexSet excluded;         // graph vertices S
  std::vector<int> anchored;  // polymer indices
  VertexSet allowed;          // polymer indices still admissible
};

RestrictedModel make_restricted(const PolymerSystem& sys, const VertexSet& excluded,
                                const std::vector<int>& anchored);

template <class S>
S restricted_Z_exact(const RestrictedModel& rm, const IsingParams& p, const Budgets& budgets) {
  return xi_exact<S>(*rm.sys, p, budgets, &rm.allowed);
}

// log Z approximation by the truncated cluster expansion of the restricted model
inline double restricted_Z_truncated_log(const RestrictedModel& rm, const IsingParams& p,
                                         int k, const Budgets& budgets) {
  return compute_L<double>(*rm.sys, p, k, budgets, &rm.allowed).value;
}

// Both sides of Z(P(Theta,S)) = Z(P(Theta,S+v)) + sum_{(A,B): v in A} w(A,B) Z(P(Theta+(A,B),S+v)),
// the right side via literal decorated enumeration.
template <class S>
std::pair<S, S> fundamental_identity_check(const RestrictedModel& rm, int v,
                                           const IsingParams& p, const Budgets& budgets) {
  const PolymerSystem& sys = *rm.sys;
  const S lhs = restricted_Z_exact<S>(rm, p, budgets);

  VertexSet excl = rm.excluded;
  excl.set(v);
  const RestrictedModel without = make_restricted(sys, excl, rm.anchored);
  S rhs = restricted_Z_exact<S>(without, p, budgets);

  for (auto i = rm.allowed.find_first(); i != VertexSet::npos; i = rm.allowed.find_next(i)) {
    if (!sys.polymers[i].a.test(v)) continue;
    auto anchored = rm.anchored;
    anchored.push_back(static_cast<int>(i));
    const RestrictedModel with = make_restricted(sys, excl, anchored);
    const S z_after = restricted_Z_exact<S>(with, p, budgets);
    // literal sum over decorations B of N(A_i)
    const auto nb = set_to_indices(sys.polymers[i].neighborhood);
    if (static_cast<int>(nb.size()) > budgets.sum_mode_neighborhood)
      throw BudgetError("fundamental_identity_check: neighborhood too large");
    S dec_sum = num::zero<S>();
    for (uint64_t bs = 0; bs < (uint64_t{1} << nb.size()); ++bs) {
      VertexSet b(sys.g->n);
      for (size_t t = 0; t < nb.size(); ++t)
        if (bs >> t & 1u) b.set(nb[t]);
      dec_sum += decorated_weight<S>(*sys.g, DecoratedPolymer{sys.polymers[i], b}, p);
    }
    rhs += dec_sum * z_after;
  }
  return {lhs, rhs};
}

// per-step candidate polymers and their selection weights in Algorithm-2 form
template <class S>
struct NuStepChoices {
  std::vector<int> candidates;  // polymer indices with v in A, still allowed
  std::vector<S> weights;       // w(A) * Z(restricted after anchoring A)
  S empty_weight = num::zero<S>();
  VertexSet allowed_empty;                 // allowed set if nothing is chosen
  std::vector<VertexSet> allowed_after;    // allowed set per candidate
};

template <class S>
NuStepChoices<S> nu_step_choices_exact(const PolymerSystem& sys, const VertexSet& allowed,
                                       int v, const IsingParams& p, const Budgets& budgets) {
  NuStepChoices<S> out;
  out.allowed_empty = allowed - sys.containing[v];
  out.empty_weight = xi_exact<S>(sys, p, budgets, &out.allowed_empty);
  const VertexSet cands = allowed & sys.containing[v];
  for (auto i = cands.find_first(); i != VertexSet::npos; i = cands.find_next(i)) {
    VertexSet after = out.allowed_empty - sys.incompat[i];
    const S z_after = xi_exact<S>(sys, p, budgets, &after);
    out.candidates.push_back(static_cast<int>(i));
    out.weights.push_back(
        polymer_weight<S>(*sys.g, sys.polymers[i], p, WeightMode::Product) * z_after);
    out.allowed_after.push_back(std::move(after));
  }
  return out;
}

NuStepChoices<double> nu_step_choices_truncated(const PolymerSystem& sys,
                                                const VertexSet& allowed, int v,
                                                const IsingParams& p, long k0_prime,
                                                const Budgets& budgets);

// inclusion probability of neighbor u in the decoration of A:
// lambda q^{d_A(u)} / (1 + lambda q^{d_A(u)})
inline Rational decoration_inclusion_prob(const BipartiteGraph& g, const Polymer& poly, int u,
                                          const IsingParams& p) {
  const int deg = static_cast<int>((g.adj[u] & poly.a).count());
  const Rational w = p.lambda * num::pow(p.q, deg);
  return w / (1 + w);
}

inline Rational free_inclusion_prob(const IsingParams& p) { return p.lambda / (1 + p.lambda); }

// optional desk-scale audit of the truncated sampler against exact weights
struct NuAudit {
  int steps = 0;
  double l1_probability_gap = 0;  // sum over steps of sum_i |p_trunc - p_exact|
  double tv_bound() const { return l1_probability_gap / 2; }
};

// Algorithm-2 sampler for nu_D on the side of `sys`. Exact mode draws every
// coin from exact rationals, so the output law is exactly nu_D.
PolymerConfiguration sample_nu(const PolymerSystem& sys, const IsingParams& p,
                               const SamplerConfig& cfg, CounterRng& rng,
                               const Budgets& budgets, NuAudit* audit = nullptr);

// defect side with probability weight/(weight_even + weight_odd)
template <class S>
Side sample_defect_side(const S& weight_odd, const S& weight_even, CounterRng& rng) {
  if (weight_odd < num::zero<S>() || weight_even < num::zero<S>())
    throw ValidationError("defect-side weights must be nonnegative (raw truncations can fail "
                          "this; use the exponential convention)");
  if (num::is_zero(weight_odd) && num::is_zero(weight_even))
    throw ValidationError("defect-side weights are both zero");
  if constexpr (std::is_same_v<S, Rational>) {
    return exact_bernoulli(weight_even / (weight_even + weight_odd), rng) ? Side::Even
                                                                          : Side::Odd;
  } else {
    const double we = num::to_double(weight_even);
    const double wo = num::to_double(weight_odd);
    return rng.uniform() * (we + wo) < we ? Side::Even : Side::Odd;
  }
}

struct IsingSampleTrace {
  bool brute_force = false;
  Side defect_side = Side::Even;
  PolymerConfiguration configuration;
};

// Approximate Ising sampler: brute force below epsilon_0, otherwise defect
// side + nu_D + independent lambda/(1+lambda) fill of the free vertices.
VertexSet sample_ising(const BipartiteGraph& g, const IsingParams& p, const SamplerConfig& cfg,
                       CounterRng& rng, const Budgets& budgets,
                       IsingSampleTrace* trace = nullptr);

struct ApproxZReport {
  long k0 = 0;
  bool k0_certified = false;
  bool k0_overridden = false;
  double l_even = 0;
  double l_odd = 0;
  double log_z_hat = 0;           // log of (1+lambda)^{n/2} (e^{L_E} + e^{L_O})
  double z_hat = 0;               // primary value (exponential convention)
  double z_hat_direct = 0;        // literal (1+lambda)^{n/2} (L_E + L_O)
  std::optional<double> exact_z;  // reported at desk scale (n <= 20)
  std::optional<double> rel_err;
  std::optional<double> rel_err_direct;
};

ApproxZReport approx_Z(const BipartiteGraph& g, const IsingParams& p, const SamplerConfig& cfg,
                       const Budgets& budgets);

template <class S>
struct MuHatReport {
  Distribution<S> mu_hat;
  S z_hat = num::zero<S>();  // sum of w_hat over all subsets
  S tv_to_gibbs = num::zero<S>();
};

// exact mu_hat via per-subset recovery on both sides, plus TV(mu_hat, mu)
template <class S>
MuHatReport<S> mu_hat_exact(const BipartiteGraph& g, const IsingParams& p,
                            const Budgets& budgets) {
  require_state_budget(g.n, budgets.exhaustive_n, "mu_hat_exact");
  const int n = g.n;
  const auto adj = g.adjacency_masks();
  const uint32_t even_mask = set_to_mask(g.even);
  const uint32_t odd_mask = ~even_mask & ((n == 32 ? 0u : (uint32_t{1} << n)) - 1);
  // distance-2 adjacency inside each side
  std::vector<uint32_t> sq(n, 0);
  for (int v = 0; v < n; ++v) {
    uint32_t nn = 0;
    for (int u = 0; u < n; ++u)
      if (adj[v] >> u & 1u) nn |= adj[u];
    const uint32_t own = (even_mask >> v & 1u) ? even_mask : odd_mask;
    sq[v] = nn & own & ~(uint32_t{1} << v);
  }
  const int side_size = n / 2;
  auto side_ok = [&](uint32_t smask, uint32_t side) {
    uint32_t rem = smask & side;
    while (rem) {
      const int root = __builtin_ctz(rem);
      uint32_t comp = uint32_t{1} << root;
      uint32_t frontier = comp;
      rem &= ~comp;
      while (frontier) {
        uint32_t next = 0;
        while (frontier) {
          const int u = __builtin_ctz(frontier);
          frontier &= frontier - 1;
          next |= sq[u] & rem;
        }
        comp |= next;
        rem &= ~next;
        frontier = next;
      }
      uint32_t nb = 0;
      for (uint32_t c = comp; c;) {
        const int u = __builtin_ctz(c);
        c &= c - 1;
        nb |= adj[u];
      }
      int cl = 0;
      for (uint32_t sv = side; sv;) {
        const int x = __builtin_ctz(sv);
        sv &= sv - 1;
        if ((adj[x] & ~nb) == 0) ++cl;
      }
      if (4 * cl > 3 * side_size) return false;
    }
    return true;
  };

  const S lam = p.lambda_as<S>();
  const S q = p.q_as<S>();
  std::vector<uint32_t> adj_above(n);
  for (int v = 0; v < n; ++v)
    adj_above[v] = v + 1 < 32 ? (adj[v] & ~((uint32_t{2} << v) - 1)) : 0;

  MuHatReport<S> rep;
  rep.mu_hat.n = n;
  rep.mu_hat.p.reserve(size_t{1} << n);
  std::vector<S> gibbs_w;
  gibbs_w.reserve(size_t{1} << n);
  S z = num::zero<S>();
  for (uint64_t mi = 0; mi < (uint64_t{1} << n); ++mi) {
    const auto mask = static_cast<uint32_t>(mi);
    int edges = 0;
    for (uint32_t rest = mask; rest;) {
      const int v = __builtin_ctz(rest);
      rest &= rest - 1;
      edges += __builtin_popcount(adj_above[v] & mask);
    }
    const S w = num::pow(lam, __builtin_popcount(mask)) * num::pow(q, edges);
    const int valid = (side_ok(mask, odd_mask) ? 1 : 0) + (side_ok(mask, even_mask) ? 1 : 0);
    S what = w * num::from_ratio<S>(valid, 1);
    rep.z_hat += what;
    z += w;
    rep.mu_hat.p.push_back(std::move(what));
    gibbs_w.push_back(w);
  }
  S tv = num::zero<S>();
  for (size_t i = 0; i < gibbs_w.size(); ++i) {
    rep.mu_hat.p[i] /= rep.z_hat;
    tv += num::abs(rep.mu_hat.p[i] - gibbs_w[i] / z);
  }
  rep.tv_to_gibbs = tv / num::from_ratio<S>(2, 1);
  return rep;
}

}  // namespace ising
