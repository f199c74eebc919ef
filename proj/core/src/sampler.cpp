#include "ising/sampler.hpp"

#include <algorithm>

namespace ising {

K0Choice select_k0_prime(const TailBoundInputs& in) {
  if (in.epsilon <= 0) throw ValidationError("select_k0_prime: epsilon must be positive");
  const double n = static_cast<double>(in.n);
  const double dk1 = std::pow(static_cast<double>(in.d), in.kappa + 1);
  const double eps_prime = in.epsilon * in.epsilon / (160.0 * n * n);
  K0Choice out;
  out.threshold = std::log(16.0 * n / (eps_prime * dk1));
  const double d3logn = std::pow(in.d, 3) * std::log(n);
  out.candidates[0] = std::max<long>(1, static_cast<long>(std::floor(d3logn)));
  out.candidates[1] = out.candidates[0] + 1;
  out.candidates[2] = std::max<long>(
      1, static_cast<long>(
             std::ceil(dk1 * std::log(160.0 * n * n * n / (in.epsilon * in.epsilon * dk1)))));
  std::array<long, 3> sorted = out.candidates;
  std::sort(sorted.begin(), sorted.end());
  TailBoundInputs tails = in;
  for (long cand : sorted) {
    const double g = g_tilde(static_cast<double>(cand), tails);
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

RestrictedModel make_restricted(const PolymerSystem& sys, const VertexSet& excluded,
                                const std::vector<int>& anchored) {
  RestrictedModel rm;
  rm.sys = &sys;
  rm.excluded = excluded;
  rm.anchored = anchored;
  rm.allowed = VertexSet(sys.count());
  rm.allowed.set();
  for (auto v = excluded.find_first(); v != VertexSet::npos; v = excluded.find_next(v))
    rm.allowed -= sys.containing[v];
  for (int i : anchored) rm.allowed -= sys.incompat[i];
  return rm;
}

NuStepChoices<double> nu_step_choices_truncated(const PolymerSystem& sys,
                                                const VertexSet& allowed, int v,
                                                const IsingParams& p, long k0_prime,
                                                const Budgets& budgets) {
  NuStepChoices<double> out;
  out.allowed_empty = allowed - sys.containing[v];
  out.empty_weight =
      std::exp(compute_L<double>(sys, p, static_cast<int>(k0_prime), budgets, &out.allowed_empty)
                   .value);
  const VertexSet cands = allowed & sys.containing[v];
  for (auto i = cands.find_first(); i != VertexSet::npos; i = cands.find_next(i)) {
    VertexSet after = out.allowed_empty - sys.incompat[i];
    const double z_after = std::exp(
        compute_L<double>(sys, p, static_cast<int>(k0_prime), budgets, &after).value);
    out.candidates.push_back(static_cast<int>(i));
    out.weights.push_back(
        polymer_weight<double>(*sys.g, sys.polymers[i], p, WeightMode::Product) * z_after);
    out.allowed_after.push_back(std::move(after));
  }
  return out;
}

namespace {

VertexSet sample_decoration(const BipartiteGraph& g, const Polymer& poly, const IsingParams& p,
                            CounterRng& rng) {
  VertexSet b(g.n);
  for (auto u = poly.neighborhood.find_first(); u != VertexSet::npos;
       u = poly.neighborhood.find_next(u))
    if (exact_bernoulli(decoration_inclusion_prob(g, poly, static_cast<int>(u), p), rng))
      b.set(u);
  return b;
}

}  // namespace

PolymerConfiguration sample_nu(const PolymerSystem& sys, const IsingParams& p,
                               const SamplerConfig& cfg, CounterRng& rng,
                               const Budgets& budgets, NuAudit* audit) {
  const BipartiteGraph& g = *sys.g;
  long k0_prime = 0;
  if (cfg.mode == SamplerConfig::Mode::TruncatedRestrictedZ) {
    if (cfg.k_override) {
      k0_prime = *cfg.k_override;
    } else {
      TailBoundInputs in;
      in.n = g.n;
      in.d = g.d;
      in.kappa = cfg.kappa;
      in.delta2 = cfg.delta2;
      in.lambda = num::to_double(p.lambda);
      in.q = num::to_double(p.q);
      in.epsilon = cfg.epsilon;
      k0_prime = std::min<long>(select_k0_prime(in).k0, sys.kmax);
    }
  }

  VertexSet allowed(sys.count());
  allowed.set();
  std::vector<int> anchored;
  std::vector<VertexSet> decorations;
  for (int v = 0; v < g.n; ++v) {
    if ((sys.containing[v] & allowed).none() &&
        cfg.mode == SamplerConfig::Mode::ExactRestrictedZ) {
      // no candidate contains v: the step surely keeps the configuration
      continue;
    }
    size_t pick = 0;
    std::vector<int> candidates;
    if (cfg.mode == SamplerConfig::Mode::ExactRestrictedZ) {
      auto step = nu_step_choices_exact<Rational>(sys, allowed, v, p, budgets);
      std::vector<Rational> weights;
      weights.push_back(step.empty_weight);
      for (auto& w : step.weights) weights.push_back(w);
      pick = exact_categorical(weights, rng);
      candidates = step.candidates;
      allowed = pick == 0 ? step.allowed_empty : step.allowed_after[pick - 1];
    } else {
      auto step = nu_step_choices_truncated(sys, allowed, v, p, k0_prime, budgets);
      std::vector<double> weights;
      weights.push_back(step.empty_weight);
      for (double w : step.weights) weights.push_back(w);
      if (audit) {
        auto exact = nu_step_choices_exact<Rational>(sys, allowed, v, p, budgets);
        double sum_t = 0, sum_e = 0;
        for (double w : weights) sum_t += w;
        std::vector<double> pe;
        pe.push_back(num::to_double(exact.empty_weight));
        for (auto& w : exact.weights) pe.push_back(num::to_double(w));
        for (double w : pe) sum_e += w;
        double gap = 0;
        for (size_t i = 0; i < weights.size(); ++i)
          gap += std::fabs(weights[i] / sum_t - pe[i] / sum_e);
        audit->l1_probability_gap += gap;
        ++audit->steps;
      }
      pick = categorical_double(weights, rng);
      candidates = step.candidates;
      allowed = pick == 0 ? step.allowed_empty : step.allowed_after[pick - 1];
    }
    if (pick > 0) {
      const int idx = candidates[pick - 1];
      anchored.push_back(idx);
      decorations.push_back(sample_decoration(g, sys.polymers[idx], p, rng));
    }
  }

  PolymerConfiguration config;
  for (size_t i = 0; i < anchored.size(); ++i)
    config.push_back(DecoratedPolymer{sys.polymers[anchored[i]], decorations[i]});
  std::sort(config.begin(), config.end(), [](const DecoratedPolymer& a, const DecoratedPolymer& b) {
    return a.polymer.a.find_first() < b.polymer.a.find_first();
  });
  return config;
}

VertexSet sample_ising(const BipartiteGraph& g, const IsingParams& p, const SamplerConfig& cfg,
                       CounterRng& rng, const Budgets& budgets, IsingSampleTrace* trace) {
  cfg.validate();
  const double eps0 = brute_force_epsilon(g, cfg);
  if (cfg.epsilon <= eps0 && !cfg.force_polymer_path) {
    // desk scale: sample the Gibbs measure itself by exhaustive enumeration
    require_state_budget(g.n, budgets.exhaustive_n, "sample_ising brute force");
    const auto dist = gibbs_exact<Rational>(g, p, budgets);
    const size_t mask = exact_categorical(dist.p, rng);
    if (trace) trace->brute_force = true;
    return mask_to_set(g.n, static_cast<uint32_t>(mask));
  }

  const bool exact = cfg.mode == SamplerConfig::Mode::ExactRestrictedZ;
  if (exact) require_state_budget(g.n, budgets.exhaustive_n, "sample_ising exact mode");

  long kmax = 0;
  if (exact) {
    kmax = g.n / 2;
  } else if (cfg.k_override) {
    kmax = *cfg.k_override;
  } else {
    TailBoundInputs in;
    in.n = g.n;
    in.d = g.d;
    in.kappa = cfg.kappa;
    in.delta2 = cfg.delta2;
    in.lambda = num::to_double(p.lambda);
    in.q = num::to_double(p.q);
    in.epsilon = cfg.epsilon;
    kmax = select_k0(in).k0;
  }

  const auto sys_odd = PolymerSystem::build(g, Side::Odd, static_cast<int>(kmax));
  const auto sys_even = PolymerSystem::build(g, Side::Even, static_cast<int>(kmax));

  Side defect;
  if (exact) {
    // side proportional to the exact polymer partition functions
    const RestrictedModel full_o = make_restricted(sys_odd, VertexSet(g.n), {});
    const RestrictedModel full_e = make_restricted(sys_even, VertexSet(g.n), {});
    defect = sample_defect_side<Rational>(restricted_Z_exact<Rational>(full_o, p, budgets),
                                          restricted_Z_exact<Rational>(full_e, p, budgets), rng);
  } else {
    const double l_o = compute_L<double>(sys_odd, p, static_cast<int>(kmax), budgets).value;
    const double l_e = compute_L<double>(sys_even, p, static_cast<int>(kmax), budgets).value;
    if (cfg.l_direct_side)
      defect = sample_defect_side<double>(l_o, l_e, rng);
    else
      defect = sample_defect_side<double>(std::exp(l_o), std::exp(l_e), rng);
  }

  const PolymerSystem& sys = defect == Side::Even ? sys_even : sys_odd;
  const auto config = sample_nu(sys, p, cfg, rng, budgets);
  if (trace) {
    trace->brute_force = false;
    trace->defect_side = defect;
    trace->configuration = config;
  }

  VertexSet out(g.n);
  VertexSet defect_vertices(g.n);
  for (const auto& dp : config) {
    defect_vertices |= dp.polymer.a;
    defect_vertices |= dp.b;
  }
  out |= defect_vertices;
  const VertexSet free_vertices =
      g.side_mask(opposite(defect)) - g.neighborhood(defect_vertices) - defect_vertices;
  const Rational p_free = free_inclusion_prob(p);
  for (auto v = free_vertices.find_first(); v != VertexSet::npos; v = free_vertices.find_next(v))
    if (exact_bernoulli(p_free, rng)) out.set(v);
  return out;
}

ApproxZReport approx_Z(const BipartiteGraph& g, const IsingParams& p, const SamplerConfig& cfg,
                       const Budgets& budgets) {
  cfg.validate();
  ApproxZReport rep;
  if (cfg.k_override) {
    rep.k0 = *cfg.k_override;
    rep.k0_overridden = true;
    rep.k0_certified = false;
  } else {
    TailBoundInputs in;
    in.n = g.n;
    in.d = g.d;
    in.kappa = cfg.kappa;
    in.delta2 = cfg.delta2;
    in.lambda = num::to_double(p.lambda);
    in.q = num::to_double(p.q);
    in.epsilon = cfg.epsilon;
    const auto choice = select_k0(in);
    rep.k0 = choice.k0;
    rep.k0_certified = choice.certified;
  }
  if (rep.k0 < 1) throw ValidationError("approx_Z: truncation order must be >= 1");

  const auto sys_odd = PolymerSystem::build(g, Side::Odd, static_cast<int>(rep.k0));
  const auto sys_even = PolymerSystem::build(g, Side::Even, static_cast<int>(rep.k0));
  rep.l_odd = compute_L<double>(sys_odd, p, static_cast<int>(rep.k0), budgets).value;
  rep.l_even = compute_L<double>(sys_even, p, static_cast<int>(rep.k0), budgets).value;

  const double log_half_scale =
      (g.n / 2) * std::log1p(num::to_double(p.lambda));
  // primary: (1+lambda)^(n/2) (e^{L_E} + e^{L_O})
  const double m = std::max(rep.l_even, rep.l_odd);
  rep.log_z_hat =
      log_half_scale + m + std::log(std::exp(rep.l_even - m) + std::exp(rep.l_odd - m));
  rep.z_hat = std::exp(rep.log_z_hat);
  // literal reading with the raw truncation values in place of the
  // exponentials; kept for comparison
  rep.z_hat_direct = std::exp(log_half_scale) * (rep.l_even + rep.l_odd);

  if (g.n <= 20 && g.n <= budgets.exhaustive_n) {
    const double z = num::to_double(partition_exact<Rational>(g, p, budgets));
    rep.exact_z = z;
    rep.rel_err = std::fabs(rep.z_hat - z) / z;
    rep.rel_err_direct = std::fabs(rep.z_hat_direct - z) / z;
  }
  return rep;
}

}  // namespace ising
