#include <doctest.h>

#include <cmath>
#include <map>

#include "ising/sampler.hpp"
#include "sampler_tree.hpp"

using namespace ising;

namespace {

const Budgets kBudgets;

Rational q3_singleton_weight(const Rational& lam, const Rational& q) {
  return lam * num::pow((1 + lam * q) / (1 + lam), 3);
}

}  // namespace

TEST_CASE("select_k0_prime candidate arithmetic") {
  TailBoundInputs in;
  in.n = 64;
  in.d = 6;
  in.kappa = 0.5;
  in.lambda = 1.0;
  in.q = 0.5;
  in.epsilon = 0.25;
  const auto choice = select_k0_prime(in);
  const double d3logn = 216.0 * std::log(64.0);
  CHECK(choice.candidates[0] == static_cast<long>(std::floor(d3logn)));
  CHECK(choice.candidates[1] == choice.candidates[0] + 1);
  const double dk1 = std::pow(6.0, 1.5);
  const double arg = 160.0 * 64.0 * 64.0 * 64.0 / (0.25 * 0.25 * dk1);
  CHECK(choice.candidates[2] == static_cast<long>(std::ceil(dk1 * std::log(arg))));
}

TEST_CASE("restricted_Z on Q3") {
  const auto q3 = generate_graph("hypercube:3");
  const auto sys = PolymerSystem::build(q3, Side::Even, 4);
  const IsingParams p(Rational(1), Rational(1, 5));
  const Rational x = q3_singleton_weight(p.lambda, p.q);

  // full model: the polymer partition function itself
  const auto full = make_restricted(sys, VertexSet(8), {});
  CHECK(restricted_Z_exact<Rational>(full, p, kBudgets) == 1 + 4 * x);

  // excluding one even vertex leaves three mutually incompatible singletons
  const auto one_out = make_restricted(sys, make_set(8, {0}), {});
  CHECK(restricted_Z_exact<Rational>(one_out, p, kBudgets) == 1 + 3 * x);

  // anchoring a polymer forbids everything else on Q3's side
  const auto anchored = make_restricted(sys, VertexSet(8), {0});
  CHECK(restricted_Z_exact<Rational>(anchored, p, kBudgets) == Rational(1));
}

TEST_CASE("restricted_Z of an empty model is 1") {
  const auto c4 = generate_graph("cycle:4");
  const auto sys = PolymerSystem::build(c4, Side::Even, 2);
  const auto rm = make_restricted(sys, VertexSet(4), {});
  CHECK(restricted_Z_exact<Rational>(rm, IsingParams(Rational(2), Rational(1, 2)), kBudgets) ==
        Rational(1));
}

TEST_CASE("fundamental identity at the first vertex of Q3") {
  const auto q3 = generate_graph("hypercube:3");
  const auto sys = PolymerSystem::build(q3, Side::Even, 4);
  const IsingParams p(Rational(1), Rational(1, 5));
  const auto rm = make_restricted(sys, VertexSet(8), {});
  const auto [lhs, rhs] = fundamental_identity_check<Rational>(rm, 0, p, kBudgets);
  const Rational x = q3_singleton_weight(p.lambda, p.q);
  CHECK(lhs == 1 + 4 * x);
  CHECK(rhs == lhs);  // (1+3x) + x * 1
}

TEST_CASE("fundamental identity for every reachable state on Q3 and C6") {
  for (const char* spec : {"hypercube:3", "cycle:6"}) {
    const auto g = generate_graph(spec);
    const IsingParams p(Rational(2, 3), Rational(1, 4));
    for (Side side : {Side::Even, Side::Odd}) {
      const auto sys = PolymerSystem::build(g, side, g.n / 2);
      int states = 0;
      testing::nu_decision_tree(sys, p, kBudgets,
                                [&](const std::vector<int>& anchored, const VertexSet& processed,
                                    int v) {
                                  const auto rm = make_restricted(sys, processed, anchored);
                                  const auto [lhs, rhs] =
                                      fundamental_identity_check<Rational>(rm, v, p, kBudgets);
                                  CHECK(lhs == rhs);
                                  ++states;
                                });
      CHECK(states > 0);
    }
  }
}

TEST_CASE("nu decision tree reproduces nu_D leaf by leaf") {
  const auto q3 = generate_graph("hypercube:3");
  const auto sys = PolymerSystem::build(q3, Side::Even, 4);
  const IsingParams p(Rational(1), Rational(3, 10));
  const Rational xi = xi_exact<Rational>(sys, p, kBudgets);
  const auto leaves = testing::nu_decision_tree(
      sys, p, kBudgets, [](const std::vector<int>&, const VertexSet&, int) {});
  Rational total(0);
  for (const auto& leaf : leaves) {
    // nu_D(theta) = prod omega(A_i, B_i) / Xi
    Rational w(1);
    for (size_t i = 0; i < leaf.anchored.size(); ++i)
      w *= decorated_weight<Rational>(
          q3, DecoratedPolymer{sys.polymers[leaf.anchored[i]], leaf.decorations[i]}, p);
    CHECK(leaf.prob == w / xi);
    total += leaf.prob;
  }
  CHECK(total == Rational(1));
}

TEST_CASE("sample_nu on a side with no polymers returns the empty configuration") {
  const auto c4 = generate_graph("cycle:4");
  const auto sys = PolymerSystem::build(c4, Side::Odd, 2);
  SamplerConfig cfg;
  CounterRng rng(5);
  const auto config = sample_nu(sys, IsingParams(Rational(1), Rational(0)), cfg, rng, kBudgets);
  CHECK(config.empty());
}

TEST_CASE("sample_nu frequencies match nu_D on Q3 at the hard-core point") {
  const auto q3 = generate_graph("hypercube:3");
  const auto sys = PolymerSystem::build(q3, Side::Even, 4);
  const IsingParams p(Rational(1), Rational(0));
  // at q=0 every nonempty decoration has weight 0, so the configuration space
  // is {empty} plus one bare polymer per even vertex
  const Rational x = q3_singleton_weight(p.lambda, p.q);  // = 1/8
  const Rational xi = 1 + 4 * x;                          // = 3/2
  SamplerConfig cfg;
  CounterRng rng(99);
  std::map<int, int> hits;  // -1 = empty, else min vertex of the polymer
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const auto config = sample_nu(sys, p, cfg, rng, kBudgets);
    if (config.empty()) {
      ++hits[-1];
    } else {
      REQUIRE(config.size() == 1);
      CHECK(config[0].b.none());
      ++hits[static_cast<int>(config[0].polymer.a.find_first())];
    }
  }
  // chi-square against the exact law: P(empty) = 1/Xi, P(A_i) = x/Xi
  std::vector<std::pair<double, int>> cells;
  cells.push_back({num::to_double(1 / xi), hits[-1]});
  for (auto v = q3.even.find_first(); v != VertexSet::npos; v = q3.even.find_next(v))
    cells.push_back({num::to_double(x / xi), hits[static_cast<int>(v)]});
  double chi2 = 0;
  for (const auto& [prob, got] : cells) {
    const double expect = prob * draws;
    chi2 += (got - expect) * (got - expect) / expect;
  }
  CHECK(chi2 < 13.277);  // chi-square(4 dof) at the 1% level
}

TEST_CASE("defect side drawing") {
  CounterRng rng(4242);
  // equal weights: each side near half
  int even = 0;
  for (int i = 0; i < 20000; ++i)
    even += sample_defect_side<Rational>(Rational(3, 2), Rational(3, 2), rng) == Side::Even;
  CHECK(std::fabs(even / 20000.0 - 0.5) < 0.02);
  // zero weight on one side pins the other
  for (int i = 0; i < 50; ++i)
    CHECK(sample_defect_side<Rational>(Rational(1), Rational(0), rng) == Side::Odd);
  CHECK_THROWS_AS(sample_defect_side<Rational>(Rational(0), Rational(0), rng), ValidationError);
  CHECK_THROWS_AS(sample_defect_side<double>(-0.5, 1.0, rng), ValidationError);
}

TEST_CASE("sample_ising reproducibility and the brute-force gate") {
  const auto q3 = generate_graph("hypercube:3");
  const IsingParams p(Rational(1), Rational(3, 10));
  SamplerConfig cfg;
  cfg.seed = 77;
  // desk scale epsilon_0 is close to 1, so the default falls back to brute force
  IsingSampleTrace trace;
  CounterRng rng1(cfg.seed), rng2(cfg.seed);
  const auto s1 = sample_ising(q3, p, cfg, rng1, kBudgets, &trace);
  const auto s2 = sample_ising(q3, p, cfg, rng2, kBudgets);
  CHECK(s1 == s2);
  CHECK(trace.brute_force);

  cfg.force_polymer_path = true;
  CounterRng rng3(cfg.seed), rng4(cfg.seed);
  const auto s3 = sample_ising(q3, p, cfg, rng3, kBudgets, &trace);
  const auto s4 = sample_ising(q3, p, cfg, rng4, kBudgets);
  CHECK(s3 == s4);
  CHECK_FALSE(trace.brute_force);
}

TEST_CASE("conditioned on an empty configuration the free side is product-Bernoulli") {
  // C4 has no polymers, so the polymer path outputs one-sided product sets
  const auto c4 = generate_graph("cycle:4");
  const IsingParams p(Rational(1), Rational(1, 2));
  SamplerConfig cfg;
  cfg.force_polymer_path = true;
  CounterRng rng(31337);
  std::map<int, int> count_by_size;
  int side_even = 0;
  const int draws = 40000;
  for (int i = 0; i < draws; ++i) {
    IsingSampleTrace trace;
    const auto s = sample_ising(c4, p, cfg, rng, kBudgets, &trace);
    CHECK(trace.configuration.empty());
    side_even += trace.defect_side == Side::Even;
    // output lies on the free side entirely
    CHECK((s & c4.side_mask(trace.defect_side)).none());
    ++count_by_size[static_cast<int>(s.count())];
  }
  CHECK(std::fabs(side_even / static_cast<double>(draws) - 0.5) < 0.02);
  // |S| ~ Binomial(2, 1/2): expect 1/4, 1/2, 1/4
  CHECK(std::fabs(count_by_size[0] / static_cast<double>(draws) - 0.25) < 0.02);
  CHECK(std::fabs(count_by_size[1] / static_cast<double>(draws) - 0.50) < 0.02);
  CHECK(std::fabs(count_by_size[2] / static_cast<double>(draws) - 0.25) < 0.02);
}

TEST_CASE("exact-mode sampler output distribution equals mu_hat on C6") {
  const auto c6 = generate_graph("cycle:6");
  const IsingParams p(Rational(1), Rational(1, 3));
  const auto dist = testing::sampler_output_distribution(c6, p, kBudgets);
  const auto mh = mu_hat_exact<Rational>(c6, p, kBudgets);
  Rational total(0);
  for (uint32_t mask = 0; mask < (uint32_t{1} << 6); ++mask) {
    const auto it = dist.find(mask);
    const Rational got = it == dist.end() ? Rational(0) : it->second;
    CHECK(got == mh.mu_hat.p[mask]);
    total += got;
  }
  CHECK(total == Rational(1));
}

TEST_CASE("mu_hat basics on Q3") {
  const auto q3 = generate_graph("hypercube:3");
  const IsingParams p(Rational(1), Rational(3, 10));
  const auto mh = mu_hat_exact<Rational>(q3, p, kBudgets);
  // the empty set is valid for both defect sides
  CHECK(mh.mu_hat.p[0] * mh.z_hat == Rational(2));
  // sum of w_hat matches (1+lambda)^(n/2) (Xi_O + Xi_E), independent route
  const auto sys_odd = PolymerSystem::build(q3, Side::Odd, 4);
  const auto sys_even = PolymerSystem::build(q3, Side::Even, 4);
  const Rational xi_sum =
      xi_exact<Rational>(sys_odd, p, kBudgets) + xi_exact<Rational>(sys_even, p, kBudgets);
  CHECK(mh.z_hat == num::pow(1 + p.lambda, 4) * xi_sum);
  CHECK(mh.z_hat == Rational(8394, 125));
  CHECK(mh.mu_hat.sum() == Rational(1));
  // measured distance to the Gibbs measure, reported not asserted
  CHECK(num::to_double(mh.tv_to_gibbs) == doctest::Approx(0.17551197933).epsilon(1e-9));
}

TEST_CASE("approx_Z on the C4 negative control") {
  const auto c4 = generate_graph("cycle:4");
  const IsingParams p(Rational(1), Rational(1, 2));
  SamplerConfig cfg;
  cfg.k_override = 2;
  const auto rep = approx_Z(c4, p, cfg, kBudgets);
  // no polymers: both truncations vanish and Z_hat = (1+lambda)^2 * 2
  CHECK(rep.l_even == 0.0);
  CHECK(rep.l_odd == 0.0);
  CHECK(rep.z_hat == doctest::Approx(8.0));
  CHECK(rep.z_hat_direct == doctest::Approx(0.0));
  REQUIRE(rep.exact_z.has_value());
  // Z = 7 + 4q + 4q^2 + q^4 at lambda = 1
  CHECK(*rep.exact_z == doctest::Approx(7 + 2 + 1 + 1.0 / 16));
  CHECK(*rep.rel_err == doctest::Approx(std::fabs(8.0 - 10.0625) / 10.0625));
}

TEST_CASE("approx_Z k0 selection and override") {
  // selected truncation orders are asymptotic in d; on a small cube they
  // exceed the enumeration budget, which must surface as a budget error
  const auto q3 = generate_graph("hypercube:3");
  const IsingParams p(Rational(1, 5), Rational(1, 5));
  SamplerConfig cfg;
  cfg.epsilon = 0.5;
  CHECK_THROWS_AS(approx_Z(q3, p, cfg, kBudgets), BudgetError);
  cfg.k_override = 3;
  const auto rep2 = approx_Z(q3, p, cfg, kBudgets);
  CHECK(rep2.k0 == 3);
  CHECK(rep2.k0_overridden);

  // C4 with d=2 selects k0 = floor(8 log 4) = 11, small enough to enumerate
  const auto c4 = generate_graph("cycle:4");
  SamplerConfig auto_cfg;
  auto_cfg.epsilon = 0.5;
  const auto rep3 = approx_Z(c4, IsingParams(Rational(1), Rational(1, 2)), auto_cfg, kBudgets);
  CHECK(rep3.k0 >= 11);
  CHECK_FALSE(rep3.k0_overridden);
  CHECK(rep3.z_hat == doctest::Approx(8.0));
}

TEST_CASE("approx_Z exponential value tracks exp(L) * scale") {
  const auto q4 = generate_graph("hypercube:4");
  const IsingParams p(Rational(1, 5), Rational(1, 5));
  SamplerConfig cfg;
  cfg.k_override = 4;
  const auto rep = approx_Z(q4, p, cfg, kBudgets);
  const double scale = std::pow(1.2, 8);
  CHECK(rep.z_hat ==
        doctest::Approx(scale * (std::exp(rep.l_even) + std::exp(rep.l_odd))).epsilon(1e-12));
  CHECK(rep.z_hat_direct == doctest::Approx(scale * (rep.l_even + rep.l_odd)).epsilon(1e-12));
}

TEST_CASE("xi at q=1 counts compatible families of bare lambda powers") {
  const auto q3 = generate_graph("hypercube:3");
  const auto sys = PolymerSystem::build(q3, Side::Even, 4);
  const Rational lam(2);
  CHECK(xi_exact<Rational>(sys, IsingParams(lam, Rational(1)), kBudgets) == 1 + 4 * lam);
}

TEST_CASE("truncated-mode sampler runs and the audit reports a small gap") {
  const auto q3 = generate_graph("hypercube:3");
  const IsingParams p(Rational(1, 5), Rational(1, 5));
  const auto sys = PolymerSystem::build(q3, Side::Even, 4);
  SamplerConfig cfg;
  cfg.mode = SamplerConfig::Mode::TruncatedRestrictedZ;
  cfg.k_override = 4;
  CounterRng rng(7);
  NuAudit audit;
  const auto config = sample_nu(sys, p, cfg, rng, kBudgets, &audit);
  (void)config;
  CHECK(audit.steps > 0);
  CHECK(audit.tv_bound() < 0.05);
}
