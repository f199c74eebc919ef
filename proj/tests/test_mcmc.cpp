#include <doctest.h>

#include <cmath>
#include <map>

#include "ising/mcmc.hpp"

using namespace ising;

namespace {

const Budgets kBudgets;

}  // namespace

TEST_CASE("glauber inclusion probabilities") {
  // probabilities are read off the exact kernel
  const auto c4 = generate_graph("cycle:4");
  // lambda=1, j=0: add with probability 1/2
  {
    const IsingParams p(Rational(1), Rational(1, 2));
    // from the empty set, P(empty -> {v}) = (1/n) * 1/2
    CHECK(glauber_transition<Rational>(c4, p, 0b0000, 0b0001) == Rational(1, 8));
  }
  // lambda=2, q=1/2, j=1: add-probability (2 * 1/2)/(1 + 1) = 1/2
  {
    const IsingParams p(Rational(2), Rational(1, 2));
    // from {1}, vertex 0 has one occupied neighbor
    CHECK(glauber_transition<Rational>(c4, p, 0b0010, 0b0011) == Rational(1, 8));
  }
  // q=0, j>=1: hard-core constraint forbids inclusion
  {
    const IsingParams p(Rational(3), Rational(0));
    CHECK(glauber_transition<Rational>(c4, p, 0b0010, 0b0011) == Rational(0));
  }
}

TEST_CASE("transition kernel rows sum to one") {
  const auto c4 = generate_graph("cycle:4");
  const IsingParams p(Rational(2, 3), Rational(1, 5));
  for (uint32_t x = 0; x < 16; ++x) {
    Rational row(0);
    for (uint32_t y = 0; y < 16; ++y) row += glauber_transition<Rational>(c4, p, x, y);
    CHECK(row == Rational(1));
  }
}

TEST_CASE("operator application matches the kernel") {
  const auto c4 = generate_graph("cycle:4");
  const IsingParams p(Rational(1), Rational(1, 10));
  std::vector<Rational> dist(16, Rational(0));
  dist[5] = Rational(1);
  const auto out = apply_glauber_operator<Rational>(c4, p, dist);
  for (uint32_t y = 0; y < 16; ++y)
    CHECK(out[y] == glauber_transition<Rational>(c4, p, 5, y));
}

TEST_CASE("flip move on Q2") {
  const auto q2 = generate_graph("hypercube:2");
  // flipping the first coordinate maps {00,01} to {10,11}
  REQUIRE(q2.builtin_flip.size() == 4);
  VertexSet s = make_set(4, {0, 1});  // vertices 00 and 01
  VertexSet expect = make_set(4, {2, 3});
  VertexSet flipped(4);
  for (auto v = s.find_first(); v != VertexSet::npos; v = s.find_next(v))
    flipped.set(q2.builtin_flip[v]);
  CHECK(flipped == expect);
  // the flip is an involution
  VertexSet twice(4);
  for (auto v = flipped.find_first(); v != VertexSet::npos; v = flipped.find_next(v))
    twice.set(q2.builtin_flip[v]);
  CHECK(twice == s);
}

TEST_CASE("gibbs weights are invariant under the flip automorphism") {
  const auto q2 = generate_graph("hypercube:2");
  const IsingParams p(Rational(3, 2), Rational(1, 3));
  const auto mu = gibbs_exact<Rational>(q2, p, kBudgets);
  for (uint32_t x = 0; x < 16; ++x) {
    uint32_t y = 0;
    for (int v = 0; v < 4; ++v)
      if (x >> v & 1u) y |= uint32_t{1} << q2.builtin_flip[v];
    CHECK(mu.p[x] == mu.p[y]);
  }
}

TEST_CASE("automorphism validation rejects bad maps") {
  const auto q2 = generate_graph("hypercube:2");
  CHECK_THROWS_AS(validate_flip_automorphism(q2, {0, 1, 2, 3}), ValidationError);  // same side
  CHECK_THROWS_AS(validate_flip_automorphism(q2, {1, 1, 2, 2}), ValidationError);  // not bijective
  CHECK_THROWS_AS(validate_flip_automorphism(q2, {1, 0, 2}), ValidationError);     // wrong length
  validate_flip_automorphism(q2, q2.builtin_flip);                                 // ok
}

TEST_CASE("run_chain is deterministic and t=0 returns the start") {
  const auto q3 = generate_graph("hypercube:3");
  ChainSpec spec;
  spec.params = IsingParams(Rational(1), Rational(1, 10));
  spec.seed = 12345;
  const VertexSet s0 = make_set(8, {0, 3, 5});
  CHECK(run_chain(q3, spec, s0, 0) == s0);
  CHECK(run_chain(q3, spec, s0, 1000) == run_chain(q3, spec, s0, 1000));
  ChainSpec flips = spec;
  flips.kind = ChainKind::GlauberWithFlips;
  CHECK(run_chain(q3, flips, s0, 1000) == run_chain(q3, flips, s0, 1000));
}

TEST_CASE("long-run frequencies on C4 match the uniform hard-core law") {
  const auto c4 = generate_graph("cycle:4");
  const IsingParams p(Rational(1), Rational(0));
  CounterRng rng(2024);
  VertexSet s(4);
  std::map<uint32_t, uint64_t> freq;
  const uint64_t steps = 1000000;
  for (uint64_t i = 0; i < steps; ++i) {
    s = glauber_step(c4, s, p, rng);
    ++freq[set_to_mask(s)];
  }
  CHECK(freq.size() == 7);  // exactly the independent sets of C4
  for (const auto& [mask, count] : freq) {
    (void)mask;
    const double f = static_cast<double>(count) / static_cast<double>(steps);
    // 3 standard errors, inflated for autocorrelation of the chain
    const double se = std::sqrt((1.0 / 7) * (6.0 / 7) / static_cast<double>(steps));
    CHECK(std::fabs(f - 1.0 / 7) < 3 * 8 * se);
  }
}

TEST_CASE("stationarity: mu P = mu exactly") {
  for (const char* spec_name : {"cycle:4", "hypercube:3"}) {
    const auto g = generate_graph(spec_name);
    const IsingParams p(Rational(1), Rational(3, 10));
    const auto mu = gibbs_exact<Rational>(g, p, kBudgets);
    const auto next = apply_glauber_operator<Rational>(g, p, mu.p);
    for (size_t x = 0; x < mu.p.size(); ++x) CHECK(next[x] == mu.p[x]);
  }
}

TEST_CASE("stationarity of the flips chain on Q2 and Q3") {
  for (const char* spec_name : {"hypercube:2", "hypercube:3"}) {
    const auto g = generate_graph(spec_name);
    ChainSpec spec;
    spec.kind = ChainKind::GlauberWithFlips;
    spec.params = IsingParams(Rational(1), Rational(1, 10));
    const auto mu = gibbs_exact<Rational>(g, spec.params, kBudgets);
    // both factor orders fix mu: P then flip-average...
    const auto after = apply_chain_operator<Rational>(g, spec, mu.p);
    for (size_t x = 0; x < mu.p.size(); ++x) CHECK(after[x] == mu.p[x]);
    // ...and flip-average then P
    const auto sigma = resolve_flip(g, spec);
    const auto other = apply_glauber_operator<Rational>(
        g, spec.params, apply_flip_average<Rational>(g, sigma, mu.p));
    for (size_t x = 0; x < mu.p.size(); ++x) CHECK(other[x] == mu.p[x]);
  }
}

TEST_CASE("detailed balance for plain glauber") {
  for (const char* spec_name : {"cycle:4", "hypercube:3"}) {
    const auto g = generate_graph(spec_name);
    const IsingParams p(Rational(2, 3), Rational(1, 4));
    const auto mu = gibbs_exact<Rational>(g, p, kBudgets);
    for (uint32_t x = 0; x < (uint32_t{1} << g.n); ++x)
      for (int v = 0; v < g.n; ++v) {
        const uint32_t y = x ^ (uint32_t{1} << v);
        CHECK(mu.p[x] * glauber_transition<Rational>(g, p, x, y) ==
              mu.p[y] * glauber_transition<Rational>(g, p, y, x));
      }
  }
}

TEST_CASE("tv curve starts at 1 - mu(s0) and never increases") {
  const auto c4 = generate_graph("cycle:4");
  ChainSpec spec;
  spec.params = IsingParams(Rational(1), Rational(1, 10));
  const auto mu = gibbs_exact<Rational>(c4, spec.params, kBudgets);
  const VertexSet s0 = make_set(4, {1, 3});
  const auto curve = exact_tv_curve<Rational>(c4, spec, s0, 40, kBudgets);
  CHECK(curve[0].tv == 1 - mu.p[set_to_mask(s0)]);
  for (size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].tv <= curve[i - 1].tv);
}

TEST_CASE("tv curve budget") {
  const auto g = generate_graph("hypercube:3");
  Budgets tight;
  tight.tv_n = 4;
  ChainSpec spec;
  spec.params = IsingParams(Rational(1), Rational(0));
  CHECK_THROWS_AS(exact_tv_curve<Rational>(g, spec, VertexSet(8), 5, tight), BudgetError);
}

TEST_CASE("flips chain tv curve is sane on Q3") {
  const auto q3 = generate_graph("hypercube:3");
  ChainSpec flips;
  flips.kind = ChainKind::GlauberWithFlips;
  flips.params = IsingParams(Rational(1), Rational(1, 10));
  const VertexSet s0 = mask_to_set(8, set_to_mask(q3.even));
  const auto curve = exact_tv_curve<double>(q3, flips, s0, 60, kBudgets);
  for (size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].tv <= curve[i - 1].tv + 1e-12);
  CHECK(curve.back().tv < 0.25);
}

TEST_CASE("conductance report on C4 at lambda=1") {
  const auto c4 = generate_graph("cycle:4");
  for (const auto& q : {Rational(1, 10), Rational(1, 2)}) {
    const IsingParams p(Rational(1), q);
    const auto rep = conductance_exact<Rational>(c4, p, kBudgets);
    // balanced sets of C4 at lambda=1 weigh 1 + 4q + q^4
    CHECK(rep.weight_balanced == 1 + 4 * q + num::pow(q, 4));
    // subsets of one side give w(S_E) >= (1+lambda)^(n/2) - 1
    CHECK(rep.weight_se >= num::pow(Rational(2), 2) - 1);
    // paper's chain: Z Q(S_E, S_E^c) <= w(S_bal)
    CHECK(rep.q_cut_z <= rep.weight_balanced);
    CHECK(rep.phi_se <= rep.weight_balanced / rep.weight_se);
    CHECK(rep.phi_se <= rep.bound_rhs);
    CHECK(rep.mu_se <= Rational(1, 2));
  }
}

TEST_CASE("conductance exact matches a float evaluation") {
  const auto q3 = generate_graph("hypercube:3");
  const IsingParams p(Rational(1), Rational(1, 10));
  const auto exact = conductance_exact<Rational>(q3, p, kBudgets);
  const auto dbl = conductance_exact<double>(q3, p, kBudgets);
  CHECK(dbl.phi_se == doctest::Approx(num::to_double(exact.phi_se)).epsilon(1e-12));
  CHECK(dbl.weight_balanced ==
        doctest::Approx(num::to_double(exact.weight_balanced)).epsilon(1e-12));
}

TEST_CASE("mixing bound of the conductance lemma on C4") {
  const auto c4 = generate_graph("cycle:4");
  ChainSpec spec;
  spec.params = IsingParams(Rational(1), Rational(1, 10));
  const auto rep = conductance_exact<Rational>(c4, spec.params, kBudgets);
  const auto tau = tau_mix_exact<Rational>(c4, spec, Rational(1, 4), 200, kBudgets);
  REQUIRE(tau.has_value());
  // tau_mix >= 1/(4 Phi(S_E))
  CHECK(Rational(*tau) >= 1 / (4 * rep.phi_se));
}
