#pragma once

#include <cmath>

#include "ising/budgets.hpp"
#include "ising/numeric.hpp"

namespace ising {

enum class NumericMode { ExactRational, FloatLog };

// (lambda, q) with q = e^{-beta}. q = 0 is the hard-core limit, q < 1 is
// antiferromagnetic. Stored as exact rationals in both modes; the mode selects
// which scalar type downstream computations run in.
struct IsingParams {
  Rational lambda{1};
  Rational q{0};
  NumericMode mode = NumericMode::ExactRational;

  IsingParams() = default;
  IsingParams(Rational lam, Rational qq, NumericMode m = NumericMode::ExactRational)
      : lambda(std::move(lam)), q(std::move(qq)), mode(m) {
    validate();
  }

  void validate() const {
    if (sgn(lambda) <= 0) throw ValidationError("lambda must be positive");
    if (sgn(q) < 0 || q > 1) throw ValidationError("q must lie in [0,1]");
  }

  bool hard_core() const { return sgn(q) == 0; }
  bool antiferromagnetic() const { return q < 1; }

  // alpha = lambda (1 - e^{-beta})
  Rational alpha() const { return lambda * (Rational(1) - q); }

  double beta() const {
    if (sgn(q) == 0) return std::numeric_limits<double>::infinity();
    return -num::log_value(q);
  }

  template <class S>
  S lambda_as() const {
    return num::from_rational<S>(lambda);
  }
  template <class S>
  S q_as() const {
    return num::from_rational<S>(q);
  }

  static IsingParams from_beta(double lambda_f, double beta,
                               NumericMode m = NumericMode::FloatLog) {
    if (m == NumericMode::ExactRational)
      throw ValidationError("beta parameterization is float-mode only; pass q for exact runs");
    // nearest representable rational with denominator 10^15
    const double qf = std::exp(-beta);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, 15);
    mpz_class num_l(static_cast<long>(std::llround(lambda_f * 1e15)));
    mpz_class num_q(static_cast<long>(std::llround(qf * 1e15)));
    Rational lam(num_l, den), q(num_q, den);
    lam.canonicalize();
    q.canonicalize();
    return IsingParams(lam, q, m);
  }
};

}  // namespace ising
