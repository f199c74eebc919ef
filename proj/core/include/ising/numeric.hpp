#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace ising {

// Exact arithmetic mode. All model parameters are stored as rationals so the
// exact code paths can test equality instead of closeness.
using Rational = mpq_class;

// Float arithmetic mode: sign + natural log of the magnitude. Survives
// partition-function scales like (1+lambda)^(n/2) without overflow.
struct LogWeight {
  int sign = 0;  // -1, 0, +1
  double lg = -std::numeric_limits<double>::infinity();

  LogWeight() = default;
  LogWeight(int s, double l) : sign(s), lg(l) {}

  static LogWeight from_double(double x) {
    if (x == 0.0) return LogWeight{};
    return LogWeight{x > 0 ? 1 : -1, std::log(std::fabs(x))};
  }
  // value exp(l) with given sign
  static LogWeight from_log(double l, int s = 1) { return LogWeight{s, l}; }

  double to_double() const { return sign == 0 ? 0.0 : sign * std::exp(lg); }

  friend LogWeight operator*(const LogWeight& a, const LogWeight& b) {
    if (a.sign == 0 || b.sign == 0) return LogWeight{};
    return LogWeight{a.sign * b.sign, a.lg + b.lg};
  }
  friend LogWeight operator/(const LogWeight& a, const LogWeight& b) {
    if (b.sign == 0) throw std::domain_error("LogWeight: division by zero");
    if (a.sign == 0) return LogWeight{};
    return LogWeight{a.sign * b.sign, a.lg - b.lg};
  }
  friend LogWeight operator+(LogWeight a, LogWeight b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    if (a.lg < b.lg) std::swap(a, b);
    const double diff = b.lg - a.lg;  // <= 0
    if (a.sign == b.sign) return LogWeight{a.sign, a.lg + std::log1p(std::exp(diff))};
    const double rem = -std::expm1(diff);  // 1 - e^diff in [0,1)
    if (rem <= 0.0) return LogWeight{};
    return LogWeight{a.sign, a.lg + std::log(rem)};
  }
  friend LogWeight operator-(const LogWeight& a, const LogWeight& b) {
    return a + LogWeight{-b.sign, b.lg};
  }
  LogWeight operator-() const { return LogWeight{-sign, lg}; }
  LogWeight& operator+=(const LogWeight& o) { return *this = *this + o; }
  LogWeight& operator-=(const LogWeight& o) { return *this = *this - o; }
  LogWeight& operator*=(const LogWeight& o) { return *this = *this * o; }
  LogWeight& operator/=(const LogWeight& o) { return *this = *this / o; }

  friend bool operator==(const LogWeight& a, const LogWeight& b) {
    if (a.sign != b.sign) return false;
    return a.sign == 0 || a.lg == b.lg;
  }
  friend bool operator<(const LogWeight& a, const LogWeight& b) {
    if (a.sign != b.sign) return a.sign < b.sign;
    if (a.sign == 0) return false;
    return a.sign > 0 ? a.lg < b.lg : a.lg > b.lg;
  }
  friend bool operator>(const LogWeight& a, const LogWeight& b) { return b < a; }
  friend bool operator<=(const LogWeight& a, const LogWeight& b) { return !(b < a); }
  friend bool operator>=(const LogWeight& a, const LogWeight& b) { return !(a < b); }
};

// Compensated (Neumaier) summation for signed float accumulations.
struct NeumaierSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double t = s + x;
    if (std::fabs(s) >= std::fabs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

namespace num {

template <class S>
S zero();
template <>
inline Rational zero<Rational>() { return Rational(0); }
template <>
inline LogWeight zero<LogWeight>() { return LogWeight{}; }
template <>
inline double zero<double>() { return 0.0; }

template <class S>
S one();
template <>
inline Rational one<Rational>() { return Rational(1); }
template <>
inline LogWeight one<LogWeight>() { return LogWeight{1, 0.0}; }
template <>
inline double one<double>() { return 1.0; }

template <class S>
S from_ratio(long n, long d);
template <>
inline Rational from_ratio<Rational>(long n, long d) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}
template <>
inline LogWeight from_ratio<LogWeight>(long n, long d) {
  return LogWeight::from_double(static_cast<double>(n) / static_cast<double>(d));
}
template <>
inline double from_ratio<double>(long n, long d) {
  return static_cast<double>(n) / static_cast<double>(d);
}

// log of an mpz magnitude without overflowing double
inline double log_mpz(const mpz_class& z) {
  signed long exp2;
  const double m = mpz_get_d_2exp(&exp2, z.get_mpz_t());
  return std::log(std::fabs(m)) + static_cast<double>(exp2) * M_LN2;
}

template <class S>
S from_rational(const Rational& q);
template <>
inline Rational from_rational<Rational>(const Rational& q) { return q; }
template <>
inline LogWeight from_rational<LogWeight>(const Rational& q) {
  const int s = sgn(q);
  if (s == 0) return LogWeight{};
  return LogWeight{s, log_mpz(q.get_num()) - log_mpz(q.get_den())};
}
template <>
inline double from_rational<double>(const Rational& q) { return q.get_d(); }

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(const LogWeight& w) { return w.to_double(); }
inline double to_double(double x) { return x; }

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline bool is_zero(const LogWeight& w) { return w.sign == 0; }
inline bool is_zero(double x) { return x == 0.0; }

inline Rational abs(const Rational& q) { return ::abs(q); }
inline LogWeight abs(const LogWeight& w) { return LogWeight{w.sign == 0 ? 0 : 1, w.lg}; }
inline double abs(double x) { return std::fabs(x); }

inline Rational pow(const Rational& x, long e) {
  if (e == 0) return Rational(1);
  if (e < 0) {
    if (sgn(x) == 0) throw std::domain_error("pow: 0^negative");
    return Rational(1) / pow(x, -e);
  }
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), x.get_num().get_mpz_t(), static_cast<unsigned long>(e));
  mpz_pow_ui(d.get_mpz_t(), x.get_den().get_mpz_t(), static_cast<unsigned long>(e));
  return Rational(n, d);  // stays canonical: gcd(a,b)=1 => gcd(a^e,b^e)=1
}
inline LogWeight pow(const LogWeight& x, long e) {
  if (e == 0) return one<LogWeight>();
  if (x.sign == 0) {
    if (e < 0) throw std::domain_error("pow: 0^negative");
    return LogWeight{};
  }
  const int s = (x.sign < 0 && (e & 1)) ? -1 : 1;
  return LogWeight{s, x.lg * static_cast<double>(e)};
}
inline double pow(double x, long e) { return std::pow(x, static_cast<double>(e)); }

inline std::string to_string(const Rational& q) { return q.get_str(); }
inline std::string to_string(const LogWeight& w) { return std::to_string(w.to_double()); }
inline std::string to_string(double x) { return std::to_string(x); }

// natural log of a positive value
inline double log_value(const Rational& q) {
  if (sgn(q) <= 0) throw std::domain_error("log of nonpositive value");
  return log_mpz(q.get_num()) - log_mpz(q.get_den());
}
inline double log_value(const LogWeight& w) {
  if (w.sign <= 0) throw std::domain_error("log of nonpositive value");
  return w.lg;
}
inline double log_value(double x) {
  if (x <= 0) throw std::domain_error("log of nonpositive value");
  return std::log(x);
}

// Parses "3", "-3", "1/2", "0.25" into an exact rational.
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    Rational r;
    if (r.set_str(text, 10) != 0) throw std::invalid_argument("bad rational literal: " + text);
    if (sgn(r.get_den()) == 0) throw std::invalid_argument("zero denominator: " + text);
    r.canonicalize();
    return r;
  }
  const auto dot = text.find('.');
  if (dot != std::string::npos) {
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    const size_t frac_len = text.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+")
      throw std::invalid_argument("bad decimal literal: " + text);
    mpz_class n;
    if (mpz_set_str(n.get_mpz_t(), digits.c_str(), 10) != 0)
      throw std::invalid_argument("bad decimal literal: " + text);
    mpz_class d;
    mpz_ui_pow_ui(d.get_mpz_t(), 10, frac_len);
    Rational r(n, d);
    r.canonicalize();
    return r;
  }
  Rational r;
  if (r.set_str(text, 10) != 0) throw std::invalid_argument("bad integer literal: " + text);
  return r;
}

}  // namespace num

}  // namespace ising
