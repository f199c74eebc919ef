#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ising/numeric.hpp"

namespace ising {

// Counter-based generator: output i of stream (seed, stream) is a pure
// function of (seed, stream, i), so replicas get independent streams and any
// run is reproducible from its manifest. Not cryptographic.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed, uint64_t stream = 0)
      : key_(mix(seed ^ 0x2545F4914F6CDD1Dull, mix(stream, 0x9E3779B97F4A7C15ull))) {}

  uint64_t next() { return mix(key_, counter_++); }

  // uniform in [0,1) with 53 random bits
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // unbiased integer in [0, n)
  uint64_t below(uint64_t n) {
    if (n == 0) throw std::invalid_argument("below(0)");
    const uint64_t limit = n * (UINT64_MAX / n);
    for (;;) {
      const uint64_t x = next();
      if (x < limit) return x % n;
    }
  }

  bool bit() {
    if (bits_left_ == 0) {
      bit_word_ = next();
      bits_left_ = 64;
    }
    const bool b = bit_word_ & 1u;
    bit_word_ >>= 1;
    --bits_left_;
    return b;
  }

 private:
  static uint64_t mix(uint64_t key, uint64_t ctr) {
    uint64_t z = key + ctr * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  uint64_t key_;
  uint64_t counter_ = 0;
  uint64_t bit_word_ = 0;
  int bits_left_ = 0;
};

// Bernoulli(p) with an exactly rational p: compares the binary expansion of a
// lazily drawn uniform against p, so no rounding enters the coin.
inline bool exact_bernoulli(Rational p, CounterRng& rng) {
  if (sgn(p) <= 0) return false;
  if (p >= 1) return true;
  for (;;) {
    p *= 2;
    const bool digit = p >= 1;
    if (digit) p -= 1;
    const bool b = rng.bit();
    if (b != digit) return !b;  // U-bit 0 under p-bit 1 means U < p
    if (sgn(p) == 0) return false;
  }
}

// index sampled proportionally to nonnegative rational weights, exactly
inline size_t exact_categorical(const std::vector<Rational>& w, CounterRng& rng) {
  Rational rem(0);
  for (const auto& x : w) {
    if (sgn(x) < 0) throw std::invalid_argument("negative categorical weight");
    rem += x;
  }
  if (sgn(rem) == 0) throw std::invalid_argument("categorical: all weights zero");
  for (size_t i = 0; i + 1 < w.size(); ++i) {
    if (sgn(w[i]) == 0) continue;
    if (exact_bernoulli(w[i] / rem, rng)) return i;
    rem -= w[i];
  }
  return w.size() - 1;
}

inline size_t categorical_double(const std::vector<double>& w, CounterRng& rng) {
  double total = 0;
  for (double x : w) {
    if (x < 0) throw std::invalid_argument("negative categorical weight");
    total += x;
  }
  if (total <= 0) throw std::invalid_argument("categorical: all weights zero");
  double u = rng.uniform() * total;
  for (size_t i = 0; i + 1 < w.size(); ++i) {
    u -= w[i];
    if (u < 0) return i;
  }
  return w.size() - 1;
}

}  // namespace ising
