#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace padic {

// Dense objects are coefficient vectors of length p^l and matrices of side
// p^l; this cap keeps p^l within machine addressing (2^24 by default).
inline constexpr std::uint64_t kDefaultLevelCap = std::uint64_t{1} << 24;

class CapacityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A validated prime base p >= 2.
class Prime {
public:
  explicit Prime(std::uint64_t p) : value_(p) {
    if (!is_prime(p))
      throw DomainError("Prime: " + std::to_string(p) + " is not prime");
  }

  std::uint64_t value() const { return value_; }

  static bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0) return false;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
      if (n % d == 0) return false;
    return true;
  }

  friend bool operator==(const Prime& a, const Prime& b) {
    return a.value_ == b.value_;
  }

private:
  std::uint64_t value_;
};

/// p^e with overflow/cap detection.
inline std::uint64_t pow_checked(std::uint64_t p, std::uint64_t e,
                                 std::uint64_t cap = kDefaultLevelCap) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    if (r > cap / p)
      throw CapacityError("p^l exceeds capacity cap");
    r *= p;
  }
  if (r > cap)
    throw CapacityError("p^l exceeds capacity cap");
  return r;
}

/// An element of G_l = Z_p/p^l Z_p: a level and a value in [0, p^l).
/// The base-p digits of value are the tree address of the neuron.
struct PadicIndex {
  Prime p;
  std::uint32_t level;
  std::uint64_t value;

  PadicIndex(Prime prime, std::uint32_t l, std::uint64_t v)
      : p(prime), level(l), value(v) {
    if (v >= pow_checked(prime.value(), l))
      throw DomainError("PadicIndex: value out of range for level");
  }

  std::uint32_t digit(std::uint32_t j) const {
    std::uint64_t v = value;
    for (std::uint32_t i = 0; i < j; ++i) v /= p.value();
    return static_cast<std::uint32_t>(v % p.value());
  }

  friend bool operator==(const PadicIndex& a, const PadicIndex& b) {
    return a.p == b.p && a.level == b.level && a.value == b.value;
  }
};

/// Input level L and depth Delta; the working level is L + Delta.
struct LevelPair {
  std::uint32_t L;
  std::uint32_t Delta;

  LevelPair(std::uint32_t input_level, std::uint32_t depth,
            std::uint64_t cap = kDefaultLevelCap)
      : L(input_level), Delta(depth) {
    if (depth < 1) throw DomainError("LevelPair: Delta must be >= 1");
    pow_checked(2, total(), cap);  // weakest base; callers re-check with p
  }

  std::uint32_t total() const { return L + Delta; }
};

/// The level projection Lambda_{l,m}: truncate to the first m digits.
inline PadicIndex project(const PadicIndex& i, std::uint32_t m) {
  if (m >= i.level) return i;
  std::uint64_t mod = pow_checked(i.p.value(), m);
  return PadicIndex(i.p, m, i.value % mod);
}

/// Value-level projection used in hot loops: v mod p^m with p^m precomputed.
inline std::uint64_t project_value(std::uint64_t v, std::uint64_t p_pow_m) {
  return v % p_pow_m;
}

/// The p children of i at level l+1: i.value + z*p^l, z = 0..p-1.
inline std::vector<PadicIndex> children(const PadicIndex& i,
                                        std::uint64_t cap = kDefaultLevelCap) {
  std::uint64_t pl = pow_checked(i.p.value(), i.level, cap);
  pow_checked(i.p.value(), i.level + 1, cap);
  std::vector<PadicIndex> out;
  out.reserve(i.p.value());
  for (std::uint64_t z = 0; z < i.p.value(); ++z)
    out.emplace_back(i.p, i.level + 1, i.value + z * pl);
  return out;
}

/// Haar measure of a level-l ball: p^{-l}.
inline double haar_weight(const Prime& p, std::uint32_t l) {
  return 1.0 / static_cast<double>(pow_checked(p.value(), l));
}

/// All p^l indices at level l in increasing value order (the canonical
/// coefficient ordering used throughout).
inline std::vector<PadicIndex> enumerate_level(
    const Prime& p, std::uint32_t l, std::uint64_t cap = kDefaultLevelCap) {
  std::uint64_t n = pow_checked(p.value(), l, cap);
  std::vector<PadicIndex> out;
  out.reserve(n);
  for (std::uint64_t v = 0; v < n; ++v) out.emplace_back(p, l, v);
  return out;
}

}  // namespace padic
