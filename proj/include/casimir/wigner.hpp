#pragma once

// Exact Wigner 3j symbols and the sphere-plane translation factors.
//
// Every value here is of the form sign * sqrt(q) with q an exact rational,
// which keeps the Racah alternating sum free of rounding. Rendering to a
// working scalar happens only at matrix assembly time.

#include <array>
#include <cstdlib>
#include <map>
#include <tuple>
#include <vector>

#include "casimir/precision.hpp"

namespace casimir {

/// sign * sqrt(radicand) with an exact non-negative rational radicand.
struct SignedRadical {
  int sign = 0;  // -1, 0, +1
  Rational radicand{0};

  bool is_zero() const { return sign == 0; }

  template <class S>
  S value() const {
    if (sign == 0) return S(0);
    const S r = scalar_traits<S>::sqrt_of(radicand);
    return sign > 0 ? r : S(-r);
  }

  /// The exact square of the value, with its sign attached.
  Rational signed_square() const { return sign >= 0 ? radicand : Rational(-radicand); }

  friend SignedRadical operator*(const SignedRadical& a, const SignedRadical& b) {
    if (a.sign == 0 || b.sign == 0) return {};
    return {a.sign * b.sign, a.radicand * b.radicand};
  }
  /// Multiplication by an exact rational factor.
  friend SignedRadical operator*(const SignedRadical& a, const Rational& q) {
    if (a.sign == 0 || q == 0) return {};
    return {q > 0 ? a.sign : -a.sign, a.radicand * q * q};
  }
};

using ThreeJ = SignedRadical;

namespace detail {

inline const BigInt& factorial(int n) {
  thread_local std::vector<BigInt> table{BigInt(1)};
  if (n < 0) throw DomainError("negative factorial argument");
  while (static_cast<int>(table.size()) <= n)
    table.push_back(table.back() * static_cast<unsigned>(table.size()));
  return table[static_cast<std::size_t>(n)];
}

inline ThreeJ wigner3j_uncached(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (m1 + m2 + m3 != 0) return {};
  if (j1 < 0 || j2 < 0 || j3 < 0) return {};
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return {};
  if (j3 < std::abs(j1 - j2) || j3 > j1 + j2) return {};
  if (m1 == 0 && m2 == 0 && m3 == 0 && (j1 + j2 + j3) % 2 != 0) return {};

  const Rational triangle(factorial(j1 + j2 - j3) * factorial(j1 - j2 + j3) * factorial(-j1 + j2 + j3),
                          factorial(j1 + j2 + j3 + 1));
  const BigInt projections = factorial(j1 + m1) * factorial(j1 - m1) * factorial(j2 + m2) *
                             factorial(j2 - m2) * factorial(j3 + m3) * factorial(j3 - m3);

  const int kmin = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
  const int kmax = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
  Rational sum(0);
  for (int k = kmin; k <= kmax; ++k) {
    const BigInt den = factorial(k) * factorial(j3 - j2 + k + m1) * factorial(j3 - j1 + k - m2) *
                       factorial(j1 + j2 - j3 - k) * factorial(j1 - k - m1) * factorial(j2 - k + m2);
    const Rational term(BigInt(1), den);
    if (k % 2 == 0)
      sum += term;
    else
      sum -= term;
  }
  if (sum == 0) return {};
  const int phase = ((j1 - j2 - m3) % 2 == 0) ? 1 : -1;
  return {phase * (sum > 0 ? 1 : -1), triangle * Rational(projections) * sum * sum};
}

}  // namespace detail

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3) by the Racah single sum with
/// exact big-integer factorials. Selection-rule violations give exact zero.
/// Results are memoised per thread.
inline ThreeJ wigner3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  using Key = std::array<int, 6>;
  thread_local std::map<Key, ThreeJ> cache;
  const Key key{j1, j2, j3, m1, m2, m3};
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  ThreeJ value = detail::wigner3j_uncached(j1, j2, j3, m1, m2, m3);
  cache.emplace(key, value);
  return value;
}

/// Translation factor
///   H = sqrt((2l+1)(2l'+1)) (2l''+1) (l l' l''; 0 0 0) (l l' l''; m -m 0).
inline SignedRadical h_factor(int l, int lp, int lpp, int m) {
  if (l < std::abs(m) || lp < std::abs(m)) throw DomainError("h_factor needs l, l' >= |m|");
  const ThreeJ a = wigner3j(l, lp, lpp, 0, 0, 0);
  if (a.is_zero()) return {};
  const ThreeJ b = wigner3j(l, lp, lpp, m, -m, 0);
  if (b.is_zero()) return {};
  SignedRadical h = a * b;
  h.radicand *= Rational((2 * l + 1) * (2 * lp + 1));
  return h * Rational(2 * lpp + 1);
}

/// Vector translation factors. lambda = Lambda_{l l'}^{l''};
/// lambda_tilde_per_xi_l = 2m / sqrt(l(l+1) l'(l'+1)), which the caller
/// multiplies by xi L.
struct LambdaFactors {
  SignedRadical lambda;
  SignedRadical lambda_tilde_per_xi_l;
};

inline LambdaFactors lambda_factors(int l, int lp, int lpp, int m) {
  if (l < 1 || lp < 1) throw DomainError("lambda factors need l, l' >= 1");
  const Rational norm(BigInt(1), BigInt(l * (l + 1)) * BigInt(lp * (lp + 1)));
  const int numerator = lpp * (lpp + 1) - l * (l + 1) - lp * (lp + 1);
  const SignedRadical unit{1, norm};
  return {unit * Rational(numerator, 2), unit * Rational(2 * m)};
}

}  // namespace casimir
