#pragma once

// Truncated power series with half-integer leading power.
//
// A TruncatedSeries represents
//     sum_{k < order} c_k x^(offset + k)  +  O(x^(offset + order))
// The offset is kept doubled so the half-integer grid stays exact. The
// series with no stored coefficients is the exact zero; it carries no
// truncation error and is absorbing for products.

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "casimir/errors.hpp"
#include "casimir/precision.hpp"

namespace casimir {

/// A multiple of one half, stored as its double.
struct HalfInteger {
  int twice = 0;

  static constexpr HalfInteger integer(int n) { return {2 * n}; }
  static constexpr HalfInteger halves(int n) { return {n}; }

  constexpr bool is_integer() const { return twice % 2 == 0; }
  constexpr int as_integer() const {
    if (!is_integer()) throw DomainError("half-integer used where an integer power is required");
    return twice / 2;
  }
  double as_double() const { return twice / 2.0; }

  friend constexpr bool operator==(HalfInteger, HalfInteger) = default;
  friend constexpr auto operator<=>(HalfInteger, HalfInteger) = default;
  friend constexpr HalfInteger operator+(HalfInteger a, HalfInteger b) { return {a.twice + b.twice}; }
  friend constexpr HalfInteger operator-(HalfInteger a, HalfInteger b) { return {a.twice - b.twice}; }
  friend constexpr HalfInteger operator-(HalfInteger a) { return {-a.twice}; }
};

template <class S>
class TruncatedSeries {
 public:
  using scalar_type = S;

  TruncatedSeries() = default;
  TruncatedSeries(HalfInteger offset, std::vector<S> coeffs)
      : offset_(offset), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) offset_ = {};
  }
  TruncatedSeries(int offset, std::vector<S> coeffs)
      : TruncatedSeries(HalfInteger::integer(offset), std::move(coeffs)) {}

  static TruncatedSeries zero() { return {}; }
  /// c + O(x^order), i.e. a constant known to the given order.
  static TruncatedSeries constant(const S& c, std::size_t order) {
    std::vector<S> v(order, S(0));
    if (order > 0) v[0] = c;
    return {0, std::move(v)};
  }
  /// x^power exactly, stored with the given number of reliable terms.
  static TruncatedSeries monomial(HalfInteger power, const S& c, std::size_t order) {
    std::vector<S> v(order, S(0));
    if (order > 0) v[0] = c;
    return {power, std::move(v)};
  }

  HalfInteger offset() const { return offset_; }
  std::size_t order() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }
  std::span<const S> coeffs() const { return coeffs_; }
  const S& operator[](std::size_t k) const { return coeffs_[k]; }
  S& operator[](std::size_t k) { return coeffs_[k]; }

  /// Coefficient of x^power; zero below the offset. Powers at or beyond the
  /// reliable limit are rejected.
  S coefficient_of(HalfInteger power) const {
    if (empty()) return S(0);
    const int step2 = power.twice - offset_.twice;
    if (step2 % 2 != 0) throw IncompatibleOffsetGrid("power is off the series grid");
    if (step2 < 0) return S(0);
    const auto k = static_cast<std::size_t>(step2 / 2);
    if (k >= coeffs_.size()) throw DomainError("requested coefficient beyond the reliable order");
    return coeffs_[k];
  }
  S coefficient_of(int power) const { return coefficient_of(HalfInteger::integer(power)); }

  /// Doubled exponent of the first unknown term; meaningless for zero.
  int reliable_limit_twice() const { return offset_.twice + 2 * static_cast<int>(coeffs_.size()); }

  bool all_coefficients_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const S& c) { return c == 0; });
  }

  /// Returns the canonical zero when every stored coefficient vanishes.
  TruncatedSeries canonical() const {
    if (all_coefficients_zero()) return zero();
    return *this;
  }

  /// Keeps at most n leading coefficients.
  TruncatedSeries truncated(std::size_t n) const {
    if (n >= coeffs_.size()) return *this;
    return {offset_, std::vector<S>(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(n))};
  }

  /// Multiplication by x^k.
  TruncatedSeries shifted(HalfInteger k) const {
    if (empty()) return *this;
    return {offset_ + k, coeffs_};
  }
  TruncatedSeries shifted(int k) const { return shifted(HalfInteger::integer(k)); }

  TruncatedSeries operator-() const {
    TruncatedSeries r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }

  friend TruncatedSeries operator*(const S& a, const TruncatedSeries& s) {
    TruncatedSeries r = s;
    for (auto& c : r.coeffs_) c *= a;
    return r;
  }
  friend TruncatedSeries operator*(const TruncatedSeries& s, const S& a) { return a * s; }

 private:
  HalfInteger offset_{};
  std::vector<S> coeffs_;
};

/// Term-wise sum; the result is reliable up to the lower of the two limits.
template <class S>
TruncatedSeries<S> series_add(const TruncatedSeries<S>& a, const TruncatedSeries<S>& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  const int diff = a.offset().twice - b.offset().twice;
  if (diff % 2 != 0)
    throw IncompatibleOffsetGrid("series offsets differ by a non-integer");
  const HalfInteger off = std::min(a.offset(), b.offset());
  const int limit = std::min(a.reliable_limit_twice(), b.reliable_limit_twice());
  const auto n = static_cast<std::size_t>((limit - off.twice) / 2);
  std::vector<S> c(n, S(0));
  const auto accumulate = [&](const TruncatedSeries<S>& s) {
    const auto shift = static_cast<std::size_t>((s.offset().twice - off.twice) / 2);
    for (std::size_t k = 0; k < s.order() && k + shift < n; ++k) c[k + shift] += s[k];
  };
  accumulate(a);
  accumulate(b);
  return {off, std::move(c)};
}

template <class S>
TruncatedSeries<S> series_sub(const TruncatedSeries<S>& a, const TruncatedSeries<S>& b) {
  return series_add(a, -b);
}

/// Cauchy product with order min(a.order, b.order).
template <class S>
TruncatedSeries<S> series_mul(const TruncatedSeries<S>& a, const TruncatedSeries<S>& b) {
  if (a.empty() || b.empty()) return TruncatedSeries<S>::zero();
  const std::size_t n = std::min(a.order(), b.order());
  std::vector<S> c(n, S(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; i + j < n; ++j) c[i + j] += a[i] * b[j];
  }
  return {a.offset() + b.offset(), std::move(c)};
}

/// 1/b by the standard recursion; b's first stored coefficient must be nonzero.
template <class S>
TruncatedSeries<S> series_inverse(const TruncatedSeries<S>& b) {
  if (b.empty() || b[0] == 0)
    throw ZeroLeadingCoefficient("series inverse needs a nonzero leading coefficient");
  const std::size_t n = b.order();
  std::vector<S> r(n, S(0));
  const S inv0 = S(1) / b[0];
  r[0] = inv0;
  for (std::size_t k = 1; k < n; ++k) {
    S acc(0);
    for (std::size_t i = 1; i <= k; ++i) acc += b[i] * r[k - i];
    r[k] = -acc * inv0;
  }
  return {-b.offset(), std::move(r)};
}

template <class S>
TruncatedSeries<S> series_div(const TruncatedSeries<S>& a, const TruncatedSeries<S>& b) {
  auto inv = series_inverse(b);
  return series_mul(a, inv);
}

/// Formal d/dx. Offset drops by one; a result with only zero coefficients
/// is returned as the canonical zero.
template <class S>
TruncatedSeries<S> series_differentiate(const TruncatedSeries<S>& a) {
  if (a.empty()) return a;
  std::vector<S> c(a.order(), S(0));
  for (std::size_t k = 0; k < a.order(); ++k) {
    const int twice_power = a.offset().twice + 2 * static_cast<int>(k);
    if (twice_power % 2 == 0)
      c[k] = a[k] * S(twice_power / 2);
    else
      c[k] = a[k] * S(twice_power) / S(2);
  }
  return TruncatedSeries<S>(a.offset() - HalfInteger::integer(1), std::move(c)).canonical();
}

/// Substitutes x -> scale * x.
template <class S>
TruncatedSeries<S> series_scale_argument(const TruncatedSeries<S>& a, const S& scale) {
  if (a.empty()) return a;
  if (scale == 0) throw DomainError("argument scale must be nonzero");
  const HalfInteger off = a.offset();
  S factor(1);
  const int whole = off.twice >= 0 ? off.twice / 2 : -((-off.twice + 1) / 2);
  const S base = whole >= 0 ? scale : S(1) / scale;
  for (int i = 0; i < (whole >= 0 ? whole : -whole); ++i) factor *= base;
  if (!off.is_integer()) factor *= scalar_traits<S>::sqrt(scale);
  std::vector<S> c(a.order(), S(0));
  for (std::size_t k = 0; k < a.order(); ++k) {
    c[k] = a[k] * factor;
    factor *= scale;
  }
  return {off, std::move(c)};
}

/// Taylor series in x of f(sqrt(y0^2 + scale^2 x^2)) about x = 0, given
/// f(y0), f'(y0), ... in point_derivatives. Only even powers of x appear.
/// With d derivatives the result is reliable through x^(2d-1); pass
/// order to request fewer terms.
template <class S>
TruncatedSeries<S> series_compose_shifted_sqrt(std::span<const S> point_derivatives, const S& y0,
                                               const S& scale, std::size_t order = 0) {
  if (y0 <= 0) throw DomainError("compose_shifted_sqrt needs y0 > 0");
  const std::size_t count = point_derivatives.size();
  const std::size_t n = order == 0 ? 2 * count : std::min(order, 2 * count);
  if (n == 0) return TruncatedSeries<S>::zero();

  // u(x) = sqrt(y0^2 + scale^2 x^2) - y0 = y0 * sum_{j>=1} binom(1/2, j) (scale x / y0)^(2j)
  std::vector<S> u(n, S(0));
  const S ratio2 = (scale / y0) * (scale / y0);
  S binom(1);  // binom(1/2, j)
  S power(1);
  for (std::size_t j = 1; 2 * j < n; ++j) {
    binom = binom * (S(1) - S(2 * static_cast<int>(j) - 2) ) / S(2) / S(static_cast<int>(j));
    power *= ratio2;
    u[2 * j] = y0 * binom * power;
  }
  const TruncatedSeries<S> inner(0, u);

  // sum_k f^(k)(y0)/k! u^k; u^k starts at x^(2k).
  std::vector<S> acc(n, S(0));
  TruncatedSeries<S> u_power = TruncatedSeries<S>::constant(S(1), n);
  S factorial(1);
  for (std::size_t k = 0; k < count && 2 * k < n; ++k) {
    if (k > 0) {
      u_power = series_mul(u_power, inner);
      factorial *= S(static_cast<int>(k));
    }
    const S weight = point_derivatives[k] / factorial;
    if (weight == 0) continue;
    for (std::size_t i = 0; i < n; ++i) acc[i] += weight * u_power[i];
  }
  return TruncatedSeries<S>(0, std::move(acc)).canonical();
}

template <class S>
TruncatedSeries<S> operator+(const TruncatedSeries<S>& a, const TruncatedSeries<S>& b) { return series_add(a, b); }
template <class S>
TruncatedSeries<S> operator-(const TruncatedSeries<S>& a, const TruncatedSeries<S>& b) { return series_sub(a, b); }
template <class S>
TruncatedSeries<S> operator*(const TruncatedSeries<S>& a, const TruncatedSeries<S>& b) { return series_mul(a, b); }
template <class S>
TruncatedSeries<S> operator/(const TruncatedSeries<S>& a, const TruncatedSeries<S>& b) { return series_div(a, b); }

}  // namespace casimir
