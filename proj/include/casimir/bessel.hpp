#pragma once

// Modified spherical Bessel functions of integer order l,
//   s_l(x) = sqrt(pi x / 2) I_{l+1/2}(x)     (regular,   s_0 = sinh x)
//   e_l(x) = sqrt(2 x / pi) K_{l+1/2}(x)     (irregular, e_0 = exp(-x))
// both solutions of f'' = (1 + l(l+1)/x^2) f with s_l e_l' - s_l' e_l = -1.

#include <cstddef>
#include <vector>

#include "casimir/series.hpp"

namespace casimir {

template <class S>
struct BesselSeriesPair {
  int l = 0;
  TruncatedSeries<S> s;  // offset l + 1
  TruncatedSeries<S> e;  // offset -l
};

/// Coefficients of e_l's reflection polynomial: e_l(x) = exp(-x) sum_k a_k (2x)^-k.
inline std::vector<BigInt> reflection_coefficients(int l) {
  std::vector<BigInt> a;
  a.reserve(static_cast<std::size_t>(l) + 1);
  for (int k = 0; k <= l; ++k) {
    BigInt num(1);
    for (int i = l - k + 1; i <= l + k; ++i) num *= i;  // (l+k)!/(l-k)!
    BigInt kf(1);
    for (int i = 2; i <= k; ++i) kf *= i;
    a.push_back(num / kf);
  }
  return a;
}

/// s_l(x) = sum_k x^(l+1+2k) / (2^k k! (2l+2k+1)!!), `order` stored terms.
template <class S>
TruncatedSeries<S> sph_bessel_s_series(int l, std::size_t order) {
  if (l < 0) throw DomainError("Bessel order must be non-negative");
  std::vector<S> c(order, S(0));
  S term(1);
  for (int i = 1; i <= 2 * l + 1; i += 2) term /= S(i);
  for (std::size_t k = 0; 2 * k < order; ++k) {
    c[2 * k] = term;
    const int kk = static_cast<int>(k);
    term /= S(2 * (kk + 1)) * S(2 * l + 2 * kk + 3);
  }
  return {l + 1, std::move(c)};
}

/// e_l(x) as exp(-x) times the reflection polynomial, one series with
/// offset -l.
template <class S>
TruncatedSeries<S> sph_bessel_e_series(int l, std::size_t order) {
  if (l < 0) throw DomainError("Bessel order must be non-negative");
  const auto a = reflection_coefficients(l);
  // Polynomial part: x^-l * sum_j p_j x^j, p_j = a_{l-j} / 2^(l-j).
  std::vector<S> poly(order, S(0));
  for (int j = 0; j <= l && j < static_cast<int>(order); ++j) {
    const int k = l - j;
    poly[static_cast<std::size_t>(j)] = S(a[static_cast<std::size_t>(k)]) / S(BigInt(1) << k);
  }
  std::vector<S> ex(order, S(0));
  S t(1);
  for (std::size_t k = 0; k < order; ++k) {
    ex[k] = t;
    t = -t / S(static_cast<int>(k) + 1);
  }
  return series_mul(TruncatedSeries<S>(-l, std::move(poly)), TruncatedSeries<S>(0, std::move(ex)));
}

template <class S>
BesselSeriesPair<S> sph_bessel_series(int l, std::size_t order) {
  return {l, sph_bessel_s_series<S>(l, order), sph_bessel_e_series<S>(l, order)};
}

/// Values and derivatives of s_l and e_l at a point.
struct BesselPointDerivatives {
  std::vector<Real> s;  // s_l(y0), s_l'(y0), ...
  std::vector<Real> e;  // e_l(y0), e_l'(y0), ...
};

/// f(y0), f'(y0), ..., f^(count-1)(y0) for f = s_l and f = e_l.
///
/// s_l is summed from its power series term-wise differentiated; every term
/// is non-negative, so nothing cancels. e_l uses the closed form
/// exp(-y) * sum a_k (2y)^-k, whose derivatives also have one sign per order.
inline BesselPointDerivatives sph_bessel_point_derivatives(int l, const Real& y0, std::size_t count) {
  if (l < 0) throw DomainError("Bessel order must be non-negative");
  if (y0 <= 0) throw DomainError("point derivatives need y0 > 0");
  BesselPointDerivatives out{std::vector<Real>(count, Real(0)), std::vector<Real>(count, Real(0))};
  if (count == 0) return out;

  const Real eps = boost::multiprecision::pow(Real(10), -static_cast<int>(working_digits()) - 5);
  const Real y2 = y0 * y0;
  Real term = boost::multiprecision::pow(y0, l + 1);
  for (int i = 1; i <= 2 * l + 1; i += 2) term /= i;
  std::vector<Real> inv_pow(count, Real(1));
  for (std::size_t k = 1; k < count; ++k) inv_pow[k] = inv_pow[k - 1] / y0;
  for (int j = 0;; ++j) {
    const int p = l + 1 + 2 * j;
    bool negligible = true;
    for (std::size_t k = 0; k < count; ++k) {
      Real falling(1);
      for (std::size_t i = 0; i < k; ++i) falling *= (p - static_cast<int>(i));
      const Real contribution = term * falling * inv_pow[k];
      out.s[k] += contribution;
      if (boost::multiprecision::abs(contribution) > eps * boost::multiprecision::abs(out.s[k]))
        negligible = false;
    }
    const Real ratio = y2 / (Real(2 * (j + 1)) * Real(2 * l + 2 * j + 3));
    if (negligible && ratio < 0.5) break;
    term *= ratio;
  }

  const auto a = reflection_coefficients(l);
  const Real decay = boost::multiprecision::exp(-y0);
  for (std::size_t k = 0; k < count; ++k) {
    Real acc(0);
    for (int i = 0; i <= l; ++i) {
      // d^k/dy^k [exp(-y) y^-i] = (-1)^k exp(-y) sum_r C(k,r) (i)_r y^(-i-r)
      Real inner(0);
      Real binom(1);
      Real rising(1);
      for (std::size_t r = 0; r <= k; ++r) {
        if (r > 0) {
          binom = binom * Real(static_cast<int>(k - r + 1)) / Real(static_cast<int>(r));
          rising *= Real(i + static_cast<int>(r) - 1);
        }
        inner += binom * rising * boost::multiprecision::pow(y0, -i - static_cast<int>(r));
      }
      acc += Real(a[static_cast<std::size_t>(i)]) / boost::multiprecision::pow(Real(2), i) * inner;
    }
    out.e[k] = (k % 2 == 0 ? acc : Real(-acc)) * decay;
  }
  return out;
}

}  // namespace casimir
