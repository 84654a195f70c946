#pragma once

// Small-argument series of the sphere's T-matrix factors d_l(x), x = xi R.
//
// The reduced factor  t_l = (pi/2) d_l  is what the round-trip matrix uses:
// the pi/2 cancels against the pi/4 of the translation prefactor, so every
// hard-boundary coefficient stays rational. d_series_* return d_l itself.

#include <cstddef>
#include <type_traits>
#include <vector>

#include "casimir/bessel.hpp"
#include "casimir/boundary.hpp"

namespace casimir {

namespace detail {

/// Multiplies the coefficient at index 2k by n2^k. Applied to s_l or s_l'
/// this turns s_l(x) into s_l(n x)/n^(l+1) and s_l'(x) into s_l'(n x)/n^l.
template <class S>
TruncatedSeries<S> scale_even_steps(const TruncatedSeries<S>& a, const S& n2) {
  std::vector<S> c(a.coeffs().begin(), a.coeffs().end());
  S factor(1);
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k % 2 == 0) {
      c[k] *= factor;
      factor *= n2;
    } else if (c[k] != 0) {
      throw DomainError("scale_even_steps expects an even-step series");
    }
  }
  return {a.offset(), std::move(c)};
}

}  // namespace detail

/// t_l = s_l / e_l  (Dirichlet; identical to the conductor TE factor).
template <class S>
TruncatedSeries<S> reduced_d_dirichlet(int l, std::size_t order) {
  const auto b = sph_bessel_series<S>(l, order);
  return series_div(b.s, b.e);
}

/// t_l = (s_l/x)' / (e_l/x)'.
template <class S>
TruncatedSeries<S> reduced_d_neumann(int l, std::size_t order) {
  const auto b = sph_bessel_series<S>(l, order);
  return series_div(series_differentiate(b.s.shifted(-1)), series_differentiate(b.e.shifted(-1)));
}

/// t_l = s_l' / e_l'  (conductor TM).
template <class S>
TruncatedSeries<S> reduced_d_tm_conductor(int l, std::size_t order) {
  if (l < 1) throw DomainError("TM factor needs l >= 1");
  const auto b = sph_bessel_series<S>(l, order);
  return series_div(series_differentiate(b.s), series_differentiate(b.e));
}

/// Dielectric ball with constant eps, mu. With n^2 = eps mu the common
/// factor sqrt(eps) n^l cancels between numerator and denominator:
///   t_l^TE = [s S'_n - mu s' S_n] / [e S'_n - mu e' S_n],
/// S_n(x) = s_l(n x)/n^(l+1), S'_n(x) = s_l'(n x)/n^l; TM swaps eps and mu.
template <class S>
TruncatedSeries<S> reduced_d_dielectric(int l, Polarization pol, const S& eps, const S& mu, std::size_t order) {
  if (eps <= 0 || mu <= 0) throw DomainError("dielectric needs eps, mu > 0");
  const S n2 = eps * mu;
  const S weight = pol == Polarization::TE ? mu : eps;
  const auto b = sph_bessel_series<S>(l, order);
  const auto ds = series_differentiate(b.s);
  const auto de = series_differentiate(b.e);
  const auto big_s = detail::scale_even_steps(b.s, n2);
  const auto big_ds = detail::scale_even_steps(ds, n2);
  const auto num = series_sub(series_mul(b.s, big_ds), weight * series_mul(ds, big_s));
  const auto den = series_sub(series_mul(b.e, big_ds), weight * series_mul(de, big_s));
  if (num.all_coefficients_zero()) return TruncatedSeries<S>::zero();
  return series_div(num, den);
}

/// Plasma ball, eps(xi) = 1 + omega_p^2/xi^2, mu = 1, as a series in
/// x = xi R at fixed y0 = omega_p R. The inner argument n x = sqrt(x^2 + y0^2)
/// is not small; s_l there is expanded about y0. sqrt(eps) = W/x with
/// W = sqrt(x^2 + y0^2), and the 1/x is cleared by multiplying through by x:
///   t^TE = [W s S' - x s' S] / [W e S' - x e' S]
///   t^TM = [x s S' - W s' S] / [x e S' - W e' S]
/// where S = s_l(W), S' = s_l'(W).
inline TruncatedSeries<Real> reduced_d_plasma(int l, Polarization pol, const Real& omega_p_r, std::size_t order) {
  if (omega_p_r <= 0) throw DomainError("plasma model needs omega_p > 0");
  const std::size_t count = order / 2 + 2;
  const auto point = sph_bessel_point_derivatives(l, omega_p_r, count + 1);
  const std::vector<Real> s_at(point.s.begin(), point.s.begin() + static_cast<std::ptrdiff_t>(count));
  const std::vector<Real> ds_at(point.s.begin() + 1, point.s.end());
  std::vector<Real> w_at(count, Real(0));
  w_at[0] = omega_p_r;
  if (count > 1) w_at[1] = 1;

  const Real one(1);
  const auto big_s = series_compose_shifted_sqrt<Real>(s_at, omega_p_r, one, order);
  const auto big_ds = series_compose_shifted_sqrt<Real>(ds_at, omega_p_r, one, order);
  const auto w = series_compose_shifted_sqrt<Real>(w_at, omega_p_r, one, order);
  const auto x = TruncatedSeries<Real>::monomial(HalfInteger::integer(1), one, order);

  const auto b = sph_bessel_series<Real>(l, order);
  const auto ds = series_differentiate(b.s);
  const auto de = series_differentiate(b.e);
  const auto& outer_a = pol == Polarization::TE ? w : x;  // multiplies the S' terms
  const auto& outer_b = pol == Polarization::TE ? x : w;  // multiplies the S terms
  const auto num = series_sub(outer_a * b.s * big_ds, outer_b * ds * big_s);
  const auto den = series_sub(outer_a * b.e * big_ds, outer_b * de * big_s);
  return series_div(num, den).truncated(order);
}

/// Reduced factor t_l = (pi/2) d_l for the sphere in `spec`. For scalar
/// conditions the polarization is ignored.
template <class S>
TruncatedSeries<S> reduced_d_series(const BoundarySpec& spec, Polarization pol, int l, std::size_t order) {
  return std::visit(
      [&](const auto& sph) -> TruncatedSeries<S> {
        using T = std::decay_t<decltype(sph)>;
        if constexpr (std::is_same_v<T, sphere::Dirichlet>) {
          return reduced_d_dirichlet<S>(l, order);
        } else if constexpr (std::is_same_v<T, sphere::Neumann>) {
          return reduced_d_neumann<S>(l, order);
        } else if constexpr (std::is_same_v<T, sphere::PerfectConductor>) {
          return pol == Polarization::TE ? reduced_d_dirichlet<S>(l, order) : reduced_d_tm_conductor<S>(l, order);
        } else if constexpr (std::is_same_v<T, sphere::Dielectric>) {
          return reduced_d_dielectric<S>(l, pol, scalar_traits<S>::from_rational(sph.eps),
                                         scalar_traits<S>::from_rational(sph.mu), order);
        } else {
          if constexpr (is_exact_v<S>) {
            throw InexactInExactMode("plasma model requires floating mode");
          } else {
            return reduced_d_plasma(l, pol, scalar_traits<Real>::from_rational(sph.omega_p_r), order);
          }
        }
      },
      spec.sphere);
}

/// d_l = (2/pi) t_l as a series in x = xi R.
inline TruncatedSeries<Real> d_series_dirichlet(int l, std::size_t order) {
  return (Real(2) / scalar_traits<Real>::pi()) * reduced_d_dirichlet<Real>(l, order);
}
inline TruncatedSeries<Real> d_series_neumann(int l, std::size_t order) {
  return (Real(2) / scalar_traits<Real>::pi()) * reduced_d_neumann<Real>(l, order);
}
inline TruncatedSeries<Real> d_series_tm_conductor(int l, std::size_t order) {
  return (Real(2) / scalar_traits<Real>::pi()) * reduced_d_tm_conductor<Real>(l, order);
}
inline TruncatedSeries<Real> d_series_dielectric(int l, Polarization pol, const Real& eps, const Real& mu,
                                                 std::size_t order) {
  return (Real(2) / scalar_traits<Real>::pi()) * reduced_d_dielectric<Real>(l, pol, eps, mu, order);
}
inline TruncatedSeries<Real> d_series_plasma(int l, Polarization pol, const Real& omega_p_r, std::size_t order) {
  return (Real(2) / scalar_traits<Real>::pi()) * reduced_d_plasma(l, pol, omega_p_r, order);
}

}  // namespace casimir
