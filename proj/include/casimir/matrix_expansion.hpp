#pragma once

// Per-m round-trip matrix M(xi) expanded in t = L xi.
//
// Raw elements behave as xi^(l-l') for small xi. Conjugating with
// D = diag(xi^l) (element (l,l') times xi^(l'-l)) makes every element
// analytic at xi = 0; traces, hence N1 and N3, are unchanged. All lengths
// are measured in units of L, so x = xi R = rho t and the translation
// Bessel argument is 2t.
//
// With t_l = (pi/2) d_l and K_{l''+1/2}(2t) = sqrt(pi/(4t)) e_{l''}(2t):
//   scalar:  M_{l l'} = t_l(rho t) * (1/(2t)) * sum_{l''} H e_{l''}(2t)
//   EM:      2x2 blocks combining Lambda, Lambda~ and (t^TE, -t^TM).

#include <array>
#include <cstddef>
#include <vector>

#include "casimir/boundary.hpp"
#include "casimir/linalg.hpp"
#include "casimir/scattering.hpp"
#include "casimir/wigner.hpp"

namespace casimir {

/// Number of balanced series terms carried per element (t^0 .. t^5).
inline constexpr std::size_t kElementOrder = 6;

/// Sphere of radius R whose centre is a distance L from the plane.
template <class S>
struct Geometry {
  S radius;
  S separation_l;

  /// R = rho, L = 1.
  static Geometry from_rho(const S& rho) {
    Geometry g{rho, S(1)};
    g.validate();
    return g;
  }
  static Geometry from_radius_gap(const S& r, const S& a) {
    Geometry g{r, r + a};
    g.validate();
    return g;
  }

  S rho() const { return radius / separation_l; }
  S gap() const { return separation_l - radius; }

  void validate() const {
    if (radius <= 0 || separation_l <= 0) throw DomainError("geometry needs R > 0 and L > 0");
    if (!(radius < separation_l)) throw DomainError("geometry needs 0 < rho < 1 (sphere must not touch the plane)");
  }
};

/// Weights of the diagonal similarity applied on top of the xi^l balancing.
enum class Balancing {
  xi_power,  ///< only diag(xi^l)
  rational,  ///< additionally diag(1/g_l) (scalar: g_l^2 = (2l+1)(l+m)!(l-m)!, EM: times l(l+1))
             ///< which makes every entry rational for rational inputs
};

template <class S>
struct BlockExpansion {
  int m = 0;
  int l_lo = 0;
  int l_hi = 0;
  bool em = false;
  Balancing balancing = Balancing::xi_power;
  std::array<Matrix<S>, 4> M;  // coefficients of t^0 .. t^3

  std::size_t orbital_count() const { return static_cast<std::size_t>(l_hi - l_lo + 1); }
  std::size_t dimension() const { return em ? 2 * orbital_count() : orbital_count(); }
  std::size_t index(int l, Polarization pol = Polarization::TE) const {
    const auto base = static_cast<std::size_t>(l - l_lo);
    return (em && pol == Polarization::TM) ? base + orbital_count() : base;
  }
  Polarization polarization_of(std::size_t i) const {
    return (em && i >= orbital_count()) ? Polarization::TM : Polarization::TE;
  }
};

/// Builds balanced element series for one azimuthal index m.
///
/// Caches the translation series e_{l''}(2t)/(2t) and the sphere factors for
/// every l, so a full block costs one pass over (l, l', l'').
template <class S>
class BlockAssembler {
 public:
  BlockAssembler(const Geometry<S>& geometry, const BoundarySpec& spec, int m, int l_max,
                 Balancing balancing = default_balancing(), std::size_t order = kElementOrder)
      : spec_(spec), m_(m), l_max_(l_max), balancing_(balancing), order_(order) {
    spec.validate();
    geometry.validate();
    if constexpr (is_exact_v<S>) {
      if (!spec.admits_exact()) throw InexactInExactMode(spec.name() + " requires floating mode");
    }
    l_lo_ = std::max(spec.l_min(), m < 0 ? -m : m);
    if (l_max < l_lo_) throw DomainError("l_m must be at least max(l_min, |m|)");
    const S rho = geometry.rho();

    translation_.reserve(static_cast<std::size_t>(2 * l_max + 1));
    for (int lpp = 0; lpp <= 2 * l_max; ++lpp) {
      // e_{l''}(2t) / (2t)
      auto e = sph_bessel_e_series<S>(lpp, order_);
      translation_.push_back(S(1) / S(2) * series_scale_argument(e, S(2)).shifted(-1));
    }
    for (int l = l_lo_; l <= l_max; ++l) {
      te_.push_back(series_scale_argument(reduced_d_series<S>(spec, Polarization::TE, l, order_), rho));
      if (spec.is_em())
        tm_.push_back(series_scale_argument(reduced_d_series<S>(spec, Polarization::TM, l, order_), rho));
    }
  }

  static constexpr Balancing default_balancing() {
    return is_exact_v<S> ? Balancing::rational : Balancing::xi_power;
  }

  int l_lo() const { return l_lo_; }

  /// Balanced scalar element t^(l'-l) M_{l l'}(t).
  TruncatedSeries<S> scalar_element(int l, int lp) const {
    check_indices(l, lp);
    const auto c = translation_sum(l, lp, false);
    auto el = series_mul(sphere_factor(Polarization::TE, l), c).shifted(lp - l);
    return spec_.plane_sign > 0 ? el : -el;
  }

  /// Balanced EM 2x2 block, indexed [row polarization][column polarization].
  std::array<std::array<TruncatedSeries<S>, 2>, 2> em_element(int l, int lp) const {
    check_indices(l, lp);
    const auto c_lambda = translation_sum(l, lp, true);
    const auto& te = sphere_factor(Polarization::TE, l);
    const auto& tm = sphere_factor(Polarization::TM, l);
    std::array<std::array<TruncatedSeries<S>, 2>, 2> out;
    out[0][0] = series_mul(te, c_lambda).shifted(lp - l);
    out[1][1] = -series_mul(tm, c_lambda).shifted(lp - l);
    if (m_ != 0) {
      const S tilde = weighted(lambda_factors(l, lp, 0, m_).lambda_tilde_per_xi_l, l, lp, true, false);
      const auto c = translation_sum(l, lp, false);
      out[0][1] = -tilde * series_mul(tm, c).shifted(lp - l + 1);
      out[1][0] = tilde * series_mul(te, c).shifted(lp - l + 1);
    } else {
      out[0][1] = TruncatedSeries<S>::zero();
      out[1][0] = TruncatedSeries<S>::zero();
    }
    if (spec_.plane_sign < 0)
      for (auto& row : out)
        for (auto& e : row) e = -e;
    return out;
  }

  BlockExpansion<S> assemble() const {
    BlockExpansion<S> block;
    block.m = m_;
    block.l_lo = l_lo_;
    block.l_hi = l_max_;
    block.em = spec_.is_em();
    block.balancing = balancing_;
    const std::size_t n = block.dimension();
    for (auto& mat : block.M) mat = Matrix<S>(n, n);
    const auto store = [&](std::size_t i, std::size_t j, const TruncatedSeries<S>& s) {
      if (s.empty()) return;
      if (s.offset().twice < 0 && !leading_terms_vanish(s))
        throw DomainError("balanced element has a negative power of xi");
      for (int k = 0; k < 4; ++k) block.M[static_cast<std::size_t>(k)](i, j) = s.coefficient_of(k);
    };
    for (int l = l_lo_; l <= l_max_; ++l)
      for (int lp = l_lo_; lp <= l_max_; ++lp) {
        if (!block.em) {
          store(block.index(l), block.index(lp), scalar_element(l, lp));
        } else {
          const auto e = em_element(l, lp);
          const std::array<Polarization, 2> pols{Polarization::TE, Polarization::TM};
          for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) store(block.index(l, pols[p]), block.index(lp, pols[q]), e[p][q]);
        }
      }
    return block;
  }

 private:
  void check_indices(int l, int lp) const {
    if (l < l_lo_ || lp < l_lo_ || l > l_max_ || lp > l_max_)
      throw DomainError("orbital index outside [max(l_min,|m|), l_m]");
  }

  static bool leading_terms_vanish(const TruncatedSeries<S>& s) {
    for (std::size_t k = 0; k < s.order(); ++k) {
      if (s.offset().twice + 2 * static_cast<int>(k) >= 0) return true;
      if (s[k] != 0) return false;
    }
    return true;
  }

  const TruncatedSeries<S>& sphere_factor(Polarization pol, int l) const {
    const auto i = static_cast<std::size_t>(l - l_lo_);
    return pol == Polarization::TE ? te_[i] : tm_[i];
  }

  /// Renders a radical times the balancing ratio w_l / w_{l'}.
  S weighted(SignedRadical r, int l, int lp, bool em_norm, bool translation) const {
    if (r.is_zero()) return S(0);
    if (balancing_ == Balancing::rational) {
      if (translation) r.radicand *= g_squared(lp) / g_squared(l);
      if (em_norm) r.radicand *= Rational(l * (l + 1), lp * (lp + 1));
    }
    return r.template value<S>();
  }

  Rational g_squared(int l) const {
    const int am = m_ < 0 ? -m_ : m_;
    return Rational(BigInt(2 * l + 1) * detail::factorial(l + am) * detail::factorial(l - am));
  }

  /// (1/(2t)) sum_{l''} H [Lambda] e_{l''}(2t), windowed at offset -1-(l+l').
  TruncatedSeries<S> translation_sum(int l, int lp, bool with_lambda) const {
    std::vector<S> acc(order_, S(0));
    const int window = -1 - (l + lp);
    for (int lpp = std::abs(l - lp); lpp <= l + lp; lpp += 2) {
      SignedRadical w = h_factor(l, lp, lpp, m_);
      if (w.is_zero()) continue;
      if (with_lambda) {
        w = w * lambda_factors(l, lp, lpp, m_).lambda;
        if (w.is_zero()) continue;
      }
      const S weight = weighted(w, l, lp, with_lambda, true);
      const auto& e = translation_[static_cast<std::size_t>(lpp)];
      const int shift = e.offset().as_integer() - window;
      for (std::size_t k = 0; k < e.order() && k + static_cast<std::size_t>(shift) < order_; ++k)
        acc[k + static_cast<std::size_t>(shift)] += weight * e[k];
    }
    return {window, std::move(acc)};
  }

  BoundarySpec spec_;
  int m_;
  int l_max_;
  int l_lo_ = 0;
  Balancing balancing_;
  std::size_t order_;
  std::vector<TruncatedSeries<S>> translation_;
  std::vector<TruncatedSeries<S>> te_, tm_;
};

/// Balanced scalar element t^(l'-l) M_{l l'} as a series in t = L xi.
template <class S>
TruncatedSeries<S> element_series_scalar(int l, int lp, int m, const Geometry<S>& geometry, const BoundarySpec& spec,
                                         std::size_t order = kElementOrder) {
  if (spec.is_em()) throw DomainError("element_series_scalar needs a scalar boundary condition");
  if (l < std::abs(m) || lp < std::abs(m)) throw DomainError("element needs l, l' >= |m|");
  BlockAssembler<S> a(geometry, spec, m, std::max(l, lp), Balancing::xi_power, order);
  return a.scalar_element(l, lp);
}

/// Balanced EM 2x2 element block.
template <class S>
std::array<std::array<TruncatedSeries<S>, 2>, 2> element_series_em(int l, int lp, int m, const Geometry<S>& geometry,
                                                                   const BoundarySpec& spec,
                                                                   std::size_t order = kElementOrder) {
  if (!spec.is_em()) throw DomainError("element_series_em needs an electromagnetic boundary condition");
  if (l < std::max(1, std::abs(m)) || lp < std::max(1, std::abs(m)))
    throw DomainError("EM element needs l, l' >= max(1, |m|)");
  BlockAssembler<S> a(geometry, spec, m, std::max(l, lp), Balancing::xi_power, order);
  return a.em_element(l, lp);
}

/// M0..M3 for azimuthal index m with orbital truncation l_m.
template <class S>
BlockExpansion<S> assemble_block(int m, int l_m, const Geometry<S>& geometry, const BoundarySpec& spec,
                                 Balancing balancing = BlockAssembler<S>::default_balancing()) {
  return BlockAssembler<S>(geometry, spec, m, l_m, balancing).assemble();
}

}  // namespace casimir
