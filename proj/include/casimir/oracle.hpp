#pragma once

// Finite-frequency cross-check of the series pipeline.
//
// M(xi) is built directly from the closed exponential forms of s_l and e_l
// at real arguments, with the sphere factors in their unfactored
// sqrt(eps), sqrt(mu) form, and Tr ln(1 - M) is taken as a log-determinant.
// Nothing here goes through TruncatedSeries. A polynomial fit of Tr ln(1 - M) in t = L xi then has to
// reproduce N1 and N3 as its t and t^3 coefficients.

#include <algorithm>
#include <cmath>
#include <future>
#include <vector>

#include "casimir/lowtemp.hpp"

namespace casimir {

/// Balanced M(xi) of one m-block at a real frequency. Entry (l, l') carries
/// the factor (L xi)^(l'-l), as in matrix_expansion.
struct NumericBlock {
  int m = 0;
  int l_m = 0;
  Real xi{0};
  int l_lo = 0;
  bool em = false;
  Matrix<Real> M;
};

namespace oracle_detail {

/// s_l, e_l and their first derivatives at a point.
struct Riccati {
  Real s, ds, e, de;
};

/// e_l(x) = exp(-x) P(x) with P(y) = sum_k a_k (2y)^-k, and
/// s_l(x) = [exp(x) P(-x) - (-1)^l exp(-x) P(x)] / 2. Below x = l + 1 the
/// two halves of s_l cancel, so there s_l comes from its ascending sum,
/// whose terms are all positive.
inline Riccati riccati(int l, const Real& x) {
  const auto a = reflection_coefficients(l);
  const auto poly = [&](const Real& y, Real& value, Real& slope) {
    value = 0;
    slope = 0;
    Real inv(1);  // (2y)^-k
    for (int k = 0; k <= l; ++k) {
      const Real ak(a[static_cast<std::size_t>(k)]);
      value += ak * inv;
      slope -= k * ak * inv / y;
      inv /= 2 * y;
    }
  };
  Riccati r;
  Real p, dp;
  poly(x, p, dp);
  const Real down = exp(-x);
  r.e = down * p;
  r.de = down * (dp - p);
  if (x >= l + 1) {
    Real q, dq;
    poly(-x, q, dq);
    const Real up = exp(x);
    const Real parity = l % 2 == 0 ? 1 : -1;
    r.s = (up * q - parity * r.e) / 2;
    r.ds = (up * (q - dq) - parity * r.de) / 2;
    return r;
  }
  const Real eps = pow(Real(10), -static_cast<int>(working_digits()) - 5);
  Real term = pow(x, l + 1);
  for (int i = 1; i <= 2 * l + 1; i += 2) term /= i;
  r.s = 0;
  r.ds = 0;
  for (int j = 0;; ++j) {
    r.s += term;
    r.ds += (l + 1 + 2 * j) * term / x;
    if (term < eps * r.s) break;
    term *= x * x / ((2 * j + 2) * (2 * l + 2 * j + 3));
  }
  return r;
}

/// d = (2/pi) [sqrt(eps) s(x) s'(nx) - sqrt(mu) s'(x) s(nx)]
///          / [sqrt(eps) e(x) s'(nx) - sqrt(mu) e'(x) s(nx)]
inline Real d_material(int l, const Real& x, const Real& eps, const Real& mu) {
  const Real n = sqrt(eps * mu);
  const auto out = riccati(l, x);
  const auto in = riccati(l, n * x);
  const Real se = sqrt(eps), sm = sqrt(mu);
  const Real num = se * out.s * in.ds - sm * out.ds * in.s;
  const Real den = se * out.e * in.ds - sm * out.de * in.s;
  return 2 / scalar_traits<Real>::pi() * num / den;
}

}  // namespace oracle_detail

/// d_l(x) for the sphere in `spec`, evaluated directly:
///   Dirichlet, TE   I_nu / K_nu               = (2/pi) s/e
///   Neumann         (I_nu/sqrt x)'/(K_nu/sqrt x)' = (2/pi) (s/x)'/(e/x)'
///   TM conductor    (I_nu sqrt x)'/(K_nu sqrt x)' = (2/pi) s'/e'
inline Real d_direct(const BoundarySpec& spec, Polarization pol, int l, const Real& x) {
  if (!(x > 0)) throw DomainError("d_direct needs x > 0");
  const Real two_over_pi = 2 / scalar_traits<Real>::pi();
  return std::visit(
      [&](const auto& sph) -> Real {
        using T = std::decay_t<decltype(sph)>;
        if constexpr (std::is_same_v<T, sphere::Dielectric>) {
          const Real eps = scalar_traits<Real>::from_rational(sph.eps);
          const Real mu = scalar_traits<Real>::from_rational(sph.mu);
          return pol == Polarization::TE ? oracle_detail::d_material(l, x, eps, mu)
                                         : oracle_detail::d_material(l, x, mu, eps);
        } else if constexpr (std::is_same_v<T, sphere::Plasma>) {
          const Real y0 = scalar_traits<Real>::from_rational(sph.omega_p_r);
          const Real eps = 1 + y0 * y0 / (x * x);
          return pol == Polarization::TE ? oracle_detail::d_material(l, x, eps, Real(1))
                                         : oracle_detail::d_material(l, x, Real(1), eps);
        } else {
          const auto r = oracle_detail::riccati(l, x);
          if constexpr (std::is_same_v<T, sphere::Neumann>) {
            return two_over_pi * (r.ds - r.s / x) / (r.de - r.e / x);
          } else if constexpr (std::is_same_v<T, sphere::PerfectConductor>) {
            if (pol == Polarization::TM) return two_over_pi * r.ds / r.de;
          }
          return two_over_pi * r.s / r.e;
        }
      },
      spec.sphere);
}

namespace oracle_detail {

/// Everything at one frequency that does not depend on m.
struct FrequencyTables {
  Real t;                    // L xi
  std::vector<Real> d_te;    // d_l(xi R), index l
  std::vector<Real> d_tm;
  std::vector<Real> k_half;  // sqrt(pi/(4t)) K_{l''+1/2}(2t), index l''
};

inline FrequencyTables frequency_tables(const Geometry<Real>& g, const BoundarySpec& spec, int l_m, const Real& xi) {
  FrequencyTables f;
  f.t = g.separation_l * xi;
  const Real x = g.radius * xi;
  const Real pi = scalar_traits<Real>::pi();
  for (int l = 0; l <= l_m; ++l) {
    const bool used = l >= spec.l_min();
    f.d_te.push_back(used ? d_direct(spec, Polarization::TE, l, x) : Real(0));
    f.d_tm.push_back(used && spec.is_em() ? d_direct(spec, Polarization::TM, l, x) : Real(0));
  }
  // K_nu(z) = sqrt(pi/(2z)) e_l(z), so sqrt(pi/(4t)) K_nu(2t) = pi/(4t) e_l(2t).
  const Real pre = pi / (4 * f.t);
  for (int lpp = 0; lpp <= 2 * l_m; ++lpp) f.k_half.push_back(pre * riccati(lpp, 2 * f.t).e);
  return f;
}

inline NumericBlock block_from_tables(const FrequencyTables& f, const BoundarySpec& spec, int m, int l_m,
                                      const Real& xi) {
  NumericBlock b;
  b.m = m;
  b.l_m = l_m;
  b.xi = xi;
  b.em = spec.is_em();
  b.l_lo = std::max(spec.l_min(), std::abs(m));
  if (l_m < b.l_lo) throw DomainError("l_m must be at least max(l_min, |m|)");
  const int count = l_m - b.l_lo + 1;
  const std::size_t n = static_cast<std::size_t>(b.em ? 2 * count : count);
  b.M = Matrix<Real>(n, n);
  const Real sign(spec.plane_sign);
  for (int l = b.l_lo; l <= l_m; ++l)
    for (int lp = b.l_lo; lp <= l_m; ++lp) {
      Real c(0), c_lambda(0);
      for (int lpp = std::abs(l - lp); lpp <= l + lp; ++lpp) {
        const SignedRadical h = h_factor(l, lp, lpp, m);
        if (h.is_zero()) continue;
        const Real hk = h.value<Real>() * f.k_half[static_cast<std::size_t>(lpp)];
        c += hk;
        if (b.em) c_lambda += lambda_factors(l, lp, lpp, m).lambda.value<Real>() * hk;
      }
      const Real balance = pow(f.t, lp - l);
      const auto i = static_cast<std::size_t>(l - b.l_lo), j = static_cast<std::size_t>(lp - b.l_lo);
      const Real& dte = f.d_te[static_cast<std::size_t>(l)];
      if (!b.em) {
        b.M(i, j) = sign * balance * dte * c;
        continue;
      }
      const Real& dtm = f.d_tm[static_cast<std::size_t>(l)];
      const Real tilde = lambda_factors(l, lp, 0, m).lambda_tilde_per_xi_l.value<Real>() * f.t;
      const auto nn = static_cast<std::size_t>(count);
      b.M(i, j) = sign * balance * dte * c_lambda;
      b.M(i + nn, j + nn) = -sign * balance * dtm * c_lambda;
      b.M(i, j + nn) = -sign * balance * dtm * tilde * c;
      b.M(i + nn, j) = sign * balance * dte * tilde * c;
    }
  return b;
}

}  // namespace oracle_detail

/// Balanced M(xi) for one m-block by direct evaluation.
inline NumericBlock m_matrix_numeric(int m, int l_m, const Geometry<Real>& geometry, const BoundarySpec& spec,
                                     const Real& xi) {
  spec.validate();
  geometry.validate();
  if (!(xi > 0)) throw DomainError("m_matrix_numeric needs xi > 0");
  const auto f = oracle_detail::frequency_tables(geometry, spec, l_m, xi);
  return oracle_detail::block_from_tables(f, spec, m, l_m, xi);
}

/// ln det(1 - M) of one block. Throws SpectralRadiusError when M is not a
/// contraction in spectral radius (sphere too close to the plane).
inline Real trace_log_numeric(const NumericBlock& block) {
  const std::size_t n = block.M.rows();
  if (n == 0) return Real(0);
  const Real radius = spectral_radius_estimate(block.M);
  if (!(radius < 1))
    throw SpectralRadiusError("spectral radius of M(xi) is not below 1", scalar_traits<Real>::to_double(radius));
  return log_determinant(Matrix<Real>::identity(n) - block.M);
}

/// Tr ln(1 - M(xi)) summed over m = -l_m..l_m.
inline Real trace_log_numeric(const Geometry<Real>& geometry, const BoundarySpec& spec, int l_m, const Real& xi) {
  spec.validate();
  geometry.validate();
  if (!(xi > 0)) throw DomainError("trace_log_numeric needs xi > 0");
  if (l_m < spec.l_min()) throw DomainError("l_m must be at least " + std::to_string(spec.l_min()));
  const auto f = oracle_detail::frequency_tables(geometry, spec, l_m, xi);
  Real total(0);
  for (int m = 0; m <= l_m; ++m)
    total += (m == 0 ? 1 : 2) * trace_log_numeric(oracle_detail::block_from_tables(f, spec, m, l_m, xi));
  return total;
}

/// Chebyshev points of (0, t_max], largest first.
inline std::vector<Real> chebyshev_grid(const Real& t_max, int count) {
  if (count < 1 || !(t_max > 0)) throw DomainError("chebyshev_grid needs count >= 1 and t_max > 0");
  const Real pi = scalar_traits<Real>::pi();
  std::vector<Real> g;
  for (int k = 0; k < count; ++k) g.push_back(t_max / 2 * (1 + cos((2 * k + 1) * pi / (2 * count))));
  return g;
}

struct ConsistencyReport {
  Real n1, n3;          // from the series pipeline
  Real a1, a3;          // t and t^3 coefficients of the fit
  Real err_n1, err_n3;  // |a - N|, relative where |N| is not tiny
  bool n1_relative = true, n3_relative = true;
  Real drift;           // max relative change of a1, a3 when the grid is halved
  std::vector<Real> residual_t;
  std::vector<Real> residual;  // F - (c0 + N1 t + c2 t^2 + N3 t^3 + c4 t^4)
  std::vector<Real> slopes;    // log-log slopes between consecutive residual points
};

struct ConsistencyOptions {
  int degree = -1;  // polynomial degree; -1 means size(grid) - 1
  std::vector<Real> residual_t{Real("1e-2"), Real("1e-3"), Real("1e-4")};
  Real zero_threshold{"1e-20"};  // |N| below this is compared absolutely
  unsigned threads = 1;
};

namespace oracle_detail {

inline std::vector<Real> sample(const Geometry<Real>& g, const BoundarySpec& spec, int l_m,
                                const std::vector<Real>& t_grid, unsigned threads) {
  std::vector<Real> out(t_grid.size());
  const auto eval = [&](std::size_t i) {
    apply_working_digits();
    return trace_log_numeric(g, spec, l_m, t_grid[i] / g.separation_l);
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < t_grid.size(); ++i) out[i] = eval(i);
    return out;
  }
  std::vector<std::future<Real>> jobs;
  for (std::size_t i = 0; i < t_grid.size(); ++i) jobs.push_back(std::async(std::launch::async, eval, i));
  for (std::size_t i = 0; i < t_grid.size(); ++i) out[i] = jobs[i].get();
  return out;
}

/// Coefficients c_0..c_degree of a least-squares polynomial in t, fitted
/// in the scaled variable t / t_max to keep the design matrix tame.
inline std::vector<Real> polynomial_fit(const std::vector<Real>& t, const std::vector<Real>& f, int degree) {
  const Real scale = *std::max_element(t.begin(), t.end());
  Matrix<Real> design(t.size(), static_cast<std::size_t>(degree + 1));
  for (std::size_t i = 0; i < t.size(); ++i) {
    Real p(1);
    const Real u = t[i] / scale;
    for (int k = 0; k <= degree; ++k) {
      design(i, static_cast<std::size_t>(k)) = p;
      p *= u;
    }
  }
  auto c = least_squares(design, f);
  Real s(1);
  for (auto& ck : c) {
    ck /= s;
    s *= scale;
  }
  return c;
}

}  // namespace oracle_detail

/// Fits Tr ln(1 - M) on `t_grid` (values of L xi, descending) and compares
/// the odd low coefficients with the series N1, N3.
inline ConsistencyReport low_t_consistency_check(const Geometry<Real>& geometry, const BoundarySpec& spec, int l_m,
                                                 const std::vector<Real>& t_grid, const ConsistencyOptions& options = {}) {
  if (t_grid.size() < 5) throw DomainError("consistency check needs at least 5 grid points");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] < t_grid[i - 1])) throw DomainError("t grid must be strictly descending");
  if (!(t_grid.back() > 0)) throw DomainError("t grid must be positive");
  const int degree = options.degree < 0 ? static_cast<int>(t_grid.size()) - 1 : options.degree;
  if (degree < 4) throw DomainError("fit degree must be at least 4");

  ConsistencyReport r;
  const auto series = n_coefficients(geometry, spec, l_m);
  r.n1 = series.n1();
  r.n3 = series.n3();

  const auto fit = [&](const std::vector<Real>& grid) {
    return oracle_detail::polynomial_fit(grid, oracle_detail::sample(geometry, spec, l_m, grid, options.threads),
                                         degree);
  };
  const auto c = fit(t_grid);
  r.a1 = c[1];
  r.a3 = c[3];

  const auto compare = [&](const Real& a, const Real& n, bool& relative) {
    relative = abs(n) > options.zero_threshold;
    return relative ? Real(abs(a - n) / abs(n)) : Real(abs(a - n));
  };
  r.err_n1 = compare(r.a1, r.n1, r.n1_relative);
  r.err_n3 = compare(r.a3, r.n3, r.n3_relative);

  std::vector<Real> halved;
  for (const auto& t : t_grid) halved.push_back(t / 2);
  const auto h = fit(halved);
  const auto rel = [&](const Real& a, const Real& b) {
    const Real d = abs(a - b);
    return abs(a) > options.zero_threshold ? Real(d / abs(a)) : d;
  };
  r.drift = std::max(rel(c[1], h[1]), rel(c[3], h[3]));

  for (const auto& t : options.residual_t) {
    const Real f = trace_log_numeric(geometry, spec, l_m, t / geometry.separation_l);
    const Real model = c[0] + r.n1 * t + c[2] * t * t + r.n3 * t * t * t + c[4] * t * t * t * t;
    r.residual_t.push_back(t);
    r.residual.push_back(f - model);
  }
  for (std::size_t i = 1; i < r.residual.size(); ++i) {
    if (r.residual[i] == 0 || r.residual[i - 1] == 0) {
      r.slopes.push_back(Real(0));
      continue;
    }
    r.slopes.push_back(log(abs(r.residual[i - 1] / r.residual[i])) / log(r.residual_t[i - 1] / r.residual_t[i]));
  }
  return r;
}

}  // namespace casimir
