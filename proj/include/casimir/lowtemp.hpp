#pragma once

// Low-temperature coefficients of the sphere-plane free energy.
//
// With A_i = (1 - M0)^-1 M_i the odd part of Tr ln(1 - M(xi)) is
//   N1 (L xi) + N3 (L xi)^3,
//   N1 = -Tr A1,
//   N3 = -Tr A3 - Tr A1 A2 - Tr A1^3 / 3,
// and the temperature-dependent free energy and force follow as
//   dF = -(pi/6) N1 L T^2 + (pi^3/15) N3 L^3 T^4,
//   df = (pi/6) d(L N1)/dL T^2 - (pi^3/15) d(L^3 N3)/dL T^4.

#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <vector>

#include "casimir/matrix_expansion.hpp"

namespace casimir {

/// N1 and N3 of one m-block, with the partial traces over TE and TM
/// indices (for scalar fields everything is reported as TE).
template <class S>
struct ChannelN {
  S n1{0}, n3{0};
  S n1_te{0}, n1_tm{0};
  S n3_te{0}, n3_tm{0};

  ChannelN& operator+=(const ChannelN& o) {
    n1 += o.n1;
    n3 += o.n3;
    n1_te += o.n1_te;
    n1_tm += o.n1_tm;
    n3_te += o.n3_te;
    n3_tm += o.n3_tm;
    return *this;
  }
  friend ChannelN operator*(const S& w, ChannelN c) {
    c.n1 *= w;
    c.n3 *= w;
    c.n1_te *= w;
    c.n1_tm *= w;
    c.n3_te *= w;
    c.n3_tm *= w;
    return c;
  }
};

template <class S>
struct LowTResult {
  ChannelN<S> total;
  std::map<int, ChannelN<S>> per_m;  // m >= 0; the -m block equals the +m block
  int l_m = 0;
  S rho{0};
  BoundarySpec spec;

  const S& n1() const { return total.n1; }
  const S& n3() const { return total.n3; }
};

enum class Channel { total, te, tm };

template <class S>
S channel_n1(const ChannelN<S>& c, Channel ch) {
  return ch == Channel::total ? c.n1 : ch == Channel::te ? c.n1_te : c.n1_tm;
}
template <class S>
S channel_n3(const ChannelN<S>& c, Channel ch) {
  return ch == Channel::total ? c.n3 : ch == Channel::te ? c.n3_te : c.n3_tm;
}

/// N1, N3 of a single block via one LU factorisation of (1 - M0).
template <class S>
ChannelN<S> block_n_coefficients(const BlockExpansion<S>& block) {
  const std::size_t n = block.dimension();
  Matrix<S> a = Matrix<S>::identity(n) - block.M[0];
  const LuDecomposition<S> lu(a);
  if (lu.exactly_singular())
    throw SingularMatrix("1 - M0 is singular for m = " + std::to_string(block.m), block.m, INFINITY);
  if constexpr (!is_exact_v<S>) {
    const double ratio = lu.pivot_ratio();
    if (!(ratio < std::pow(10.0, static_cast<double>(working_digits()) / 2)))
      throw SingularMatrix("1 - M0 is ill-conditioned for m = " + std::to_string(block.m) +
                               " (pivot ratio " + std::to_string(ratio) + ")",
                           block.m, ratio);
  }
  const Matrix<S> a1 = lu.solve(block.M[1]);
  const Matrix<S> a2 = lu.solve(block.M[2]);
  const Matrix<S> a3 = lu.solve(block.M[3]);
  const Matrix<S> a1a2 = a1 * a2;
  const Matrix<S> a1sq = a1 * a1;

  ChannelN<S> out;
  const S third = S(1) / S(3);
  for (std::size_t i = 0; i < n; ++i) {
    S cube(0);
    for (std::size_t k = 0; k < n; ++k) cube += a1sq(i, k) * a1(k, i);
    const S n1 = -a1(i, i);
    const S n3 = -a3(i, i) - a1a2(i, i) - third * cube;
    if (block.polarization_of(i) == Polarization::TE) {
      out.n1_te += n1;
      out.n3_te += n3;
    } else {
      out.n1_tm += n1;
      out.n3_tm += n3;
    }
  }
  out.n1 = out.n1_te + out.n1_tm;
  out.n3 = out.n3_te + out.n3_tm;
  return out;
}

struct NOptions {
  Balancing balancing = Balancing::xi_power;
  bool default_balancing = true;  // use BlockAssembler's default for the scalar type
  unsigned threads = 1;
};

/// Sums the block contributions over m = -l_m..l_m. Blocks with m != 0 are
/// computed once and counted twice; the reduction runs in ascending m so the
/// result is bit-stable for any thread count.
template <class S>
LowTResult<S> n_coefficients(const Geometry<S>& geometry, const BoundarySpec& spec, int l_m,
                             const NOptions& options = {}) {
  spec.validate();
  geometry.validate();
  if (l_m < spec.l_min()) throw DomainError("l_m must be at least " + std::to_string(spec.l_min()));
  const Balancing bal = options.default_balancing ? BlockAssembler<S>::default_balancing() : options.balancing;

  const auto compute = [&](int m) {
    if constexpr (!is_exact_v<S>) apply_working_digits();
    return block_n_coefficients(assemble_block<S>(m, l_m, geometry, spec, bal));
  };

  std::vector<ChannelN<S>> blocks(static_cast<std::size_t>(l_m + 1));
  if (options.threads <= 1) {
    for (int m = 0; m <= l_m; ++m) blocks[static_cast<std::size_t>(m)] = compute(m);
  } else {
    std::vector<std::future<ChannelN<S>>> jobs;
    for (int m = 0; m <= l_m; ++m) jobs.push_back(std::async(std::launch::async, compute, m));
    for (int m = 0; m <= l_m; ++m) blocks[static_cast<std::size_t>(m)] = jobs[static_cast<std::size_t>(m)].get();
  }

  LowTResult<S> result;
  result.l_m = l_m;
  result.rho = geometry.rho();
  result.spec = spec;
  for (int m = 0; m <= l_m; ++m) {
    const auto& b = blocks[static_cast<std::size_t>(m)];
    result.per_m.emplace(m, b);
    result.total += (m == 0 ? S(1) : S(2)) * b;
  }
  return result;
}

/// Delta_T F = -(pi/6) N1 L T^2 + (pi^3/15) N3 L^3 T^4 for a sphere-plane
/// separation L (same length unit as 1/T).
inline Real free_energy_correction(const LowTResult<Real>& r, const Real& separation_l, const Real& temperature) {
  if (temperature < 0) throw DomainError("temperature must be non-negative");
  const Real pi = scalar_traits<Real>::pi();
  const Real t2 = temperature * temperature;
  return -pi / 6 * r.n1() * separation_l * t2 +
         pi * pi * pi / 15 * r.n3() * separation_l * separation_l * separation_l * t2 * t2;
}

/// Coefficients of T^2 and T^4 in the force correction at one separation.
struct ForceCoefficients {
  Real gap;
  Real t2;  // (pi/6) d(L N1)/dL
  Real t4;  // -(pi^3/15) d(L^3 N3)/dL
};

struct ForceOptions {
  Real relative_step{"1e-6"};
  NOptions n;
  Channel channel = Channel::total;
  // c_coefficients only: refuse when the projected change of N3 with l_m at
  // the smallest gap exceeds this fraction of its value.
  bool check_convergence = true;
  Real divergence_tolerance{"0.1"};
};

/// Sixth-order central differences in L at fixed R.
inline ForceCoefficients force_coefficients(const BoundarySpec& spec, const Real& radius, const Real& gap, int l_m,
                                            const ForceOptions& options = {}) {
  const Real l0 = radius + gap;
  const Real h = options.relative_step * l0;
  if (!(gap > 3 * h)) throw DomainError("separation too small for the difference stencil");
  static constexpr std::array<int, 6> offsets{-3, -2, -1, 1, 2, 3};
  static constexpr std::array<int, 6> weights{-1, 9, -45, 45, -9, 1};
  Real d_ln1(0), d_l3n3(0);
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const Real l = l0 + offsets[i] * h;
    const auto r = n_coefficients(Geometry<Real>::from_rho(radius / l), spec, l_m, options.n);
    d_ln1 += weights[i] * (l * channel_n1(r.total, options.channel));
    d_l3n3 += weights[i] * (l * l * l * channel_n3(r.total, options.channel));
  }
  d_ln1 /= 60 * h;
  d_l3n3 /= 60 * h;
  const Real pi = scalar_traits<Real>::pi();
  return {gap, pi / 6 * d_ln1, -pi * pi * pi / 15 * d_l3n3};
}

/// Delta_T f on a grid of gaps a = L - R at temperature T.
inline std::vector<Real> force_correction(const BoundarySpec& spec, const Real& radius,
                                          const std::vector<Real>& gaps, int l_m, const Real& temperature,
                                          const ForceOptions& options = {}) {
  if (temperature < 0) throw DomainError("temperature must be non-negative");
  std::vector<Real> out;
  out.reserve(gaps.size());
  const Real t2 = temperature * temperature;
  for (const auto& a : gaps) {
    if (!(a > 0)) throw DomainError("gap must be positive");
    const auto f = force_coefficients(spec, radius, a, l_m, options);
    out.push_back(f.t2 * t2 + f.t4 * t2 * t2);
  }
  return out;
}

struct SweepRow {
  int l_m;
  ChannelN<Real> n;
  Real delta_n1{0};  // |N1(l_m) - N1(l_m - 1)|, zero in the first row
  Real delta_n3{0};
};

struct SweepReport {
  std::vector<SweepRow> rows;
  bool converged = true;
  Channel channel = Channel::total;
  Real tail_n3{0};  // geometric estimate of the change still to come in N3
};

/// Geometric estimate of the remaining change, last * r / (1 - r) with
/// r = last / previous. Infinite when the differences stop shrinking.
inline Real tail_estimate(const std::vector<Real>& deltas) {
  if (deltas.empty()) return Real(0);
  const Real& last = deltas.back();
  if (last == 0) return Real(0);
  if (deltas.size() < 2 || deltas[deltas.size() - 2] == 0) return std::numeric_limits<Real>::infinity();
  const Real r = last / deltas[deltas.size() - 2];
  if (r >= 1) return std::numeric_limits<Real>::infinity();
  return last * r / (1 - r);
}

/// Whether successive-truncation differences are settling. Two ways to
/// fail: the differences stop decreasing over the final steps, or they
/// decrease so slowly that the projected tail is still above `tolerance`
/// relative to the value. The second is what happens for TM close to the
/// plane, where the ratio of successive differences creeps toward one.
inline bool deltas_settle(const std::vector<Real>& deltas, const Real& scale, const Real& tolerance = Real("1e-3"),
                          const Real& negligible = Real("1e-12")) {
  if (deltas.size() < 3) return true;
  const Real bound = boost::multiprecision::abs(scale);
  if (deltas.back() <= negligible * bound) return true;
  const std::size_t window = std::min<std::size_t>(deltas.size() - 1, 4);
  std::size_t rising = 0;
  for (std::size_t i = deltas.size() - window; i < deltas.size(); ++i)
    if (deltas[i] >= deltas[i - 1]) ++rising;
  const Real tail = tail_estimate(deltas);
  // Rising differences far below the tolerance are cancellation noise.
  if (2 * rising >= window || boost::multiprecision::isinf(tail)) return deltas.back() <= tolerance * bound / 100;
  return tail <= tolerance * bound;
}

/// N1, N3 for l_m = l_min .. l_m_max with successive deltas.
inline SweepReport convergence_sweep(const BoundarySpec& spec, const Real& rho, int l_m_max,
                                     Channel ch = Channel::total, const NOptions& options = {},
                                     const Real& tolerance = Real("1e-3")) {
  if (!(rho > 0 && rho < 1)) throw DomainError("rho must lie in (0, 1)");
  SweepReport report;
  report.channel = ch;
  const auto geometry = Geometry<Real>::from_rho(rho);
  std::vector<Real> d1, d3;
  for (int l_m = spec.l_min(); l_m <= l_m_max; ++l_m) {
    SweepRow row{l_m, n_coefficients(geometry, spec, l_m, options).total};
    if (!report.rows.empty()) {
      const auto& prev = report.rows.back().n;
      row.delta_n1 = boost::multiprecision::abs(channel_n1(row.n, ch) - channel_n1(prev, ch));
      row.delta_n3 = boost::multiprecision::abs(channel_n3(row.n, ch) - channel_n3(prev, ch));
      d1.push_back(row.delta_n1);
      d3.push_back(row.delta_n3);
    }
    report.rows.push_back(row);
  }
  if (!report.rows.empty()) {
    const auto& last = report.rows.back().n;
    report.tail_n3 = tail_estimate(d3);
    report.converged = deltas_settle(d1, channel_n1(last, ch), tolerance) &&
                       deltas_settle(d3, channel_n3(last, ch), tolerance);
  }
  return report;
}

struct CCoefficients {
  Real c2, c3, c4, c5;
  int l_m = 0;
  std::vector<ForceCoefficients> samples;
};

/// Default small-gap grid a = 1e-3, 2e-3, ..., 1e-2 (R = 1).
inline std::vector<Real> default_c_grid() {
  std::vector<Real> a;
  for (int i = 1; i <= 10; ++i) a.push_back(Real(i) / 1000);
  return a;
}

/// With R = 1 fits the T^4 force coefficient on a small-gap grid to
/// c2 + c3 a + c4 a^2 + c5 a^3. The cubic term matters: dropping it shifts
/// c3 by about 1.5e-3 at low l_m.
inline CCoefficients c_coefficients(const BoundarySpec& spec, int l_m, const std::vector<Real>& gaps = default_c_grid(),
                                    const ForceOptions& options = {}) {
  if (gaps.empty()) throw DomainError("empty gap grid");
  if (options.check_convergence && l_m - spec.l_min() >= 3) {
    const Real a_min = *std::min_element(gaps.begin(), gaps.end());
    const auto sweep = convergence_sweep(spec, 1 / (1 + a_min), l_m, options.channel, options.n,
                                         options.divergence_tolerance);
    if (!sweep.converged)
      throw UnreliableExtraction(spec.name() + ": truncation sequence does not settle at the smallest gap");
  }
  CCoefficients out;
  out.l_m = l_m;
  Matrix<Real> design(gaps.size(), 4);
  std::vector<Real> rhs;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const auto f = force_coefficients(spec, Real(1), gaps[i], l_m, options);
    out.samples.push_back(f);
    design(i, 0) = 1;
    design(i, 1) = gaps[i];
    design(i, 2) = gaps[i] * gaps[i];
    design(i, 3) = gaps[i] * gaps[i] * gaps[i];
    rhs.push_back(f.t4);
  }
  const auto c = least_squares(design, rhs);
  out.c2 = c[0];
  out.c3 = c[1];
  out.c4 = c[2];
  out.c5 = c[3];
  return out;
}

enum class Quantity { n1, n3 };

/// Least-squares fit of N1 or N3 (in the chosen channel) on a grid of small
/// rho to sum_p coeff_p rho^p. Returns one coefficient per model power.
inline std::vector<Real> asymptotic_check(const BoundarySpec& spec, int l_m, const std::vector<Real>& rho_grid,
                                          const std::vector<int>& model_powers, Quantity q = Quantity::n3,
                                          Channel ch = Channel::total, const NOptions& options = {}) {
  if (model_powers.empty()) throw RankDeficientFit("empty model");
  Matrix<Real> design(rho_grid.size(), model_powers.size());
  std::vector<Real> rhs;
  for (std::size_t i = 0; i < rho_grid.size(); ++i) {
    const Real& rho = rho_grid[i];
    const auto r = n_coefficients(Geometry<Real>::from_rho(rho), spec, l_m, options);
    rhs.push_back(q == Quantity::n1 ? channel_n1(r.total, ch) : channel_n3(r.total, ch));
    for (std::size_t j = 0; j < model_powers.size(); ++j)
      design(i, j) = boost::multiprecision::pow(rho, model_powers[j]);
  }
  return least_squares(design, rhs);
}

/// Evenly spaced grid of `count` points on [lo, hi].
inline std::vector<Real> linear_grid(const Real& lo, const Real& hi, int count) {
  std::vector<Real> g;
  for (int i = 0; i < count; ++i) g.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  return g;
}

}  // namespace casimir
