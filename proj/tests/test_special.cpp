#include <catch2/catch_amalgamated.hpp>

#include <boost/math/special_functions/bessel.hpp>

#include "properties.hpp"

using namespace casimir;

namespace {

Real value(const SignedRadical& r) { return r.value<Real>(); }

}  // namespace

TEST_CASE("3j symbol values", "[wigner]") {
  const auto unit = wigner3j(0, 0, 0, 0, 0, 0);
  CHECK(unit.sign == 1);
  CHECK(unit.radicand == 1);

  const auto a = wigner3j(1, 1, 0, 0, 0, 0);
  CHECK(a.sign == -1);
  CHECK(a.radicand == Rational(1, 3));

  const auto b = wigner3j(1, 1, 2, 1, -1, 0);
  CHECK(b.sign == 1);
  CHECK(b.radicand == Rational(1, 30));
}

TEST_CASE("3j selection rules give exact zero", "[wigner]") {
  CHECK(wigner3j(1, 1, 1, 0, 0, 0).is_zero());
  CHECK(wigner3j(1, 1, 3, 0, 0, 0).is_zero());
  CHECK(wigner3j(1, 1, 1, 1, 1, 0).is_zero());
  CHECK(wigner3j(1, 1, 1, 2, -2, 0).is_zero());
}

TEST_CASE("translation factor H", "[wigner]") {
  const auto h000 = h_factor(0, 0, 0, 0);
  CHECK(h000.sign == 1);
  CHECK(h000.radicand == 1);
  CHECK(h_factor(1, 1, 1, 0).is_zero());
  const auto h011 = h_factor(0, 1, 1, 0);
  CHECK(h011.sign == 1);
  CHECK(h011.radicand == 3);
  CHECK_THROWS_AS(h_factor(0, 1, 1, 1), DomainError);
}

TEST_CASE("vector translation factors", "[wigner]") {
  const auto f = lambda_factors(1, 1, 2, 0);
  CHECK(f.lambda.signed_square() == Rational(1, 4));
  CHECK(f.lambda.sign == 1);
  CHECK(lambda_factors(1, 1, 2, 0).lambda_tilde_per_xi_l.is_zero());
  const auto t = lambda_factors(1, 1, 0, 1).lambda_tilde_per_xi_l;
  CHECK(t.sign == 1);
  CHECK(t.radicand == 1);
  CHECK_THROWS_AS(lambda_factors(0, 1, 1, 0), DomainError);
}

TEST_CASE("3j symmetries for j <= 6", "[wigner][property]") {
  const auto r = testing::wigner_symmetries(6);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("3j orthogonality for j <= 5", "[wigner][property]") {
  const auto r = testing::wigner_orthogonality(5);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("Bessel series of low orders", "[bessel]") {
  const auto s0 = sph_bessel_s_series<Rational>(0, 5);
  CHECK(s0.offset() == HalfInteger::integer(1));
  CHECK(std::vector<Rational>(s0.coeffs().begin(), s0.coeffs().end()) ==
        std::vector<Rational>{1, 0, Rational(1, 6), 0, Rational(1, 120)});

  const auto e0 = sph_bessel_e_series<Rational>(0, 4);
  CHECK(e0.offset() == HalfInteger::integer(0));
  CHECK(std::vector<Rational>(e0.coeffs().begin(), e0.coeffs().end()) ==
        std::vector<Rational>{1, -1, Rational(1, 2), Rational(-1, 6)});

  const auto e1 = sph_bessel_e_series<Rational>(1, 4);
  CHECK(e1.offset() == HalfInteger::integer(-1));
  CHECK(std::vector<Rational>(e1.coeffs().begin(), e1.coeffs().end()) ==
        std::vector<Rational>{1, 0, Rational(-1, 2), Rational(1, 3)});

  CHECK_THROWS_AS(sph_bessel_s_series<Rational>(-1, 3), DomainError);
}

TEST_CASE("Bessel point derivatives against closed forms", "[bessel]") {
  const Real one(1);
  const Real tol = testing::precision_tolerance(10);
  const auto d0 = sph_bessel_point_derivatives(0, one, 2);
  CHECK(abs(d0.s[0] - sinh(one)) < tol);
  CHECK(abs(d0.s[1] - cosh(one)) < tol);
  CHECK(abs(d0.e[0] - exp(-one)) < tol);
  CHECK(abs(d0.e[1] + exp(-one)) < tol);
  const auto d1 = sph_bessel_point_derivatives(1, one, 1);
  CHECK(abs(d1.s[0] - (cosh(one) - sinh(one))) < tol);
  CHECK_THROWS_AS(sph_bessel_point_derivatives(1, Real(0), 2), DomainError);
}

TEST_CASE("Bessel point derivatives agree with the differentiated series", "[bessel]") {
  const Real y("0.3");
  const Real tol = testing::precision_tolerance(10);
  for (int l = 0; l <= 5; ++l) {
    const auto p = sph_bessel_point_derivatives(l, y, 4);
    auto s = sph_bessel_s_series<Real>(l, 60);
    auto e = sph_bessel_e_series<Real>(l, 60);
    for (std::size_t k = 0; k < 4; ++k) {
      const auto eval = [&](const TruncatedSeries<Real>& f) {
        Real acc(0);
        for (std::size_t i = 0; i < f.order(); ++i)
          acc += f[i] * pow(y, f.offset().as_integer() + static_cast<int>(i));
        return acc;
      };
      INFO("l = " << l << ", derivative " << k);
      CHECK(testing::relative_difference(eval(s), p.s[k]) < tol);
      CHECK(testing::relative_difference(eval(e), p.e[k]) < tol);
      s = series_differentiate(s);
      e = series_differentiate(e);
    }
  }
}

TEST_CASE("Bessel values against Boost.Math", "[bessel]") {
  // s_l(x) = sqrt(pi x/2) I_{l+1/2}(x), e_l(x) = sqrt(2x/pi) K_{l+1/2}(x)
  const Real pi = scalar_traits<Real>::pi();
  const Real tol = testing::precision_tolerance(15);
  for (int l : {0, 1, 4, 9})
    for (const char* xs : {"0.2", "2.5", "17"}) {
      const Real x(xs);
      const Real nu = Real(l) + Real(1) / 2;
      const auto p = sph_bessel_point_derivatives(l, x, 1);
      INFO("l = " << l << ", x = " << xs);
      CHECK(testing::relative_difference(p.s[0], sqrt(pi * x / 2) * boost::math::cyl_bessel_i(nu, x)) < tol);
      CHECK(testing::relative_difference(p.e[0], sqrt(2 * x / pi) * boost::math::cyl_bessel_k(nu, x)) < tol);
    }
}

TEST_CASE("Wronskian identity", "[bessel][property]") {
  const auto r = testing::bessel_wronskian();
  INFO(r.detail);
  CHECK(r.ok);
}
