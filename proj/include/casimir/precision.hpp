#pragma once

// Scalar types and the process-wide working precision.
//
// Two coefficient types are supported throughout the library:
//   Real     - MPFR float with a runtime number of decimal digits
//   Rational - GMP rational, exact and closed under + - * /
// All algorithms are templates over the scalar; scalar_traits<S> carries
// the few operations that differ between the two.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <regex>
#include <string>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include "casimir/errors.hpp"

namespace casimir {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                          boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                              boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                            boost::multiprecision::et_off>;

inline constexpr unsigned kDefaultDigits = 60;
inline constexpr unsigned kMinimumDigits = 30;

/// Reads CASIMIR_PRECISION once; later calls return the first result.
inline unsigned digits_from_environment() {
  static const unsigned digits = [] {
    if (const char* env = std::getenv("CASIMIR_PRECISION")) {
      char* end = nullptr;
      const unsigned long value = std::strtoul(env, &end, 10);
      if (end != env && *end == '\0' && value >= kMinimumDigits) return static_cast<unsigned>(value);
    }
    return kDefaultDigits;
  }();
  return digits;
}

namespace detail {
inline std::atomic<unsigned>& configured_digits() {
  static std::atomic<unsigned> digits{digits_from_environment()};
  return digits;
}
}  // namespace detail

/// Working precision in significant decimal digits.
inline unsigned working_digits() { return detail::configured_digits().load(); }

/// Applies the configured precision to the calling thread. MPFR default
/// precision is thread local, so worker threads call this before touching
/// any Real.
inline void apply_working_digits() {
  Real::default_precision(working_digits());
}

/// Sets the process-wide working precision and applies it to this thread.
inline void set_working_digits(unsigned digits) {
  if (digits < kMinimumDigits)
    throw DomainError("working precision must be at least " +
                      std::to_string(kMinimumDigits) + " digits");
  detail::configured_digits().store(digits);
  apply_working_digits();
}

namespace detail {
inline const bool precision_initialised = (apply_working_digits(), true);
}

/// RAII scope that raises or lowers the working precision temporarily.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned digits) : saved_(working_digits()) { set_working_digits(digits); }
  ~PrecisionScope() { set_working_digits(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Real> {
  static constexpr bool is_exact = false;
  static Real from_rational(const Rational& q) {
    return Real(BigInt(boost::multiprecision::numerator(q))) /
           Real(BigInt(boost::multiprecision::denominator(q)));
  }
  static Real sqrt_of(const Rational& q) { return boost::multiprecision::sqrt(from_rational(q)); }
  static Real sqrt(const Real& x) { return boost::multiprecision::sqrt(x); }
  static Real abs(const Real& x) { return boost::multiprecision::abs(x); }
  static Real pi() { return boost::math::constants::pi<Real>(); }
  /// Relative size below which a computed quantity counts as zero.
  static Real tiny() { return boost::multiprecision::pow(Real(10), -static_cast<int>(working_digits()) + 5); }
  static double to_double(const Real& x) { return x.convert_to<double>(); }
};

template <>
struct scalar_traits<Rational> {
  static constexpr bool is_exact = true;
  static Rational from_rational(const Rational& q) { return q; }
  static Rational sqrt_of(const Rational& q) {
    if (q < 0) throw DomainError("square root of a negative rational");
    const BigInt num = boost::multiprecision::numerator(q);
    const BigInt den = boost::multiprecision::denominator(q);
    const BigInt rn = boost::multiprecision::sqrt(num);
    const BigInt rd = boost::multiprecision::sqrt(den);
    if (rn * rn != num || rd * rd != den)
      throw InexactInExactMode("square root of a non-square rational in exact mode");
    return Rational(rn, rd);
  }
  static Rational sqrt(const Rational& x) { return sqrt_of(x); }
  static Rational abs(const Rational& x) { return boost::multiprecision::abs(x); }
  static Rational pi() { throw InexactInExactMode("pi is not rational"); }
  static Rational tiny() { return Rational(0); }
  static double to_double(const Rational& x) { return x.convert_to<double>(); }
};

template <class S>
inline constexpr bool is_exact_v = scalar_traits<S>::is_exact;

/// Renders a scalar as a decimal string with the requested significant digits.
inline std::string to_string(const Real& x, int digits) {
  return x.str(digits, std::ios_base::scientific);
}
inline std::string to_string(const Rational& q, int) { return q.str(); }

/// Parses "p/q" or a decimal such as "-1.25e-3" exactly.
inline Rational parse_rational(const std::string& text) {
  static const std::regex fraction(R"(\s*([+-]?\d+)\s*/\s*(\d+)\s*)");
  static const std::regex decimal(R"(\s*([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?\s*)");
  std::smatch m;
  if (std::regex_match(text, m, fraction)) {
    if (m[2].str().find_first_not_of('0') == std::string::npos)
      throw DomainError("zero denominator in '" + text + "'");
    std::string num = m[1].str();
    const bool negative = !num.empty() && num[0] == '-';
    if (!num.empty() && (num[0] == '-' || num[0] == '+')) num.erase(0, 1);
    num.erase(0, std::min(num.find_first_not_of('0'), num.size()));
    std::string d = m[2].str();
    d.erase(0, std::min(d.find_first_not_of('0'), d.size()));
    const Rational q(BigInt(num.empty() ? std::string("0") : num), BigInt(d.empty() ? std::string("0") : d));
    return negative ? Rational(-q) : q;
  }
  if (!std::regex_match(text, m, decimal) || (m[2].length() == 0 && m[3].length() == 0))
    throw DomainError("not a number: '" + text + "'");
  std::string digits = m[2].str() + m[3].str();
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size()));  // GMP reads a leading 0 as octal
  Rational value(BigInt(digits.empty() ? std::string("0") : digits));
  long exponent = -static_cast<long>(m[3].length());
  if (m[4].matched) exponent += std::stol(m[4].str());
  if (exponent > 100000 || exponent < -100000) throw DomainError("exponent out of range in '" + text + "'");
  const Rational scale(boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent)));
  value = exponent < 0 ? Rational(value / scale) : Rational(value * scale);
  return m[1].str() == "-" ? Rational(-value) : value;
}

}  // namespace casimir
