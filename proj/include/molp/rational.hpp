#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace molp {

// Exact arithmetic backends. mpq_rational is canonical by construction:
// lowest terms, positive denominator.
using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

using IntMat = Eigen::Matrix<Integer, Eigen::Dynamic, Eigen::Dynamic>;
using IntVec = Eigen::Matrix<Integer, Eigen::Dynamic, 1>;
using RatMat = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using RatVec = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;

inline Integer int_gcd(const Integer& a, const Integer& b) {
  return boost::multiprecision::gcd(a, b);
}

inline Integer int_lcm(const Integer& a, const Integer& b) {
  if (a == 0 || b == 0) return 0;
  return boost::multiprecision::lcm(a, b);
}

inline Integer numer(const Rational& r) { return Integer(boost::multiprecision::numerator(r)); }
inline Integer denom(const Rational& r) { return Integer(boost::multiprecision::denominator(r)); }

inline bool is_integral(const Rational& r) { return denom(r) == 1; }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(const Integer& z) { return z.convert_to<double>(); }

/// Nearest integer to a double as an Integer (used when rounding extracted
/// coordinates before exact verification).
inline Integer round_to_integer(double v) {
  return Integer(static_cast<long long>(v >= 0 ? v + 0.5 : v - 0.5));
}

/// Parses "p/q", "p", or a plain decimal-free integer string.
Rational parse_rational(const std::string& s);

/// Canonical text form: "p" when integral, else "p/q".
std::string format_rational(const Rational& r);

/// lcm of denominators of a range of rationals; at least 1.
template <typename It>
Integer lcm_of_denominators(It first, It last) {
  Integer l = 1;
  for (It it = first; it != last; ++it) l = int_lcm(l, denom(*it));
  return l;
}

/// floor(sqrt(z)) for z >= 0.
inline Integer isqrt_floor(const Integer& z) {
  if (z < 0) throw std::invalid_argument("isqrt of negative value");
  return boost::multiprecision::sqrt(z);
}

inline RatVec to_rational(const IntVec& v) {
  RatVec r(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) r(i) = Rational(v(i));
  return r;
}

inline RatMat to_rational(const IntMat& m) {
  RatMat r(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = Rational(m(i, j));
  return r;
}

}  // namespace molp
