#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace hitsm {

using Rational = boost::multiprecision::mpq_rational;
// 50 decimal digits; enough headroom for the ill-conditioned solves near eps = 1e-4
using Real = boost::multiprecision::mpfr_float_50;

// Accepts "3", "-1/2", "0.125", "1e-3", "2.5e2".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline Real to_real(const Rational& q) { return Real(q); }
inline double to_double(const Real& x) { return x.convert_to<double>(); }

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when an algorithm precondition is violated (wrong state choice,
// degenerate rows, missing data).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hitsm
