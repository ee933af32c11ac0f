#pragma once

#include "hitsm/numeric.hpp"

#include <compare>
#include <string>
#include <vector>

namespace hitsm {

// a * eps^b * exp(-c/eps) * (1 + ln(1/eps))^(-d)
struct Monomial {
  Rational a{1};
  Rational b{0};
  Rational c{0};
  Rational d{0};

  bool operator==(const Monomial&) const = default;
};

// Asymptotic order of the eps-dependent part; "greater" vanishes faster.
std::strong_ordering order_cmp(const Monomial& x, const Monomial& y);
Monomial operator*(const Monomial& x, const Monomial& y);
Monomial inverse(const Monomial& x);

// Sorted by ascending order (leading term first), like terms merged, no zero coefficients.
using Posynomial = std::vector<Monomial>;

Posynomial canonical(Posynomial p);
Posynomial operator+(const Posynomial& x, const Posynomial& y);
Posynomial operator*(const Posynomial& x, const Posynomial& y);
Posynomial negate(Posynomial p);

enum class Family { H1, H2, H3 };
std::string to_string(Family f);
Family parse_family(const std::string& s);

class FamilyMixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonPositiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExtendedLimit {
  enum class Kind { Zero, Finite, Infinite };
  Kind kind = Kind::Zero;
  Rational value{0};  // meaningful when Finite

  static ExtendedLimit zero() { return {}; }
  static ExtendedLimit finite(Rational v) { return {Kind::Finite, std::move(v)}; }
  static ExtendedLimit infinite() { return {Kind::Infinite, Rational(0)}; }

  bool is_zero() const { return kind == Kind::Zero || (kind == Kind::Finite && value == 0); }
  bool is_finite() const { return kind != Kind::Infinite; }
  bool is_infinite() const { return kind == Kind::Infinite; }
  bool positive_finite() const { return kind == Kind::Finite && value > 0; }
  // 0 for Zero; value for Finite; throws for Infinite
  Rational finite_value() const;
  std::string str() const;
  bool operator==(const ExtendedLimit&) const = default;
};

// Ratio of signed generalized posynomials. Internally kept as
//   lead * prod(num factors) / prod(den factors)
// where every factor is a posynomial whose leading term is exactly 1. This keeps
// repeated quotients from squaring their denominators during the reduction.
class ComparableFn {
 public:
  ComparableFn() = default;  // the zero function

  static ComparableFn zero() { return {}; }
  static ComparableFn constant(const Rational& q);
  static ComparableFn monomial(const Monomial& m);
  static ComparableFn ratio(const Posynomial& num, const Posynomial& den);

  bool is_zero() const { return zero_; }
  const Monomial& lead() const;  // leading monomial of the whole ratio
  Posynomial numerator() const;  // expanded
  Posynomial denominator() const;
  const std::vector<Posynomial>& num_factors() const { return num_; }
  const std::vector<Posynomial>& den_factors() const { return den_; }

  bool uses_exp() const;  // some c != 0
  bool uses_log() const;  // some d != 0

  // Structural identity of the internal form; see cf_equal for value equality.
  bool same_form(const ComparableFn& o) const;

  friend ComparableFn operator+(const ComparableFn& f, const ComparableFn& g);
  friend ComparableFn operator-(const ComparableFn& f, const ComparableFn& g);
  friend ComparableFn operator*(const ComparableFn& f, const ComparableFn& g);
  friend ComparableFn operator/(const ComparableFn& f, const ComparableFn& g);
  ComparableFn operator-() const;

 private:
  static ComparableFn build(Monomial lead, std::vector<Posynomial> num, std::vector<Posynomial> den);

  bool zero_ = true;
  Monomial lead_{};
  std::vector<Posynomial> num_;
  std::vector<Posynomial> den_;
};

inline ComparableFn cf_add(const ComparableFn& f, const ComparableFn& g) { return f + g; }
inline ComparableFn cf_mul(const ComparableFn& f, const ComparableFn& g) { return f * g; }
inline ComparableFn cf_div(const ComparableFn& f, const ComparableFn& g) { return f / g; }

ExtendedLimit cf_limit(const ComparableFn& f);
// Leading monomial with f(eps) / leading(eps) -> 1.
Monomial cf_leading(const ComparableFn& f);
double cf_eval(const ComparableFn& f, double eps);
Real cf_eval(const ComparableFn& f, const Real& eps);
// Value equality (exact).
bool cf_equal(const ComparableFn& f, const ComparableFn& g);
// Expanded num/den form; idempotent.
ComparableFn canonicalize(const ComparableFn& f);
// Positive leading coefficient and positive at the sample points {1, 0.1, 0.01, 0.001}.
bool cf_positive(const ComparableFn& f);
bool fits_family(const ComparableFn& f, Family fam);

Real eval(const Monomial& m, const Real& eps);
Real eval(const Posynomial& p, const Real& eps);

std::string to_string(const Monomial& m);
std::string to_string(const Posynomial& p);
std::string to_string(const ComparableFn& f);
// Inverse of to_string(Monomial): "a * e^b * exp(-c/e) * log^-d", every factor optional.
Monomial parse_monomial(const std::string& text);

}  // namespace hitsm
