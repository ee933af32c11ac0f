#include "hitsm/numeric.hpp"

#include <cctype>

namespace hitsm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

Rational pow10(long e) {
  boost::multiprecision::mpz_int p = 1;
  for (long i = 0; i < (e < 0 ? -e : e); ++i) p *= 10;
  return e < 0 ? Rational(1) / Rational(p) : Rational(p);
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
  if (s.empty()) throw ParseError("empty number in '" + std::string(whole) + "'");
  bool neg = false;
  if (s.front() == '+' || s.front() == '-') {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  auto epos = s.find_first_of("eE");
  if (epos != std::string_view::npos) {
    std::string ex(s.substr(epos + 1));
    if (ex.empty()) throw ParseError("bad exponent in '" + std::string(whole) + "'");
    std::size_t used = 0;
    try {
      exponent = std::stol(ex, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != ex.size()) throw ParseError("bad exponent in '" + std::string(whole) + "'");
    s = s.substr(0, epos);
  }
  std::string digits;
  long frac = 0;
  bool seen_dot = false;
  for (char c : s) {
    if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      if (seen_dot) ++frac;
    } else {
      throw ParseError("not a number: '" + std::string(whole) + "'");
    }
  }
  if (digits.empty()) throw ParseError("not a number: '" + std::string(whole) + "'");
  // a leading zero would make gmp read the digits as octal
  auto nz = digits.find_first_not_of('0');
  digits = nz == std::string::npos ? "0" : digits.substr(nz);
  Rational r{boost::multiprecision::mpz_int(digits)};
  r *= pow10(exponent - frac);
  return neg ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto s = trim(text);
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_decimal(s, text);
  Rational num = parse_decimal(trim(s.substr(0, slash)), text);
  Rational den = parse_decimal(trim(s.substr(slash + 1)), text);
  if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

std::string to_string(const Rational& q) { return q.str(); }

}  // namespace hitsm
