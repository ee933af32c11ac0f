#include "hitsm/asymptotics.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace hitsm {

namespace {

std::strong_ordering cmp_q(const Rational& x, const Rational& y) {
  if (x < y) return std::strong_ordering::less;
  if (y < x) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

bool same_order(const Monomial& x, const Monomial& y) { return x.b == y.b && x.c == y.c && x.d == y.d; }

const Monomial kOne{};

std::strong_ordering posy_cmp(const Posynomial& x, const Posynomial& y) {
  const std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto o = order_cmp(x[i], y[i]); o != 0) return o;
    if (auto o = cmp_q(x[i].a, y[i].a); o != 0) return o;
  }
  return x.size() <=> y.size();
}

struct PosyLess {
  bool operator()(const Posynomial& x, const Posynomial& y) const { return posy_cmp(x, y) < 0; }
};

using Factors = std::vector<Posynomial>;

Factors ms_intersection(const Factors& x, const Factors& y) {
  Factors out;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out), PosyLess{});
  return out;
}

Factors ms_difference(const Factors& x, const Factors& y) {
  Factors out;
  std::set_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out), PosyLess{});
  return out;
}

Factors ms_union(const Factors& x, const Factors& y) {
  Factors out;
  std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out), PosyLess{});
  return out;
}

Factors ms_sum(const Factors& x, const Factors& y) {
  Factors out;
  std::merge(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out), PosyLess{});
  return out;
}

Posynomial scaled(const Posynomial& p, const Monomial& m) {
  Posynomial out;
  out.reserve(p.size());
  for (const auto& t : p) out.push_back(t * m);
  return out;
}

Posynomial expand(const Monomial& lead, const Factors& fs) {
  Posynomial acc{lead};
  for (const auto& f : fs) acc = acc * f;
  return acc;
}

bool has_exp(const Monomial& m) { return m.c != 0; }
bool has_log(const Monomial& m) { return m.d != 0; }

template <class Pred>
bool any_term(const ComparableFn& f, Pred pred) {
  if (f.is_zero()) return false;
  if (pred(f.lead())) return true;
  for (const auto* fs : {&f.num_factors(), &f.den_factors()})
    for (const auto& p : *fs)
      for (const auto& t : p)
        if (pred(t)) return true;
  return false;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view strip_parens(std::string_view s) {
  s = trim(s);
  while (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = trim(s.substr(1, s.size() - 2));
  return s;
}

}  // namespace

std::strong_ordering order_cmp(const Monomial& x, const Monomial& y) {
  if (auto o = cmp_q(x.c, y.c); o != 0) return o;
  if (auto o = cmp_q(x.b, y.b); o != 0) return o;
  return cmp_q(x.d, y.d);
}

Monomial operator*(const Monomial& x, const Monomial& y) {
  return Monomial{x.a * y.a, x.b + y.b, x.c + y.c, x.d + y.d};
}

Monomial inverse(const Monomial& x) {
  if (x.a == 0) throw std::domain_error("inverse of a zero monomial");
  return Monomial{Rational(1) / x.a, -x.b, -x.c, -x.d};
}

Posynomial canonical(Posynomial p) {
  std::sort(p.begin(), p.end(), [](const Monomial& x, const Monomial& y) { return order_cmp(x, y) < 0; });
  Posynomial out;
  for (auto& t : p) {
    if (!out.empty() && same_order(out.back(), t)) {
      out.back().a += t.a;
    } else {
      if (!out.empty() && out.back().a == 0) out.pop_back();
      out.push_back(std::move(t));
    }
  }
  if (!out.empty() && out.back().a == 0) out.pop_back();
  return out;
}

Posynomial operator+(const Posynomial& x, const Posynomial& y) {
  Posynomial all = x;
  all.insert(all.end(), y.begin(), y.end());
  return canonical(std::move(all));
}

Posynomial operator*(const Posynomial& x, const Posynomial& y) {
  Posynomial all;
  all.reserve(x.size() * y.size());
  for (const auto& s : x)
    for (const auto& t : y) all.push_back(s * t);
  return canonical(std::move(all));
}

Posynomial negate(Posynomial p) {
  for (auto& t : p) t.a = -t.a;
  return p;
}

std::string to_string(Family f) {
  switch (f) {
    case Family::H1: return "H1";
    case Family::H2: return "H2";
    case Family::H3: return "H3";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  if (s == "H1") return Family::H1;
  if (s == "H2") return Family::H2;
  if (s == "H3") return Family::H3;
  throw ParseError("unknown family '" + s + "' (expected H1, H2 or H3)");
}

Rational ExtendedLimit::finite_value() const {
  if (kind == Kind::Infinite) throw std::domain_error("infinite limit has no finite value");
  return kind == Kind::Zero ? Rational(0) : value;
}

std::string ExtendedLimit::str() const {
  switch (kind) {
    case Kind::Zero: return "0";
    case Kind::Finite: return value.str();
    case Kind::Infinite: return "inf";
  }
  return "?";
}

ComparableFn ComparableFn::constant(const Rational& q) {
  if (q == 0) return {};
  return build(Monomial{q, 0, 0, 0}, {}, {});
}

ComparableFn ComparableFn::monomial(const Monomial& m) {
  if (m.a == 0) return {};
  return build(m, {}, {});
}

ComparableFn ComparableFn::ratio(const Posynomial& num_in, const Posynomial& den_in) {
  Posynomial num = canonical(num_in);
  Posynomial den = canonical(den_in);
  if (den.empty()) throw std::domain_error("ComparableFn with a zero denominator");
  if (num.empty()) return {};
  Monomial lead = num.front() * inverse(den.front());
  Factors nf{scaled(num, inverse(num.front()))};
  Factors df{scaled(den, inverse(den.front()))};
  return build(std::move(lead), std::move(nf), std::move(df));
}

ComparableFn ComparableFn::build(Monomial lead, Factors num, Factors den) {
  ComparableFn f;
  if (lead.a == 0) return f;
  auto trivial = [](const Posynomial& p) { return p.size() == 1 && p.front() == kOne; };
  std::erase_if(num, trivial);
  std::erase_if(den, trivial);
  std::sort(num.begin(), num.end(), PosyLess{});
  std::sort(den.begin(), den.end(), PosyLess{});
  Factors common = ms_intersection(num, den);
  if (!common.empty()) {
    num = ms_difference(num, common);
    den = ms_difference(den, common);
  }
  f.zero_ = false;
  f.lead_ = std::move(lead);
  f.num_ = std::move(num);
  f.den_ = std::move(den);
  if (f.uses_exp() && f.uses_log())
    throw FamilyMixError("exponential (H2) and logarithmic (H3) factors mixed in one function");
  return f;
}

const Monomial& ComparableFn::lead() const {
  if (zero_) throw std::domain_error("zero function has no leading term");
  return lead_;
}

Posynomial ComparableFn::numerator() const {
  if (zero_) return {};
  return expand(lead_, num_);
}

Posynomial ComparableFn::denominator() const {
  if (zero_) return {kOne};
  return expand(kOne, den_);
}

bool ComparableFn::uses_exp() const { return any_term(*this, has_exp); }
bool ComparableFn::uses_log() const { return any_term(*this, has_log); }

bool ComparableFn::same_form(const ComparableFn& o) const {
  if (zero_ || o.zero_) return zero_ == o.zero_;
  return lead_ == o.lead_ && num_ == o.num_ && den_ == o.den_;
}

ComparableFn ComparableFn::operator-() const {
  if (zero_) return *this;
  ComparableFn f = *this;
  f.lead_.a = -f.lead_.a;
  return f;
}

ComparableFn operator*(const ComparableFn& f, const ComparableFn& g) {
  if (f.zero_ || g.zero_) {
    if (f.uses_exp() && g.uses_log()) throw FamilyMixError("H2 and H3 operands");
    if (f.uses_log() && g.uses_exp()) throw FamilyMixError("H2 and H3 operands");
    return {};
  }
  return ComparableFn::build(f.lead_ * g.lead_, ms_sum(f.num_, g.num_), ms_sum(f.den_, g.den_));
}

ComparableFn operator/(const ComparableFn& f, const ComparableFn& g) {
  if (g.zero_) throw PreconditionError("division by the zero function");
  if (f.zero_) return {};
  return ComparableFn::build(f.lead_ * inverse(g.lead_), ms_sum(f.num_, g.den_), ms_sum(f.den_, g.num_));
}

ComparableFn operator+(const ComparableFn& f, const ComparableFn& g) {
  if ((f.uses_exp() && g.uses_log()) || (f.uses_log() && g.uses_exp()))
    throw FamilyMixError("H2 and H3 operands");
  if (f.zero_) return g;
  if (g.zero_) return f;
  Factors common = ms_intersection(f.num_, g.num_);
  Factors fn = ms_difference(f.num_, common);
  Factors gn = ms_difference(g.num_, common);
  Factors lcm = ms_union(f.den_, g.den_);
  Posynomial sum = expand(f.lead_, ms_sum(fn, ms_difference(lcm, f.den_))) +
                   expand(g.lead_, ms_sum(gn, ms_difference(lcm, g.den_)));
  if (sum.empty()) return {};
  Monomial lead = sum.front();
  common.push_back(scaled(sum, inverse(lead)));
  return ComparableFn::build(std::move(lead), std::move(common), std::move(lcm));
}

ComparableFn operator-(const ComparableFn& f, const ComparableFn& g) { return f + (-g); }

ExtendedLimit cf_limit(const ComparableFn& f) {
  if (f.is_zero()) return ExtendedLimit::zero();
  const Monomial& m = f.lead();
  auto o = order_cmp(m, kOne);
  if (o > 0) return ExtendedLimit::zero();
  if (o < 0) return ExtendedLimit::infinite();
  return ExtendedLimit::finite(m.a);
}

Monomial cf_leading(const ComparableFn& f) { return f.lead(); }

Real eval(const Monomial& m, const Real& eps) {
  Real r = to_real(m.a);
  if (m.b != 0) r *= boost::multiprecision::pow(eps, to_real(m.b));
  if (m.c != 0) r *= boost::multiprecision::exp(-to_real(m.c) / eps);
  if (m.d != 0) r *= boost::multiprecision::pow(1 + boost::multiprecision::log(1 / eps), -to_real(m.d));
  return r;
}

Real eval(const Posynomial& p, const Real& eps) {
  Real s = 0;
  for (const auto& t : p) s += eval(t, eps);
  return s;
}

Real cf_eval(const ComparableFn& f, const Real& eps) {
  if (f.is_zero()) return Real(0);
  Real r = eval(f.lead(), eps);
  for (const auto& p : f.num_factors()) r *= eval(p, eps);
  for (const auto& p : f.den_factors()) r /= eval(p, eps);
  return r;
}

double cf_eval(const ComparableFn& f, double eps) {
  if (f.is_zero()) return 0.0;
  Real r = cf_eval(f, Real(eps));
  double d = to_double(r);
  if (!(d > 0)) throw NonPositiveError("function " + to_string(f) + " is not positive at eps=" + std::to_string(eps));
  return d;
}

bool cf_equal(const ComparableFn& f, const ComparableFn& g) { return (f - g).is_zero(); }

ComparableFn canonicalize(const ComparableFn& f) {
  if (f.is_zero()) return f;
  return ComparableFn::ratio(f.numerator(), f.denominator());
}

bool cf_positive(const ComparableFn& f) {
  if (f.is_zero() || f.lead().a <= 0) return false;
  for (const char* e : {"1", "0.1", "0.01", "0.001"}) {
    if (cf_eval(f, Real(e)) <= 0) return false;
  }
  return true;
}

bool fits_family(const ComparableFn& f, Family fam) {
  switch (fam) {
    case Family::H1: return !f.uses_exp() && !f.uses_log();
    case Family::H2: return !f.uses_log();
    case Family::H3: return !f.uses_exp();
  }
  return false;
}

std::string to_string(const Monomial& m) {
  std::ostringstream os;
  os << m.a.str();
  if (m.b != 0) os << " * e^" << m.b.str();
  if (m.c != 0) os << " * exp(" << Rational(-m.c).str() << "/e)";
  if (m.d != 0) os << " * log^" << Rational(-m.d).str();
  return os.str();
}

std::string to_string(const Posynomial& p) {
  if (p.empty()) return "0";
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += " + ";
    s += to_string(p[i]);
  }
  return s;
}

std::string to_string(const ComparableFn& f) {
  if (f.is_zero()) return "0";
  auto den = f.denominator();
  auto num = f.numerator();
  if (den.size() == 1 && den.front() == kOne) return to_string(num);
  return "(" + to_string(num) + ") / (" + to_string(den) + ")";
}

Monomial parse_monomial(const std::string& text) {
  Monomial m;
  std::string_view rest = text;
  bool any = false;
  while (true) {
    auto star = rest.find('*');
    std::string_view tok = trim(rest.substr(0, star));
    if (tok.empty()) throw ParseError("empty factor in monomial '" + text + "'");
    any = true;
    if (tok == "e") {
      m.b += 1;
    } else if (tok.starts_with("e^")) {
      m.b += parse_rational(strip_parens(tok.substr(2)));
    } else if (tok.starts_with("exp(") && tok.ends_with(")")) {
      std::string_view in = trim(tok.substr(4, tok.size() - 5));
      if (!in.ends_with("/e")) throw ParseError("expected exp(-c/e) in '" + text + "'");
      in = trim(in.substr(0, in.size() - 2));
      bool neg = false;
      if (!in.empty() && in.front() == '-') {
        neg = true;
        in.remove_prefix(1);
      }
      Rational c = parse_rational(strip_parens(in));
      m.c += neg ? c : Rational(-c);
    } else if (tok == "log") {
      m.d -= 1;
    } else if (tok.starts_with("log^")) {
      m.d -= parse_rational(strip_parens(tok.substr(4)));
    } else {
      m.a *= parse_rational(strip_parens(tok));
    }
    if (star == std::string_view::npos) break;
    rest = rest.substr(star + 1);
  }
  if (!any) throw ParseError("empty monomial");
  return m;
}

}  // namespace hitsm
