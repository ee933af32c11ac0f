#include "hitsm/asymptotics.hpp"

#include <doctest.h>

using namespace hitsm;

namespace {

ComparableFn m(Rational a, Rational b, Rational c = 0, Rational d = 0) { return ComparableFn::monomial({a, b, c, d}); }

}  // namespace

TEST_CASE("rational parsing") {
  CHECK(parse_rational("-1/2") == Rational(-1, 2));
  CHECK(parse_rational("0.125") == Rational(1, 8));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK(parse_rational("2.5e2") == Rational(250));
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("abc"), ParseError);
}

TEST_CASE("monomial order") {
  Monomial one{1, 0, 0, 0};
  Monomial eps{1, 1, 0, 0};
  Monomial expo{1, 0, 1, 0};
  Monomial logd{1, 0, 0, 1};
  CHECK(order_cmp(one, eps) == std::strong_ordering::less);
  // exponential decay beats any power
  CHECK(order_cmp(Monomial{1, 100, 0, 0}, expo) == std::strong_ordering::less);
  CHECK(order_cmp(one, logd) == std::strong_ordering::less);
  CHECK(order_cmp(logd, eps) == std::strong_ordering::less);
  CHECK(order_cmp(Monomial{3, 1, 0, 0}, eps) == std::strong_ordering::equal);
}

TEST_CASE("monomial text round trip") {
  for (Monomial x : {Monomial{Rational(1, 2), 2, 0, 0}, Monomial{-3, Rational(-1, 2), 0, 0}, Monomial{1, 1, 2, 0},
                     Monomial{Rational(4, 3), -1, 0, Rational(1, 2)}, Monomial{1, 0, Rational(-1, 3), -2}})
    CHECK(parse_monomial(to_string(x)) == x);
}

TEST_CASE("limits of simple ratios") {
  auto f = m(2, 1) / (m(1, 1) + m(3, 2));
  CHECK(cf_limit(f) == ExtendedLimit::finite(2));
  CHECK(cf_limit(m(1, 1)).is_zero());
  CHECK(cf_limit(m(1, -1)).is_infinite());
  CHECK(cf_limit(m(5, 0)) == ExtendedLimit::finite(5));
  CHECK(cf_limit(ComparableFn::zero()).is_zero());
}

TEST_CASE("leading term of the two-sided normalization") {
  // 2(e^a + e^b) / (e (e^a + 2 e^b)) for a = b, a > b, b > a
  auto v = [](Rational a, Rational b) { return m(2, 0) * (m(1, a) + m(1, b)) / (m(1, 1) * (m(1, a) + m(2, b))); };
  CHECK(cf_leading(v(1, 1)) == Monomial{Rational(4, 3), -1, 0, 0});
  CHECK(cf_leading(v(1, 0)) == Monomial{1, -1, 0, 0});
  CHECK(cf_leading(v(0, 1)) == Monomial{2, -1, 0, 0});
}

TEST_CASE("cancellation is exact") {
  auto one_minus = m(1, 0) - m(1, 1);
  auto f = one_minus + m(1, 1);
  CHECK(cf_equal(f, m(1, 0)));
  CHECK((m(1, 1) - m(1, 1)).is_zero());
  // 1 - p_ii where the loop is 1 - e/2 - e^2/2
  auto loop = m(1, 0) - m(Rational(1, 2), 1) - m(Rational(1, 2), 2);
  auto out = m(1, 0) - loop;
  CHECK(cf_leading(out) == Monomial{Rational(1, 2), 1, 0, 0});
}

TEST_CASE("evaluation agrees with the closed form") {
  auto f = (m(1, 0) + m(2, 1)) / (m(1, 0) + m(1, 2));
  for (double e : {1.0, 0.5, 0.01}) CHECK(cf_eval(f, e) == doctest::Approx((1 + 2 * e) / (1 + e * e)).epsilon(1e-14));
  auto g = m(1, 0, 1, 0);
  CHECK(cf_eval(g, 0.5) == doctest::Approx(std::exp(-2.0)));
  auto h = m(1, 0, 0, 1);
  CHECK(cf_eval(h, 0.1) == doctest::Approx(1.0 / (1 + std::log(10.0))));
}

TEST_CASE("canonical form is idempotent and value preserving") {
  auto f = (m(1, 0) - m(1, 1)) / (m(1, 0) + m(1, 1)) * (m(3, 0) + m(1, 2)) / (m(1, 0) - m(1, 1));
  auto c1 = canonicalize(f);
  auto c2 = canonicalize(c1);
  CHECK(c1.same_form(c2));
  CHECK(cf_equal(c1, f));
  CHECK(cf_eval(c1, 0.3) == doctest::Approx(cf_eval(f, 0.3)).epsilon(1e-13));
}

TEST_CASE("positivity and families") {
  CHECK(cf_positive(m(1, 1)));
  CHECK_FALSE(cf_positive(m(-1, 1)));
  CHECK_FALSE(cf_positive(m(1, 1) - m(1, 0)));
  CHECK(fits_family(m(1, Rational(1, 2)), Family::H1));
  CHECK_FALSE(fits_family(m(1, 0, 1), Family::H1));
  CHECK(fits_family(m(1, 1, 1), Family::H2));
  CHECK(fits_family(m(1, 1, 0, 1), Family::H3));
  CHECK_FALSE(fits_family(m(1, 1, 0, 1), Family::H2));
}

TEST_CASE("division by zero is rejected") { CHECK_THROWS(m(1, 0) / ComparableFn::zero()); }
