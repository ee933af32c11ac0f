#include "hitsm/laplace.hpp"

#include <doctest.h>

#include <cmath>

using namespace hitsm;

TEST_CASE("atom transforms") {
  CHECK(lt_eval(lt_dirac(2), 0.5) == doctest::Approx(std::exp(-1.0)));
  CHECK(lt_eval(lt_exponential(2), 0.5) == doctest::Approx(0.5));
  CHECK(lt_eval(lt_uniform(2), 0.5) == doctest::Approx((1 - std::exp(-1.0)) / 1.0));
  CHECK(lt_eval(lt_uniform(2), 0.0) == doctest::Approx(1.0));
  CHECK(lt_mean(lt_uniform(3)) == Rational(3, 2));
  CHECK(lt_mean(lt_exponential(Rational(2, 3))) == Rational(2, 3));
}

TEST_CASE("geometric sum of a half-weighted Dirac") {
  // loop and exit Dirac(1/2), loop probability 1/2 -> (1/2 e^{-s/2}) / (1 - 1/2 e^{-s/2})
  auto g = lt_geometric(Rational(1, 2), lt_dirac(Rational(1, 2)), lt_dirac(Rational(1, 2)));
  for (double s : {0.0, 0.5, 1.0, 2.0}) {
    double x = 0.5 * std::exp(-s / 2);
    CHECK(lt_eval(g, s) == doctest::Approx(x / (1 - x)).epsilon(1e-14));
  }
  CHECK(lt_mass(g) == 1);
  // mean: number of legs is geometric with mean 2, each 1/2 long
  CHECK(lt_mean(g) == 1);
}

TEST_CASE("geometric of identical exponentials folds") {
  auto g = lt_geometric(Rational(3, 4), lt_exp_limit(1), lt_exp_limit(1));
  auto c = lt_canonical(g);
  CHECK(c.kind() == LaplaceNode::Kind::ExponentialLimit);
  CHECK(c.node().mean == 4);
  CHECK(lt_eval(c, 1.0) == doctest::Approx(lt_eval(g, 1.0)).epsilon(1e-14));
}

TEST_CASE("exponential atoms canonicalize to the limit form") {
  CHECK(lt_equal(lt_exponential(1), lt_exp_limit(1)));
  CHECK(lt_equal(lt_scale(2, lt_exponential(Rational(1, 2))), lt_exp_limit(1)));
  CHECK_FALSE(lt_equal(lt_exponential(2), lt_exp_limit(1)));
}

TEST_CASE("mixtures merge equal branches in any order") {
  auto a = lt_mixture({{Rational(1, 4), lt_dirac(0)}, {Rational(1, 2), lt_exp_limit(1)}, {Rational(1, 4), lt_dirac(0)}});
  auto b = lt_mixture({{Rational(1, 2), lt_exponential(1)}, {Rational(1, 2), lt_dirac(0)}});
  CHECK(lt_equal(a, b));
  CHECK(lt_eval(a, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(lt_has_zero_atom(a));
  CHECK_FALSE(lt_has_zero_atom(lt_exp_limit(1)));
}

TEST_CASE("scale by zero collapses to a mass at zero") {
  auto x = lt_canonical(lt_scale(0, lt_mixture({{Rational(2, 3), lt_exp_limit(5)}})));
  CHECK(lt_mass(x) == Rational(2, 3));
  CHECK(lt_mean(x) == 0);
  CHECK(lt_eval(x, 3.0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("convolution merges Dirac shifts and pulls out weights") {
  auto x = lt_convolution({lt_dirac(1), lt_mixture({{Rational(1, 2), lt_exp_limit(1)}}), lt_dirac(2)});
  auto c = lt_canonical(x);
  CHECK(lt_mass(c) == Rational(1, 2));
  CHECK(lt_mean(c) == Rational(1, 2) * 4);
  for (double s : {0.25, 1.0}) CHECK(lt_eval(c, s) == doctest::Approx(0.5 * std::exp(-3 * s) / (1 + s)));
  CHECK(lt_canonical(lt_convolution({lt_zero(), lt_dirac(1)})).node().branches.empty());
}

TEST_CASE("canonical form is idempotent") {
  auto x = lt_mixture({{Rational(1, 3), lt_geometric(Rational(1, 2), lt_scale(2, lt_uniform(1)), lt_exponential(3))},
                       {Rational(2, 3), lt_convolution({lt_dirac(1), lt_scale(Rational(1, 2), lt_exp_limit(2))})}});
  auto c = lt_canonical(x);
  CHECK(lt_to_json(lt_canonical(c)) == lt_to_json(c));
  for (double s : {0.0, 0.7, 3.0}) CHECK(lt_eval(c, s) == doctest::Approx(lt_eval(x, s)).epsilon(1e-13));
  CHECK(lt_mean(c) == lt_mean(x));
}

TEST_CASE("json round trip") {
  auto x = lt_mixture({{Rational(1, 3), lt_geometric(Rational(1, 2), lt_uniform(1), lt_dirac(2))},
                       {Rational(2, 3), lt_convolution({lt_exp_limit(1), lt_scale(Rational(1, 2), lt_exponential(2))})}});
  auto y = lt_from_json(lt_to_json(x));
  CHECK(lt_to_json(y) == lt_to_json(x));
}

TEST_CASE("removing a virtual loop") {
  // limit loop probability 1 turns into an exponential with the loop mean
  Rational e = 3;
  auto r = lt_remove_virtual(1, lt_dirac(1), lt_dirac(1), &e);
  CHECK(lt_equal(r, lt_exp_limit(3)));
  CHECK_THROWS_AS(lt_remove_virtual(1, lt_dirac(1), lt_dirac(1), nullptr), PreconditionError);
  CHECK(lt_equal(lt_remove_virtual(0, lt_dirac(1), lt_uniform(2), nullptr), lt_uniform(2)));
  auto g = lt_remove_virtual(Rational(1, 2), lt_dirac(1), lt_dirac(1), nullptr);
  CHECK(lt_mass(g) == 1);
  CHECK(lt_mean(g) == 1);
}

TEST_CASE("mean matches a finite difference") {
  auto x = lt_mixture({{Rational(1, 2), lt_geometric(Rational(1, 3), lt_uniform(2), lt_exp_limit(1))},
                       {Rational(1, 2), lt_convolution({lt_dirac(1), lt_exponential(Rational(1, 2))})}});
  Real h("1e-20");
  Real fd = (to_real(lt_mass(x)) - lt_eval(x, h)) / h;
  CHECK(to_double(abs(fd - to_real(lt_mean(x)))) < 1e-15);
}

TEST_CASE("pretty printing") {
  CHECK(lt_pretty(lt_exp_limit(1)) == "1/(1+s)");
  CHECK(lt_pretty(lt_canonical(lt_exponential(1))) == "1/(1+s)");
}
