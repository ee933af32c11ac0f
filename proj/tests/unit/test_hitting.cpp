#include "hitsm/hitting.hpp"
#include "support/models.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hitsm;

namespace {

HittingResult run(const SemiMarkovModel& m) { return analyze(reduce(m), m); }

}  // namespace

TEST_CASE("worked example with a fast first state") {
  auto m = testsupport::three_state(1, 0, 0);
  HittingResult r = run(m);
  CHECK(r.order == std::vector<int>{0, 1});
  const auto& e23 = r.at(1, 2);
  CHECK(lt_equal(e23.psi, lt_exp_limit(1)));
  CHECK(lt_pretty(e23.psi) == "1/(1+s)");
  CHECK(e23.hit_prob == 1);
  CHECK(e23.bar_E == 1);
  CHECK(e23.moment_match);
  const auto& e13 = r.at(0, 2);
  double x = 0.5 * std::exp(-0.5);
  CHECK(lt_eval(e13.psi, 1.0) == doctest::Approx(x / (1 - x)).epsilon(1e-13));
  CHECK(e13.bar_E == 1);
  CHECK(cf_leading(e13.bar_v) == Monomial{3, 0, 0, 0});
  CHECK(e13.E_check.kind == ScaledExpectation::Kind::Finite);
  CHECK(e13.E_check.value == Rational(3, 2));
  CHECK_FALSE(e13.moment_match);
  CHECK_FALSE(r.zero_mass_warning);
}

TEST_CASE("equal exponents give a half mass at zero") {
  auto m = testsupport::three_state(0, 0, 0);
  HittingResult r = run(m);
  auto want = lt_mixture({{Rational(1, 2), lt_dirac(0)}, {Rational(1, 2), lt_exp_limit(1)}});
  CHECK(lt_equal(r.at(0, 2).psi, want));
  CHECK(r.at(0, 2).E_check.value == Rational(1, 2));
  CHECK(cf_leading(r.at(1, 2).check_v) == Monomial{Rational(4, 3), -1, 0, 0});

  auto strict = testsupport::three_state(0, 0, 0, false);
  CHECK(run(strict).zero_mass_warning);
}

TEST_CASE("hitting probabilities sum to one over D") {
  std::mt19937_64 g(3);
  for (int k = 0; k < 30; ++k) {
    auto m = testsupport::random_model(g);
    ReductionTrace t = reduce(m);
    auto P = hitting_probabilities(t);
    for (int i : m.exterior()) {
      Rational sum = 0;
      for (int j : m.domain()) sum += P.at({i, j});
      CHECK(sum == 1);
    }
    HittingResult r = analyze(t, m);
    for (const auto& [key, e] : r.entries) CHECK(lt_mass(e.psi) == e.hit_prob);
  }
}

TEST_CASE("conditional law is normalized") {
  std::mt19937_64 g(5);
  auto m = testsupport::random_model(g);
  HittingResult r = run(m);
  for (const auto& [key, e] : r.entries) {
    auto c = r.conditional(e.i, e.j);
    CHECK(lt_mass(c) == 1);
  }
}

TEST_CASE("interior entries need author rows") {
  auto m = testsupport::three_state(1, 0, 0);
  ReductionTrace t = reduce(m);
  HittingResult r = hitting_summary(t, true);
  expectation_summary(t, r);
  CHECK_THROWS_AS(extend_to_interior(t, m, r), PreconditionError);
}

TEST_CASE("interior rows with two targets") {
  // D = {3, 4}; state 3 may step back into the exterior
  auto m = testsupport::three_state(1, 0, 0);
  m.states.push_back("4");
  m.in_domain.push_back(true);
  for (auto& row : m.p) row.emplace_back();
  for (auto& row : m.times) row.emplace_back();
  m.p.emplace_back(4);
  m.times.emplace_back(4);
  m.v.emplace_back();
  // 2 -> 4 shares the old 2 -> 3 mass
  m.p[1][2] = testsupport::cf(Rational(1, 4), 1);
  m.p[1][3] = testsupport::cf(Rational(1, 4), 1);
  m.times[1][3] = m.times[1][2];
  m.p[2] = {testsupport::cf(Rational(1, 2)), ComparableFn::zero(), ComparableFn::zero(), testsupport::cf(Rational(1, 2))};
  m.p[3] = {ComparableFn::zero(), ComparableFn::zero(), testsupport::cf(1), ComparableFn::zero()};
  for (auto& t : m.times[2]) t.reset();
  for (auto& t : m.times[3]) t.reset();
  m.times[2][0] = testsupport::dirac_time(testsupport::cf(1), 1);
  m.times[2][3] = testsupport::dirac_time(testsupport::cf(1), 1);
  m.times[3][2] = testsupport::dirac_time(testsupport::cf(1), 1);
  m.v[2] = testsupport::cf(1);
  m.v[3] = testsupport::cf(1);
  m.interior_rows = true;
  REQUIRE(validate_model(m).all_pass());

  HittingResult r = run(m);
  REQUIRE(r.has(2, 2));
  REQUIRE(r.has(2, 3));
  Rational total = r.at(2, 2).hit_prob + r.at(2, 3).hit_prob;
  CHECK(total == 1);
  for (const auto& w : r.interior) {
    Rational s = 0;
    for (const auto& [l, x] : w.u_dot) s += x;
    CHECK(s == 1);
    s = 0;
    for (const auto& [l, x] : w.u_ddot) s += x;
    CHECK(s == 1);
  }
  auto j = hitting_to_json(r, m);
  CHECK(j.contains("interior"));
}
