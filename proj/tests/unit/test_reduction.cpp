#include "hitsm/reduction.hpp"
#include "support/models.hpp"

#include <doctest.h>

#include <random>

using namespace hitsm;
using testsupport::cf;

TEST_CASE("removing virtual transitions on the worked example") {
  auto m = testsupport::three_state(1, 0, 0);
  StepState s = remove_virtual(initial_state(m));
  CHECK(s.p[0][0].is_zero());
  CHECK(s.p[1][1].is_zero());
  // row 2 loses 1 - e, leaving 1/2, 1/2
  CHECK(cf_equal(s.p[1][0], ComparableFn::constant(Rational(1, 2))));
  CHECK(cf_equal(s.p[1][2], ComparableFn::constant(Rational(1, 2))));
  CHECK(cf_leading(s.v[1]) == Monomial{1, -1, 0, 0});
  // row 1: e/(1+e) and 1/(1+e)
  CHECK(s.p0[0][1] == 0);
  CHECK(s.p0[0][2] == 1);
  CHECK(cf_limit(s.v[0]) == ExtendedLimit::finite(2));
  // the loop of state 2 is driven to probability one: limit exit time is exponential
  CHECK(lt_equal(*s.phi0[1][2], lt_exp_limit(1)));
  CHECK(rows_stochastic(s));
}

TEST_CASE("least absorbing state and exclusion") {
  auto m = testsupport::three_state(1, 0, 0);
  StepState s = remove_virtual(initial_state(m));
  CHECK(select_least_absorbing(s) == 0);
  CHECK_THROWS_AS(exclude_state(s, 1), PreconditionError);
  CHECK_THROWS_AS(exclude_state(s, 2), PreconditionError);
  StepState x = exclude_state(s, 0);
  CHECK(x.alive == std::vector<int>{1});
  CHECK(rows_stochastic(x));
  // 2 -> 1 -> 2 becomes a loop of probability p21 p12
  ComparableFn loop = s.p[1][0] * s.p[0][1];
  CHECK(cf_equal(x.p[1][1], loop));
  CHECK(cf_equal(x.p[1][2], s.p[1][2] + s.p[1][0] * s.p[0][2]));
}

TEST_CASE("exclusion needs virtual transitions removed") {
  auto m = testsupport::three_state(1, 0, 0);
  CHECK_THROWS_AS(exclude_state(initial_state(m), 0), PreconditionError);
}

TEST_CASE("trace bookkeeping") {
  auto m = testsupport::three_state(1, 0, 0);
  ReductionTrace t = reduce(m);
  CHECK(t.exclusion_order == std::vector<int>{0});
  CHECK(t.final_state == 1);
  REQUIRE(t.steps.size() == 2);
  CHECK(t.steps[0].excluded == -1);
  CHECK(t.steps[1].excluded == 0);
  REQUIRE(t.steps[1].w_limits.size() == 1);
  CHECK(t.steps[1].w_limits[0].first == 1);
  CHECK(t.steps[1].w_limits[0].second.is_zero());
  CHECK(t.steps[1].least_absorbing == std::vector<int>{0});
  CHECK(t.steps[0].least_absorbing.empty());
  for (const auto& st : t.steps) {
    CHECK(rows_stochastic(st.before));
    CHECK(rows_stochastic(st.after));
  }
  auto j = trace_to_json(t, m);
  CHECK(j["exclusion_order"].size() == 1);
  CHECK(j["steps"].size() == 2);
}

TEST_CASE("the slow first state flips the exclusion order") {
  // gamma = 1/2 makes state 1 slower than state 2
  auto m = testsupport::three_state(1, 1, Rational(1, 2));
  ReductionTrace t = reduce(m);
  CHECK(t.exclusion_order == std::vector<int>{1});
  CHECK(t.final_state == 0);
}

TEST_CASE("a model without exterior states cannot be reduced") {
  auto m = testsupport::three_state(1, 0, 0);
  m.in_domain = {true, true, true};
  synthesize_domain_rows(m);
  CHECK_THROWS_AS(reduce(m), PreconditionError);
}

TEST_CASE("random models reduce to one state with stochastic rows") {
  std::mt19937_64 g(11);
  for (int k = 0; k < 40; ++k) {
    auto m = testsupport::random_model(g);
    REQUIRE(validate_model(m).all_pass());
    ReductionTrace t = reduce(m);
    CHECK(t.exclusion_order.size() + 1 == m.exterior().size());
    CHECK(t.steps.back().after.alive.size() == 1);
    for (const auto& st : t.steps) CHECK(rows_stochastic(st.after));
  }
}
