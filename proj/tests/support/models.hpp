#pragma once

#include "hitsm/model.hpp"

#include <random>

namespace testsupport {

using hitsm::AtomKind;
using hitsm::ComparableFn;
using hitsm::Monomial;
using hitsm::Rational;
using hitsm::SemiMarkovModel;
using hitsm::TimeSpec;

inline Monomial mono(Rational a, Rational b = 0) { return Monomial{a, b, 0, 0}; }
inline ComparableFn cf(Rational a, Rational b = 0) { return ComparableFn::monomial(mono(a, b)); }

inline TimeSpec dirac_time(ComparableFn scale, Rational limit) {
  return TimeSpec{AtomKind::Dirac, std::move(scale), {AtomKind::Dirac, limit}, limit};
}

// Three states, D = {3}:
//   row 1: 1 - e^a/2 - e^b/2, e^a/2, e^b/2   with Dirac(e^-g) times, v_1 = e^-g
//   row 2: e/2, 1 - e, e/2                  with Dirac(1) times,    v_2 = 1
inline SemiMarkovModel three_state(Rational alpha, Rational beta, Rational gamma, bool allow_zero_mass = true) {
  SemiMarkovModel m;
  m.states = {"1", "2", "3"};
  m.in_domain = {false, false, true};
  m.allow_zero_mass = allow_zero_mass;
  m.p = hitsm::make_matrix<ComparableFn>(3);
  m.times = hitsm::make_matrix<std::optional<TimeSpec>>(3);
  m.v.assign(3, std::nullopt);

  ComparableFn slow = cf(1, -gamma);
  ComparableFn p11 = cf(1) - cf(Rational(1, 2), alpha) - cf(Rational(1, 2), beta);
  if (!p11.is_zero()) {
    m.p[0][0] = p11;
    m.times[0][0] = dirac_time(slow, 1);
  }
  m.p[0][1] = cf(Rational(1, 2), alpha);
  m.p[0][2] = cf(Rational(1, 2), beta);
  m.times[0][1] = dirac_time(slow, 1);
  m.times[0][2] = dirac_time(slow, 1);
  m.v[0] = slow;

  m.p[1][0] = cf(Rational(1, 2), 1);
  m.p[1][1] = cf(1) - cf(1, 1);
  m.p[1][2] = cf(Rational(1, 2), 1);
  for (int j = 0; j < 3; ++j) m.times[1][j] = dirac_time(cf(1), 1);
  m.v[1] = cf(1);

  hitsm::synthesize_domain_rows(m);
  return m;
}

// Random model with 4..6 states, one or two of them in D. Every exterior state
// can reach D along k -> k+1 -> ... and rows are normalized weights, so the
// model is stochastic by construction. Row i shares one time order e^-g_i.
inline SemiMarkovModel random_model(std::mt19937_64& g) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(g); };
  const Rational exits[] = {0, Rational(1, 2), 1, 2};
  const Rational loops[] = {-1, 0, 1};
  const Rational orders[] = {0, Rational(1, 2), 1};
  const Rational coefs[] = {Rational(1, 2), 1, 2};
  const AtomKind kinds[] = {AtomKind::Dirac, AtomKind::Exponential, AtomKind::Uniform};

  const int n = 4 + pick(3);
  const int d = 1 + pick(2);
  SemiMarkovModel m;
  for (int i = 0; i < n; ++i) {
    m.states.push_back("s" + std::to_string(i));
    m.in_domain.push_back(i >= n - d);
  }
  m.p = hitsm::make_matrix<ComparableFn>(n);
  m.times = hitsm::make_matrix<std::optional<TimeSpec>>(n);
  m.v.assign(n, std::nullopt);

  for (int i = 0; i < n - d; ++i) {
    std::vector<std::pair<int, Monomial>> w;
    for (int j = 0; j < n; ++j) {
      bool chain = j == i + 1;
      if (!chain && !std::bernoulli_distribution(0.4)(g)) continue;
      Rational b = j == i ? loops[pick(3)] : exits[pick(4)];
      w.emplace_back(j, mono(1 + pick(3), b));
    }
    hitsm::Posynomial total;
    for (auto& [j, x] : w) total.push_back(x);
    Rational gi = orders[pick(3)];
    for (auto& [j, x] : w) {
      m.p[i][j] = ComparableFn::ratio({x}, total);
      AtomKind k = kinds[pick(3)];
      Rational c = coefs[pick(3)];
      hitsm::LaplaceAtom atom{k, c};
      m.times[i][j] = TimeSpec{k, cf(c, -gi), atom, atom.mean()};
    }
    m.v[i] = cf(1, -gi);
  }
  hitsm::synthesize_domain_rows(m);
  return m;
}

}  // namespace testsupport
