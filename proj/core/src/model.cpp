#include "hitsm/model.hpp"

#include <queue>

namespace hitsm {

std::vector<int> SemiMarkovModel::domain() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (in_domain[i]) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> SemiMarkovModel::exterior() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (!in_domain[i]) out.push_back(static_cast<int>(i));
  return out;
}

int SemiMarkovModel::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < size(); ++i)
    if (states[i] == label) return static_cast<int>(i);
  return -1;
}

void synthesize_domain_rows(SemiMarkovModel& m) {
  auto dom = m.domain();
  if (dom.empty()) return;
  ComparableFn share = ComparableFn::constant(Rational(1, static_cast<long>(dom.size())));
  for (int i : dom) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      m.p[i][j] = ComparableFn::zero();
      m.times[i][j].reset();
    }
    for (int j : dom) {
      m.p[i][j] = share;
      m.times[i][j] = TimeSpec{};
    }
    m.v[i] = ComparableFn::constant(1);
  }
  m.interior_rows = false;
}

std::vector<const ConditionEntry*> ConditionReport::entries() const {
  return {&condition_A, &condition_B, &condition_Db, &condition_D, &stochastic_rows, &normalization, &family_membership};
}

bool ConditionReport::all_pass() const {
  for (auto* e : entries())
    if (!e->pass) return false;
  return true;
}

bool ConditionReport::structural_pass() const {
  for (auto* e : entries())
    if (e != &condition_D && !e->pass) return false;
  return true;
}

namespace {

void fail(ConditionEntry& e, std::string witness) {
  e.pass = false;
  e.witnesses.push_back(std::move(witness));
}

std::string edge(const SemiMarkovModel& m, std::size_t i, std::size_t j) {
  return m.states[i] + "->" + m.states[j];
}

// Positive on (0,1); a zero at eps = 1 is tolerated (1 - eps style rows).
bool positive_inside(const ComparableFn& f) {
  if (f.is_zero() || f.lead().a <= 0) return false;
  for (const char* e : {"0.5", "0.1", "0.01", "0.001"})
    if (cf_eval(f, Real(e)) <= 0) return false;
  return cf_eval(f, Real(1)) >= 0;
}

// The limit law implied by the sampler after dividing by v_i.
std::optional<LaplaceAtom> implied_atom(const TimeSpec& t, const ComparableFn& v) {
  ExtendedLimit r = cf_limit(t.scale / v);
  if (r.is_infinite()) return std::nullopt;
  Rational a = r.finite_value();
  if (a == 0 && t.sampler != AtomKind::Dirac) return std::nullopt;
  return LaplaceAtom{t.sampler, a};
}

}  // namespace

ConditionReport validate_model(const SemiMarkovModel& m) {
  ConditionReport r;
  const std::size_t n = m.size();
  const std::vector<double> grid{1.0, 0.5, 0.1, 0.01, 0.001};

  for (std::size_t i = 0; i < n; ++i) {
    ComparableFn row;
    for (std::size_t j = 0; j < n; ++j) row = row + m.p[i][j];
    if (!cf_equal(row, ComparableFn::constant(1))) fail(r.stochastic_rows, "row " + m.states[i] + " sums to " + to_string(canonicalize(row)));
  }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto& f = m.p[i][j];
      if (f.is_zero()) {
        if (m.times[i][j]) fail(r.condition_Db, edge(m, i, j) + " has a time law but zero probability");
        continue;
      }
      if (!positive_inside(f)) fail(r.condition_Db, edge(m, i, j) + " not positive on (0,1)");
      if (!m.times[i][j]) fail(r.condition_Db, edge(m, i, j) + " has no time law");
      if (!fits_family(f, m.family)) fail(r.family_membership, "p " + edge(m, i, j));
    }

  // Reachability of D against the reversed support graph.
  std::vector<bool> reach(n, false);
  std::queue<std::size_t> q;
  for (std::size_t j = 0; j < n; ++j)
    if (m.in_domain[j]) {
      reach[j] = true;
      q.push(j);
    }
  while (!q.empty()) {
    std::size_t j = q.front();
    q.pop();
    for (std::size_t i = 0; i < n; ++i)
      if (!reach[i] && !m.p[i][j].is_zero()) {
        reach[i] = true;
        q.push(i);
      }
  }
  if (m.domain().empty()) fail(r.condition_B, "domain is empty");
  for (std::size_t i = 0; i < n; ++i)
    if (!reach[i]) fail(r.condition_B, m.states[i]);

  for (std::size_t i = 0; i < n; ++i) {
    bool exterior = !m.in_domain[i];
    if (!exterior && !m.interior_rows) continue;
    if (!m.v[i]) {
      fail(r.normalization, m.states[i] + " has no normalization");
      continue;
    }
    const auto& v = *m.v[i];
    if (!fits_family(v, m.family)) fail(r.family_membership, "v " + m.states[i]);
    bool ok = positive_inside(v);
    for (double e : grid) {
      if (!ok) break;
      ok = cf_eval(v, e) >= 1.0 - 1e-12;
    }
    if (!ok) fail(r.normalization, m.states[i] + " normalization below 1");

    bool all_zero = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (!m.times[i][j] || m.p[i][j].is_zero()) continue;
      const auto& t = *m.times[i][j];
      if (!fits_family(t.scale, m.family)) fail(r.family_membership, "scale " + edge(m, i, j));
      if (!positive_inside(t.scale)) fail(r.condition_Db, edge(m, i, j) + " time scale not positive");
      if (t.limit_atom.has_mass_at_zero()) {
        if (!m.allow_zero_mass) fail(r.condition_A, edge(m, i, j) + " limit law concentrated at zero");
      } else {
        all_zero = false;
      }
      if (t.limit_mean != t.limit_atom.mean())
        fail(r.condition_D, edge(m, i, j) + " limit mean " + to_string(t.limit_mean) + " differs from atom mean " +
                                to_string(t.limit_atom.mean()));
      auto implied = implied_atom(t, v);
      if (!implied || !(*implied == t.limit_atom))
        fail(r.condition_D, edge(m, i, j) + " limit atom disagrees with the sampler scaled by v");
    }
    if (all_zero && m.allow_zero_mass) fail(r.condition_A, m.states[i] + " has only zero-time exits");
  }
  return r;
}

}  // namespace hitsm
