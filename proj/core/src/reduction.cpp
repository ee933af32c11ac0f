#include "hitsm/reduction.hpp"

#include <algorithm>

namespace hitsm {

using nlohmann::json;

PreLaw pre_sampler(AtomKind k, ComparableFn scale) {
  auto n = std::make_shared<PreLawNode>();
  n->kind = PreLawNode::Kind::Sampler;
  n->sampler = k;
  n->param = std::move(scale);
  return n;
}

PreLaw pre_geometric(ComparableFn p, PreLaw loop, PreLaw exit) {
  auto n = std::make_shared<PreLawNode>();
  n->kind = PreLawNode::Kind::Geometric;
  n->param = std::move(p);
  n->children = {std::move(loop), std::move(exit)};
  return n;
}

PreLaw pre_mixture(std::vector<std::pair<ComparableFn, PreLaw>> branches) {
  std::erase_if(branches, [](const auto& b) { return b.first.is_zero(); });
  if (branches.size() == 1) return branches[0].second;
  auto n = std::make_shared<PreLawNode>();
  n->kind = PreLawNode::Kind::Mixture;
  n->branches = std::move(branches);
  return n;
}

PreLaw pre_convolution(PreLaw a, PreLaw b) {
  auto n = std::make_shared<PreLawNode>();
  n->kind = PreLawNode::Kind::Convolution;
  n->children = {std::move(a), std::move(b)};
  return n;
}

bool StepState::is_alive(int i) const { return std::find(alive.begin(), alive.end(), i) != alive.end(); }

std::vector<int> StepState::columns() const {
  std::vector<int> c = alive;
  c.insert(c.end(), domain.begin(), domain.end());
  return c;
}

StepState initial_state(const SemiMarkovModel& m) {
  StepState s;
  s.n = m.size();
  s.alive = m.exterior();
  s.domain = m.domain();
  s.p = m.p;
  s.p0 = make_matrix<Rational>(s.n);
  s.phi0 = make_matrix<std::optional<LaplaceExpr>>(s.n);
  s.e0 = make_matrix<Rational>(s.n);
  s.law = make_matrix<PreLaw>(s.n);
  s.v.assign(s.n, ComparableFn::constant(1));
  for (std::size_t i = 0; i < s.n; ++i) {
    if (m.v[i]) s.v[i] = *m.v[i];
    for (std::size_t j = 0; j < s.n; ++j) {
      if (m.p[i][j].is_zero()) continue;
      if (!m.times[i][j]) throw PreconditionError("transition " + m.states[i] + "->" + m.states[j] + " has no time law");
      const TimeSpec& t = *m.times[i][j];
      s.p0[i][j] = cf_limit(m.p[i][j]).finite_value();
      s.phi0[i][j] = lt_atom(t.limit_atom);
      s.e0[i][j] = t.limit_mean;
      s.law[i][j] = pre_sampler(t.sampler, t.scale);
    }
  }
  return s;
}

StepState remove_virtual(const StepState& s) {
  StepState r = s;
  for (int i : s.alive) {
    const ComparableFn& pii = s.p[i][i];
    if (pii.is_zero()) continue;
    ComparableFn stay = ComparableFn::constant(1) - pii;
    if (stay.is_zero()) throw PreconditionError("degenerate row: the chain never leaves state " + std::to_string(i));
    const Rational& p0ii = s.p0[i][i];
    for (int j : s.columns()) {
      if (j == i || s.p[i][j].is_zero()) continue;
      r.p[i][j] = s.p[i][j] / stay;
      r.p0[i][j] = cf_limit(r.p[i][j]).finite_value();
      r.phi0[i][j] = lt_remove_virtual(p0ii, *s.phi0[i][i], *s.phi0[i][j], &s.e0[i][i]);
      r.e0[i][j] = p0ii == 1 ? s.e0[i][i] : Rational((1 - p0ii) * s.e0[i][j] + p0ii * s.e0[i][i]);
      r.law[i][j] = pre_geometric(pii, s.law[i][i], s.law[i][j]);
    }
    r.p[i][i] = ComparableFn::zero();
    r.p0[i][i] = 0;
    r.phi0[i][i].reset();
    r.e0[i][i] = 0;
    r.law[i][i].reset();
    r.v[i] = s.v[i] / stay;
  }
  return r;
}

namespace {

std::vector<int> least_absorbing_set(const StepState& s) {
  if (s.alive.empty()) throw PreconditionError("no exterior states left");
  int inc = s.alive.front();
  for (std::size_t n = 1; n < s.alive.size(); ++n) {
    int cand = s.alive[n];
    if (!cf_limit(s.v[cand] / s.v[inc]).is_infinite()) inc = cand;
  }
  std::vector<int> star;
  for (int i : s.alive)
    if (!cf_limit(s.v[i] / s.v[inc]).is_infinite()) star.push_back(i);
  return star;
}

}  // namespace

int select_least_absorbing(const StepState& s) { return least_absorbing_set(s).front(); }

StepState exclude_state(const StepState& s, int k) {
  if (!s.is_alive(k)) throw PreconditionError("state " + std::to_string(k) + " is not a surviving exterior state");
  if (!s.p[k][k].is_zero()) throw PreconditionError("virtual transitions must be removed before excluding a state");
  for (int i : s.alive)
    if (cf_limit(s.v[k] / s.v[i]).is_infinite())
      throw PreconditionError("state " + std::to_string(k) + " is not least absorbing (infinite ratio against " +
                              std::to_string(i) + ")");
  StepState r = s;
  std::erase(r.alive, k);
  for (int i : r.alive) {
    const Rational w = cf_limit(s.v[k] / s.v[i]).finite_value();
    const ComparableFn& pik = s.p[i][k];
    for (int j : r.columns()) {
      ComparableFn via = pik.is_zero() ? ComparableFn::zero() : pik * s.p[k][j];
      if (via.is_zero()) continue;
      const ComparableFn& direct = s.p[i][j];
      ComparableFn total = direct + via;
      Rational qhat = direct.is_zero() ? Rational(0) : cf_limit(direct / total).finite_value();
      LaplaceExpr through = lt_convolution({*s.phi0[i][k], lt_scale(w, *s.phi0[k][j])});
      Rational e_through = s.e0[i][k] + s.e0[k][j] * w;
      if (direct.is_zero()) {
        r.phi0[i][j] = through;
        r.e0[i][j] = e_through;
        r.law[i][j] = pre_convolution(s.law[i][k], s.law[k][j]);
      } else {
        if (qhat == 1)
          r.phi0[i][j] = s.phi0[i][j];
        else if (qhat == 0)
          r.phi0[i][j] = through;
        else
          r.phi0[i][j] = lt_mixture({{qhat, *s.phi0[i][j]}, {1 - qhat, through}});
        r.e0[i][j] = s.e0[i][j] * qhat + e_through * (1 - qhat);
        r.law[i][j] = pre_mixture({{direct, s.law[i][j]}, {via, pre_convolution(s.law[i][k], s.law[k][j])}});
      }
      r.p[i][j] = total;
      r.p0[i][j] = cf_limit(total).finite_value();
    }
  }
  for (std::size_t j = 0; j < s.n; ++j) {
    r.p[k][j] = r.p[j][k] = ComparableFn::zero();
    r.p0[k][j] = r.p0[j][k] = 0;
    r.phi0[k][j].reset();
    r.phi0[j][k].reset();
    r.e0[k][j] = r.e0[j][k] = 0;
    r.law[k][j].reset();
    r.law[j][k].reset();
  }
  return r;
}

bool rows_stochastic(const StepState& s) {
  for (int i : s.alive) {
    ComparableFn row;
    for (int j : s.columns()) row = row + s.p[i][j];
    if (!cf_equal(row, ComparableFn::constant(1))) return false;
  }
  return true;
}

ReductionTrace reduce(const SemiMarkovModel& m) {
  ReductionTrace t;
  t.initial = initial_state(m);
  if (t.initial.alive.empty()) throw PreconditionError("every state is in D; nothing to reduce");
  ReductionStep s0;
  s0.before = t.initial;
  try {
    s0.after = remove_virtual(s0.before);
  } catch (const PreconditionError& e) {
    throw PreconditionError(std::string("step 0: ") + e.what());
  }
  t.steps.push_back(std::move(s0));
  while (t.steps.back().after.alive.size() > 1) {
    const StepState& cur = t.steps.back().after;
    const std::size_t n = t.steps.size();
    try {
      ReductionStep st;
      st.least_absorbing = least_absorbing_set(cur);
      int k = st.least_absorbing.front();
      st.excluded = k;
      for (int i : cur.alive)
        if (i != k) st.w_limits.emplace_back(i, cf_limit(cur.v[k] / cur.v[i]));
      st.before = exclude_state(cur, k);
      st.qhat = make_matrix<std::optional<Rational>>(cur.n);
      for (int i : st.before.alive)
        for (int j : st.before.columns())
          if (!st.before.p[i][j].is_zero())
            st.qhat[i][j] = cur.p[i][j].is_zero() ? Rational(0) : cf_limit(cur.p[i][j] / st.before.p[i][j]).finite_value();
      st.after = remove_virtual(st.before);
      t.exclusion_order.push_back(k);
      t.steps.push_back(std::move(st));
    } catch (const PreconditionError& e) {
      throw PreconditionError("step " + std::to_string(n) + ": " + e.what());
    }
  }
  t.final_state = t.steps.back().after.alive.front();
  return t;
}

namespace {

json limit_json(const ExtendedLimit& l) {
  if (l.is_infinite()) return "inf";
  return to_string(l.finite_value());
}

}  // namespace

json step_state_to_json(const StepState& s, const SemiMarkovModel& m) {
  json j;
  json alive = json::array();
  for (int i : s.alive) alive.push_back(m.states[i]);
  j["alive"] = alive;
  json rows = json::array();
  for (int i : s.alive) {
    json row;
    row["state"] = m.states[i];
    row["v"] = to_string(s.v[i]);
    json entries = json::array();
    for (int c : s.columns()) {
      if (s.p[i][c].is_zero()) continue;
      entries.push_back(json{{"to", m.states[c]},
                             {"p", to_string(s.p[i][c])},
                             {"p0", to_string(s.p0[i][c])},
                             {"phi0", lt_to_json(lt_canonical(*s.phi0[i][c]))},
                             {"phi0_pretty", lt_pretty(lt_canonical(*s.phi0[i][c]))},
                             {"e0", to_string(s.e0[i][c])}});
    }
    row["transitions"] = entries;
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

json trace_to_json(const ReductionTrace& t, const SemiMarkovModel& m) {
  json j;
  json order = json::array();
  for (int k : t.exclusion_order) order.push_back(m.states[k]);
  j["exclusion_order"] = order;
  j["final_state"] = m.states[t.final_state];
  json steps = json::array();
  for (std::size_t n = 0; n < t.steps.size(); ++n) {
    const auto& st = t.steps[n];
    json sj;
    sj["index"] = n;
    if (st.excluded >= 0) {
      sj["excluded"] = m.states[st.excluded];
      json ws = json::object();
      for (const auto& [i, l] : st.w_limits) ws[m.states[i]] = limit_json(l);
      sj["w_limits"] = ws;
      json la = json::array();
      for (int i : st.least_absorbing) la.push_back(m.states[i]);
      sj["least_absorbing"] = la;
      json qs = json::array();
      for (int i : st.before.alive)
        for (int c : st.before.columns())
          if (st.qhat[i][c]) qs.push_back(json{{"from", m.states[i]}, {"to", m.states[c]}, {"qhat", to_string(*st.qhat[i][c])}});
      sj["qhat"] = qs;
      sj["after_exclusion"] = step_state_to_json(st.before, m);
    }
    sj["after_removal"] = step_state_to_json(st.after, m);
    steps.push_back(sj);
  }
  j["steps"] = steps;
  return j;
}

}  // namespace hitsm
