#include "hitsm/hitting.hpp"

#include "hitsm/model_io.hpp"

namespace hitsm {

using nlohmann::json;

std::string ScaledExpectation::str() const {
  switch (kind) {
    case Kind::Finite: return to_string(value);
    case Kind::Infinite: return "inf";
    case Kind::Indeterminate: return "indeterminate";
  }
  return "?";
}

const HittingEntry& HittingResult::at(int i, int j) const {
  auto it = entries.find({i, j});
  if (it == entries.end()) throw std::out_of_range("no hitting entry for the requested pair");
  return it->second;
}

LaplaceExpr HittingResult::conditional(int i, int j) const {
  const HittingEntry& e = at(i, j);
  if (e.hit_prob > 0) return lt_canonical(lt_mixture({{Rational(1 / e.hit_prob), e.psi}}));
  std::vector<std::pair<Rational, LaplaceExpr>> all;
  for (int d : targets)
    if (has(i, d) && at(i, d).hit_prob > 0) all.emplace_back(Rational(1), at(i, d).psi);
  return lt_canonical(lt_mixture(std::move(all)));
}

namespace {

// Position n (1-based) of each exterior state in k_1..k_m, and the state after
// removal in which k_n is the next to go.
struct Backward {
  std::vector<int> order;
  const ReductionTrace* t;

  explicit Backward(const ReductionTrace& tr) : t(&tr) {
    order = tr.exclusion_order;
    order.push_back(tr.final_state);
  }
  std::size_t m() const { return order.size(); }
  int k(std::size_t n) const { return order[n - 1]; }
  const StepState& stage(std::size_t n) const { return t->steps[n - 1].after; }
};

void flag_zero_mass(HittingResult& r, const HittingEntry& e, bool allow_zero_mass) {
  if (!allow_zero_mass && e.hit_prob > 0 && lt_has_zero_atom(e.psi)) r.zero_mass_warning = true;
}

}  // namespace

std::map<std::pair<int, int>, Rational> hitting_probabilities(const ReductionTrace& t) {
  Backward b(t);
  std::map<std::pair<int, int>, Rational> P;
  const auto& D = t.initial.domain;
  for (std::size_t n = b.m(); n >= 1; --n) {
    const StepState& R = b.stage(n);
    int k = b.k(n);
    for (int j : D) {
      Rational v = R.p0[k][j];
      for (std::size_t l = n + 1; l <= b.m(); ++l) v += R.p0[k][b.k(l)] * P[{b.k(l), j}];
      P[{k, j}] = v;
    }
  }
  return P;
}

HittingResult hitting_summary(const ReductionTrace& t, bool allow_zero_mass) {
  Backward b(t);
  HittingResult r;
  r.order = b.order;
  r.targets = t.initial.domain;
  auto P = hitting_probabilities(t);
  std::map<int, ComparableFn> check;

  for (std::size_t n = b.m(); n >= 1; --n) {
    const StepState& R = b.stage(n);
    int k = b.k(n);

    std::optional<ComparableFn> best;
    int sw = static_cast<int>(n);
    for (std::size_t l = b.m(); l > n; --l) {
      int kl = b.k(l);
      if (R.p0[k][kl] == 0) continue;
      if (!best || cf_limit(check[kl] / *best).is_infinite()) {
        best = check[kl];
        sw = static_cast<int>(l);
      }
    }
    if (!best || cf_limit(R.v[k] / *best).is_infinite()) {
      best = R.v[k];
      sw = static_cast<int>(n);
    }
    check[k] = *best;
    Rational c0 = cf_limit(R.v[k] / *best).finite_value();

    for (int j : r.targets) {
      std::vector<std::pair<Rational, LaplaceExpr>> br;
      if (R.p0[k][j] > 0) br.emplace_back(R.p0[k][j], lt_scale(c0, *R.phi0[k][j]));
      for (std::size_t l = n + 1; l <= b.m(); ++l) {
        int kl = b.k(l);
        if (R.p0[k][kl] == 0 || P[{kl, j}] == 0) continue;
        Rational cl = cf_limit(check[kl] / *best).finite_value();
        const LaplaceExpr& inner = r.entries.at({kl, j}).psi;
        br.emplace_back(R.p0[k][kl], lt_convolution({lt_scale(c0, *R.phi0[k][kl]), lt_scale(cl, inner)}));
      }
      HittingEntry e;
      e.i = k;
      e.j = j;
      e.psi = lt_canonical(lt_mixture(std::move(br)));
      e.hit_prob = P[{k, j}];
      if (lt_mass(e.psi) != e.hit_prob) throw std::logic_error("transform mass disagrees with the hitting probability");
      e.check_v = *best;
      e.switch_index = sw;
      flag_zero_mass(r, e, allow_zero_mass);
      r.entries[{k, j}] = std::move(e);
    }
  }
  return r;
}

namespace {

void finish_expectation(HittingEntry& e) {
  e.bar_over_check = cf_limit(e.bar_v / e.check_v);
  if (e.bar_over_check.is_infinite()) {
    e.E_check.kind = e.bar_E == 0 ? ScaledExpectation::Kind::Indeterminate : ScaledExpectation::Kind::Infinite;
    e.moment_match = false;
    return;
  }
  Rational ratio = e.bar_over_check.finite_value();
  e.E_check.kind = ScaledExpectation::Kind::Finite;
  e.E_check.value = e.bar_E * ratio;
  e.moment_match = ratio > 0 && lt_mean(e.psi) == e.E_check.value;
}

}  // namespace

void expectation_summary(const ReductionTrace& t, HittingResult& r) {
  Backward b(t);
  auto P = hitting_probabilities(t);
  std::map<int, ComparableFn> barv;
  std::map<std::pair<int, int>, Rational> barE;
  for (std::size_t n = b.m(); n >= 1; --n) {
    const StepState& R = b.stage(n);
    int k = b.k(n);
    ComparableFn v = R.v[k];
    for (std::size_t l = n + 1; l <= b.m(); ++l) {
      int kl = b.k(l);
      if (!R.p[k][kl].is_zero()) v = v + barv[kl] * R.p[k][kl];
    }
    barv[k] = v;
    std::vector<std::pair<int, Rational>> u;
    Rational own = 1;
    for (std::size_t l = n + 1; l <= b.m(); ++l) {
      int kl = b.k(l);
      if (R.p[k][kl].is_zero()) continue;
      Rational w = cf_limit(barv[kl] * R.p[k][kl] / v).finite_value();
      u.emplace_back(kl, w);
      own -= w;
    }
    for (int j : r.targets) {
      Rational local = R.e0[k][j] * R.p0[k][j];
      for (std::size_t l = n + 1; l <= b.m(); ++l) {
        int kl = b.k(l);
        local += R.e0[k][kl] * R.p0[k][kl] * P[{kl, j}];
      }
      Rational val = own * local;
      for (const auto& [kl, w] : u) val += w * barE[{kl, j}];
      barE[{k, j}] = val;
      HittingEntry& e = r.entries.at({k, j});
      e.bar_v = v;
      e.bar_E = val;
      e.u_bar = u;
      finish_expectation(e);
    }
  }
}

void extend_to_interior(const ReductionTrace& t, const SemiMarkovModel& m, HittingResult& r) {
  if (!m.interior_rows)
    throw PreconditionError("missing interior data: the model has only synthesized rows for states in D");
  const StepState& S = t.initial;
  const auto& ext = S.alive;
  for (int rr : S.domain) {
    ComparableFn vdd = S.v[rr];
    for (int k : ext)
      if (!S.p[rr][k].is_zero()) vdd = vdd + r.at(k, r.targets.front()).bar_v * S.p[rr][k];
    std::vector<std::pair<int, Rational>> uu;
    Rational own_dd = 1;
    for (int k : ext) {
      if (S.p[rr][k].is_zero()) continue;
      Rational w = cf_limit(r.at(k, r.targets.front()).bar_v * S.p[rr][k] / vdd).finite_value();
      uu.emplace_back(k, w);
      own_dd -= w;
    }

    for (int j : r.targets) {
      std::vector<int> Dij;
      for (int l : ext)
        if (S.p0[rr][l] > 0 && r.at(l, j).hit_prob > 0) Dij.push_back(l);
      ComparableFn vd = S.v[rr];
      for (int l : Dij) vd = vd + r.at(l, j).check_v;
      Rational u_own = cf_limit(S.v[rr] / vd).finite_value();

      InteriorWeights iw;
      iw.r = rr;
      iw.j = j;
      iw.dot_v = vd;
      iw.u_dot.emplace_back(rr, u_own);
      std::vector<std::pair<Rational, LaplaceExpr>> br;
      if (S.p0[rr][j] > 0) br.emplace_back(S.p0[rr][j], lt_scale(u_own, *S.phi0[rr][j]));
      Rational prob = S.p0[rr][j];
      for (int l : Dij) {
        Rational ul = cf_limit(r.at(l, j).check_v / vd).finite_value();
        iw.u_dot.emplace_back(l, ul);
        br.emplace_back(S.p0[rr][l], lt_convolution({lt_scale(u_own, *S.phi0[rr][l]), lt_scale(ul, r.at(l, j).psi)}));
        prob += S.p0[rr][l] * r.at(l, j).hit_prob;
      }
      iw.ddot_v = vdd;
      iw.u_ddot.emplace_back(rr, own_dd);
      for (const auto& x : uu) iw.u_ddot.push_back(x);

      HittingEntry e;
      e.i = rr;
      e.j = j;
      e.psi = lt_canonical(lt_mixture(std::move(br)));
      e.hit_prob = prob;
      e.check_v = vd;
      e.bar_v = vdd;
      Rational local = S.e0[rr][j] * S.p0[rr][j];
      for (int k : ext) local += S.e0[rr][k] * S.p0[rr][k] * r.at(k, j).hit_prob;
      e.bar_E = own_dd * local;
      for (const auto& [k, w] : uu) e.bar_E += w * r.at(k, j).bar_E;
      finish_expectation(e);
      flag_zero_mass(r, e, m.allow_zero_mass);
      r.entries[{rr, j}] = std::move(e);
      r.interior.push_back(std::move(iw));
    }
  }
}

HittingResult analyze(const ReductionTrace& t, const SemiMarkovModel& m) {
  HittingResult r = hitting_summary(t, m.allow_zero_mass);
  expectation_summary(t, r);
  if (m.interior_rows) extend_to_interior(t, m, r);
  return r;
}

json hitting_to_json(const HittingResult& r, const SemiMarkovModel& m) {
  json j;
  json order = json::array();
  for (int k : r.order) order.push_back(m.states[k]);
  j["order"] = order;
  j["zero_mass_warning"] = r.zero_mass_warning;
  json es = json::array();
  for (const auto& [key, e] : r.entries) {
    json ub = json::array();
    for (const auto& [l, x] : e.u_bar) ub.push_back(json{{"state", m.states[l]}, {"weight", to_string(x)}});
    es.push_back(json{{"from", m.states[e.i]},
                      {"to", m.states[e.j]},
                      {"psi", lt_to_json(e.psi)},
                      {"psi_pretty", lt_pretty(e.psi)},
                      {"hit_prob", to_string(e.hit_prob)},
                      {"check_v", to_string(e.check_v)},
                      {"check_v_leading", monomial_to_json(cf_leading(e.check_v))},
                      {"bar_v", to_string(e.bar_v)},
                      {"bar_v_leading", monomial_to_json(cf_leading(e.bar_v))},
                      {"bar_E", to_string(e.bar_E)},
                      {"u_bar", ub},
                      {"E_check", e.E_check.str()},
                      {"moment_match", e.moment_match},
                      {"switch_index", e.switch_index}});
  }
  j["entries"] = es;
  json iw = json::array();
  for (const auto& w : r.interior) {
    json ud = json::array(), udd = json::array();
    for (const auto& [l, x] : w.u_dot) ud.push_back(json{{"state", m.states[l]}, {"weight", to_string(x)}});
    for (const auto& [l, x] : w.u_ddot) udd.push_back(json{{"state", m.states[l]}, {"weight", to_string(x)}});
    iw.push_back(json{{"from", m.states[w.r]},
                      {"to", m.states[w.j]},
                      {"dot_v", to_string(w.dot_v)},
                      {"u_dot", ud},
                      {"ddot_v", to_string(w.ddot_v)},
                      {"u_ddot", udd}});
  }
  if (!r.interior.empty()) j["interior"] = iw;
  return j;
}

}  // namespace hitsm
