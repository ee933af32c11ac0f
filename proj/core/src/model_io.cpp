#include "hitsm/model_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace hitsm {

using nlohmann::json;

namespace {

const json& at(const json& j, const char* key, const std::string& ctx) {
  if (!j.is_object()) throw ParseError(ctx + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(ctx + ": missing key '" + key + "'");
  return *it;
}

Rational rational_from_json(const json& j, const std::string& ctx) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number()) return parse_rational(j.dump());
  } catch (const ParseError& e) {
    throw ParseError(ctx + ": " + e.what());
  }
  throw ParseError(ctx + ": expected a number or a numeric string");
}

std::string label_from_json(const json& j, const std::string& ctx) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ParseError(ctx + ": expected a state label");
}

Posynomial posy_from_json(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw ParseError(ctx + ": expected a list of monomials");
  Posynomial p;
  for (std::size_t k = 0; k < j.size(); ++k) {
    try {
      p.push_back(monomial_from_json(j[k]));
    } catch (const ParseError& e) {
      throw ParseError(ctx + "[" + std::to_string(k) + "]: " + e.what());
    }
  }
  return p;
}

LaplaceAtom atom_from_json(const json& j, const std::string& ctx) {
  LaplaceAtom a;
  try {
    a.kind = parse_atom_kind(at(j, "law", ctx).get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(ctx + ".law: " + e.what());
  }
  a.a = rational_from_json(at(j, "a", ctx), ctx + ".a");
  if (a.a < 0 || (a.a == 0 && a.kind != AtomKind::Dirac)) throw ParseError(ctx + ".a: parameter out of range");
  return a;
}

ComparableFn cf_at(const json& j, const std::string& ctx) {
  try {
    return cf_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(ctx + ": " + e.what());
  } catch (const std::domain_error& e) {
    throw ParseError(ctx + ": " + e.what());
  }
}

}  // namespace

Monomial monomial_from_json(const json& j) {
  if (j.is_string()) return parse_monomial(j.get<std::string>());
  if (j.is_number()) return Monomial{rational_from_json(j, "monomial"), 0, 0, 0};
  if (!j.is_object()) throw ParseError("monomial must be a string or an object");
  Monomial m;
  m.a = rational_from_json(at(j, "a", "monomial"), "monomial.a");
  if (j.contains("b")) m.b = rational_from_json(j["b"], "monomial.b");
  if (j.contains("c")) m.c = rational_from_json(j["c"], "monomial.c");
  if (j.contains("d")) m.d = rational_from_json(j["d"], "monomial.d");
  return m;
}

json monomial_to_json(const Monomial& m) {
  return json{{"a", to_string(m.a)}, {"b", to_string(m.b)}, {"c", to_string(m.c)}, {"d", to_string(m.d)}};
}

ComparableFn cf_from_json(const json& j) {
  if (j.is_string() || j.is_number()) return ComparableFn::monomial(monomial_from_json(j));
  if (!j.is_object()) throw ParseError("function must be an object with 'num' and optional 'den'");
  if (!j.contains("num")) return ComparableFn::monomial(monomial_from_json(j));
  Posynomial num = posy_from_json(j["num"], "num");
  Posynomial den{Monomial{}};
  if (j.contains("den")) den = posy_from_json(j["den"], "den");
  if (canonical(den).empty()) throw ParseError("den is identically zero");
  return ComparableFn::ratio(num, den);
}

json cf_to_json(const ComparableFn& f) {
  json num = json::array(), den = json::array();
  if (!f.is_zero()) {
    for (const auto& m : f.numerator()) num.push_back(to_string(m));
    for (const auto& m : f.denominator()) den.push_back(to_string(m));
  } else {
    den.push_back("1");
  }
  return json{{"num", num}, {"den", den}};
}

SemiMarkovModel model_from_json(const json& j) {
  const std::string top = "model";
  SemiMarkovModel m;
  const json& states = at(j, "states", top);
  if (!states.is_array() || states.empty()) throw ParseError("states: expected a nonempty list");
  std::set<std::string> seen;
  for (std::size_t k = 0; k < states.size(); ++k) {
    auto s = label_from_json(states[k], "states[" + std::to_string(k) + "]");
    if (!seen.insert(s).second) throw ParseError("states: duplicate label '" + s + "'");
    m.states.push_back(s);
  }
  const std::size_t n = m.size();
  auto index = [&](const json& x, const std::string& ctx) {
    auto s = label_from_json(x, ctx);
    int i = m.index_of(s);
    if (i < 0) throw ParseError(ctx + ": unknown state '" + s + "'");
    return i;
  };

  m.in_domain.assign(n, false);
  const json& dom = at(j, "domain_D", top);
  if (!dom.is_array() || dom.empty()) throw ParseError("domain_D: expected a nonempty list");
  for (std::size_t k = 0; k < dom.size(); ++k) m.in_domain[index(dom[k], "domain_D[" + std::to_string(k) + "]")] = true;

  if (j.contains("family")) {
    if (!j["family"].is_string()) throw ParseError("family: expected a string");
    m.family = parse_family(j["family"].get<std::string>());
  }
  if (j.contains("allow_zero_mass")) {
    if (!j["allow_zero_mass"].is_boolean()) throw ParseError("allow_zero_mass: expected a boolean");
    m.allow_zero_mass = j["allow_zero_mass"].get<bool>();
  }

  m.p = make_matrix<ComparableFn>(n);
  m.times = make_matrix<std::optional<TimeSpec>>(n);
  m.v.assign(n, std::nullopt);

  const json& tr = at(j, "transitions", top);
  if (!tr.is_array()) throw ParseError("transitions: expected a list");
  bool interior = false;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    std::string ctx = "transitions[" + std::to_string(k) + "]";
    const json& t = tr[k];
    int from = index(at(t, "from", ctx), ctx + ".from");
    int to = index(at(t, "to", ctx), ctx + ".to");
    if (m.times[from][to]) throw ParseError(ctx + ": duplicate transition " + m.states[from] + "->" + m.states[to]);
    ComparableFn p = cf_at(at(t, "prob", ctx), ctx + ".prob");
    if (p.is_zero()) throw ParseError(ctx + ".prob: identically zero; omit the transition instead");
    const json& tj = at(t, "time", ctx);
    std::string tctx = ctx + ".time";
    TimeSpec ts;
    try {
      ts.sampler = parse_atom_kind(at(tj, "sampler", tctx).get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(tctx + ".sampler: " + e.what());
    }
    ts.scale = cf_at(at(tj, "scale", tctx), tctx + ".scale");
    ts.limit_atom = atom_from_json(at(tj, "limit_atom", tctx), tctx + ".limit_atom");
    ts.limit_mean = rational_from_json(at(tj, "limit_mean", tctx), tctx + ".limit_mean");
    if (ts.limit_mean < 0) throw ParseError(tctx + ".limit_mean: negative");
    m.p[from][to] = p;
    m.times[from][to] = ts;
    if (m.in_domain[from]) interior = true;
  }

  const json& norm = at(j, "normalization", top);
  if (!norm.is_object()) throw ParseError("normalization: expected an object keyed by state");
  for (auto it = norm.begin(); it != norm.end(); ++it) {
    int i = m.index_of(it.key());
    if (i < 0) throw ParseError("normalization: unknown state '" + it.key() + "'");
    m.v[i] = cf_at(it.value(), "normalization." + it.key());
    if (m.v[i]->is_zero()) throw ParseError("normalization." + it.key() + ": identically zero");
  }
  for (int i : m.exterior())
    if (!m.v[i]) throw ParseError("normalization: missing key '" + m.states[i] + "'");

  if (interior) {
    for (int i : m.domain())
      if (!m.v[i]) throw ParseError("normalization: missing key '" + m.states[i] + "' (interior rows are given)");
    m.interior_rows = true;
  } else {
    synthesize_domain_rows(m);
  }

  std::set<Family> seen_fam;
  auto note = [&](const ComparableFn& f) {
    if (f.uses_exp()) seen_fam.insert(Family::H2);
    if (f.uses_log()) seen_fam.insert(Family::H3);
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      note(m.p[a][b]);
      if (m.times[a][b]) note(m.times[a][b]->scale);
    }
    if (m.v[a]) note(*m.v[a]);
  }
  if (seen_fam.size() > 1) throw FamilyMixError("model mixes exponential (H2) and logarithmic (H3) factors");
  return m;
}

SemiMarkovModel parse_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const json::exception& e) {
    throw ParseError(std::string("schema error: ") + e.what());
  }
}

json model_to_json(const SemiMarkovModel& m) {
  json j;
  j["states"] = m.states;
  json dom = json::array();
  for (int i : m.domain()) dom.push_back(m.states[i]);
  j["domain_D"] = dom;
  j["family"] = to_string(m.family);
  j["allow_zero_mass"] = m.allow_zero_mass;
  json tr = json::array();
  for (std::size_t a = 0; a < m.size(); ++a) {
    if (m.in_domain[a] && !m.interior_rows) continue;
    for (std::size_t b = 0; b < m.size(); ++b) {
      if (!m.times[a][b]) continue;
      const auto& t = *m.times[a][b];
      tr.push_back(json{{"from", m.states[a]},
                        {"to", m.states[b]},
                        {"prob", cf_to_json(m.p[a][b])},
                        {"time",
                         {{"sampler", to_string(t.sampler)},
                          {"scale", cf_to_json(t.scale)},
                          {"limit_atom", {{"law", to_string(t.limit_atom.kind)}, {"a", to_string(t.limit_atom.a)}}},
                          {"limit_mean", to_string(t.limit_mean)}}}});
    }
  }
  j["transitions"] = tr;
  json norm = json::object();
  for (std::size_t a = 0; a < m.size(); ++a) {
    if (m.in_domain[a] && !m.interior_rows) continue;
    if (m.v[a]) norm[m.states[a]] = cf_to_json(*m.v[a]);
  }
  j["normalization"] = norm;
  return j;
}

std::string serialize_model(const SemiMarkovModel& m) { return model_to_json(m).dump(2); }

SemiMarkovModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

bool models_equal(const SemiMarkovModel& a, const SemiMarkovModel& b) {
  if (a.states != b.states || a.in_domain != b.in_domain || a.family != b.family ||
      a.allow_zero_mass != b.allow_zero_mass || a.interior_rows != b.interior_rows)
    return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.v[i].has_value() != b.v[i].has_value()) return false;
    if (a.v[i] && !cf_equal(*a.v[i], *b.v[i])) return false;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (!cf_equal(a.p[i][j], b.p[i][j])) return false;
      const auto& x = a.times[i][j];
      const auto& y = b.times[i][j];
      if (x.has_value() != y.has_value()) return false;
      if (!x) continue;
      if (x->sampler != y->sampler || !cf_equal(x->scale, y->scale) || !(x->limit_atom == y->limit_atom) ||
          x->limit_mean != y->limit_mean)
        return false;
    }
  }
  return true;
}

}  // namespace hitsm
