#include "hitsm/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace hitsm {

using Kind = LaplaceNode::Kind;

namespace {

std::shared_ptr<LaplaceNode> make(Kind k) {
  auto n = std::make_shared<LaplaceNode>();
  n->kind = k;
  return n;
}

double exp_(double x) { return std::exp(x); }
Real exp_(const Real& x) { return boost::multiprecision::exp(x); }
double expm1_(double x) { return std::expm1(x); }
Real expm1_(const Real& x) { return boost::multiprecision::expm1(x); }

template <class T>
T eval_atom(const LaplaceAtom& at, const T& s) {
  const T a = T(to_real(at.a));
  switch (at.kind) {
    case AtomKind::Dirac: return exp_(-a * s);
    case AtomKind::Exponential: return T(1) / (T(1) + a * s);
    case AtomKind::Uniform: {
      T x = a * s;
      if (x == 0) return T(1);
      return -expm1_(-x) / x;
    }
  }
  return T(0);
}

template <class T>
T eval_t(const LaplaceExpr& x, const T& s) {
  const LaplaceNode& n = x.node();
  switch (n.kind) {
    case Kind::Atom: return eval_atom(n.atom, s);
    case Kind::Scale: return eval_t(n.children[0], T(T(to_real(n.w)) * s));
    case Kind::Mixture: {
      T acc = 0;
      for (const auto& [w, c] : n.branches) acc += T(to_real(w)) * eval_t(c, s);
      return acc;
    }
    case Kind::Convolution: {
      T acc = 1;
      for (const auto& c : n.children) acc *= eval_t(c, s);
      return acc;
    }
    case Kind::Geometric: {
      const T p = T(to_real(n.p));
      return eval_t(n.children[1], s) * (T(1) - p) / (T(1) - p * eval_t(n.children[0], s));
    }
    case Kind::ExponentialLimit: return T(1) / (T(1) + T(to_real(n.mean)) * s);
  }
  return T(0);
}

std::string key(const LaplaceExpr& x) { return lt_to_json(x).dump(); }

LaplaceExpr scale_canon(const Rational& w, const LaplaceExpr& y);

LaplaceExpr canon(const LaplaceExpr& x) {
  const LaplaceNode& n = x.node();
  switch (n.kind) {
    case Kind::Atom:
      if (n.atom.kind == AtomKind::Exponential) return lt_exp_limit(n.atom.a);
      return x;
    case Kind::ExponentialLimit: return x;
    case Kind::Scale: return scale_canon(n.w, canon(n.children[0]));
    case Kind::Mixture: {
      std::map<std::string, std::pair<Rational, LaplaceExpr>> merged;
      auto add = [&](const Rational& w, const LaplaceExpr& c) {
        if (w == 0) return;
        auto [it, fresh] = merged.try_emplace(key(c), w, c);
        if (!fresh) it->second.first += w;
      };
      for (const auto& [w, c] : n.branches) {
        LaplaceExpr cc = canon(c);
        if (cc.kind() == Kind::Mixture) {
          for (const auto& [w2, c2] : cc.node().branches) add(w * w2, c2);
        } else {
          add(w, cc);
        }
      }
      std::vector<std::pair<Rational, LaplaceExpr>> out;
      for (auto& [k, b] : merged) out.push_back(b);
      if (out.size() == 1 && out[0].first == 1) return out[0].second;
      return lt_mixture(std::move(out));
    }
    case Kind::Convolution: {
      Rational coef = 1;
      Rational dirac = 0;
      std::vector<LaplaceExpr> pending;
      for (const auto& c : n.children) pending.push_back(canon(c));
      std::vector<std::pair<std::string, LaplaceExpr>> kept;
      while (!pending.empty()) {
        LaplaceExpr c = pending.back();
        pending.pop_back();
        const LaplaceNode& cn = c.node();
        if (cn.kind == Kind::Convolution) {
          for (const auto& g : cn.children) pending.push_back(g);
        } else if (cn.kind == Kind::Mixture && cn.branches.empty()) {
          return lt_zero();
        } else if (cn.kind == Kind::Mixture && cn.branches.size() == 1) {
          coef *= cn.branches[0].first;
          pending.push_back(cn.branches[0].second);
        } else if (cn.kind == Kind::Atom && cn.atom.kind == AtomKind::Dirac) {
          dirac += cn.atom.a;
        } else {
          kept.emplace_back(key(c), c);
        }
      }
      if (dirac != 0) kept.emplace_back(key(lt_dirac(dirac)), lt_dirac(dirac));
      std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      LaplaceExpr core;
      if (kept.size() == 1) {
        core = kept[0].second;
      } else if (kept.size() > 1) {
        std::vector<LaplaceExpr> cs;
        for (auto& [k, c] : kept) cs.push_back(c);
        core = lt_convolution(std::move(cs));
      }
      if (coef == 0) return lt_zero();
      if (coef == 1) return core;
      return lt_mixture({{coef, core}});
    }
    case Kind::Geometric: {
      LaplaceExpr loop = canon(n.children[0]);
      LaplaceExpr exit = canon(n.children[1]);
      if (n.p == 0) return exit;
      if (loop.kind() == Kind::ExponentialLimit && exit.kind() == Kind::ExponentialLimit &&
          loop.node().mean == exit.node().mean)
        return lt_exp_limit(exit.node().mean / (1 - n.p));
      return lt_geometric(n.p, loop, exit);
    }
  }
  return x;
}

LaplaceExpr scale_canon(const Rational& w, const LaplaceExpr& y) {
  if (w == 1) return y;
  if (w == 0) {
    Rational m = lt_mass(y);
    if (m == 0) return lt_zero();
    return canon(lt_mixture({{m, lt_dirac(0)}}));
  }
  const LaplaceNode& n = y.node();
  switch (n.kind) {
    case Kind::Atom: {
      LaplaceAtom a = n.atom;
      a.a *= w;
      return canon(lt_atom(a));
    }
    case Kind::ExponentialLimit: return lt_exp_limit(n.mean * w);
    case Kind::Scale: return scale_canon(w * n.w, canon(n.children[0]));
    case Kind::Mixture: {
      std::vector<std::pair<Rational, LaplaceExpr>> bs;
      for (const auto& [bw, c] : n.branches) bs.emplace_back(bw, lt_scale(w, c));
      return canon(lt_mixture(std::move(bs)));
    }
    case Kind::Convolution: {
      std::vector<LaplaceExpr> cs;
      for (const auto& c : n.children) cs.push_back(lt_scale(w, c));
      return canon(lt_convolution(std::move(cs)));
    }
    case Kind::Geometric:
      return canon(lt_geometric(n.p, lt_scale(w, n.children[0]), lt_scale(w, n.children[1])));
  }
  return y;
}

std::string term(const Rational& m, const std::string& arg) {
  if (m == 1) return arg;
  return m.str() + "*" + arg;
}

std::string pretty(const LaplaceExpr& x, const std::string& arg) {
  const LaplaceNode& n = x.node();
  switch (n.kind) {
    case Kind::Atom:
      switch (n.atom.kind) {
        case AtomKind::Dirac:
          if (n.atom.a == 0) return "1";
          return "exp(-" + term(n.atom.a, arg) + ")";
        case AtomKind::Exponential: return "1/(1+" + term(n.atom.a, arg) + ")";
        case AtomKind::Uniform: {
          std::string t = term(n.atom.a, arg);
          return "(1-exp(-" + t + "))/(" + t + ")";
        }
      }
      break;
    case Kind::ExponentialLimit: return "1/(1+" + term(n.mean, arg) + ")";
    case Kind::Scale: return pretty(n.children[0], "(" + term(n.w, arg) + ")");
    case Kind::Mixture: {
      if (n.branches.empty()) return "0";
      std::string s;
      for (std::size_t i = 0; i < n.branches.size(); ++i) {
        if (i) s += " + ";
        const auto& [w, c] = n.branches[i];
        std::string cs = pretty(c, arg);
        if (cs == "1") s += w.str();
        else if (w == 1) s += cs;
        else s += w.str() + "*" + cs;
      }
      return s;
    }
    case Kind::Convolution: {
      std::string s;
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) s += "*";
        s += "(" + pretty(n.children[i], arg) + ")";
      }
      return s;
    }
    case Kind::Geometric: {
      Rational q = 1 - n.p;
      std::string exit = pretty(n.children[1], arg);
      std::string loop = pretty(n.children[0], arg);
      return q.str() + "*" + exit + "/(1-" + n.p.str() + "*" + loop + ")";
    }
  }
  return "?";
}

}  // namespace

std::string to_string(AtomKind k) {
  switch (k) {
    case AtomKind::Dirac: return "dirac";
    case AtomKind::Exponential: return "exponential";
    case AtomKind::Uniform: return "uniform";
  }
  return "?";
}

AtomKind parse_atom_kind(const std::string& s) {
  if (s == "dirac") return AtomKind::Dirac;
  if (s == "exponential") return AtomKind::Exponential;
  if (s == "uniform") return AtomKind::Uniform;
  throw ParseError("unknown law '" + s + "' (expected dirac, exponential or uniform)");
}

LaplaceExpr::LaplaceExpr() : LaplaceExpr(lt_dirac(0)) {}

LaplaceExpr lt_atom(LaplaceAtom a) {
  if (a.a < 0) throw std::domain_error("negative atom parameter");
  if (a.kind != AtomKind::Dirac && a.a == 0) throw std::domain_error(to_string(a.kind) + " law needs a positive parameter");
  auto n = make(Kind::Atom);
  n->atom = std::move(a);
  return LaplaceExpr(std::move(n));
}

LaplaceExpr lt_dirac(Rational a) { return lt_atom({AtomKind::Dirac, std::move(a)}); }
LaplaceExpr lt_exponential(Rational mean) { return lt_atom({AtomKind::Exponential, std::move(mean)}); }
LaplaceExpr lt_uniform(Rational a) { return lt_atom({AtomKind::Uniform, std::move(a)}); }

LaplaceExpr lt_scale(Rational w, LaplaceExpr child) {
  if (w < 0) throw std::domain_error("negative scale");
  auto n = make(Kind::Scale);
  n->w = std::move(w);
  n->children.push_back(std::move(child));
  return LaplaceExpr(std::move(n));
}

LaplaceExpr lt_mixture(std::vector<std::pair<Rational, LaplaceExpr>> branches) {
  for (const auto& b : branches)
    if (b.first < 0) throw std::domain_error("negative mixture weight");
  auto n = make(Kind::Mixture);
  n->branches = std::move(branches);
  return LaplaceExpr(std::move(n));
}

LaplaceExpr lt_convolution(std::vector<LaplaceExpr> children) {
  auto n = make(Kind::Convolution);
  n->children = std::move(children);
  return LaplaceExpr(std::move(n));
}

LaplaceExpr lt_geometric(Rational p, LaplaceExpr loop, LaplaceExpr exit) {
  if (p < 0 || p >= 1) throw std::domain_error("geometric parameter outside [0,1)");
  auto n = make(Kind::Geometric);
  n->p = std::move(p);
  n->children = {std::move(loop), std::move(exit)};
  return LaplaceExpr(std::move(n));
}

LaplaceExpr lt_exp_limit(Rational mean) {
  if (mean <= 0) throw std::domain_error("exponential limit needs a positive mean");
  auto n = make(Kind::ExponentialLimit);
  n->mean = std::move(mean);
  return LaplaceExpr(std::move(n));
}

LaplaceExpr lt_zero() { return lt_mixture({}); }

double lt_eval(const LaplaceExpr& x, double s) { return eval_t<double>(x, s); }
Real lt_eval(const LaplaceExpr& x, const Real& s) { return eval_t<Real>(x, s); }

Rational lt_mass(const LaplaceExpr& x) {
  const LaplaceNode& n = x.node();
  switch (n.kind) {
    case Kind::Atom:
    case Kind::ExponentialLimit: return 1;
    case Kind::Scale: return lt_mass(n.children[0]);
    case Kind::Mixture: {
      Rational m = 0;
      for (const auto& [w, c] : n.branches) m += w * lt_mass(c);
      return m;
    }
    case Kind::Convolution: {
      Rational m = 1;
      for (const auto& c : n.children) m *= lt_mass(c);
      return m;
    }
    case Kind::Geometric:
      return (1 - n.p) * lt_mass(n.children[1]) / (1 - n.p * lt_mass(n.children[0]));
  }
  return 0;
}

Rational lt_mean(const LaplaceExpr& x) {
  const LaplaceNode& n = x.node();
  switch (n.kind) {
    case Kind::Atom: return n.atom.mean();
    case Kind::ExponentialLimit: return n.mean;
    case Kind::Scale: return n.w * lt_mean(n.children[0]);
    case Kind::Mixture: {
      Rational m = 0;
      for (const auto& [w, c] : n.branches) m += w * lt_mean(c);
      return m;
    }
    case Kind::Convolution: {
      // (prod f_i)' summed term by term
      Rational total = 0;
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        Rational t = lt_mean(n.children[i]);
        for (std::size_t j = 0; j < n.children.size(); ++j)
          if (j != i) t *= lt_mass(n.children[j]);
        total += t;
      }
      return total;
    }
    case Kind::Geometric: {
      const Rational& p = n.p;
      Rational ml = lt_mass(n.children[0]), me = lt_mass(n.children[1]);
      Rational al = lt_mean(n.children[0]), ae = lt_mean(n.children[1]);
      Rational den = 1 - p * ml;
      return (1 - p) * (ae * den + p * me * al) / (den * den);
    }
  }
  return 0;
}

bool lt_has_zero_atom(const LaplaceExpr& x) {
  const LaplaceNode& n = x.node();
  switch (n.kind) {
    case Kind::Atom: return n.atom.has_mass_at_zero();
    case Kind::ExponentialLimit: return false;
    case Kind::Scale: return n.w == 0 || lt_has_zero_atom(n.children[0]);
    case Kind::Mixture:
      for (const auto& [w, c] : n.branches)
        if (w > 0 && lt_has_zero_atom(c)) return true;
      return false;
    case Kind::Convolution:
      for (const auto& c : n.children)
        if (!lt_has_zero_atom(c)) return false;
      return true;
    case Kind::Geometric: return lt_has_zero_atom(n.children[1]);  // zero loops with probability 1-p > 0
  }
  return false;
}

LaplaceExpr lt_remove_virtual(const Rational& p0, const LaplaceExpr& phi_loop, const LaplaceExpr& phi_exit,
                              const Rational* e_loop) {
  if (p0 < 0 || p0 > 1) throw std::domain_error("loop probability outside [0,1]");
  if (p0 == 1) {
    if (e_loop == nullptr || *e_loop <= 0) throw PreconditionError("limit loop probability is 1 but the loop mean is unavailable");
    return lt_exp_limit(*e_loop);
  }
  if (p0 == 0) return phi_exit;
  return lt_geometric(p0, lt_scale(1 - p0, phi_loop), lt_scale(1 - p0, phi_exit));
}

LaplaceExpr lt_canonical(const LaplaceExpr& x) { return canon(x); }

bool lt_equal(const LaplaceExpr& x, const LaplaceExpr& y) { return key(canon(x)) == key(canon(y)); }

nlohmann::json lt_to_json(const LaplaceExpr& x) {
  const LaplaceNode& n = x.node();
  nlohmann::json j;
  switch (n.kind) {
    case Kind::Atom:
      j["node"] = "atom";
      j["law"] = to_string(n.atom.kind);
      j["a"] = n.atom.a.str();
      break;
    case Kind::Scale:
      j["node"] = "scale";
      j["w"] = n.w.str();
      j["child"] = lt_to_json(n.children[0]);
      break;
    case Kind::Mixture: {
      j["node"] = "mixture";
      j["branches"] = nlohmann::json::array();
      for (const auto& [w, c] : n.branches) j["branches"].push_back({{"w", w.str()}, {"child", lt_to_json(c)}});
      break;
    }
    case Kind::Convolution:
      j["node"] = "convolution";
      j["children"] = nlohmann::json::array();
      for (const auto& c : n.children) j["children"].push_back(lt_to_json(c));
      break;
    case Kind::Geometric:
      j["node"] = "geometric";
      j["p"] = n.p.str();
      j["loop"] = lt_to_json(n.children[0]);
      j["exit"] = lt_to_json(n.children[1]);
      break;
    case Kind::ExponentialLimit:
      j["node"] = "exp_limit";
      j["mean"] = n.mean.str();
      break;
  }
  return j;
}

LaplaceExpr lt_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("node")) throw ParseError("transform node without a \"node\" tag");
  const std::string tag = j.at("node").get<std::string>();
  auto q = [&](const char* k) { return parse_rational(j.at(k).get<std::string>()); };
  if (tag == "atom") return lt_atom({parse_atom_kind(j.at("law").get<std::string>()), q("a")});
  if (tag == "scale") return lt_scale(q("w"), lt_from_json(j.at("child")));
  if (tag == "mixture") {
    std::vector<std::pair<Rational, LaplaceExpr>> bs;
    for (const auto& b : j.at("branches"))
      bs.emplace_back(parse_rational(b.at("w").get<std::string>()), lt_from_json(b.at("child")));
    return lt_mixture(std::move(bs));
  }
  if (tag == "convolution") {
    std::vector<LaplaceExpr> cs;
    for (const auto& c : j.at("children")) cs.push_back(lt_from_json(c));
    return lt_convolution(std::move(cs));
  }
  if (tag == "geometric") return lt_geometric(q("p"), lt_from_json(j.at("loop")), lt_from_json(j.at("exit")));
  if (tag == "exp_limit") return lt_exp_limit(q("mean"));
  throw ParseError("unknown transform node '" + tag + "'");
}

std::string lt_pretty(const LaplaceExpr& x) { return pretty(x, "s"); }

}  // namespace hitsm
