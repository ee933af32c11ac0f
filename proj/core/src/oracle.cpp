#include "hitsm/oracle.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <iomanip>
#include <sstream>
#include <unordered_map>

namespace hitsm {

using nlohmann::json;
namespace mp = boost::multiprecision;

Real num_transform(const NumLaw& x, const Real& s) {
  const NumLawNode& n = *x;
  switch (n.kind) {
    case PreLawNode::Kind::Sampler: {
      Real as = n.a * s;
      switch (n.sampler) {
        case AtomKind::Dirac: return mp::exp(-as);
        case AtomKind::Exponential: return 1 / (1 + as);
        case AtomKind::Uniform: return as == 0 ? Real(1) : Real(-mp::expm1(-as) / as);
      }
      return 0;
    }
    case PreLawNode::Kind::Geometric: {
      Real loop = num_transform(n.children[0], s);
      Real exit = num_transform(n.children[1], s);
      return exit * (1 - n.a) / (1 - n.a * loop);
    }
    case PreLawNode::Kind::Mixture: {
      Real t = 0;
      for (const auto& [w, c] : n.branches) t += w * num_transform(c, s);
      return t;
    }
    case PreLawNode::Kind::Convolution: {
      Real t = 1;
      for (const auto& c : n.children) t *= num_transform(c, s);
      return t;
    }
  }
  return 0;
}

Real num_mean(const NumLaw& x) {
  const NumLawNode& n = *x;
  switch (n.kind) {
    case PreLawNode::Kind::Sampler: return n.sampler == AtomKind::Uniform ? Real(n.a / 2) : n.a;
    case PreLawNode::Kind::Geometric: return num_mean(n.children[1]) + n.a / (1 - n.a) * num_mean(n.children[0]);
    case PreLawNode::Kind::Mixture: {
      Real t = 0;
      for (const auto& [w, c] : n.branches) t += w * num_mean(c);
      return t;
    }
    case PreLawNode::Kind::Convolution: {
      Real t = 0;
      for (const auto& c : n.children) t += num_mean(c);
      return t;
    }
  }
  return 0;
}

namespace {

struct Numerizer {
  Real eps;
  std::unordered_map<const PreLawNode*, NumLaw> memo;

  NumLaw operator()(const PreLaw& x) {
    auto it = memo.find(x.get());
    if (it != memo.end()) return it->second;
    auto out = std::make_shared<NumLawNode>();
    out->kind = x->kind;
    out->sampler = x->sampler;
    switch (x->kind) {
      case PreLawNode::Kind::Sampler: out->a = cf_eval(x->param, eps); break;
      case PreLawNode::Kind::Geometric:
        out->a = cf_eval(x->param, eps);
        out->children = {(*this)(x->children[0]), (*this)(x->children[1])};
        break;
      case PreLawNode::Kind::Mixture: {
        Real total = 0;
        for (const auto& [w, c] : x->branches) {
          Real wv = cf_eval(w, eps);
          total += wv;
          out->branches.emplace_back(wv, (*this)(c));
        }
        for (auto& b : out->branches) b.first /= total;
        break;
      }
      case PreLawNode::Kind::Convolution:
        for (const auto& c : x->children) out->children.push_back((*this)(c));
        break;
    }
    memo.emplace(x.get(), out);
    return out;
  }
};

}  // namespace

FixedEpsModel fix_eps(const StepState& s, const Real& eps) {
  FixedEpsModel f;
  f.n = s.n;
  f.eps = eps;
  f.exterior = s.alive;
  f.domain = s.domain;
  f.p = make_matrix<Real>(s.n, Real(0));
  f.law = make_matrix<NumLaw>(s.n);
  f.row_ok.assign(s.n, false);
  Numerizer num{eps, {}};
  std::vector<bool> live(s.n, false);
  for (int i : s.columns()) live[i] = true;
  for (int i : s.alive) f.row_ok[i] = true;
  for (int r : s.domain) {
    bool ok = true;
    for (std::size_t j = 0; j < s.n; ++j)
      if (!s.p[r][j].is_zero() && !live[j]) ok = false;
    f.row_ok[r] = ok;
  }
  for (std::size_t i = 0; i < s.n; ++i) {
    if (!f.row_ok[i]) continue;
    for (std::size_t j = 0; j < s.n; ++j) {
      if (s.p[i][j].is_zero()) continue;
      f.p[i][j] = cf_eval(s.p[i][j], eps);
      f.law[i][j] = num(s.law[i][j]);
    }
  }
  return f;
}

FixedEpsModel fix_eps(const SemiMarkovModel& m, const Real& eps) { return fix_eps(initial_state(m), eps); }

Matrix<Real> solve_dense(Matrix<Real> A, Matrix<Real> B) {
  const std::size_t n = A.size();
  const std::size_t c = n ? B[0].size() : 0;
  for (std::size_t i = 0; i < n; ++i) {
    Real mx = 0;
    for (const auto& x : A[i]) mx = mp::max(mx, Real(mp::abs(x)));
    if (mx == 0) throw SingularSystemError("zero row in hitting system");
    for (auto& x : A[i]) x /= mx;
    for (auto& x : B[i]) x /= mx;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (mp::abs(A[r][col]) > mp::abs(A[piv][col])) piv = r;
    if (mp::abs(A[piv][col]) < Real("1e-40")) throw SingularSystemError("singular hitting system");
    std::swap(A[piv], A[col]);
    std::swap(B[piv], B[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      Real f = A[r][col] / A[col][col];
      if (f == 0) continue;
      for (std::size_t k = col; k < n; ++k) A[r][k] -= f * A[col][k];
      for (std::size_t k = 0; k < c; ++k) B[r][k] -= f * B[col][k];
    }
  }
  Matrix<Real> X(n, std::vector<Real>(c, Real(0)));
  for (std::size_t r = n; r-- > 0;) {
    for (std::size_t k = 0; k < c; ++k) {
      Real acc = B[r][k];
      for (std::size_t q = r + 1; q < n; ++q) acc -= A[r][q] * X[q][k];
      X[r][k] = acc / A[r][r];
    }
  }
  return X;
}

namespace {

// Solves (I - A) X = B over the exterior, then fills rows of D by one step.
// weight(i,k) is the coefficient of X_k in row i; rhs(i,j) the free term.
template <class W, class F>
Matrix<Real> first_step(const FixedEpsModel& f, W weight, F rhs) {
  const auto& ext = f.exterior;
  const auto& D = f.domain;
  const std::size_t m = ext.size();
  Matrix<Real> A(m, std::vector<Real>(m, Real(0)));
  Matrix<Real> B(m, std::vector<Real>(D.size(), Real(0)));
  for (std::size_t a = 0; a < m; ++a) {
    A[a][a] = 1;
    for (std::size_t b = 0; b < m; ++b) A[a][b] -= weight(ext[a], ext[b]);
    for (std::size_t d = 0; d < D.size(); ++d) B[a][d] = rhs(ext[a], D[d]);
  }
  Matrix<Real> X = solve_dense(std::move(A), std::move(B));
  Matrix<Real> out = make_matrix<Real>(f.n, Real(0));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t d = 0; d < D.size(); ++d) out[ext[a]][D[d]] = X[a][d];
  for (int r : D) {
    if (!f.row_ok[r]) continue;
    for (int j : D) {
      Real v = rhs(r, j);
      for (int k : ext) v += weight(r, k) * out[k][j];
      out[r][j] = v;
    }
  }
  return out;
}

}  // namespace

Matrix<Real> exact_laplace(const FixedEpsModel& f, const Real& s) {
  Matrix<Real> phi = make_matrix<Real>(f.n, Real(0));
  for (std::size_t i = 0; i < f.n; ++i)
    for (std::size_t j = 0; j < f.n; ++j)
      if (f.law[i][j]) phi[i][j] = f.p[i][j] * num_transform(f.law[i][j], s);
  return first_step(f, [&](int i, int k) -> const Real& { return phi[i][k]; },
                    [&](int i, int j) -> const Real& { return phi[i][j]; });
}

Matrix<Real> exact_expectation(const FixedEpsModel& f) {
  Matrix<Real> P = exact_laplace(f, Real(0));
  Matrix<Real> pe = make_matrix<Real>(f.n, Real(0));
  for (std::size_t i = 0; i < f.n; ++i)
    for (std::size_t j = 0; j < f.n; ++j)
      if (f.law[i][j]) pe[i][j] = f.p[i][j] * num_mean(f.law[i][j]);
  auto rhs = [&](int i, int j) {
    Real v = pe[i][j];
    for (int k : f.exterior) v += pe[i][k] * P[k][j];
    return v;
  };
  return first_step(f, [&](int i, int k) -> const Real& { return f.p[i][k]; }, rhs);
}

bool ConvergenceReport::all_pass() const {
  for (const auto& e : entries)
    if (!e.pass) return false;
  return true;
}

ConvergenceReport convergence_check(const SemiMarkovModel& m, const HittingResult& r, const std::vector<double>& eps_grid,
                                    const std::vector<double>& s_grid) {
  ConvergenceReport rep;
  rep.eps_grid = eps_grid;
  rep.s_grid = s_grid;
  std::vector<FixedEpsModel> fixed;
  for (double e : eps_grid) fixed.push_back(fix_eps(m, Real(e)));
  std::vector<Matrix<Real>> expect;
  for (const auto& f : fixed) expect.push_back(exact_expectation(f));

  auto finish = [](ConvergenceEntry& c) {
    c.monotone = true;
    for (std::size_t k = 1; k < c.gaps.size(); ++k)
      if (c.gaps[k] > c.gaps[k - 1] + 1e-12) c.monotone = false;
    c.pass = c.monotone && !c.gaps.empty() && c.gaps.back() <= c.tolerance;
  };

  for (const auto& [key, e] : r.entries) {
    for (double s : s_grid) {
      ConvergenceEntry c;
      c.i = e.i;
      c.j = e.j;
      c.quantity = "laplace";
      c.s = s;
      c.tolerance = kLaplaceTolerance;
      Real target = lt_eval(e.psi, Real(s));
      for (std::size_t k = 0; k < fixed.size(); ++k) {
        Real scaled = Real(s) / cf_eval(e.check_v, Real(eps_grid[k]));
        Real got = exact_laplace(fixed[k], scaled)[e.i][e.j];
        c.gaps.push_back(to_double(Real(mp::abs(got - target))));
      }
      finish(c);
      rep.entries.push_back(std::move(c));
    }
    ConvergenceEntry c;
    c.i = e.i;
    c.j = e.j;
    c.quantity = "expectation";
    c.tolerance = kExpectationTolerance;
    for (std::size_t k = 0; k < fixed.size(); ++k) {
      Real got = expect[k][e.i][e.j] / cf_eval(e.bar_v, Real(eps_grid[k]));
      c.gaps.push_back(to_double(Real(mp::abs(got - to_real(e.bar_E)))));
    }
    finish(c);
    rep.entries.push_back(std::move(c));
  }
  return rep;
}

json convergence_to_json(const ConvergenceReport& c, const SemiMarkovModel& m) {
  json j;
  j["eps_grid"] = c.eps_grid;
  j["s_grid"] = c.s_grid;
  json es = json::array();
  for (const auto& e : c.entries) {
    json x{{"from", m.states[e.i]}, {"to", m.states[e.j]}, {"quantity", e.quantity}, {"gaps", e.gaps},
           {"tolerance", e.tolerance}, {"monotone", e.monotone}, {"pass", e.pass}};
    if (e.quantity == "laplace") x["s"] = e.s;
    es.push_back(x);
  }
  j["entries"] = es;
  j["pass"] = c.all_pass();
  return j;
}

std::string convergence_to_text(const ConvergenceReport& c, const SemiMarkovModel& m) {
  std::ostringstream os;
  os << std::left << std::setw(6) << "from" << std::setw(6) << "to" << std::setw(13) << "quantity" << std::setw(6) << "s";
  for (double e : c.eps_grid) {
    std::ostringstream h;
    h << "eps=" << e;
    os << std::setw(14) << h.str();
  }
  os << "verdict\n";
  for (const auto& e : c.entries) {
    os << std::setw(6) << m.states[e.i] << std::setw(6) << m.states[e.j] << std::setw(13) << e.quantity;
    if (e.quantity == "laplace")
      os << std::setw(6) << e.s;
    else
      os << std::setw(6) << "-";
    for (double g : e.gaps) {
      std::ostringstream v;
      v << std::scientific << std::setprecision(3) << g;
      os << std::setw(14) << v.str();
    }
    os << (e.pass ? "pass" : (e.monotone ? "fail (gap)" : "fail (not monotone)")) << '\n';
  }
  return os.str();
}

}  // namespace hitsm
