#pragma once

#include "hitsm/detail/json.hpp"
#include "hitsm/numeric.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace hitsm {

enum class AtomKind { Dirac, Exponential, Uniform };
std::string to_string(AtomKind k);
AtomKind parse_atom_kind(const std::string& s);

// Dirac(a): e^{-as}; Exponential(mean a): 1/(1+as); Uniform(0,a): (1-e^{-as})/(as)
struct LaplaceAtom {
  AtomKind kind = AtomKind::Dirac;
  Rational a{1};

  Rational mean() const { return kind == AtomKind::Uniform ? Rational(a / 2) : a; }
  bool has_mass_at_zero() const { return kind == AtomKind::Dirac && a == 0; }
  bool operator==(const LaplaceAtom&) const = default;
};

class LaplaceExpr;

struct LaplaceNode {
  enum class Kind { Atom, Scale, Mixture, Convolution, Geometric, ExponentialLimit };
  Kind kind = Kind::Atom;
  LaplaceAtom atom;                                      // Atom
  Rational w{1};                                         // Scale factor
  Rational p{0};                                         // Geometric loop probability
  Rational mean{1};                                      // ExponentialLimit
  std::vector<std::pair<Rational, LaplaceExpr>> branches;  // Mixture
  std::vector<LaplaceExpr> children;                     // Convolution; Scale/Geometric use [0] / [0]=loop,[1]=exit
};

// Immutable transform tree; copies share nodes.
class LaplaceExpr {
 public:
  LaplaceExpr();  // Dirac(0), the unit transform
  explicit LaplaceExpr(std::shared_ptr<const LaplaceNode> n) : node_(std::move(n)) {}

  const LaplaceNode& node() const { return *node_; }
  LaplaceNode::Kind kind() const { return node_->kind; }

 private:
  std::shared_ptr<const LaplaceNode> node_;
};

LaplaceExpr lt_atom(LaplaceAtom a);
LaplaceExpr lt_dirac(Rational a);
LaplaceExpr lt_exponential(Rational mean);
LaplaceExpr lt_uniform(Rational a);
LaplaceExpr lt_scale(Rational w, LaplaceExpr child);
LaplaceExpr lt_mixture(std::vector<std::pair<Rational, LaplaceExpr>> branches);
LaplaceExpr lt_convolution(std::vector<LaplaceExpr> children);
// exit(s)(1-p)/(1-p*loop(s))
LaplaceExpr lt_geometric(Rational p, LaplaceExpr loop, LaplaceExpr exit);
LaplaceExpr lt_exp_limit(Rational mean);
LaplaceExpr lt_zero();  // the empty mixture, transform identically 0

double lt_eval(const LaplaceExpr& x, double s);
Real lt_eval(const LaplaceExpr& x, const Real& s);
// Unnormalized first moment, i.e. -d/ds at s = 0.
Rational lt_mean(const LaplaceExpr& x);
// Value at s = 0.
Rational lt_mass(const LaplaceExpr& x);
bool lt_has_zero_atom(const LaplaceExpr& x);

LaplaceExpr lt_remove_virtual(const Rational& p0, const LaplaceExpr& phi_loop, const LaplaceExpr& phi_exit,
                              const Rational* e_loop);

// Pushes scales to the leaves, flattens, merges equal branches and folds the
// geometric sum of identical exponentials. Equal laws built along different
// paths compare equal afterwards.
LaplaceExpr lt_canonical(const LaplaceExpr& x);
bool lt_equal(const LaplaceExpr& x, const LaplaceExpr& y);  // structural, after canonicalization

nlohmann::json lt_to_json(const LaplaceExpr& x);
LaplaceExpr lt_from_json(const nlohmann::json& j);
std::string lt_pretty(const LaplaceExpr& x);

}  // namespace hitsm
