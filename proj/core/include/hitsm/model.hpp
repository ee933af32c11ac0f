#pragma once

#include "hitsm/asymptotics.hpp"
#include "hitsm/laplace.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hitsm {

template <class T>
using Matrix = std::vector<std::vector<T>>;

template <class T>
Matrix<T> make_matrix(std::size_t n, const T& fill = T{}) {
  return Matrix<T>(n, std::vector<T>(n, fill));
}

// Pre-limit transition time: a law of the given kind with an eps-dependent scale,
// plus the author-supplied limit of the law after division by v_i.
struct TimeSpec {
  AtomKind sampler = AtomKind::Dirac;
  ComparableFn scale = ComparableFn::constant(1);
  LaplaceAtom limit_atom{AtomKind::Dirac, 1};
  Rational limit_mean{1};
};

struct SemiMarkovModel {
  std::vector<std::string> states;
  std::vector<bool> in_domain;  // D membership, indexed like states
  Family family = Family::H1;
  bool allow_zero_mass = false;
  Matrix<ComparableFn> p;                    // zero entries are structural zeros
  Matrix<std::optional<TimeSpec>> times;     // present exactly on the support of p
  std::vector<std::optional<ComparableFn>> v;  // local normalization
  bool interior_rows = false;                // rows of D supplied by the author (not synthesized)

  std::size_t size() const { return states.size(); }
  std::vector<int> domain() const;
  std::vector<int> exterior() const;
  int index_of(const std::string& label) const;  // -1 when absent
};

// Fills rows of D with the frozen form: uniform over D, Dirac(1) times, v = 1.
void synthesize_domain_rows(SemiMarkovModel& m);

struct ConditionEntry {
  std::string name;
  bool pass = true;
  std::vector<std::string> witnesses;
};

struct ConditionReport {
  ConditionEntry condition_A{"condition_A", true, {}};
  ConditionEntry condition_B{"condition_B", true, {}};
  ConditionEntry condition_Db{"condition_Db", true, {}};
  ConditionEntry condition_D{"condition_D", true, {}};
  ConditionEntry stochastic_rows{"stochastic_rows", true, {}};
  ConditionEntry normalization{"normalization", true, {}};
  ConditionEntry family_membership{"family_membership", true, {}};

  std::vector<const ConditionEntry*> entries() const;
  bool all_pass() const;
  // Everything except the limit-law cross-check; the reduction needs only these.
  bool structural_pass() const;
};

ConditionReport validate_model(const SemiMarkovModel& m);

}  // namespace hitsm
