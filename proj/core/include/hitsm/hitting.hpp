#pragma once

#include "hitsm/reduction.hpp"

#include <map>

namespace hitsm {

// Limit of E / check_v, i.e. the expectation read under the distribution normalization.
struct ScaledExpectation {
  enum class Kind { Finite, Infinite, Indeterminate };
  Kind kind = Kind::Finite;
  Rational value{0};
  std::string str() const;
};

struct HittingEntry {
  int i = -1;
  int j = -1;
  LaplaceExpr psi;  // canonical
  Rational hit_prob{0};
  ComparableFn check_v;
  ComparableFn bar_v;
  Rational bar_E{0};          // lim E / bar_v
  ExtendedLimit bar_over_check;  // lim bar_v / check_v
  ScaledExpectation E_check;  // lim E / check_v
  bool moment_match = false;
  std::vector<std::pair<int, Rational>> u_bar;  // (k_l, lim bar_v_{k_l} p / bar_v); rest goes to the own sojourn
  int switch_index = -1;  // 1-based position in k_1..k_m whose check_v is used; -1 for interior states
};

struct InteriorWeights {
  int r = -1;
  int j = -1;
  ComparableFn dot_v;
  std::vector<std::pair<int, Rational>> u_dot;   // (l, weight); l == r is the state's own sojourn
  ComparableFn ddot_v;
  std::vector<std::pair<int, Rational>> u_ddot;  // (k, weight); k == r is the own sojourn
};

struct HittingResult {
  std::vector<int> order;    // k_1 .. k_m
  std::vector<int> targets;  // D
  std::map<std::pair<int, int>, HittingEntry> entries;
  std::vector<InteriorWeights> interior;
  bool zero_mass_warning = false;  // some Psi law charges zero while allow_zero_mass is off

  const HittingEntry& at(int i, int j) const;
  bool has(int i, int j) const { return entries.count({i, j}) > 0; }
  // Psi / P, or the probability-weighted average over the row when P = 0.
  LaplaceExpr conditional(int i, int j) const;
};

// Distribution part (Psi, check_v, hit probabilities).
HittingResult hitting_summary(const ReductionTrace& t, bool allow_zero_mass = false);
// Backward recurrence for P0 alone; keyed like entries.
std::map<std::pair<int, int>, Rational> hitting_probabilities(const ReductionTrace& t);
// Fills bar_v, bar_E, E_check and moment_match.
void expectation_summary(const ReductionTrace& t, HittingResult& r);
// Entries for initial states inside D. Needs author-supplied interior rows.
void extend_to_interior(const ReductionTrace& t, const SemiMarkovModel& m, HittingResult& r);

// Everything above in one go; interior rows are used when present.
HittingResult analyze(const ReductionTrace& t, const SemiMarkovModel& m);

nlohmann::json hitting_to_json(const HittingResult& r, const SemiMarkovModel& m);

}  // namespace hitsm
