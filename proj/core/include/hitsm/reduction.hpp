#pragma once

#include "hitsm/model.hpp"

#include <memory>

namespace hitsm {

// Pre-limit transition-time law with eps-dependent parameters. Mixture weights
// are unnormalized functions; the mixture is divided by their sum.
struct PreLawNode;
using PreLaw = std::shared_ptr<const PreLawNode>;

struct PreLawNode {
  enum class Kind { Sampler, Geometric, Mixture, Convolution };
  Kind kind = Kind::Sampler;
  AtomKind sampler = AtomKind::Dirac;
  ComparableFn param;                                   // Sampler scale; Geometric loop probability
  std::vector<std::pair<ComparableFn, PreLaw>> branches;  // Mixture
  std::vector<PreLaw> children;                         // Convolution; Geometric [0]=loop, [1]=exit
};

PreLaw pre_sampler(AtomKind k, ComparableFn scale);
PreLaw pre_geometric(ComparableFn p, PreLaw loop, PreLaw exit);
PreLaw pre_mixture(std::vector<std::pair<ComparableFn, PreLaw>> branches);
PreLaw pre_convolution(PreLaw a, PreLaw b);

// Phase space at one stage of the reduction. Matrices keep the original state
// indexing; rows and columns of excluded states are empty.
struct StepState {
  std::size_t n = 0;
  std::vector<int> alive;   // surviving exterior states, model order
  std::vector<int> domain;  // D
  Matrix<ComparableFn> p;
  Matrix<Rational> p0;
  Matrix<std::optional<LaplaceExpr>> phi0;
  Matrix<Rational> e0;
  Matrix<PreLaw> law;
  std::vector<ComparableFn> v;

  bool is_alive(int i) const;
  // alive followed by domain; the columns a row may use
  std::vector<int> columns() const;
};

StepState initial_state(const SemiMarkovModel& m);
StepState remove_virtual(const StepState& s);
int select_least_absorbing(const StepState& s);
StepState exclude_state(const StepState& s, int k);

struct ReductionStep {
  int excluded = -1;  // -1 for step 0
  StepState before;   // the model at the start of the step (post exclusion for n >= 1)
  StepState after;    // after removing virtual transitions
  std::vector<std::pair<int, ExtendedLimit>> w_limits;  // (i, lim v_k / v_i) for the excluded k
  Matrix<std::optional<Rational>> qhat;                 // on the support of the new p
  std::vector<int> least_absorbing;                     // states with finite ratios against everybody
};

struct ReductionTrace {
  std::vector<ReductionStep> steps;
  std::vector<int> exclusion_order;
  int final_state = -1;
  // Original model p0, used for interior rows.
  StepState initial;
};

ReductionTrace reduce(const SemiMarkovModel& m);

// Row sums of p over the live phase space, checked symbolically.
bool rows_stochastic(const StepState& s);

nlohmann::json step_state_to_json(const StepState& s, const SemiMarkovModel& m);
nlohmann::json trace_to_json(const ReductionTrace& t, const SemiMarkovModel& m);

}  // namespace hitsm
