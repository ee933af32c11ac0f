#pragma once

#include "hitsm/hitting.hpp"

#include <cstdint>

namespace hitsm {

struct NumLawNode;
using NumLaw = std::shared_ptr<const NumLawNode>;

// A pre-limit law with every parameter evaluated at one eps.
struct NumLawNode {
  PreLawNode::Kind kind = PreLawNode::Kind::Sampler;
  AtomKind sampler = AtomKind::Dirac;
  Real a{0};  // sampler scale or geometric loop probability
  std::vector<std::pair<Real, NumLaw>> branches;  // weights normalized
  std::vector<NumLaw> children;
};

Real num_transform(const NumLaw& x, const Real& s);
Real num_mean(const NumLaw& x);

struct FixedEpsModel {
  std::size_t n = 0;
  Real eps{0};
  std::vector<int> exterior;
  std::vector<int> domain;
  Matrix<Real> p;
  Matrix<NumLaw> law;
  std::vector<bool> row_ok;  // rows of D referencing only live states
};

FixedEpsModel fix_eps(const SemiMarkovModel& m, const Real& eps);
// A reduced model taken from a trace stage.
FixedEpsModel fix_eps(const StepState& s, const Real& eps);

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rows indexed by state; only columns in D and rows with row_ok are meaningful.
Matrix<Real> exact_laplace(const FixedEpsModel& f, const Real& s);
// E[tau; entry state j].
Matrix<Real> exact_expectation(const FixedEpsModel& f);

// Dense solve of A x = B (B has several columns) with row equilibration and partial pivoting.
Matrix<Real> solve_dense(Matrix<Real> A, Matrix<Real> B);

struct ConvergenceEntry {
  int i = -1;
  int j = -1;
  std::string quantity;  // "laplace" or "expectation"
  double s = 0;          // unused for expectations
  std::vector<double> gaps;
  double tolerance = 0;
  bool monotone = false;
  bool pass = false;
};

struct ConvergenceReport {
  std::vector<double> eps_grid;
  std::vector<double> s_grid;
  std::vector<ConvergenceEntry> entries;
  bool all_pass() const;
};

constexpr double kLaplaceTolerance = 1e-2;
constexpr double kExpectationTolerance = 2e-2;

ConvergenceReport convergence_check(const SemiMarkovModel& m, const HittingResult& r, const std::vector<double>& eps_grid,
                                    const std::vector<double>& s_grid);

nlohmann::json convergence_to_json(const ConvergenceReport& c, const SemiMarkovModel& m);
std::string convergence_to_text(const ConvergenceReport& c, const SemiMarkovModel& m);

// Monte Carlo

struct HitSample {
  double tau = 0;
  int entry = -1;
};

class StepBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kStepBudget = 100'000'000;

// Same seed gives the same samples whatever the worker count; workers = 0 picks a default.
std::vector<HitSample> simulate_hitting(const SemiMarkovModel& m, double eps, int start, std::size_t n_samples,
                                        std::uint64_t seed, unsigned workers = 0);

struct SampleStats {
  std::size_t n = 0;
  double scale = 1;  // the normalization the statistics are divided by
  double mean = 0;
  double mean_se = 0;
  double s = 1;
  double transform = 0;  // average of exp(-s tau / scale)
  double transform_se = 0;
  std::map<int, double> entry_freq;
};

SampleStats sample_stats(const std::vector<HitSample>& xs, double scale, double s);

}  // namespace hitsm
