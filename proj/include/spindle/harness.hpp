#pragma once

#include "spindle/bounds.hpp"
#include "spindle/learners.hpp"
#include "spindle/problems.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spindle {

// One seed-averaged loss-vs-k sweep. Per seed: a fresh problem drawn from a
// substream of master_seed, a fresh init from another substream, one training
// run per k on the first k rows, evaluation over all rows. Seeds are farmed
// out to a worker pool but results land in per-seed slots and are reduced in
// seed order, so the output is a pure function of the ExperimentSpec
// (identical bytes for any worker count).
struct ExperimentSpec {
  Family family = Family::SignFlip;
  int d = 16;
  int n = 0;           // rows for gaussian/randompm; 0 means d
  int q = 1;           // duplication factor
  int target_col = 1;  // permuted/randompm target column (0-based)
  LearnerKind learner = LearnerKind::LinearGd;
  LearnerConfig config;  // config.eta == 0 selects default_config(learner, d)
  LossKind loss = LossKind::Square;
  std::vector<int> k_values;  // empty means 0..n_rows (capped at 65 points)
  int seeds = 100;
  std::uint64_t master_seed = 1;
  std::optional<Theorem> bound;  // empty means matched_theorem(family)
  int workers = 0;               // 0 means hardware concurrency
};

Theorem matched_theorem(Family f);

// Builds the problem instance for one experiment seed.
Problem make_problem(const ExperimentSpec& spec, std::uint64_t problem_seed);

struct ExperimentResult {
  std::vector<int> k;
  std::vector<double> mean;
  std::vector<double> stderr_;
  std::vector<double> bound;
  Theorem theorem = Theorem::SignFlip;
  int seeds = 0;
  int d = 0;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

// Schema: k,empirical_mean,stderr,bound,theorem (floats as %.10g).
void write_experiment_csv(const ExperimentResult& r, const std::string& path);

void write_curve_csv(const BoundCurve& curve, const std::string& path);

// Loss-vs-k comparison of per-example linear GD (zero init, rate 1/d) against
// the spindly learner (u0 = 1/d, rate 0.2) on two designs: permuted rows of a
// d x d orthogonal +-1 design and iid random +-1 instances, both with a
// single-coordinate target. Writes four CSVs, an SVG overlay and a JSON
// summary into out_dir. The linear learner on the orthogonal design must stay
// above 1 - (k+1)/d - 3*stderr at every k; the spindly learner must cross
// below 0.1 by k = 8 log2(d) on both designs; the crossing point divided by
// log2(d) is the reported constant.
struct Figure2Result {
  ExperimentResult hadamard_linear;
  ExperimentResult hadamard_spindly;
  ExperimentResult random_linear;
  ExperimentResult random_spindly;
  int first_low_k_hadamard = -1;  // first k with spindly mean < 0.1
  int first_low_k_random = -1;
  double c_estimate = 0.0;  // first_low_k_hadamard / log2(d)
  bool pass = false;
  std::vector<std::string> failures;
};

Figure2Result figure2_reproduction(int d, int seeds, std::uint64_t master_seed, int workers,
                                   const std::string& out_dir);

// One verify check: `value relation threshold` (relation is "<=", ">=", "=="
// with threshold as absolute tolerance partner recorded in `target`, or
// "report" for informational rows that always pass).
struct VerifyCheck {
  std::string suite;
  std::string name;
  double value = 0.0;
  double target = 0.0;
  std::string relation;
  bool pass = true;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_pass = true;
};

// Valid tags: T1 T2 T3 T4 T5 S5 T6 T7 CorS6 T9 AppB AppD AppE AppH S2 S4
// AppC, or "all" (case-insensitive).
VerifyReport verify(const std::string& tag, std::uint64_t master_seed, int workers);

std::vector<std::string> verify_tags();

// Schema: suite,check,value,target,relation,pass.
void write_verify_csv(const VerifyReport& r, const std::string& path);

}  // namespace spindle
