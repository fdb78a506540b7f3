#pragma once

#include "spindle/hadamard.hpp"
#include "spindle/matrix.hpp"
#include "spindle/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace spindle {

enum class Family {
  SignFlip,         // X = diag(s) H, labels s
  Complement01,     // X = (diag(s~) H~ + 1)/2 over {0,1}, labels (s~+1)/2
  Permuted,         // X = P H, labels the permuted non-constant column
  GaussianSparse,   // X iid N(0,1), labels X w*
  Duplicated,       // each Hadamard row repeated q times with sign +, then q with -
  DoubledHadamard,  // X = H, target matrix [H, -H]
  ShiftedDoubled,   // X = H, target matrix ([H, -H] + 1)/2
  RandomPM,         // X iid +-1, labels one column
};

enum class LabelRange { PlusMinus, ZeroOne, Real };

std::string family_name(Family f);
Family family_from_name(const std::string& name);
std::string label_range_name(LabelRange r);
LabelRange label_range_from_name(const std::string& name);

// A supervised instance set. Y holds one column per target; single-target
// families use an n x 1 matrix and y() returns the active column.
struct Problem {
  Matrix X;                 // n x d
  Matrix Y;                 // n x m
  int target_index = 0;     // active column of Y
  Family family = Family::SignFlip;
  std::uint64_t seed = 0;
  LabelRange label_range = LabelRange::PlusMinus;
  int q = 1;                // duplication factor where it applies

  int n() const { return static_cast<int>(X.rows()); }
  int d() const { return static_cast<int>(X.cols()); }
  int m() const { return static_cast<int>(Y.cols()); }
  Vector y() const { return Y.col(target_index); }
};

// Writes <stem>_X.csv, <stem>_Y.csv and <stem>_meta.json under dir.
void save_problem(const Problem& p, const std::string& dir, const std::string& stem);
Problem load_problem(const std::string& dir, const std::string& stem);

// Uniform +-1 sign diagonal; one substream per coordinate is not needed, the
// pattern is a single length-d draw from the problem stream.
Vector random_signs(int d, Rng rng);

Problem sign_flip_problem(const HadamardMatrix& h, std::uint64_t seed);
Problem complement_problem(const StrippedHadamard& h, std::uint64_t seed);

// target_col indexes columns of H (0-based) and must be >= 1: column 0 is the
// all-ones column, constant over rows, and learning it is vacuous.
Problem permuted_problem(const HadamardMatrix& h, int target_col, std::uint64_t seed);

// w_star must be unit within 1e-12. Rows are drawn from per-row substreams so
// the instance set is a pure function of (seed, row).
Problem gaussian_problem(int d, int n, const Vector& w_star, std::uint64_t seed);

// 2qd rows: for each Hadamard row, q copies with sign +1 then q with -1,
// labels = first coordinate. When swap_seed is set, each of the d pair blocks
// independently swaps its +/- halves with probability 1/2.
Problem duplicated_problem(const HadamardMatrix& h, int q,
                           std::optional<std::uint64_t> swap_seed);

// X = H with d targets doubled to [H, -H]; shifted maps both instances'
// labels into {0,1} via (v+1)/2.
Problem doubled_hadamard_problem(const HadamardMatrix& h, bool shifted);

// iid uniform +-1 design with one column as the target.
Problem random_pm_problem(int d, int n, int target_col, std::uint64_t seed);

struct FeatureMap {
  enum class Kind { Identity, ConstantE1, Custom };
  Kind kind = Kind::Identity;
  int output_dim = 0;  // 0 means "same as input"
  std::function<Vector(const Vector&)> fn;  // Custom only

  // ConstantE1 sends x to sigma(x) * e_1 where sigma(x) is the sign of the
  // first nonzero coordinate and sigma(0) = 0; it is odd by construction.
  static FeatureMap identity();
  static FeatureMap constant_e1(int output_dim = 0);
  static FeatureMap custom(int output_dim, std::function<Vector(const Vector&)> fn);
};

Problem apply_feature_map(const Problem& p, const FeatureMap& map);

}  // namespace spindle
