#pragma once

#include "spindle/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spindle {

// Tags for the lower-bound curves; the harness writes them into the CSV
// "theorem" column and `verify` groups its suites by them.
enum class Theorem {
  SignFlip,        // 1 - k/d
  Complement01,    // 1/4 (1 - k/(d-1))
  Permute,         // 1 - k/(d-1)
  Gaussian,        // (1 - k/d)^2
  SawTooth,        // 1 - ceil(k/(2q))/d
  IidCoupon,       // (1 - 1/d)^k
  SvdTail,         // spectral tail; 1 - k/d on an orthogonal design
  SvdTailInit,     // spectral tail with one direction granted to the init;
                   // 1 - (k+1)/d on an orthogonal design
  ShiftedDoubled,  // 1/4 - (k+1)/(4d)
  TwoLayerRank,    // 1 - (2k+1)/d
};

std::string theorem_name(Theorem t);
Theorem theorem_from_name(const std::string& name);

double curve_value(Theorem t, int d, int k, int q = 1);

struct BoundCurve {
  Theorem theorem;
  int d = 0;
  int q = 1;
  std::vector<double> values;  // index k = 0..k_max, clamped at 0
};

BoundCurve make_curve(Theorem t, int d, int k_max, int q = 1);

// Squared singular values in descending order plus their sum.
struct Spectrum {
  Vector values;
  double frobenius_sq = 0.0;
};

Spectrum singular_spectrum(const Matrix& y);

// Fraction of squared-Frobenius mass outside the top k directions:
// sum_{i > k} s_i^2 / sum_i s_i^2. This is the average-loss floor for any
// predictor confined to a k-dimensional subspace of the label matrix.
double svd_tail_bound(const Matrix& y, int k);

// Same with one extra direction granted to the initialization, i.e. the tail
// after the top k+1 directions.
double svd_tail_bound_with_init(const Matrix& y, int k);

// Closed-form spectrum of the shifted doubled matrix ([H, -H] + 1)/2 of a
// d x d Hadamard matrix: squared values {d^2/2 + d/2} once and {d/2} with
// multiplicity d-1 (its Gram matrix is (d/2)(I + 1 1^T)).
Spectrum shifted_doubled_spectrum(int d);

// The matching curve 1/4 - (k+1)/(4d): the tail after the top k+1 directions
// divided by the ENTRY COUNT n*m = 2d^2 (average squared error per matrix
// entry), not by the Frobenius mass; the 0/1 labels carry only half the
// per-entry mass of +-1 labels.
double shifted_doubled_tail_curve(int d, int k);

// After k of the d rows of a balanced +-1 column are revealed, the count q of
// +1 labels among the unseen rows is d/2 minus a hypergeometric draw:
// E[q] = (d-k)/2, Var[q] = k(d-k)/(4(d-1)). The best constant prediction on
// the unseen rows is (2q-(d-k))/(d-k) with total square loss 4q(d-k-q)/(d-k),
// and its expectation is d - kd/(d-1).
struct HypergeomStats {
  double expected_total;  // expected total unseen loss d - kd/(d-1)
  double mean_q;
  double var_q;
};

HypergeomStats hypergeometric_unseen_loss(int d, int k);

struct MonteCarlo {
  double mean = 0.0;
  double stderr_ = 0.0;
  int trials = 0;
};

// Simulates the optimal-predictor protocol directly (shuffle a balanced
// label multiset, reveal k, predict the best constant on the rest, sum the
// actual square losses); independent of the closed forms above.
struct PermutedSimulation {
  MonteCarlo total_loss;
  double mean_q = 0.0;
  double var_q = 0.0;
};

PermutedSimulation simulate_permuted_optimal_predictor(int d, int k, int trials,
                                                       std::uint64_t seed);

// Draws k rows iid with replacement from d and reports the unseen fraction,
// whose expectation is (1 - 1/d)^k.
MonteCarlo simulate_iid_unseen_fraction(int d, int k, int trials, std::uint64_t seed);

// Orthonormal basis (columns) of span[W1_init w2_init, W1_init W1_init^T
// X_train^T, X_train^T], the subspace that contains the effective weight
// vector of the trained two-layer linear network. At most 2k+1 columns.
Matrix two_layer_span_basis(const Matrix& w1_init, const Vector& w2_init,
                            const Matrix& x_train);

// Relative distance of v from the column span of an orthonormal basis.
double span_residual(const Matrix& basis, const Vector& v);

// Average loss over the 2d signed continuations when the d-k unseen
// coordinates of the weight vector all carry the value t:
// (d-k)/(2d) * ((sqrt(d) t - 1)^2 + (sqrt(d) t + 1)^2). Minimized at t = 0,
// where it equals 1 - k/d.
double zero_init_unseen_term(int d, int k, double t);

struct SweepRow {
  double t;
  double value;
};

std::vector<SweepRow> zero_init_optimality_sweep(int d, int k,
                                                 const std::vector<double>& grid);

// Spectra of random d x d +-1 matrices: the Frobenius identity
// sum s_i^2 = d^2 holds exactly per trial, the deterministic tail bound
// sum_{i>k} s_i^2 >= d^2 - k s_1^2 holds per trial, and c_hat = mean(s_1)
// / sqrt(d) is estimated from the trials (never assumed).
struct ConcentrationReport {
  int d = 0;
  int k = 0;
  int trials = 0;
  double c_hat = 0.0;
  double mean_tail_fraction = 0.0;  // of sum_{i>k} s_i^2 / d^2
  double min_tail_fraction = 0.0;
  bool frobenius_exact_all = false;
  bool deterministic_bound_all = false;
  std::vector<double> s1;             // per trial
  std::vector<double> tail_fraction;  // per trial
  std::vector<double> t_grid;
  std::vector<double> fraction_meeting;  // tail >= 1 - (c_hat + t/sqrt(d))^2 k/d
};

ConcentrationReport spectrum_concentration_experiment(int d, int k, int trials,
                                                      std::uint64_t seed);

}  // namespace spindle
