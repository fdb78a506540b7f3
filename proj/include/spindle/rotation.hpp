#pragma once

#include "spindle/hadamard.hpp"
#include "spindle/learners.hpp"
#include "spindle/matrix.hpp"
#include "spindle/problems.hpp"

#include <cstdint>

namespace spindle {

struct OrthogonalMatrix {
  Matrix U;  // d x d with U U^T = I

  int dim() const { return static_cast<int>(U.rows()); }
};

// Haar-distributed rotation: QR of an iid Gaussian matrix with the Q columns
// sign-corrected by the diagonal of R (without the correction the
// distribution is biased by the QR sign convention).
OrthogonalMatrix random_orthogonal(int d, std::uint64_t seed);

// (1/sqrt(d)) diag(signs) H, the rotation that maps the sign-flip instances
// diag(signs) H onto the fixed orthogonal design sqrt(d) I.
OrthogonalMatrix hadamard_rotation(const Vector& signs, const HadamardMatrix& h);

// Instances become X U^T (each row x_t becomes U x_t); labels are untouched.
Problem rotate_problem(const Problem& p, const OrthogonalMatrix& u);

// Trains the learner twice with seed-paired initialization: once on p with
// init theta_0, once on the rotated problem with the input-layer weights of
// theta_0 rotated by U (vector inits w0 -> U w0, layered inits W0 -> U W0,
// top layers shared). Returns max_t |f(x_t) - f_rot(U x_t)| over all rows of
// p. Rotation-invariant learners (linear GD, least squares, two-layer, MLP)
// return values at floating-point noise; the spindly and EGU
// parameterizations are coordinate-bound, have no equivariant transport of
// their init, and return large values (their init is reused verbatim).
double invariance_test(LearnerKind kind, const LearnerConfig& cfg, const Problem& p,
                       const OrthogonalMatrix& u, int k, std::uint64_t paired_seed);

}  // namespace spindle
