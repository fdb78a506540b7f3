#include "spindle/bounds.hpp"

#include "oracles.hpp"
#include "spindle/hadamard.hpp"
#include "spindle/learners.hpp"
#include "spindle/problems.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace spindle;

TEST_CASE("curve closed forms") {
  CHECK(curve_value(Theorem::SignFlip, 16, 4) == 0.75);
  CHECK(curve_value(Theorem::SignFlip, 16, 16) == 0.0);
  CHECK(curve_value(Theorem::SignFlip, 16, 20) == 0.0);  // clamped
  CHECK(curve_value(Theorem::Complement01, 16, 0) == 0.25);
  CHECK(curve_value(Theorem::Complement01, 16, 5) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(curve_value(Theorem::Permute, 16, 15) == 0.0);
  CHECK(curve_value(Theorem::Gaussian, 16, 4) == 0.5625);
  CHECK(curve_value(Theorem::Gaussian, 16, 20) == 0.0);  // base went negative, floor stays 0
  CHECK(curve_value(Theorem::SawTooth, 8, 0, 1) == 1.0);
  CHECK(curve_value(Theorem::SawTooth, 8, 3, 1) == 0.75);   // ceil(3/2) = 2
  CHECK(curve_value(Theorem::SawTooth, 8, 16, 2) == 0.5);   // ceil(16/4) = 4
  CHECK(curve_value(Theorem::IidCoupon, 16, 5) ==
        doctest::Approx(std::pow(15.0 / 16.0, 5)).epsilon(1e-15));
  CHECK(curve_value(Theorem::SvdTail, 16, 4) == 0.75);
  CHECK(curve_value(Theorem::SvdTailInit, 16, 4) == doctest::Approx(1.0 - 5.0 / 16.0));
  CHECK(curve_value(Theorem::ShiftedDoubled, 8, 3) == 0.125);
  CHECK(curve_value(Theorem::TwoLayerRank, 16, 4) == doctest::Approx(1.0 - 9.0 / 16.0));
  CHECK_THROWS_AS(curve_value(Theorem::SignFlip, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(curve_value(Theorem::SignFlip, 8, -1), std::invalid_argument);

  const BoundCurve c = make_curve(Theorem::SignFlip, 8, 12);
  REQUIRE(c.values.size() == 13);
  for (int k = 0; k <= 12; ++k) CHECK(c.values[static_cast<size_t>(k)] ==
                                      curve_value(Theorem::SignFlip, 8, k));

  for (Theorem t : {Theorem::SignFlip, Theorem::Complement01, Theorem::Permute,
                    Theorem::Gaussian, Theorem::SawTooth, Theorem::IidCoupon, Theorem::SvdTail,
                    Theorem::SvdTailInit, Theorem::ShiftedDoubled, Theorem::TwoLayerRank})
    CHECK(theorem_from_name(theorem_name(t)) == t);
  CHECK_THROWS_AS(theorem_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("singular spectrum agrees with a jacobi eigenvalue oracle") {
  const Problem p = random_pm_problem(16, 16, 0, 77);
  const Spectrum s = singular_spectrum(p.X);
  const std::vector<double> eig = oracle::jacobi_eigenvalues(p.X.transpose() * p.X);
  REQUIRE(s.values.size() == 16);
  REQUIRE(eig.size() == 16);
  for (int i = 0; i < 16; ++i)
    CHECK(s.values(i) == doctest::Approx(eig[static_cast<size_t>(i)]).epsilon(1e-8));
  CHECK(s.frobenius_sq == doctest::Approx(256.0).epsilon(1e-10));
}

TEST_CASE("doubled hadamard target is spectrally flat") {
  const Problem p = doubled_hadamard_problem(sylvester(3), false);
  const Spectrum s = singular_spectrum(p.Y);
  REQUIRE(s.values.size() == 8);
  for (int i = 0; i < 8; ++i) CHECK(s.values(i) == doctest::Approx(16.0).epsilon(1e-10));
  // so the tail after k directions is exactly 1 - k/8
  for (int k = 0; k <= 8; ++k)
    CHECK(svd_tail_bound(p.Y, k) == doctest::Approx(1.0 - k / 8.0).epsilon(1e-10));
}

TEST_CASE("shifted doubled spectrum: closed form equals the numerical one") {
  const Problem p = doubled_hadamard_problem(sylvester(3), true);
  const Spectrum num = singular_spectrum(p.Y);
  const Spectrum closed = shifted_doubled_spectrum(8);
  REQUIRE(num.values.size() == 8);
  for (int i = 0; i < 8; ++i)
    CHECK(num.values(i) == doctest::Approx(closed.values(i)).epsilon(1e-8));
  CHECK(closed.values(0) == 36.0);
  CHECK(closed.values(7) == 4.0);
  CHECK(closed.frobenius_sq == 64.0);
  CHECK(num.frobenius_sq == doctest::Approx(64.0).epsilon(1e-10));

  // entry-count normalized tail: 1/4 - (k+1)/(4d)
  for (int k = 0; k <= 6; ++k) {
    double tail = 0.0;
    for (int i = k + 1; i < 8; ++i) tail += closed.values(i);
    CHECK(tail / (2.0 * 8.0 * 8.0) ==
          doctest::Approx(shifted_doubled_tail_curve(8, k)).epsilon(1e-12));
  }
}

TEST_CASE("svd tails on an orthogonal design") {
  const Matrix h = sylvester(4).dense();
  for (int k = 0; k <= 16; ++k)
    CHECK(svd_tail_bound(h, k) == doctest::Approx(1.0 - k / 16.0).epsilon(1e-12));
  for (int k = 0; k <= 15; ++k)
    CHECK(svd_tail_bound_with_init(h, k) ==
          doctest::Approx(curve_value(Theorem::SvdTailInit, 16, k)).epsilon(1e-12));
  CHECK_THROWS_AS(svd_tail_bound(h, 17), std::invalid_argument);
  CHECK_THROWS_AS(svd_tail_bound_with_init(h, 16), std::invalid_argument);
}

TEST_CASE("hypergeometric moments of the unseen labels") {
  const HypergeomStats h0 = hypergeometric_unseen_loss(16, 0);
  CHECK(h0.expected_total == 16.0);
  CHECK(h0.mean_q == 8.0);
  CHECK(h0.var_q == 0.0);
  const HypergeomStats h5 = hypergeometric_unseen_loss(16, 5);
  CHECK(h5.expected_total == doctest::Approx(16.0 - 80.0 / 15.0).epsilon(1e-14));
  CHECK(h5.mean_q == 5.5);
  CHECK(h5.var_q == doctest::Approx(11.0 / 12.0).epsilon(1e-14));
  const HypergeomStats full = hypergeometric_unseen_loss(16, 16);
  CHECK(full.expected_total == 0.0);
  CHECK(full.mean_q == 0.0);
  CHECK(full.var_q == 0.0);
  CHECK_THROWS_AS(hypergeometric_unseen_loss(15, 3), std::invalid_argument);
  CHECK_THROWS_AS(hypergeometric_unseen_loss(16, 17), std::invalid_argument);
}

TEST_CASE("the protocol simulator reproduces the closed-form expectation") {
  for (int k : {0, 3, 8, 15, 16}) {
    const PermutedSimulation sim = simulate_permuted_optimal_predictor(16, k, 2000, 5);
    const HypergeomStats h = hypergeometric_unseen_loss(16, k);
    const double slack = 4.0 * sim.total_loss.stderr_ + 1e-9;
    CHECK(std::abs(sim.total_loss.mean - h.expected_total) <= slack);
    CHECK(std::abs(sim.mean_q - h.mean_q) <= 4.0 * std::sqrt(h.var_q / 2000.0 + 1e-12) + 1e-9);
  }
  // k = d leaves nothing unseen, every trial is exactly zero
  const PermutedSimulation done = simulate_permuted_optimal_predictor(16, 16, 50, 5);
  CHECK(done.total_loss.mean == 0.0);
  CHECK(done.total_loss.stderr_ == 0.0);

  const PermutedSimulation a = simulate_permuted_optimal_predictor(16, 4, 200, 9);
  const PermutedSimulation b = simulate_permuted_optimal_predictor(16, 4, 200, 9);
  CHECK(a.total_loss.mean == b.total_loss.mean);
  const PermutedSimulation c = simulate_permuted_optimal_predictor(16, 4, 200, 10);
  CHECK(a.total_loss.mean != c.total_loss.mean);
}

TEST_CASE("iid coupon simulator tracks its curve") {
  for (int k : {0, 4, 16, 48}) {
    const MonteCarlo mc = simulate_iid_unseen_fraction(16, k, 4000, 3);
    CHECK(std::abs(mc.mean - curve_value(Theorem::IidCoupon, 16, k)) <=
          4.0 * mc.stderr_ + 1e-9);
  }
}

TEST_CASE("span basis is orthonormal and contains its generators") {
  const Problem p = sign_flip_problem(sylvester(3), 53);
  const Matrix w1 = draw_two_layer_init(8, 4, Init::gaussian(), 5).W1;
  const Vector w2 = draw_two_layer_init(8, 4, Init::gaussian(), 5).w2;
  const Matrix xtr = p.X.topRows(2);
  const Matrix basis = two_layer_span_basis(w1, w2, xtr);
  CHECK(basis.cols() <= 5);
  const Matrix gram = basis.transpose() * basis;
  CHECK((gram - Matrix::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff() < 1e-12);

  CHECK(span_residual(basis, w1 * w2) < 1e-10);
  for (int t = 0; t < 2; ++t) {
    CHECK(span_residual(basis, xtr.row(t).transpose()) < 1e-10);
    CHECK(span_residual(basis, w1 * (w1.transpose() * xtr.row(t).transpose())) < 1e-10);
  }

  // a direction orthogonalized against the basis is fully outside it
  Vector g(8);
  g << 1, -2, 3, 0.5, -1, 2, 0.25, -3;
  Vector out = g - basis * (basis.transpose() * g);
  REQUIRE(out.norm() > 1e-6);
  CHECK(span_residual(basis, out) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(span_residual(basis, Vector::Zero(8)) == 0.0);
}

TEST_CASE("unseen-coordinate value sweep is minimized at zero") {
  CHECK(zero_init_unseen_term(16, 4, 0.0) == 0.75);
  const double t1 = 1.0 / 4.0;  // sqrt(d) t = 1
  CHECK(zero_init_unseen_term(16, 4, t1) == doctest::Approx(1.5).epsilon(1e-12));
  std::vector<double> grid;
  for (int i = -10; i <= 10; ++i) grid.push_back(i * 0.05);
  const auto rows = zero_init_optimality_sweep(16, 4, grid);
  REQUIRE(rows.size() == grid.size());
  for (const SweepRow& r : rows) {
    CHECK(r.value >= 0.75 - 1e-12);
    CHECK(r.value == doctest::Approx(zero_init_unseen_term(16, 4, -r.t)).epsilon(1e-12));
  }
}

TEST_CASE("spectrum concentration report is internally consistent") {
  const ConcentrationReport rep = spectrum_concentration_experiment(16, 2, 40, 21);
  CHECK(rep.frobenius_exact_all);
  CHECK(rep.deterministic_bound_all);
  CHECK(rep.c_hat > 1.0);
  CHECK(rep.c_hat < 3.0);
  REQUIRE(rep.s1.size() == 40);
  REQUIRE(rep.tail_fraction.size() == 40);
  REQUIRE(rep.fraction_meeting.size() == rep.t_grid.size());
  double sum = 0.0, mn = 1.0;
  for (double f : rep.tail_fraction) {
    sum += f;
    mn = std::min(mn, f);
  }
  CHECK(rep.mean_tail_fraction == doctest::Approx(sum / 40.0).epsilon(1e-14));
  CHECK(rep.min_tail_fraction == doctest::Approx(mn).epsilon(1e-14));
  // larger slack t admits no fewer trials
  for (size_t i = 1; i < rep.fraction_meeting.size(); ++i)
    CHECK(rep.fraction_meeting[i] >= rep.fraction_meeting[i - 1]);
}
