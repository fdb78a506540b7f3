#include "spindle/learners.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace spindle;

namespace {

Problem tiny_problem(int n, int d) {
  Problem p;
  p.X.resize(n, d);
  p.Y.resize(n, 1);
  return p;
}

}  // namespace

TEST_CASE("reported losses and their best-constant values") {
  CHECK(loss_value(LossKind::Square, 1.0, 0.0) == 1.0);
  CHECK(loss_value(LossKind::Square, -1.0, 0.5) == 2.25);
  CHECK(loss_value(LossKind::Absolute, 1.0, -0.5) == 1.5);
  CHECK(loss_value(LossKind::Hinge, 1.0, 0.25) == 0.75);
  CHECK(loss_value(LossKind::Hinge, -1.0, -2.0) == 0.0);

  CHECK(loss_property_constant(LossKind::Square, LabelRange::PlusMinus) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(loss_property_constant(LossKind::Square, LabelRange::ZeroOne) ==
        doctest::Approx(0.25).epsilon(1e-9));
  CHECK(loss_property_constant(LossKind::Absolute, LabelRange::PlusMinus) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(loss_property_constant(LossKind::Absolute, LabelRange::ZeroOne) ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK(loss_property_constant(LossKind::Hinge, LabelRange::PlusMinus) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(loss_property_constant(LossKind::Square, LabelRange::Real),
                  std::invalid_argument);

  for (LossKind k : {LossKind::Square, LossKind::Absolute, LossKind::Hinge})
    CHECK(loss_from_name(loss_name(k)) == k);
  CHECK_THROWS_AS(loss_from_name("log"), std::invalid_argument);
  for (LearnerKind k : {LearnerKind::LinearGd, LearnerKind::Spindly, LearnerKind::Egu,
                        LearnerKind::TwoLayer, LearnerKind::Mlp, LearnerKind::LeastSquares})
    CHECK(learner_from_name(learner_name(k)) == k);
  CHECK_THROWS_AS(learner_from_name("adam"), std::invalid_argument);
}

TEST_CASE("zero-init gradient descent on orthogonal signed rows is exact") {
  const Problem p = sign_flip_problem(sylvester(4), 13);
  LearnerConfig cfg = default_config(LearnerKind::LinearGd, 16);
  for (int k : {0, 1, 4, 9, 16}) {
    const LinearModel m = train_linear_gd(p, k, cfg);
    // all quantities are dyadic, so the mean loss is exactly 1 - k/16
    CHECK(average_loss(m, p, LossKind::Square) == 1.0 - k / 16.0);
    for (int t = 0; t < k; ++t)
      CHECK(m.predict(p.X.row(t)) == p.Y(t, 0));
  }
}

TEST_CASE("argument validation is shared across the gradient learners") {
  const Problem p = sign_flip_problem(sylvester(3), 1);
  LearnerConfig cfg = default_config(LearnerKind::LinearGd, 8);
  CHECK_THROWS_AS(train_linear_gd(p, -1, cfg), std::invalid_argument);
  CHECK_THROWS_AS(train_linear_gd(p, 9, cfg), std::invalid_argument);
  LearnerConfig no_eta = cfg;
  no_eta.eta = 0.0;
  CHECK_THROWS_AS(train_linear_gd(p, 4, no_eta), std::invalid_argument);
  LearnerConfig no_epochs = cfg;
  no_epochs.epochs = 0;
  CHECK_THROWS_AS(train_linear_gd(p, 4, no_epochs), std::invalid_argument);
  LearnerConfig bad_clip = cfg;
  bad_clip.clip = Clip{1.0, -1.0};
  CHECK_THROWS_AS(train_linear_gd(p, 4, bad_clip), std::invalid_argument);
  CHECK_THROWS_AS(train_linear_gd(p, 4, cfg, Vector::Zero(7)), std::invalid_argument);
}

TEST_CASE("spindly dynamics: zero is a fixed point, nonzero init moves") {
  const Problem p = sign_flip_problem(sylvester(4), 3);
  LearnerConfig cfg = default_config(LearnerKind::Spindly, 16);

  LearnerConfig zero_cfg = cfg;
  zero_cfg.init = Init::zero();
  const SpindlyModel stuck = train_spindly(p, 16, zero_cfg);
  CHECK(stuck.u.cwiseAbs().maxCoeff() == 0.0);
  CHECK(average_loss(stuck, p, LossKind::Square) == 1.0);

  const SpindlyModel moved = train_spindly(p, 16, cfg);
  CHECK(moved.weights().cwiseAbs().maxCoeff() > 1.0 / 16.0);
  CHECK(average_loss(moved, p, LossKind::Square) < 1.0);
}

TEST_CASE("spindly online-to-batch keeps the pre-update hypothesis trail") {
  const Problem p = sign_flip_problem(sylvester(3), 5);
  LearnerConfig cfg = default_config(LearnerKind::Spindly, 8);
  cfg.online_to_batch = true;

  const SpindlyModel empty = train_spindly(p, 0, cfg);
  REQUIRE(empty.history.size() == 1);
  CHECK((empty.history[0] - Vector::Constant(8, 1.0 / 8.0)).cwiseAbs().maxCoeff() == 0.0);
  // k = 0 scores the init hypothesis alone: zero-knowledge loss above the
  // best constant since the init predicts sum_i x_i / 64
  CHECK(average_loss(empty, p, LossKind::Square) > 0.0);

  const SpindlyModel m = train_spindly(p, 5, cfg);
  REQUIRE(m.history.size() == 5);
  CHECK((m.history[0] - Vector::Constant(8, 1.0 / 8.0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((m.history[4] - m.u).cwiseAbs().maxCoeff() > 0.0);

  LearnerConfig multi = cfg;
  multi.epochs = 2;
  CHECK_THROWS_AS(train_spindly(p, 5, multi), std::invalid_argument);
}

TEST_CASE("egu requires a strictly positive start") {
  const Problem p = sign_flip_problem(sylvester(3), 2);
  LearnerConfig cfg = default_config(LearnerKind::Egu, 8);
  LearnerConfig zero_cfg = cfg;
  zero_cfg.init = Init::zero();
  CHECK_THROWS_AS(train_egu(p, 4, zero_cfg), std::invalid_argument);
  LearnerConfig neg_cfg = cfg;
  neg_cfg.init = Init::constant(-0.1);
  CHECK_THROWS_AS(train_egu(p, 4, neg_cfg), std::invalid_argument);
  const LinearModel m = train_egu(p, 8, cfg);
  CHECK(m.w.minCoeff() > 0.0);
}

TEST_CASE("egu at four times the rate tracks spindly to first order") {
  Vector w_star = Vector::Zero(8);
  w_star(2) = 1.0;
  const Problem p = gaussian_problem(8, 8, w_star, 5);

  const double c = 0.5;
  LearnerConfig scfg;
  scfg.eta = 1e-4;
  scfg.init = Init::constant(c);
  const SpindlyModel s = train_spindly(p, 3, scfg);

  LearnerConfig ecfg;
  ecfg.eta = 4e-4;
  ecfg.init = Init::constant(c * c);
  const LinearModel e = train_egu(p, 3, ecfg);

  const Vector sw = s.weights();
  CHECK((sw - Vector::Constant(8, c * c)).cwiseAbs().maxCoeff() > 1e-5);
  CHECK((sw - e.w).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("two-layer batch gradient matches a finite-difference oracle") {
  Vector w_star = Vector::Zero(4);
  w_star(1) = 1.0;
  const Problem p = gaussian_problem(4, 5, w_star, 17);
  const int k = 3, h = 3;
  const TwoLayerInit init = draw_two_layer_init(4, h, Init::gaussian(), 23);

  LearnerConfig cfg;
  cfg.eta = 1e-3;
  cfg.epochs = 1;
  const TwoLayerModel m = train_two_layer(p, k, cfg, init);

  const auto mean_loss = [&](const Matrix& W1, const Vector& w2) {
    double total = 0.0;
    for (int t = 0; t < k; ++t) {
      const double r = p.X.row(t) * W1 * w2 - p.Y(t, 0);
      total += 0.5 * r * r;
    }
    return total / k;
  };

  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < h; ++j) {
      const double implied = (init.W1(i, j) - m.W1(i, j)) / cfg.eta;
      const double fd = oracle::central_diff(
          [&](double v) {
            Matrix W = init.W1;
            W(i, j) = v;
            return mean_loss(W, init.w2);
          },
          init.W1(i, j));
      CHECK(implied == doctest::Approx(fd).epsilon(1e-6));
    }
  for (int j = 0; j < h; ++j) {
    const double implied = (init.w2(j) - m.w2(j)) / cfg.eta;
    const double fd = oracle::central_diff(
        [&](double v) {
          Vector w = init.w2;
          w(j) = v;
          return mean_loss(init.W1, w);
        },
        init.w2(j));
    CHECK(implied == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("trained two-layer effective weights stay in the reachable span") {
  const Problem p = sign_flip_problem(sylvester(3), 9);
  const int k = 3;
  LearnerConfig cfg = default_config(LearnerKind::TwoLayer, 8);
  cfg.hidden_units = 4;
  cfg.init_seed = 31;
  const TwoLayerModel m = train_two_layer(p, k, cfg);

  Matrix span(8, 1 + 2 * k);
  span.col(0) = m.W1_init * m.w2_init;
  span.middleCols(1, k) = m.W1_init * (m.W1_init.transpose() * m.X_train.transpose());
  span.rightCols(k) = m.X_train.transpose();
  const Vector v = m.effective_weights();
  const Vector residual = v - span * span.colPivHouseholderQr().solve(v);
  CHECK(residual.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("mlp input gradient matches a finite-difference oracle") {
  const MlpInit init = draw_mlp_init(4, 3, Init::gaussian(), 41);
  MlpModel m{init.W, init.a, std::nullopt};
  Vector x(4);
  x << 0.7, -1.2, 0.3, 2.0;
  const double y = -0.6;

  const Matrix g = mlp_input_gradient(m, x, y);
  REQUIRE(g.rows() == 4);
  REQUIRE(g.cols() == 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) {
      const double fd = oracle::central_diff(
          [&](double v) {
            MlpModel probe = m;
            probe.W(i, j) = v;
            return mlp_example_loss(probe, x, y);
          },
          m.W(i, j));
      CHECK(g(i, j) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("mlp training reduces loss on a small problem") {
  const Problem p = sign_flip_problem(sylvester(3), 19);
  LearnerConfig cfg = default_config(LearnerKind::Mlp, 8);
  cfg.init_seed = 3;
  const MlpModel before = train_mlp(p, 0, cfg);
  const MlpModel after = train_mlp(p, 8, cfg);
  CHECK(average_loss(after, p, LossKind::Square) <
        average_loss(before, p, LossKind::Square));
}

TEST_CASE("least squares interpolates seen rows with the minimum-norm solution") {
  const Problem p = sign_flip_problem(sylvester(4), 29);
  const LinearModel empty = least_squares(p, 0);
  CHECK(empty.w.cwiseAbs().maxCoeff() == 0.0);

  const LinearModel full = least_squares(p, 16);
  CHECK(average_loss(full, p, LossKind::Square) < 1e-20);

  const int k = 5;
  const LinearModel m = least_squares(p, k);
  for (int t = 0; t < k; ++t)
    CHECK(m.predict(p.X.row(t)) == doctest::Approx(p.Y(t, 0)).epsilon(1e-10));
  // rows are orthogonal here, so min-norm = sum_t y_t x_t / d exactly
  Vector expect = Vector::Zero(16);
  for (int t = 0; t < k; ++t) expect += p.Y(t, 0) * p.X.row(t).transpose() / 16.0;
  CHECK((m.w - expect).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(least_squares(p, 17), std::invalid_argument);
}

TEST_CASE("runaway rates raise the divergence error") {
  const Problem p = sign_flip_problem(sylvester(4), 7);
  LearnerConfig cfg;
  cfg.eta = 1.0;
  cfg.epochs = 30;
  cfg.init = Init::zero();
  CHECK_THROWS_AS(train_linear_gd(p, 16, cfg), DivergenceError);

  LearnerConfig scfg;
  scfg.eta = 10.0;
  scfg.epochs = 20;
  scfg.init = Init::constant(1.0);
  CHECK_THROWS_AS(train_spindly(p, 16, scfg), DivergenceError);
}

TEST_CASE("clipping caps evaluated predictions but never the updates") {
  LinearModel m{Vector::Zero(4), Clip{-0.5, 0.5}};
  m.w(0) = 10.0;
  Vector e1 = Vector::Zero(4);
  e1(0) = 1.0;
  CHECK(m.predict_raw(e1) == 10.0);
  CHECK(m.predict(e1) == 0.5);
  CHECK(m.predict(-e1) == -0.5);

  Problem p = tiny_problem(1, 4);
  p.X.row(0) = e1.transpose();
  p.Y(0, 0) = 1.0;
  CHECK(average_loss(m, p, LossKind::Square) == 0.25);

  // updates see the raw prediction: one step from the same state moves by
  // eta * (10 - 1) regardless of the clip
  LearnerConfig cfg;
  cfg.eta = 0.01;
  cfg.clip = Clip{-0.5, 0.5};
  const LinearModel stepped = train_linear_gd(p, 1, cfg, m.w);
  CHECK(stepped.w(0) == doctest::Approx(10.0 - 0.01 * 9.0).epsilon(1e-12));
}

TEST_CASE("reflective sign model copies the first label through a frozen axis") {
  const Problem p = sign_flip_problem(sylvester(3), 37);
  const ReflectiveSignModel m = train_reflective_sign(p, 3, 11);
  CHECK(std::abs(m.w_bottom(0)) == 1.0);
  for (int i = 1; i < 8; ++i) CHECK(m.w_bottom(i) == 0.0);
  CHECK(m.predict(p.X.row(0)) == p.Y(0, 0));

  Problem degenerate = tiny_problem(1, 4);
  degenerate.X.setZero();
  degenerate.Y(0, 0) = 1.0;
  CHECK_THROWS_AS(train_reflective_sign(degenerate, 1, 11), std::runtime_error);
}

TEST_CASE("initial weight draws are deterministic in the seed") {
  const Vector a = draw_linear_init(8, Init::gaussian(), 4);
  const Vector b = draw_linear_init(8, Init::gaussian(), 4);
  const Vector c = draw_linear_init(8, Init::gaussian(), 5);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
  CHECK(draw_linear_init(8, Init::constant(0.125), 0) == Vector::Constant(8, 0.125));
  Vector fixed(3);
  fixed << 1.0, 2.0, 3.0;
  CHECK(draw_linear_init(3, Init::fixed(fixed), 0) == fixed);
  CHECK_THROWS_AS(draw_linear_init(4, Init::fixed(fixed), 0), std::invalid_argument);

  const TwoLayerInit t = draw_two_layer_init(6, 3, Init::zero(), 8);
  CHECK(t.W1.cwiseAbs().maxCoeff() == 0.0);
  CHECK(t.w2.cwiseAbs().maxCoeff() > 0.0);  // top layer is always random
  CHECK_THROWS_AS(draw_two_layer_init(6, 3, Init::constant(1.0), 8), std::invalid_argument);
}

TEST_CASE("default configurations record the tuned rates") {
  const LearnerConfig lin = default_config(LearnerKind::LinearGd, 32);
  CHECK(lin.eta == 1.0 / 32.0);
  CHECK(lin.init.kind == Init::Kind::Zero);
  CHECK(lin.epochs == 1);
  const LearnerConfig sp = default_config(LearnerKind::Spindly, 32);
  CHECK(sp.eta == kDefaultSpindlyEta);
  CHECK(sp.init.kind == Init::Kind::Constant);
  CHECK(sp.init.value == 1.0 / 32.0);
  const LearnerConfig egu = default_config(LearnerKind::Egu, 32);
  CHECK(egu.eta == kDefaultEguEta);
  CHECK(egu.init.value == 1.0 / 1024.0);
  const LearnerConfig tl = default_config(LearnerKind::TwoLayer, 32);
  CHECK(tl.eta == kDefaultTwoLayerEtaScale / 32.0);
  CHECK(tl.epochs == kDefaultTwoLayerEpochs);
  const LearnerConfig mlp = default_config(LearnerKind::Mlp, 32);
  CHECK(mlp.eta == kDefaultMlpEta);
  CHECK(mlp.epochs == kDefaultMlpEpochs);
  CHECK_THROWS_AS(default_config(LearnerKind::LinearGd, 0), std::invalid_argument);
}

TEST_CASE("the type-erased facade trains the same model as the direct calls") {
  Vector w_star = Vector::Zero(8);
  w_star(1) = 1.0;
  const Problem p = gaussian_problem(8, 8, w_star, 11);
  const int k = 4;
  for (LearnerKind kind : {LearnerKind::LinearGd, LearnerKind::Spindly, LearnerKind::Egu,
                           LearnerKind::TwoLayer, LearnerKind::Mlp, LearnerKind::LeastSquares}) {
    LearnerConfig cfg = default_config(kind, 8);
    cfg.init_seed = 7;
    const TrainedModel facade = train_learner(kind, p, k, cfg);
    double direct = 0.0;
    switch (kind) {
      case LearnerKind::LinearGd:
        direct = average_loss(train_linear_gd(p, k, cfg), p, LossKind::Square);
        break;
      case LearnerKind::Spindly:
        direct = average_loss(train_spindly(p, k, cfg), p, LossKind::Square);
        break;
      case LearnerKind::Egu:
        direct = average_loss(train_egu(p, k, cfg), p, LossKind::Square);
        break;
      case LearnerKind::TwoLayer:
        direct = average_loss(train_two_layer(p, k, cfg), p, LossKind::Square);
        break;
      case LearnerKind::Mlp:
        direct = average_loss(train_mlp(p, k, cfg), p, LossKind::Square);
        break;
      case LearnerKind::LeastSquares:
        direct = average_loss(least_squares(p, k), p, LossKind::Square);
        break;
    }
    CHECK(facade.avg_loss(p, LossKind::Square) == direct);
  }
}
