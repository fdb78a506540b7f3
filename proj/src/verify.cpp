#include "spindle/harness.hpp"

#include "spindle/rng.hpp"
#include "spindle/rotation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace spindle {

namespace {

struct SuiteCtx {
  VerifyReport* rep = nullptr;
  std::uint64_t master = 1;
  int workers = 0;
};

void add_check(SuiteCtx& c, const std::string& suite, const std::string& name, double value,
               double target, const std::string& relation, bool pass) {
  c.rep->checks.push_back({suite, name, value, target, relation, pass});
  if (!pass) c.rep->all_pass = false;
}

void check_ge(SuiteCtx& c, const std::string& suite, const std::string& name, double value,
              double floor_value) {
  add_check(c, suite, name, value, floor_value, ">=", value >= floor_value - 1e-12);
}

void check_le(SuiteCtx& c, const std::string& suite, const std::string& name, double value,
              double cap) {
  add_check(c, suite, name, value, cap, "<=", value <= cap + 1e-12);
}

void check_close(SuiteCtx& c, const std::string& suite, const std::string& name, double value,
                 double target, double tol) {
  add_check(c, suite, name, value, target, "~=", std::abs(value - target) <= tol);
}

void report_row(SuiteCtx& c, const std::string& suite, const std::string& name, double value) {
  add_check(c, suite, name, value, 0.0, "report", true);
}

std::uint64_t suite_seed(const SuiteCtx& c, const char* label) {
  return Rng(c.master).substream(label).next_u64();
}

ExperimentSpec lean_spec(const SuiteCtx& c, Family family, LearnerKind learner, int d,
                         int seeds, const char* seed_label) {
  ExperimentSpec s;
  s.family = family;
  s.learner = learner;
  s.d = d;
  s.seeds = seeds;
  s.master_seed = suite_seed(c, seed_label);
  s.workers = c.workers;
  return s;
}

// --- T1: sign-flip lower bound -------------------------------------------

void suite_t1(SuiteCtx& c) {
  const int d = 16;
  {
    ExperimentSpec s = lean_spec(c, Family::SignFlip, LearnerKind::LinearGd, d, 500, "t1-zero");
    s.config.eta = 1.0 / d;
    s.config.init = Init::zero();
    const ExperimentResult r = run_experiment(s);
    double max_dev = 0.0, max_tol = 0.0;
    for (size_t i = 0; i < r.k.size(); ++i) {
      max_dev = std::max(max_dev, std::abs(r.mean[i] - r.bound[i]));
      max_tol = std::max(max_tol, 3.0 * r.stderr_[i]);
    }
    check_close(c, "T1", "zero-init mean equals curve (max dev over k)", max_dev, 0.0,
                std::max(max_tol, 1e-12));
  }
  {
    ExperimentSpec s = lean_spec(c, Family::SignFlip, LearnerKind::LinearGd, d, 500, "t1-gauss");
    s.config.eta = 1.0 / d;
    s.config.init = Init::gaussian();
    const ExperimentResult r = run_experiment(s);
    for (size_t i = 0; i < r.k.size(); ++i)
      check_ge(c, "T1", "gaussian-init mean above curve, k=" + std::to_string(r.k[i]),
               r.mean[i], r.bound[i] - 3.0 * r.stderr_[i]);
  }
  {
    ExperimentSpec s = lean_spec(c, Family::SignFlip, LearnerKind::Mlp, d, 40, "t1-mlp");
    s.k_values = {0, 4, 8, 12, 16};
    const ExperimentResult r = run_experiment(s);
    for (size_t i = 0; i < r.k.size(); ++i)
      check_ge(c, "T1", "mlp mean above curve, k=" + std::to_string(r.k[i]), r.mean[i],
               r.bound[i] - 3.0 * r.stderr_[i]);
  }
}

// --- T2: complement lower bound ------------------------------------------

void suite_t2(SuiteCtx& c) {
  const int d = 16;
  check_close(c, "T2", "best constant loss on 0/1 labels",
              loss_property_constant(LossKind::Square, LabelRange::ZeroOne), 0.25, 1e-9);
  check_close(c, "T2", "best constant loss on +-1 labels",
              loss_property_constant(LossKind::Square, LabelRange::PlusMinus), 1.0, 1e-9);

  // The constant-1/2 predictor scores exactly 1/4 on every seed and k.
  {
    const Rng base = Rng(suite_seed(c, "t2-const"));
    double max_dev = 0.0;
    for (int s = 0; s < 500; ++s) {
      const Problem p =
          complement_problem(strip_first_row(sylvester(4)),
                             base.substream("problem", static_cast<std::uint64_t>(s)).next_u64());
      const Vector y = p.y();
      double total = 0.0;
      for (int t = 0; t < p.n(); ++t) total += (y(t) - 0.5) * (y(t) - 0.5);
      max_dev = std::max(max_dev, std::abs(total / p.n() - 0.25));
    }
    check_close(c, "T2", "constant-1/2 predictor loss equals 1/4 (max dev)", max_dev, 0.0,
                1e-12);
    check_ge(c, "T2", "constant predictor above curve at k=0", 0.25,
             curve_value(Theorem::Complement01, d, 0));
  }
  {
    ExperimentSpec s =
        lean_spec(c, Family::Complement01, LearnerKind::LinearGd, d, 500, "t2-gd");
    s.config.eta = 1.0 / d;
    s.config.init = Init::zero();
    const ExperimentResult r = run_experiment(s);
    for (size_t i = 0; i < r.k.size(); ++i)
      check_ge(c, "T2", "linear GD mean above curve, k=" + std::to_string(r.k[i]), r.mean[i],
               r.bound[i] - 3.0 * r.stderr_[i]);
  }
}

// --- T3: permuted-problem optimal predictor ------------------------------

void suite_t3(SuiteCtx& c) {
  const int d = 16;
  const std::uint64_t seed = suite_seed(c, "t3-mc");
  for (int k : {0, 1, 4, 8, 12, 15, 16}) {
    const PermutedSimulation sim = simulate_permuted_optimal_predictor(d, k, 2000, seed + k);
    const HypergeomStats h = hypergeometric_unseen_loss(d, k);
    check_close(c, "T3", "MC total unseen loss matches closed form, k=" + std::to_string(k),
                sim.total_loss.mean, h.expected_total,
                3.0 * sim.total_loss.stderr_ + 1e-9);
  }
  {
    ExperimentSpec s = lean_spec(c, Family::Permuted, LearnerKind::LinearGd, d, 200, "t3-gd");
    s.config.eta = 1.0 / d;
    s.config.init = Init::zero();
    s.k_values = {0, 4, 8, 12, 16};
    const ExperimentResult r = run_experiment(s);
    for (size_t i = 0; i < r.k.size(); ++i)
      check_ge(c, "T3", "linear GD mean above curve, k=" + std::to_string(r.k[i]), r.mean[i],
               r.bound[i] - 3.0 * r.stderr_[i]);
  }
}

// --- T4/T5: Gaussian family ----------------------------------------------

void suite_t4(SuiteCtx& c) {
  const int d = 16;
  ExperimentSpec s = lean_spec(c, Family::GaussianSparse, LearnerKind::LinearGd, d, 300, "t4");
  s.config.eta = 0.5 / d;
  s.config.init = Init::zero();
  s.k_values = {0, 2, 4, 6, 8, 10, 12, 14, 16};
  const ExperimentResult r = run_experiment(s);
  for (size_t i = 0; i < r.k.size(); ++i)
    check_ge(c, "T4", "linear GD mean above squared curve, k=" + std::to_string(r.k[i]),
             r.mean[i], r.bound[i] - 3.0 * r.stderr_[i]);
}

void suite_t5(SuiteCtx& c) {
  const int d = 16;
  {
    ExperimentSpec s =
        lean_spec(c, Family::GaussianSparse, LearnerKind::LeastSquares, d, 500, "t5");
    const ExperimentResult r = run_experiment(s);
    for (size_t i = 0; i < r.k.size(); ++i)
      check_close(c, "T5", "least-squares mean equals squared curve, k=" + std::to_string(r.k[i]),
                  r.mean[i], r.bound[i], std::max(3.0 * r.stderr_[i], 1e-12));
  }
  {
    const Rng base = Rng(suite_seed(c, "t5-seen"));
    Vector w_star = Vector::Zero(d);
    w_star(1) = 1.0;
    double max_seen = 0.0;
    for (int s = 0; s < 40; ++s) {
      const Problem p = gaussian_problem(
          d, d, w_star, base.substream("problem", static_cast<std::uint64_t>(s)).next_u64());
      for (int k : {1, 8, 16}) {
        const LinearModel m = least_squares(p, k);
        const Vector y = p.y();
        for (int t = 0; t < k; ++t) {
          const double r = y(t) - m.predict(p.X.row(t));
          max_seen = std::max(max_seen, r * r);
        }
      }
    }
    check_le(c, "T5", "max seen-row loss over seeds", max_seen, 1e-10);
  }
}

// --- S5: zero-init optimality sweep --------------------------------------

void suite_s5(SuiteCtx& c) {
  const int d = 16, k = 4;
  std::vector<double> grid;
  for (int i = -10; i <= 10; ++i) grid.push_back(i * 0.05);
  const auto rows = zero_init_optimality_sweep(d, k, grid);
  double best = rows.front().value;
  double best_t = rows.front().t;
  for (const auto& row : rows)
    if (row.value < best) { best = row.value; best_t = row.t; }
  check_close(c, "S5", "sweep minimum is at t=0", best_t, 0.0, 1e-15);
  check_close(c, "S5", "value at t=0 equals 1-k/d", zero_init_unseen_term(d, k, 0.0),
              1.0 - static_cast<double>(k) / d, 1e-15);
  double max_asym = 0.0;
  for (double t : {0.05, 0.1, 0.25, 0.5})
    max_asym = std::max(max_asym, std::abs(zero_init_unseen_term(d, k, t) -
                                           zero_init_unseen_term(d, k, -t)));
  check_close(c, "S5", "sweep is symmetric in t (max asymmetry)", max_asym, 0.0, 1e-12);
  bool monotone = true;
  for (size_t i = 11; i + 1 < rows.size(); ++i)
    if (rows[i + 1].value < rows[i].value - 1e-15) monotone = false;
  add_check(c, "S5", "sweep increases with |t|", monotone ? 1.0 : 0.0, 1.0, "==", monotone);
}

// --- T6/T7: spectral tails -----------------------------------------------

void suite_t6(SuiteCtx& c) {
  for (int q = 2; q <= 8; ++q) {
    const int d = 1 << q;
    const Matrix h = sylvester(q).dense();
    double max_dev = 0.0;
    for (int k = 0; k <= d; ++k)
      max_dev = std::max(max_dev,
                         std::abs(svd_tail_bound(h, k) - (1.0 - static_cast<double>(k) / d)));
    check_le(c, "T6", "tail bound equals 1-k/d, d=" + std::to_string(d), max_dev, 1e-10);
    const Spectrum s = singular_spectrum(h);
    check_le(c, "T6", "flat spectrum (max dev from d), d=" + std::to_string(d),
             (s.values.array() - static_cast<double>(d)).abs().maxCoeff(), 1e-8 * d);
  }
}

void suite_t7(SuiteCtx& c) {
  for (int q : {2, 4, 6}) {
    const int d = 1 << q;
    const Problem p = doubled_hadamard_problem(sylvester(q), false);
    double max_dev = 0.0;
    for (int k = 0; k < d; ++k)
      max_dev = std::max(max_dev, std::abs(svd_tail_bound_with_init(p.Y, k) -
                                           (1.0 - static_cast<double>(k + 1) / d)));
    check_le(c, "T7", "with-init tail equals 1-(k+1)/d, d=" + std::to_string(d), max_dev,
             1e-10);
    const Spectrum s = singular_spectrum(p.Y);
    check_le(c, "T7", "doubled spectrum flat at 2d, d=" + std::to_string(d),
             (s.values.array() - 2.0 * d).abs().maxCoeff(), 1e-8 * 2 * d);
  }
}

// --- CorS6: shifted doubled targets --------------------------------------

void suite_cors6(SuiteCtx& c) {
  {
    const Spectrum s4 = shifted_doubled_spectrum(4);
    const double table[4] = {10.0, 2.0, 2.0, 2.0};
    double max_dev = 0.0;
    for (int i = 0; i < 4; ++i) max_dev = std::max(max_dev, std::abs(s4.values(i) - table[i]));
    check_close(c, "CorS6", "closed spectrum at d=4 is {10,2,2,2}", max_dev, 0.0, 1e-12);
  }
  for (int q : {2, 4, 6}) {
    const int d = 1 << q;
    const Problem p = doubled_hadamard_problem(sylvester(q), true);
    const Spectrum numerical = singular_spectrum(p.Y);
    const Spectrum closed = shifted_doubled_spectrum(d);
    double max_dev = 0.0;
    for (int i = 0; i < d; ++i)
      max_dev = std::max(max_dev, std::abs(numerical.values(i) - closed.values(i)));
    check_le(c, "CorS6", "numerical spectrum matches closed form, d=" + std::to_string(d),
             max_dev, 1e-8 * closed.values(0));
    check_close(c, "CorS6", "spectrum sums to d^2, d=" + std::to_string(d),
                numerical.frobenius_sq, static_cast<double>(d) * d, 1e-8 * d * d);
    const double entries = 2.0 * d * d;
    double max_curve_dev = 0.0;
    for (int k = 0; k < d; ++k) {
      double tail = 0.0;
      for (int i = k + 1; i < d; ++i) tail += numerical.values(i);
      max_curve_dev =
          std::max(max_curve_dev, std::abs(tail / entries - shifted_doubled_tail_curve(d, k)));
    }
    check_le(c, "CorS6", "per-entry tail equals 1/4-(k+1)/(4d), d=" + std::to_string(d),
             max_curve_dev, 1e-10);
  }
}

// --- T9: two-layer span certificates -------------------------------------

void suite_t9(SuiteCtx& c) {
  const int d = 32;
  const std::uint64_t seed = suite_seed(c, "t9");
  Vector w_star = Vector::Zero(d);
  w_star(1) = 1.0;
  const Problem p = gaussian_problem(d, d, w_star, seed);
  LearnerConfig cfg;
  cfg.eta = kDefaultTwoLayerEtaScale / d;
  cfg.epochs = 100;

  for (int k = 1; k <= 8; ++k) {
    {
      const TwoLayerInit init = draw_two_layer_init(d, 16, Init::gaussian(), seed + k);
      const TwoLayerModel m = train_two_layer(p, k, cfg, init);
      const Matrix basis = two_layer_span_basis(m.W1_init, m.w2_init, m.X_train);
      check_le(c, "T9", "gaussian-init span residual, k=" + std::to_string(k),
               span_residual(basis, m.effective_weights()), 1e-8);
      check_le(c, "T9", "gaussian-init span rank, k=" + std::to_string(k),
               static_cast<double>(basis.cols()), 2.0 * k + 1.0);
    }
    {
      TwoLayerInit init;
      init.W1 = random_orthogonal(d, seed + 100 + k).U;
      init.w2 = draw_two_layer_init(d, d, Init::gaussian(), seed + 200 + k).w2;
      const TwoLayerModel m = train_two_layer(p, k, cfg, init);
      const Matrix basis = two_layer_span_basis(m.W1_init, m.w2_init, m.X_train);
      check_le(c, "T9", "orthogonal-init span residual, k=" + std::to_string(k),
               span_residual(basis, m.effective_weights()), 1e-8);
      check_le(c, "T9", "orthogonal-init span rank, k=" + std::to_string(k),
               static_cast<double>(basis.cols()), k + 1.0);
    }
    {
      const TwoLayerInit init = draw_two_layer_init(d, 16, Init::zero(), seed + 300 + k);
      const TwoLayerModel m = train_two_layer(p, k, cfg, init);
      const Matrix basis = two_layer_span_basis(m.W1_init, m.w2_init, m.X_train);
      check_le(c, "T9", "zero-init span residual, k=" + std::to_string(k),
               span_residual(basis, m.effective_weights()), 1e-8);
      check_le(c, "T9", "zero-init span rank, k=" + std::to_string(k),
               static_cast<double>(basis.cols()), static_cast<double>(k));
    }
  }
}

// --- S2: rotation invariance ---------------------------------------------

void suite_s2(SuiteCtx& c) {
  const int d = 16, k = 8;
  const std::uint64_t seed = suite_seed(c, "s2");
  Vector w_star = Vector::Zero(d);
  w_star(1) = 1.0;
  const Problem p = gaussian_problem(d, d, w_star, seed);

  LearnerConfig linear_cfg;
  linear_cfg.eta = 1.0 / d;
  linear_cfg.init = Init::gaussian();
  LearnerConfig spindly_cfg;
  spindly_cfg.eta = kDefaultSpindlyEta;
  spindly_cfg.epochs = 3;
  spindly_cfg.init = Init::constant(1.0 / d);
  LearnerConfig two_cfg;
  two_cfg.eta = kDefaultTwoLayerEtaScale / d;
  two_cfg.epochs = 150;
  two_cfg.init = Init::gaussian();
  LearnerConfig mlp_cfg;
  mlp_cfg.eta = kDefaultTwoLayerEtaScale / d;
  mlp_cfg.epochs = 150;
  mlp_cfg.init = Init::gaussian();
  LearnerConfig lsq_cfg;
  lsq_cfg.eta = 1.0;

  double max_linear = 0.0, max_two = 0.0, max_mlp = 0.0, max_lsq = 0.0, max_spindly = 0.0;
  for (int i = 0; i < 20; ++i) {
    const OrthogonalMatrix u = random_orthogonal(d, seed + 1000 + i);
    const std::uint64_t paired = seed + 2000 + i;
    max_linear =
        std::max(max_linear, invariance_test(LearnerKind::LinearGd, linear_cfg, p, u, k, paired));
    max_two =
        std::max(max_two, invariance_test(LearnerKind::TwoLayer, two_cfg, p, u, k, paired));
    max_mlp = std::max(max_mlp, invariance_test(LearnerKind::Mlp, mlp_cfg, p, u, k, paired));
    max_lsq = std::max(
        max_lsq, invariance_test(LearnerKind::LeastSquares, lsq_cfg, p, u, k, paired));
    max_spindly = std::max(
        max_spindly, invariance_test(LearnerKind::Spindly, spindly_cfg, p, u, k, paired));
  }
  check_le(c, "S2", "linear GD max prediction deviation over 20 rotations", max_linear, 1e-6);
  check_le(c, "S2", "two-layer max prediction deviation over 20 rotations", max_two, 1e-6);
  check_le(c, "S2", "mlp max prediction deviation over 20 rotations", max_mlp, 1e-6);
  check_le(c, "S2", "least-squares max prediction deviation over 20 rotations", max_lsq, 1e-6);
  check_ge(c, "S2", "spindly deviation exceeds 0.01 on some rotation", max_spindly, 0.01);

  {
    const HadamardMatrix h = sylvester(4);
    const Problem sf = sign_flip_problem(h, seed + 1);
    const OrthogonalMatrix u = hadamard_rotation(sf.Y.col(0), h);
    const Problem rotated = rotate_problem(sf, u);
    const Matrix target = std::sqrt(16.0) * Matrix::Identity(16, 16);
    check_le(c, "S2", "sign-flip rotates onto sqrt(d) I",
             (rotated.X - target).cwiseAbs().maxCoeff(), 1e-12);
  }
  {
    const HadamardMatrix h = sylvester(4);
    const Problem cp = complement_problem(strip_first_row(h), seed + 2);
    Vector signs(16);
    signs(0) = 1.0;
    for (int i = 0; i < 15; ++i) signs(i + 1) = 2.0 * cp.Y(i, 0) - 1.0;
    const OrthogonalMatrix u = hadamard_rotation(signs, h);
    const Problem rotated = rotate_problem(cp, u);
    Matrix target(15, 16);
    target.col(0).setConstant(std::sqrt(16.0) / 2.0);
    target.rightCols(15) = std::sqrt(16.0) / 2.0 * Matrix::Identity(15, 15);
    check_le(c, "S2", "complement rotates onto sqrt(d)/2 [1 | I]",
             (rotated.X - target).cwiseAbs().maxCoeff(), 1e-12);
  }
}

// --- S4 / AppC: counterexamples ------------------------------------------

void suite_s4(SuiteCtx& c) {
  const std::uint64_t seed = suite_seed(c, "s4");
  const HadamardMatrix h = sylvester(4);
  double max_zero_shot = 0.0;
  double max_one_example = 0.0;
  for (int s = 0; s < 20; ++s) {
    const Problem p = sign_flip_problem(h, seed + s);
    LinearModel e1{Vector::Zero(16), std::nullopt};
    e1.w(0) = 1.0;
    max_zero_shot = std::max(max_zero_shot, average_loss(e1, p, LossKind::Square));

    const Problem mapped = apply_feature_map(p, FeatureMap::constant_e1());
    LearnerConfig cfg;
    cfg.eta = 1.0;
    cfg.init = Init::zero();
    const LinearModel m = train_linear_gd(mapped, 1, cfg);
    max_one_example = std::max(max_one_example, average_loss(m, mapped, LossKind::Square));
  }
  check_le(c, "S4", "e1 neuron zero-shot loss on sign-flip (max over seeds)", max_zero_shot,
           1e-12);
  check_le(c, "S4", "constant-e1 embedding learned from one example (max loss)",
           max_one_example, 1e-12);

  const FeatureMap map = FeatureMap::constant_e1();
  Problem probe;
  probe.X.resize(3, 4);
  probe.X << 0.0, -2.0, 1.0, 0.5, 3.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0;
  probe.Y = Matrix::Zero(3, 1);
  Problem neg = probe;
  neg.X = -probe.X;
  const Problem fwd = apply_feature_map(probe, map);
  const Problem bwd = apply_feature_map(neg, map);
  check_le(c, "S4", "feature map is odd (max |phi(-x)+phi(x)|)",
           (fwd.X + bwd.X).cwiseAbs().maxCoeff(), 1e-15);
}

void suite_appc(SuiteCtx& c) {
  const std::uint64_t seed = suite_seed(c, "appc");
  const HadamardMatrix h = sylvester(4);
  double max_sq = 0.0, max_abs = 0.0, max_sign_dev = 0.0;
  for (int s = 0; s < 20; ++s) {
    const Problem p = sign_flip_problem(h, seed + s);
    const ReflectiveSignModel m = train_reflective_sign(p, 1, seed + 500 + s);
    max_sq = std::max(max_sq, average_loss(m, p, LossKind::Square));
    max_abs = std::max(max_abs, average_loss(m, p, LossKind::Absolute));
    max_sign_dev = std::max(max_sign_dev, std::abs(m.z - m.w_bottom(0)));
  }
  check_le(c, "AppC", "reflective construction unseen square loss (max)", max_sq, 1e-12);
  check_le(c, "AppC", "reflective construction unseen absolute loss (max)", max_abs, 1e-12);
  check_le(c, "AppC", "top weight recovers the reflected sign (max dev)", max_sign_dev, 1e-12);
}

// --- AppB: duplication and iid curves ------------------------------------

void suite_appb(SuiteCtx& c) {
  {
    double max_dev = 0.0;
    const double table[5][2] = {{0, 1.0}, {1, 1.0 - 1.0 / 8}, {2, 1.0 - 1.0 / 8},
                                {3, 1.0 - 2.0 / 8}, {16, 0.0}};
    for (const auto& row : table)
      max_dev = std::max(max_dev, std::abs(curve_value(Theorem::SawTooth, 8,
                                                       static_cast<int>(row[0]), 1) -
                                           row[1]));
    check_close(c, "AppB", "sawtooth tabulated values (d=8, q=1)", max_dev, 0.0, 1e-15);
    check_close(c, "AppB", "sawtooth half-loss at k=qd (d=8, q=2)",
                curve_value(Theorem::SawTooth, 8, 16, 2), 0.5, 1e-15);
  }
  {
    const HadamardMatrix h = sylvester(3);
    for (const bool swap : {false, true}) {
      const Problem p = duplicated_problem(
          h, 2, swap ? std::optional<std::uint64_t>(suite_seed(c, "appb-swap")) : std::nullopt);
      double max_dev = 0.0;
      for (int k = 0; k <= p.n(); ++k) {
        const LinearModel m = least_squares(p, k);
        max_dev = std::max(max_dev, std::abs(average_loss(m, p, LossKind::Square) -
                                             curve_value(Theorem::SawTooth, 8, k, 2)));
      }
      check_le(c, "AppB",
               std::string("least squares traces the sawtooth (") +
                   (swap ? "swapped pairs)" : "no swaps)"),
               max_dev, 1e-10);
    }
  }
  {
    const std::uint64_t seed = suite_seed(c, "appb-iid");
    for (int k : {0, 5, 16, 40}) {
      const MonteCarlo mc = simulate_iid_unseen_fraction(16, k, 5000, seed + k);
      check_close(c, "AppB", "iid unseen fraction matches curve, k=" + std::to_string(k),
                  mc.mean, curve_value(Theorem::IidCoupon, 16, k),
                  3.0 * mc.stderr_ + 1e-9);
    }
  }
}

// --- AppD: bit-expansion kernel ------------------------------------------

void suite_appd(SuiteCtx& c) {
  double max_pair_dev = 0.0;
  double max_delta_dev = 0.0;
  for (int q = 1; q <= 6; ++q) {
    const int n = 1 << q;
    std::vector<IntVector> expanded(static_cast<size_t>(n));
    for (int t = 0; t < n; ++t)
      expanded[static_cast<size_t>(t)] = psi_expand(bit_pattern_for_row(q, t));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const std::int64_t kd =
            kernel_dot(bit_pattern_for_row(q, a), bit_pattern_for_row(q, b));
        const std::int64_t direct =
            expanded[static_cast<size_t>(a)].dot(expanded[static_cast<size_t>(b)]);
        max_pair_dev = std::max(max_pair_dev, std::abs(static_cast<double>(kd - direct)));
        const std::int64_t delta = a == b ? n : 0;
        max_delta_dev = std::max(max_delta_dev, std::abs(static_cast<double>(kd - delta)));
      }
  }
  check_close(c, "AppD", "kernel_dot equals expanded dot (exhaustive, q<=6)", max_pair_dev,
              0.0, 0.0);
  check_close(c, "AppD", "kernel_dot equals d[b==c] (exhaustive, q<=6)", max_delta_dev, 0.0,
              0.0);

  double max_row_dev = 0.0;
  for (int q : {1, 2, 3, 4, 5, 6, 10}) {
    const HadamardMatrix h = sylvester(q);
    for (int t = 0; t < h.dim; ++t) {
      const IntVector psi = psi_expand(bit_pattern_for_row(q, t));
      for (int u = 0; u < h.dim; ++u)
        max_row_dev = std::max(
            max_row_dev, std::abs(static_cast<double>(psi(u) - h.entries(t, u))));
    }
  }
  check_close(c, "AppD", "expanded patterns reproduce the rows exactly", max_row_dev, 0.0,
              0.0);
}

// --- AppE: hypergeometric moments ----------------------------------------

void suite_appe(SuiteCtx& c) {
  {
    double max_dev = 0.0;
    max_dev = std::max(max_dev, std::abs(hypergeometric_unseen_loss(16, 0).mean_q - 8.0));
    max_dev = std::max(max_dev, std::abs(hypergeometric_unseen_loss(16, 0).var_q - 0.0));
    max_dev = std::max(max_dev, std::abs(hypergeometric_unseen_loss(16, 4).var_q - 0.8));
    max_dev = std::max(max_dev,
                       std::abs(hypergeometric_unseen_loss(16, 4).expected_total -
                                (16.0 - 4.0 * 16.0 / 15.0)));
    max_dev = std::max(max_dev, std::abs(hypergeometric_unseen_loss(16, 16).expected_total));
    check_close(c, "AppE", "closed-form moments at tabulated points", max_dev, 0.0, 1e-12);
  }
  const std::uint64_t seed = suite_seed(c, "appe-mc");
  {
    const PermutedSimulation sim = simulate_permuted_optimal_predictor(16, 0, 500, seed);
    check_close(c, "AppE", "q is deterministic d/2 at k=0 (MC)", sim.total_loss.mean, 16.0,
                1e-9);
  }
  for (int k : {4, 8}) {
    const PermutedSimulation sim = simulate_permuted_optimal_predictor(16, k, 3000, seed + k);
    const HypergeomStats h = hypergeometric_unseen_loss(16, k);
    const double se_q = std::sqrt(h.var_q / 3000.0);
    check_close(c, "AppE", "MC mean q matches closed form, k=" + std::to_string(k), sim.mean_q,
                h.mean_q, 3.0 * se_q + 1e-9);
    const double se_var = h.var_q * std::sqrt(2.0 / 2999.0);
    check_close(c, "AppE", "MC var q matches closed form, k=" + std::to_string(k), sim.var_q,
                h.var_q, 5.0 * se_var + 1e-9);
    check_close(c, "AppE", "MC total matches closed form, k=" + std::to_string(k),
                sim.total_loss.mean, h.expected_total, 3.0 * sim.total_loss.stderr_ + 1e-9);
  }
}

// --- AppH: spectrum concentration ----------------------------------------

void suite_apph(SuiteCtx& c) {
  const std::uint64_t seed = suite_seed(c, "apph");
  for (int d : {64, 128}) {
    const int k = 8;
    const ConcentrationReport rep = spectrum_concentration_experiment(d, k, 200, seed + d);
    add_check(c, "AppH", "Frobenius identity exact every trial, d=" + std::to_string(d),
              rep.frobenius_exact_all ? 1.0 : 0.0, 1.0, "==", rep.frobenius_exact_all);
    add_check(c, "AppH", "deterministic tail bound every trial, d=" + std::to_string(d),
              rep.deterministic_bound_all ? 1.0 : 0.0, 1.0, "==",
              rep.deterministic_bound_all);
    check_ge(c, "AppH", "estimated c_hat above 1.2, d=" + std::to_string(d), rep.c_hat, 1.2);
    check_le(c, "AppH", "estimated c_hat below 2.8, d=" + std::to_string(d), rep.c_hat, 2.8);
    report_row(c, "AppH", "mean tail fraction, d=" + std::to_string(d),
               rep.mean_tail_fraction);
    report_row(c, "AppH", "min tail fraction, d=" + std::to_string(d), rep.min_tail_fraction);
    for (size_t i = 0; i < rep.t_grid.size(); ++i)
      report_row(c, "AppH",
                 "fraction of trials with tail >= 1-(c_hat+t/sqrt(d))^2 k/d, t=" +
                     format_value(rep.t_grid[i]) + ", d=" + std::to_string(d),
                 rep.fraction_meeting[i]);
  }
}

std::string normalize_tag(std::string tag) {
  std::string out;
  for (char ch : tag) {
    if (ch == '-' || ch == '_' || ch == ' ') continue;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  return out;
}

}  // namespace

std::vector<std::string> verify_tags() {
  return {"T1", "T2", "T3", "T4",   "T5",   "S5",   "T6",   "T7",  "CorS6",
          "T9", "S2", "S4", "AppB", "AppC", "AppD", "AppE", "AppH"};
}

VerifyReport verify(const std::string& tag, std::uint64_t master_seed, int workers) {
  VerifyReport rep;
  SuiteCtx ctx{&rep, master_seed, workers};
  const std::string t = normalize_tag(tag);
  bool matched = false;
  const auto want = [&](const char* name) {
    if (t == "all" || t == normalize_tag(name)) {
      matched = true;
      return true;
    }
    return false;
  };
  if (want("T1")) suite_t1(ctx);
  if (want("T2")) suite_t2(ctx);
  if (want("T3")) suite_t3(ctx);
  if (want("T4")) suite_t4(ctx);
  if (want("T5")) suite_t5(ctx);
  if (want("S5")) suite_s5(ctx);
  if (want("T6")) suite_t6(ctx);
  if (want("T7")) suite_t7(ctx);
  if (want("CorS6")) suite_cors6(ctx);
  if (want("T9")) suite_t9(ctx);
  if (want("S2")) suite_s2(ctx);
  if (want("S4")) suite_s4(ctx);
  if (want("AppB")) suite_appb(ctx);
  if (want("AppC")) suite_appc(ctx);
  if (want("AppD")) suite_appd(ctx);
  if (want("AppE")) suite_appe(ctx);
  if (want("AppH")) suite_apph(ctx);
  if (!matched) {
    std::string valid = "all";
    for (const auto& v : verify_tags()) valid += " " + v;
    throw std::invalid_argument("unknown verify tag '" + tag + "' (valid: " + valid + ")");
  }
  return rep;
}

}  // namespace spindle
