#include "spindle/learners.hpp"

#include "spindle/rng.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace spindle {

namespace {

double clipped(double v, const std::optional<Clip>& clip) {
  if (!clip) return v;
  return std::min(std::max(v, clip->first), clip->second);
}

void check_clip(const std::optional<Clip>& clip) {
  if (clip && !(clip->first <= clip->second))
    throw std::invalid_argument("clip interval must satisfy lo <= hi");
}

void check_train_args(const Problem& p, int k, const LearnerConfig& cfg, const char* learner) {
  if (k < 0 || k > p.n())
    throw std::invalid_argument(std::string(learner) + ": k must be in [0, n]");
  if (cfg.epochs < 1) throw std::invalid_argument(std::string(learner) + ": epochs must be >= 1");
  if (!(cfg.eta > 0.0)) throw std::invalid_argument(std::string(learner) + ": eta must be > 0");
  check_clip(cfg.clip);
}

void check_finite(const Vector& w, const char* learner, int epoch, int step) {
  if (!w.allFinite() || w.cwiseAbs().maxCoeff() > kDivergenceLimit)
    throw DivergenceError(learner, epoch, step);
}

void check_finite(const Matrix& w, const char* learner, int epoch, int step) {
  if (!w.allFinite() || w.cwiseAbs().maxCoeff() > kDivergenceLimit)
    throw DivergenceError(learner, epoch, step);
}

double mean_loss_over_rows(const Problem& p, LossKind kind,
                           const std::function<double(const Vector&)>& predict) {
  const Vector y = p.y();
  double total = 0.0;
  for (int t = 0; t < p.n(); ++t) total += loss_value(kind, y(t), predict(p.X.row(t)));
  return total / p.n();
}

}  // namespace

double loss_value(LossKind kind, double y, double yhat) {
  switch (kind) {
    case LossKind::Square: {
      const double r = y - yhat;
      return r * r;
    }
    case LossKind::Absolute:
      return std::abs(y - yhat);
    case LossKind::Hinge:
      return std::max(0.0, 1.0 - y * yhat);
  }
  throw std::logic_error("loss_value: unknown kind");
}

std::string loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::Square: return "square";
    case LossKind::Absolute: return "absolute";
    case LossKind::Hinge: return "hinge";
  }
  throw std::logic_error("loss_name: unknown kind");
}

LossKind loss_from_name(const std::string& name) {
  for (LossKind k : {LossKind::Square, LossKind::Absolute, LossKind::Hinge})
    if (loss_name(k) == name) return k;
  throw std::invalid_argument("unknown loss: " + name);
}

double loss_property_constant(LossKind kind, LabelRange labels) {
  double a, b;
  switch (labels) {
    case LabelRange::PlusMinus: a = -1.0; b = 1.0; break;
    case LabelRange::ZeroOne: a = 0.0; b = 1.0; break;
    default:
      throw std::invalid_argument("loss_property_constant: labels must be +-1 or 0/1");
  }
  const auto g = [&](double v) { return 0.5 * (loss_value(kind, a, v) + loss_value(kind, b, v)); };

  double best_v = 0.0, best = g(0.0);
  for (int i = 0; i <= 6000; ++i) {
    const double v = -3.0 + i * 1e-3;
    const double gv = g(v);
    if (gv < best) { best = gv; best_v = v; }
  }
  // Golden-section refinement on the bracketing interval.
  double lo = best_v - 1e-3, hi = best_v + 1e-3;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double g1 = g(x1), g2 = g(x2);
  while (hi - lo > 1e-13) {
    if (g1 <= g2) { hi = x2; x2 = x1; g2 = g1; x1 = hi - phi * (hi - lo); g1 = g(x1); }
    else { lo = x1; x1 = x2; g1 = g2; x2 = lo + phi * (hi - lo); g2 = g(x2); }
  }
  return std::min({best, g1, g2});
}

std::string learner_name(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::LinearGd: return "linear";
    case LearnerKind::Spindly: return "spindly";
    case LearnerKind::Egu: return "egu";
    case LearnerKind::TwoLayer: return "twolayer";
    case LearnerKind::Mlp: return "mlp";
    case LearnerKind::LeastSquares: return "lsq";
  }
  throw std::logic_error("learner_name: unknown kind");
}

LearnerKind learner_from_name(const std::string& name) {
  for (LearnerKind k : {LearnerKind::LinearGd, LearnerKind::Spindly, LearnerKind::Egu,
                        LearnerKind::TwoLayer, LearnerKind::Mlp, LearnerKind::LeastSquares})
    if (learner_name(k) == name) return k;
  throw std::invalid_argument("unknown learner: " + name);
}

LearnerConfig default_config(LearnerKind kind, int d) {
  if (d < 1) throw std::invalid_argument("default_config: need d >= 1");
  LearnerConfig cfg;
  switch (kind) {
    case LearnerKind::LinearGd:
      cfg.eta = 1.0 / d;
      cfg.init = Init::zero();
      break;
    case LearnerKind::Spindly:
      cfg.eta = kDefaultSpindlyEta;
      cfg.init = Init::constant(1.0 / d);
      break;
    case LearnerKind::Egu:
      cfg.eta = kDefaultEguEta;
      cfg.init = Init::constant(1.0 / (static_cast<double>(d) * d));
      break;
    case LearnerKind::TwoLayer:
      cfg.eta = kDefaultTwoLayerEtaScale / d;
      cfg.epochs = kDefaultTwoLayerEpochs;
      cfg.init = Init::gaussian();
      break;
    case LearnerKind::Mlp:
      cfg.eta = kDefaultMlpEta;
      cfg.epochs = kDefaultMlpEpochs;
      cfg.init = Init::gaussian();
      break;
    case LearnerKind::LeastSquares:
      cfg.eta = 1.0;  // unused
      break;
  }
  return cfg;
}

DivergenceError::DivergenceError(const std::string& learner, int epoch, int step)
    : std::runtime_error(learner + " diverged (weight left [-1e12, 1e12]) at epoch " +
                         std::to_string(epoch) + ", step " + std::to_string(step)) {}

double LinearModel::predict(const Eigen::Ref<const Vector>& x) const {
  return clipped(predict_raw(x), clip);
}

double SpindlyModel::predict_raw(const Eigen::Ref<const Vector>& x) const {
  return u.array().square().matrix().dot(x);
}

double SpindlyModel::predict(const Eigen::Ref<const Vector>& x) const {
  return clipped(predict_raw(x), clip);
}

double TwoLayerModel::predict_raw(const Eigen::Ref<const Vector>& x) const {
  return w2.dot(W1.transpose() * x);
}

double TwoLayerModel::predict(const Eigen::Ref<const Vector>& x) const {
  return clipped(predict_raw(x), clip);
}

double MlpModel::predict_raw(const Eigen::Ref<const Vector>& x) const {
  return a.dot((W.transpose() * x).array().tanh().matrix());
}

double MlpModel::predict(const Eigen::Ref<const Vector>& x) const {
  return clipped(predict_raw(x), clip);
}

double ReflectiveSignModel::predict(const Eigen::Ref<const Vector>& x) const {
  return clipped(predict_raw(x), clip);
}

Vector draw_linear_init(int d, const Init& init, std::uint64_t seed) {
  switch (init.kind) {
    case Init::Kind::Zero:
      return Vector::Zero(d);
    case Init::Kind::Constant:
      return Vector::Constant(d, init.value);
    case Init::Kind::Gaussian: {
      const double sigma = init.sigma > 0.0 ? init.sigma : 1.0 / std::sqrt(double(d));
      Rng rng = Rng(seed).substream("init_linear");
      Vector w(d);
      for (int i = 0; i < d; ++i) w(i) = sigma * rng.gaussian();
      return w;
    }
    case Init::Kind::FixedVector:
      if (init.w0.size() != d)
        throw std::invalid_argument("draw_linear_init: fixed vector has wrong dimension");
      return init.w0;
    case Init::Kind::ReflectiveSign: {
      Vector w = Vector::Zero(d);
      w(0) = Rng(seed).substream("init_reflective").sign();
      return w;
    }
  }
  throw std::logic_error("draw_linear_init: unknown init kind");
}

namespace {

Matrix draw_input_layer(int d, int h, const Init& init, std::uint64_t seed, const char* learner) {
  switch (init.kind) {
    case Init::Kind::Zero:
      return Matrix::Zero(d, h);
    case Init::Kind::Gaussian: {
      const double sigma = init.sigma > 0.0 ? init.sigma : 1.0 / std::sqrt(double(d));
      Rng rng = Rng(seed).substream("init_input_layer");
      Matrix w(d, h);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < h; ++c) w(r, c) = sigma * rng.gaussian();
      return w;
    }
    default:
      throw std::invalid_argument(std::string(learner) +
                                  ": init kind must be zero or gaussian (or an explicit init)");
  }
}

Vector draw_top_layer(int h, std::uint64_t seed) {
  const double sigma = 1.0 / std::sqrt(double(h));
  Rng rng = Rng(seed).substream("init_top_layer");
  Vector a(h);
  for (int i = 0; i < h; ++i) a(i) = sigma * rng.gaussian();
  return a;
}

}  // namespace

TwoLayerInit draw_two_layer_init(int d, int h, const Init& init, std::uint64_t seed) {
  return {draw_input_layer(d, h, init, seed, "two_layer"), draw_top_layer(h, seed)};
}

MlpInit draw_mlp_init(int d, int h, const Init& init, std::uint64_t seed) {
  return {draw_input_layer(d, h, init, seed, "mlp"), draw_top_layer(h, seed)};
}

LinearModel train_linear_gd(const Problem& p, int k, const LearnerConfig& cfg) {
  return train_linear_gd(p, k, cfg, draw_linear_init(p.d(), cfg.init, cfg.init_seed));
}

LinearModel train_linear_gd(const Problem& p, int k, const LearnerConfig& cfg, const Vector& w0) {
  check_train_args(p, k, cfg, "linear");
  if (w0.size() != p.d()) throw std::invalid_argument("linear: w0 has wrong dimension");
  LinearModel m{w0, cfg.clip};
  const Vector y = p.y();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch)
    for (int t = 0; t < k; ++t) {
      const double delta = m.w.dot(p.X.row(t)) - y(t);
      m.w -= cfg.eta * delta * p.X.row(t).transpose();
      check_finite(m.w, "linear", epoch, t);
    }
  return m;
}

SpindlyModel train_spindly(const Problem& p, int k, const LearnerConfig& cfg) {
  return train_spindly(p, k, cfg, draw_linear_init(p.d(), cfg.init, cfg.init_seed));
}

SpindlyModel train_spindly(const Problem& p, int k, const LearnerConfig& cfg, const Vector& u0) {
  check_train_args(p, k, cfg, "spindly");
  if (u0.size() != p.d()) throw std::invalid_argument("spindly: u0 has wrong dimension");
  if (cfg.online_to_batch && cfg.epochs != 1)
    throw std::invalid_argument("spindly: online_to_batch requires epochs == 1");
  SpindlyModel m;
  m.u = u0;
  m.online_to_batch = cfg.online_to_batch;
  m.clip = cfg.clip;
  const Vector y = p.y();
  if (cfg.online_to_batch && k == 0) m.history.push_back(m.u);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch)
    for (int t = 0; t < k; ++t) {
      if (cfg.online_to_batch) m.history.push_back(m.u);
      const double delta = m.u.array().square().matrix().dot(p.X.row(t)) - y(t);
      m.u.array() -= cfg.eta * delta * 2.0 * m.u.array() * p.X.row(t).transpose().array();
      check_finite(m.u, "spindly", epoch, t);
    }
  return m;
}

LinearModel train_egu(const Problem& p, int k, const LearnerConfig& cfg) {
  const Vector w0 = draw_linear_init(p.d(), cfg.init, cfg.init_seed);
  return train_egu(p, k, cfg, w0);
}

LinearModel train_egu(const Problem& p, int k, const LearnerConfig& cfg, const Vector& w0) {
  check_train_args(p, k, cfg, "egu");
  if (w0.size() != p.d()) throw std::invalid_argument("egu: w0 has wrong dimension");
  if (!(w0.minCoeff() > 0.0))
    throw std::invalid_argument("egu: init weights must be strictly positive");
  LinearModel m{w0, cfg.clip};
  const Vector y = p.y();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch)
    for (int t = 0; t < k; ++t) {
      const double delta = m.w.dot(p.X.row(t)) - y(t);
      m.w.array() *= (-cfg.eta * delta * p.X.row(t).transpose().array()).exp();
      check_finite(m.w, "egu", epoch, t);
    }
  return m;
}

TwoLayerModel train_two_layer(const Problem& p, int k, const LearnerConfig& cfg) {
  const int h = cfg.hidden_units > 0 ? cfg.hidden_units : p.d();
  return train_two_layer(p, k, cfg, draw_two_layer_init(p.d(), h, cfg.init, cfg.init_seed));
}

TwoLayerModel train_two_layer(const Problem& p, int k, const LearnerConfig& cfg,
                              const TwoLayerInit& init) {
  check_train_args(p, k, cfg, "twolayer");
  if (init.W1.rows() != p.d() || init.W1.cols() != init.w2.size())
    throw std::invalid_argument("twolayer: init shapes are inconsistent");
  TwoLayerModel m;
  m.W1 = init.W1;
  m.w2 = init.w2;
  m.W1_init = init.W1;
  m.w2_init = init.w2;
  m.X_train = p.X.topRows(k);
  m.clip = cfg.clip;
  if (k == 0) return m;
  const Matrix Xtr = p.X.topRows(k);
  const Vector ytr = p.y().head(k);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const Vector delta = (Xtr * m.W1 * m.w2 - ytr) / double(k);
    const Matrix grad_W1 = Xtr.transpose() * (delta * m.w2.transpose());
    const Vector grad_w2 = m.W1.transpose() * (Xtr.transpose() * delta);
    m.W1 -= cfg.eta * grad_W1;
    m.w2 -= cfg.eta * grad_w2;
    check_finite(m.W1, "twolayer", epoch, 0);
    check_finite(m.w2, "twolayer", epoch, 0);
  }
  return m;
}

MlpModel train_mlp(const Problem& p, int k, const LearnerConfig& cfg) {
  const int h = cfg.hidden_units > 0 ? cfg.hidden_units : p.d();
  return train_mlp(p, k, cfg, draw_mlp_init(p.d(), h, cfg.init, cfg.init_seed));
}

MlpModel train_mlp(const Problem& p, int k, const LearnerConfig& cfg, const MlpInit& init) {
  check_train_args(p, k, cfg, "mlp");
  if (init.W.rows() != p.d() || init.W.cols() != init.a.size())
    throw std::invalid_argument("mlp: init shapes are inconsistent");
  MlpModel m{init.W, init.a, cfg.clip};
  if (k == 0) return m;
  const Matrix Xtr = p.X.topRows(k);
  const Vector ytr = p.y().head(k);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const Matrix T = (Xtr * m.W).array().tanh().matrix();      // k x h
    const Vector delta = (T * m.a - ytr) / double(k);          // k
    const Matrix hidden =
        ((1.0 - T.array().square()).colwise() * delta.array()).matrix();  // k x h
    const Matrix grad_W = Xtr.transpose() * (hidden.array().rowwise() *
                                             m.a.transpose().array()).matrix();
    const Vector grad_a = T.transpose() * delta;
    m.W -= cfg.eta * grad_W;
    m.a -= cfg.eta * grad_a;
    check_finite(m.W, "mlp", epoch, 0);
    check_finite(m.a, "mlp", epoch, 0);
  }
  return m;
}

double mlp_example_loss(const MlpModel& m, const Eigen::Ref<const Vector>& x, double y) {
  const double r = m.predict_raw(x) - y;
  return 0.5 * r * r;
}

Matrix mlp_input_gradient(const MlpModel& m, const Eigen::Ref<const Vector>& x, double y) {
  const Vector t = (m.W.transpose() * x).array().tanh();
  const double delta_out = t.dot(m.a) - y;
  const Vector delta_hidden =
      delta_out * (m.a.array() * (1.0 - t.array().square())).matrix();
  return x * delta_hidden.transpose();
}

LinearModel least_squares(const Problem& p, int k) {
  if (k < 0 || k > p.n()) throw std::invalid_argument("lsq: k must be in [0, n]");
  LinearModel m{Vector::Zero(p.d()), std::nullopt};
  if (k == 0) return m;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(p.X.topRows(k),
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  m.w = svd.solve(p.y().head(k));
  return m;
}

ReflectiveSignModel train_reflective_sign(const Problem& p, int k, std::uint64_t seed) {
  if (k < 0 || k > p.n()) throw std::invalid_argument("reflective: k must be in [0, n]");
  ReflectiveSignModel m;
  m.w_bottom = draw_linear_init(p.d(), Init::reflective_sign(), seed);
  if (k == 0) return m;
  const double activation = m.w_bottom.dot(p.X.row(0));
  if (activation == 0.0)
    throw std::runtime_error("reflective: first example has zero activation");
  m.z = p.y()(0) / activation;
  return m;
}

double average_loss(const LinearModel& m, const Problem& p, LossKind kind) {
  return mean_loss_over_rows(p, kind, [&](const Vector& x) { return m.predict(x); });
}

double average_loss(const SpindlyModel& m, const Problem& p, LossKind kind) {
  if (!m.online_to_batch || m.history.empty())
    return mean_loss_over_rows(p, kind, [&](const Vector& x) { return m.predict(x); });
  const Vector y = p.y();
  double total = 0.0;
  for (int t = 0; t < p.n(); ++t) {
    double row_loss = 0.0;
    for (const Vector& u : m.history) {
      const double yhat = clipped(u.array().square().matrix().dot(p.X.row(t)), m.clip);
      row_loss += loss_value(kind, y(t), yhat);
    }
    total += row_loss / static_cast<double>(m.history.size());
  }
  return total / p.n();
}

double average_loss(const TwoLayerModel& m, const Problem& p, LossKind kind) {
  return mean_loss_over_rows(p, kind, [&](const Vector& x) { return m.predict(x); });
}

double average_loss(const MlpModel& m, const Problem& p, LossKind kind) {
  return mean_loss_over_rows(p, kind, [&](const Vector& x) { return m.predict(x); });
}

double average_loss(const ReflectiveSignModel& m, const Problem& p, LossKind kind) {
  return mean_loss_over_rows(p, kind, [&](const Vector& x) { return m.predict(x); });
}

TrainedModel train_learner(LearnerKind kind, const Problem& p, int k, const LearnerConfig& cfg) {
  switch (kind) {
    case LearnerKind::LinearGd: {
      auto m = std::make_shared<LinearModel>(train_linear_gd(p, k, cfg));
      return {[m](const Vector& x) { return m->predict(x); },
              [m](const Problem& q, LossKind loss) { return average_loss(*m, q, loss); }};
    }
    case LearnerKind::Spindly: {
      auto m = std::make_shared<SpindlyModel>(train_spindly(p, k, cfg));
      return {[m](const Vector& x) { return m->predict(x); },
              [m](const Problem& q, LossKind loss) { return average_loss(*m, q, loss); }};
    }
    case LearnerKind::Egu: {
      auto m = std::make_shared<LinearModel>(train_egu(p, k, cfg));
      return {[m](const Vector& x) { return m->predict(x); },
              [m](const Problem& q, LossKind loss) { return average_loss(*m, q, loss); }};
    }
    case LearnerKind::TwoLayer: {
      auto m = std::make_shared<TwoLayerModel>(train_two_layer(p, k, cfg));
      return {[m](const Vector& x) { return m->predict(x); },
              [m](const Problem& q, LossKind loss) { return average_loss(*m, q, loss); }};
    }
    case LearnerKind::Mlp: {
      auto m = std::make_shared<MlpModel>(train_mlp(p, k, cfg));
      return {[m](const Vector& x) { return m->predict(x); },
              [m](const Problem& q, LossKind loss) { return average_loss(*m, q, loss); }};
    }
    case LearnerKind::LeastSquares: {
      auto m = std::make_shared<LinearModel>(least_squares(p, k));
      return {[m](const Vector& x) { return m->predict(x); },
              [m](const Problem& q, LossKind loss) { return average_loss(*m, q, loss); }};
    }
  }
  throw std::logic_error("train_learner: unknown kind");
}

}  // namespace spindle
