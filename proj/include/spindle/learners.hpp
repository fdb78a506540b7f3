#pragma once

#include "spindle/matrix.hpp"
#include "spindle/problems.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spindle {

// Reported losses. Training always descends the half square loss
// 1/2 (yhat - y)^2, so update residuals are delta = yhat - y, while
// average_loss reports the full square loss (y - yhat)^2 to match the
// lower-bound curves (a zero prediction on a +-1 label costs exactly 1).
enum class LossKind { Square, Absolute, Hinge };

double loss_value(LossKind kind, double y, double yhat);
std::string loss_name(LossKind kind);
LossKind loss_from_name(const std::string& name);

// The best-constant-prediction loss c with 1/2 (L(a, v) + L(b, v)) minimized
// over v, for labels (a, b) = (-1, +1) or (0, 1). Found by a coarse grid over
// [-3, 3] refined by golden-section search (the objective is convex for every
// LossKind here); exact values: square 1 resp. 1/4, absolute 1 resp. 1/2.
double loss_property_constant(LossKind kind, LabelRange labels);

enum class LearnerKind { LinearGd, Spindly, Egu, TwoLayer, Mlp, LeastSquares };

std::string learner_name(LearnerKind kind);
LearnerKind learner_from_name(const std::string& name);

// Prediction clamp applied at loss evaluation only; updates always use the
// raw prediction.
using Clip = std::pair<double, double>;

struct Init {
  enum class Kind { Zero, Constant, Gaussian, FixedVector, ReflectiveSign };
  Kind kind = Kind::Zero;
  double value = 0.0;  // Constant
  double sigma = 0.0;  // Gaussian; 0 selects 1/sqrt(fan-in)
  Vector w0;           // FixedVector

  static Init zero() { return {}; }
  static Init constant(double v) { return {Kind::Constant, v, 0.0, {}}; }
  static Init gaussian(double sigma = 0.0) { return {Kind::Gaussian, 0.0, sigma, {}}; }
  static Init fixed(Vector w0) { return {Kind::FixedVector, 0.0, 0.0, std::move(w0)}; }
  // s * e_1 with a uniform random sign s; the counterexample init.
  static Init reflective_sign() { return {Kind::ReflectiveSign, 0.0, 0.0, {}}; }
};

struct LearnerConfig {
  double eta = 0.0;
  int epochs = 1;
  Init init;
  std::optional<Clip> clip;
  int hidden_units = 0;          // layered learners; 0 means d
  bool online_to_batch = false;  // spindly only; forces epochs == 1
  std::uint64_t init_seed = 0;   // stream for random draws in init
};

// Tuned defaults, recorded once. The per-example learners use absolute rates
// (a /d-scaled rate stalls the spindly parameterization at useful k). The
// two-layer rate scales as 1/d: its prediction sensitivity grows with the
// squared row norm (about d here), so a flat rate that is stable at d = 16
// blows up by d = 32. The MLP's tanh saturation self-limits, so its rate
// stays flat. EGU's default is four times the spindly rate because
// EGU(4*eta) tracks spindly(eta) to first order.
inline constexpr double kDefaultSpindlyEta = 0.2;
inline constexpr double kDefaultEguEta = 0.8;
inline constexpr double kDefaultTwoLayerEtaScale = 0.5;  // rate is this over d
inline constexpr double kDefaultMlpEta = 0.5;
inline constexpr int kDefaultTwoLayerEpochs = 200;
inline constexpr int kDefaultMlpEpochs = 300;

LearnerConfig default_config(LearnerKind kind, int d);

// Thrown when a weight leaves [-1e12, 1e12] or stops being finite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& learner, int epoch, int step);
};

inline constexpr double kDivergenceLimit = 1e12;

struct LinearModel {
  Vector w;
  std::optional<Clip> clip;

  double predict_raw(const Eigen::Ref<const Vector>& x) const { return w.dot(x); }
  double predict(const Eigen::Ref<const Vector>& x) const;
};

struct SpindlyModel {
  Vector u;                     // final parameters; effective weights are u_i^2
  std::vector<Vector> history;  // pre-update hypotheses u_0..u_{k-1} (online-to-batch)
  bool online_to_batch = false;
  std::optional<Clip> clip;

  Vector weights() const { return u.array().square(); }
  double predict_raw(const Eigen::Ref<const Vector>& x) const;
  double predict(const Eigen::Ref<const Vector>& x) const;
};

struct TwoLayerModel {
  Matrix W1;  // d x h input layer; prediction is (x^T W1) w2
  Vector w2;  // h
  Matrix W1_init;
  Vector w2_init;
  Matrix X_train;  // the k rows trained on, kept for span certificates
  std::optional<Clip> clip;

  Vector effective_weights() const { return W1 * w2; }
  double predict_raw(const Eigen::Ref<const Vector>& x) const;
  double predict(const Eigen::Ref<const Vector>& x) const;
};

struct MlpModel {
  Matrix W;  // d x h input layer
  Vector a;  // h, linear output layer; prediction a . tanh(W^T x)
  std::optional<Clip> clip;

  double predict_raw(const Eigen::Ref<const Vector>& x) const;
  double predict(const Eigen::Ref<const Vector>& x) const;
};

// Two-stage counterexample model: frozen bottom weight s*e_1, top scalar z
// set from the first training example so that z*(s*e_1 . x_1) = y_1.
struct ReflectiveSignModel {
  Vector w_bottom;
  double z = 0.0;
  std::optional<Clip> clip;

  double predict_raw(const Eigen::Ref<const Vector>& x) const { return z * w_bottom.dot(x); }
  double predict(const Eigen::Ref<const Vector>& x) const;
};

Vector draw_linear_init(int d, const Init& init, std::uint64_t seed);

struct TwoLayerInit {
  Matrix W1;  // d x h
  Vector w2;  // h
};
struct MlpInit {
  Matrix W;  // d x h
  Vector a;  // h
};

// Input layer from cfg.init (Zero or Gaussian); top layer always Gaussian
// with sigma 1/sqrt(h) so a zero input layer still receives gradient signal.
TwoLayerInit draw_two_layer_init(int d, int h, const Init& init, std::uint64_t seed);
MlpInit draw_mlp_init(int d, int h, const Init& init, std::uint64_t seed);

// Online gradient descent on the half square loss over the first k rows,
// cfg.epochs passes: w -= eta * (w.x - y) * x. With Zero init the weight
// vector stays inside the span of the rows it has seen.
LinearModel train_linear_gd(const Problem& p, int k, const LearnerConfig& cfg);
LinearModel train_linear_gd(const Problem& p, int k, const LearnerConfig& cfg, const Vector& w0);

// The spindly parameterization yhat = sum_i u_i^2 x_i, per-example update
// u_i -= eta * delta * 2 u_i x_i. u = 0 is a fixed point of the dynamics
// (every gradient component carries a factor u_i), which is why nonzero init
// is the useful default. With cfg.online_to_batch the model keeps the k
// pre-update hypotheses and average_loss scores their uniform mixture.
SpindlyModel train_spindly(const Problem& p, int k, const LearnerConfig& cfg);
SpindlyModel train_spindly(const Problem& p, int k, const LearnerConfig& cfg, const Vector& u0);

// Unnormalized exponentiated gradient: w_i *= exp(-eta * delta * x_i).
// Init must be strictly positive. To first order in eta this matches the
// spindly update at rate eta/4 (from u0 = sqrt(w0)).
LinearModel train_egu(const Problem& p, int k, const LearnerConfig& cfg);
LinearModel train_egu(const Problem& p, int k, const LearnerConfig& cfg, const Vector& w0);

// Full-batch simultaneous gradient descent on both layers of the linear
// network yhat = (x^T W1) w2, gradient averaged over the k rows, cfg.epochs
// steps. The trained effective weight vector W1 w2 lies in
// span[W1_init w2_init, W1_init W1_init^T X_train^T, X_train^T].
TwoLayerModel train_two_layer(const Problem& p, int k, const LearnerConfig& cfg);
TwoLayerModel train_two_layer(const Problem& p, int k, const LearnerConfig& cfg,
                              const TwoLayerInit& init);

// Full-batch gradient descent for yhat = a . tanh(W^T x), averaged gradient,
// cfg.epochs steps.
MlpModel train_mlp(const Problem& p, int k, const LearnerConfig& cfg);
MlpModel train_mlp(const Problem& p, int k, const LearnerConfig& cfg, const MlpInit& init);

// Half square loss of the MLP on one example and its exact input-layer
// gradient x * delta^T, where delta is the backpropagated hidden residual
// (yhat - y) * (a hadamard (1 - tanh^2(W^T x))).
double mlp_example_loss(const MlpModel& m, const Eigen::Ref<const Vector>& x, double y);
Matrix mlp_input_gradient(const MlpModel& m, const Eigen::Ref<const Vector>& x, double y);

// Minimum-norm least squares on the first k rows via thin SVD with singular
// values below 1e-10 * s_max treated as zero. k = 0 gives the zero vector.
LinearModel least_squares(const Problem& p, int k);

ReflectiveSignModel train_reflective_sign(const Problem& p, int k, std::uint64_t seed);

// Mean reported loss over all rows of p against the active target column.
// The spindly overload scores the uniform mixture of the retained hypotheses
// when the model was trained online-to-batch.
double average_loss(const LinearModel& m, const Problem& p, LossKind kind);
double average_loss(const SpindlyModel& m, const Problem& p, LossKind kind);
double average_loss(const TwoLayerModel& m, const Problem& p, LossKind kind);
double average_loss(const MlpModel& m, const Problem& p, LossKind kind);
double average_loss(const ReflectiveSignModel& m, const Problem& p, LossKind kind);

// Type-erased facade used by the experiment harness and the invariance test.
struct TrainedModel {
  std::function<double(const Vector&)> predict;
  std::function<double(const Problem&, LossKind)> avg_loss;
};

TrainedModel train_learner(LearnerKind kind, const Problem& p, int k, const LearnerConfig& cfg);

}  // namespace spindle
