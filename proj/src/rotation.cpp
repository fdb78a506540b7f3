#include "spindle/rotation.hpp"

#include "spindle/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace spindle {

OrthogonalMatrix random_orthogonal(int d, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("random_orthogonal: need d >= 1");
  Rng rng = Rng(seed).substream("haar");
  Eigen::MatrixXd g(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) g(r, c) = rng.gaussian();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < d; ++c)
    if (r(c, c) < 0.0) q.col(c) = -q.col(c);
  OrthogonalMatrix out;
  out.U = q;
  return out;
}

OrthogonalMatrix hadamard_rotation(const Vector& signs, const HadamardMatrix& h) {
  if (signs.size() != h.dim)
    throw std::invalid_argument("hadamard_rotation: signs dimension mismatch");
  for (Eigen::Index i = 0; i < signs.size(); ++i)
    if (signs(i) != 1.0 && signs(i) != -1.0)
      throw std::invalid_argument("hadamard_rotation: signs must be +-1");
  OrthogonalMatrix out;
  out.U = (signs.asDiagonal() * h.dense()) / std::sqrt(static_cast<double>(h.dim));
  return out;
}

Problem rotate_problem(const Problem& p, const OrthogonalMatrix& u) {
  if (u.dim() != p.d()) throw std::invalid_argument("rotate_problem: dimension mismatch");
  Problem rotated = p;
  rotated.X = p.X * u.U.transpose();
  return rotated;
}

double invariance_test(LearnerKind kind, const LearnerConfig& cfg, const Problem& p,
                       const OrthogonalMatrix& u, int k, std::uint64_t paired_seed) {
  if (u.dim() != p.d()) throw std::invalid_argument("invariance_test: dimension mismatch");
  const Problem rotated = rotate_problem(p, u);
  const int d = p.d();
  const int h = cfg.hidden_units > 0 ? cfg.hidden_units : d;

  TrainedModel base, rot;
  switch (kind) {
    case LearnerKind::LinearGd: {
      const Vector w0 = draw_linear_init(d, cfg.init, paired_seed);
      auto a = train_linear_gd(p, k, cfg, w0);
      auto b = train_linear_gd(rotated, k, cfg, u.U * w0);
      base.predict = [a](const Vector& x) { return a.predict(x); };
      rot.predict = [b](const Vector& x) { return b.predict(x); };
      break;
    }
    case LearnerKind::Spindly: {
      // No equivariant transport exists for this parameterization; both runs
      // start from the same coordinate-defined init.
      const Vector u0 = draw_linear_init(d, cfg.init, paired_seed);
      auto a = train_spindly(p, k, cfg, u0);
      auto b = train_spindly(rotated, k, cfg, u0);
      base.predict = [a](const Vector& x) { return a.predict(x); };
      rot.predict = [b](const Vector& x) { return b.predict(x); };
      break;
    }
    case LearnerKind::Egu: {
      const Vector w0 = draw_linear_init(d, cfg.init, paired_seed);
      auto a = train_egu(p, k, cfg, w0);
      auto b = train_egu(rotated, k, cfg, w0);
      base.predict = [a](const Vector& x) { return a.predict(x); };
      rot.predict = [b](const Vector& x) { return b.predict(x); };
      break;
    }
    case LearnerKind::TwoLayer: {
      const TwoLayerInit init = draw_two_layer_init(d, h, cfg.init, paired_seed);
      const TwoLayerInit init_rot{u.U * init.W1, init.w2};
      auto a = train_two_layer(p, k, cfg, init);
      auto b = train_two_layer(rotated, k, cfg, init_rot);
      base.predict = [a](const Vector& x) { return a.predict(x); };
      rot.predict = [b](const Vector& x) { return b.predict(x); };
      break;
    }
    case LearnerKind::Mlp: {
      const MlpInit init = draw_mlp_init(d, h, cfg.init, paired_seed);
      const MlpInit init_rot{u.U * init.W, init.a};
      auto a = train_mlp(p, k, cfg, init);
      auto b = train_mlp(rotated, k, cfg, init_rot);
      base.predict = [a](const Vector& x) { return a.predict(x); };
      rot.predict = [b](const Vector& x) { return b.predict(x); };
      break;
    }
    case LearnerKind::LeastSquares: {
      auto a = least_squares(p, k);
      auto b = least_squares(rotated, k);
      base.predict = [a](const Vector& x) { return a.predict(x); };
      rot.predict = [b](const Vector& x) { return b.predict(x); };
      break;
    }
  }

  double max_dev = 0.0;
  for (int t = 0; t < p.n(); ++t) {
    const Vector x = p.X.row(t);
    const Vector xr = rotated.X.row(t);
    max_dev = std::max(max_dev, std::abs(base.predict(x) - rot.predict(xr)));
  }
  return max_dev;
}

}  // namespace spindle
