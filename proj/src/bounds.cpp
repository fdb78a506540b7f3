#include "spindle/bounds.hpp"

#include "spindle/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spindle {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

MonteCarlo summarize(const std::vector<double>& samples) {
  MonteCarlo mc;
  mc.trials = static_cast<int>(samples.size());
  if (samples.empty()) return mc;
  double sum = 0.0;
  for (double v : samples) sum += v;
  mc.mean = sum / mc.trials;
  if (mc.trials > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - mc.mean) * (v - mc.mean);
    mc.stderr_ = std::sqrt(ss / (mc.trials - 1) / mc.trials);
  }
  return mc;
}

}  // namespace

std::string theorem_name(Theorem t) {
  switch (t) {
    case Theorem::SignFlip: return "signflip";
    case Theorem::Complement01: return "complement";
    case Theorem::Permute: return "permute";
    case Theorem::Gaussian: return "gaussian";
    case Theorem::SawTooth: return "sawtooth";
    case Theorem::IidCoupon: return "iid";
    case Theorem::SvdTail: return "svdtail";
    case Theorem::SvdTailInit: return "svdtail-init";
    case Theorem::ShiftedDoubled: return "shifted-doubled";
    case Theorem::TwoLayerRank: return "twolayer-rank";
  }
  throw std::logic_error("theorem_name: unknown theorem");
}

Theorem theorem_from_name(const std::string& name) {
  for (Theorem t : {Theorem::SignFlip, Theorem::Complement01, Theorem::Permute,
                    Theorem::Gaussian, Theorem::SawTooth, Theorem::IidCoupon, Theorem::SvdTail,
                    Theorem::SvdTailInit, Theorem::ShiftedDoubled, Theorem::TwoLayerRank})
    if (theorem_name(t) == name) return t;
  throw std::invalid_argument("unknown theorem tag: " + name);
}

double curve_value(Theorem t, int d, int k, int q) {
  require(d >= 1, "curve_value: need d >= 1");
  require(k >= 0, "curve_value: need k >= 0");
  require(q >= 1, "curve_value: need q >= 1");
  const double dd = d, kk = k;
  double v = 0.0;
  switch (t) {
    case Theorem::SignFlip: v = 1.0 - kk / dd; break;
    case Theorem::Complement01:
      require(d >= 2, "curve_value: complement needs d >= 2");
      v = 0.25 * (1.0 - kk / (dd - 1.0));
      break;
    case Theorem::Permute:
      require(d >= 2, "curve_value: permute needs d >= 2");
      v = 1.0 - kk / (dd - 1.0);
      break;
    case Theorem::Gaussian: v = (1.0 - kk / dd) * (1.0 - kk / dd); break;
    case Theorem::SawTooth:
      v = 1.0 - static_cast<double>((k + 2 * q - 1) / (2 * q)) / dd;
      break;
    case Theorem::IidCoupon: v = std::pow(1.0 - 1.0 / dd, kk); break;
    case Theorem::SvdTail: v = 1.0 - kk / dd; break;
    case Theorem::SvdTailInit: v = 1.0 - (kk + 1.0) / dd; break;
    case Theorem::ShiftedDoubled: v = 0.25 - (kk + 1.0) / (4.0 * dd); break;
    case Theorem::TwoLayerRank: v = 1.0 - (2.0 * kk + 1.0) / dd; break;
  }
  // Gaussian squares its base before the clamp would matter; for k > d the
  // base has gone negative and the floor is still 0, not the squared value.
  if (t == Theorem::Gaussian && k > d) return 0.0;
  return std::max(v, 0.0);
}

BoundCurve make_curve(Theorem t, int d, int k_max, int q) {
  require(k_max >= 0, "make_curve: need k_max >= 0");
  BoundCurve c;
  c.theorem = t;
  c.d = d;
  c.q = q;
  c.values.reserve(static_cast<size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) c.values.push_back(curve_value(t, d, k, q));
  return c;
}

Spectrum singular_spectrum(const Matrix& y) {
  require(y.rows() > 0 && y.cols() > 0, "singular_spectrum: empty matrix");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(y);
  Spectrum s;
  s.values = svd.singularValues().array().square();
  s.frobenius_sq = s.values.sum();
  return s;
}

namespace {

double tail_fraction(const Spectrum& s, int k) {
  require(k >= 0 && k <= s.values.size(), "svd tail: k must be in [0, min(n, m)]");
  double tail = 0.0;
  for (Eigen::Index i = k; i < s.values.size(); ++i) tail += s.values(i);
  return tail / s.frobenius_sq;
}

}  // namespace

double svd_tail_bound(const Matrix& y, int k) {
  return tail_fraction(singular_spectrum(y), k);
}

double svd_tail_bound_with_init(const Matrix& y, int k) {
  const Spectrum s = singular_spectrum(y);
  require(k >= 0 && k + 1 <= s.values.size(), "svd tail with init: k+1 must be <= min(n, m)");
  return tail_fraction(s, k + 1);
}

Spectrum shifted_doubled_spectrum(int d) {
  require(d >= 2, "shifted_doubled_spectrum: need d >= 2");
  Spectrum s;
  s.values = Vector::Constant(d, d / 2.0);
  s.values(0) = d * d / 2.0 + d / 2.0;
  s.frobenius_sq = s.values.sum();  // d^2
  return s;
}

double shifted_doubled_tail_curve(int d, int k) {
  return curve_value(Theorem::ShiftedDoubled, d, k);
}

HypergeomStats hypergeometric_unseen_loss(int d, int k) {
  require(d >= 2 && d % 2 == 0, "hypergeometric_unseen_loss: need even d >= 2");
  require(k >= 0 && k <= d, "hypergeometric_unseen_loss: need 0 <= k <= d");
  HypergeomStats h;
  if (k == d) return {0.0, 0.0, 0.0};
  const double dd = d, kk = k;
  h.expected_total = dd - kk * dd / (dd - 1.0);
  h.mean_q = (dd - kk) / 2.0;
  h.var_q = kk * (dd - kk) / (4.0 * (dd - 1.0));
  return h;
}

PermutedSimulation simulate_permuted_optimal_predictor(int d, int k, int trials,
                                                       std::uint64_t seed) {
  require(d >= 2 && d % 2 == 0, "simulate_permuted_optimal_predictor: need even d >= 2");
  require(k >= 0 && k <= d, "simulate_permuted_optimal_predictor: need 0 <= k <= d");
  require(trials >= 2, "simulate_permuted_optimal_predictor: need trials >= 2");
  std::vector<double> labels(static_cast<size_t>(d));
  std::vector<double> totals;
  totals.reserve(static_cast<size_t>(trials));
  std::vector<double> qs;
  qs.reserve(static_cast<size_t>(trials));
  const Rng base = Rng(seed).substream("permuted_mc");
  for (int trial = 0; trial < trials; ++trial) {
    for (int i = 0; i < d; ++i) labels[static_cast<size_t>(i)] = i < d / 2 ? 1.0 : -1.0;
    Rng rng = base.substream("trial", static_cast<std::uint64_t>(trial));
    rng.shuffle(labels);
    const int unseen = d - k;
    int q = 0;
    for (int i = k; i < d; ++i)
      if (labels[static_cast<size_t>(i)] > 0) ++q;
    double total = 0.0;
    if (unseen > 0) {
      const double yhat = (2.0 * q - unseen) / unseen;
      for (int i = k; i < d; ++i) {
        const double r = labels[static_cast<size_t>(i)] - yhat;
        total += r * r;
      }
    }
    totals.push_back(total);
    qs.push_back(q);
  }
  PermutedSimulation out;
  out.total_loss = summarize(totals);
  const MonteCarlo q_mc = summarize(qs);
  out.mean_q = q_mc.mean;
  double ss = 0.0;
  for (double q : qs) ss += (q - q_mc.mean) * (q - q_mc.mean);
  out.var_q = ss / (static_cast<double>(qs.size()) - 1.0);
  return out;
}

MonteCarlo simulate_iid_unseen_fraction(int d, int k, int trials, std::uint64_t seed) {
  require(d >= 1, "simulate_iid_unseen_fraction: need d >= 1");
  require(k >= 0, "simulate_iid_unseen_fraction: need k >= 0");
  require(trials >= 2, "simulate_iid_unseen_fraction: need trials >= 2");
  std::vector<double> fractions;
  fractions.reserve(static_cast<size_t>(trials));
  std::vector<char> seen(static_cast<size_t>(d));
  const Rng base = Rng(seed).substream("iid_mc");
  for (int trial = 0; trial < trials; ++trial) {
    std::fill(seen.begin(), seen.end(), 0);
    Rng rng = base.substream("trial", static_cast<std::uint64_t>(trial));
    for (int t = 0; t < k; ++t) seen[static_cast<size_t>(rng.uniform_int(d))] = 1;
    int unseen = 0;
    for (char c : seen)
      if (!c) ++unseen;
    fractions.push_back(static_cast<double>(unseen) / d);
  }
  return summarize(fractions);
}

Matrix two_layer_span_basis(const Matrix& w1_init, const Vector& w2_init,
                            const Matrix& x_train) {
  require(w1_init.cols() == w2_init.size(), "two_layer_span_basis: inconsistent init shapes");
  require(x_train.cols() == w1_init.rows(), "two_layer_span_basis: inconsistent train shape");
  const Eigen::Index d = w1_init.rows();
  const Eigen::Index k = x_train.rows();
  Matrix gens(d, 2 * k + 1);
  gens.col(0) = w1_init * w2_init;
  gens.middleCols(1, k) = w1_init * (w1_init.transpose() * x_train.transpose());
  gens.middleCols(1 + k, k) = x_train.transpose();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gens);
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, rank);
  return q;
}

double span_residual(const Matrix& basis, const Vector& v) {
  require(basis.rows() == v.size(), "span_residual: dimension mismatch");
  const double norm = v.norm();
  if (norm == 0.0) return 0.0;
  const Vector residual = v - basis * (basis.transpose() * v);
  return residual.norm() / norm;
}

double zero_init_unseen_term(int d, int k, double t) {
  require(d >= 1 && k >= 0 && k <= d, "zero_init_unseen_term: need 0 <= k <= d");
  const double sd = std::sqrt(static_cast<double>(d));
  const double lo = sd * t - 1.0, hi = sd * t + 1.0;
  return (d - k) * (lo * lo + hi * hi) / (2.0 * d);
}

std::vector<SweepRow> zero_init_optimality_sweep(int d, int k,
                                                 const std::vector<double>& grid) {
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (double t : grid) rows.push_back({t, zero_init_unseen_term(d, k, t)});
  return rows;
}

ConcentrationReport spectrum_concentration_experiment(int d, int k, int trials,
                                                      std::uint64_t seed) {
  require(d >= 2, "spectrum_concentration_experiment: need d >= 2");
  require(k >= 0 && k <= d, "spectrum_concentration_experiment: need 0 <= k <= d");
  require(trials >= 2, "spectrum_concentration_experiment: need trials >= 2");
  ConcentrationReport rep;
  rep.d = d;
  rep.k = k;
  rep.trials = trials;
  rep.frobenius_exact_all = true;
  rep.deterministic_bound_all = true;
  const double dd = d;
  const double entry_mass = dd * dd;
  const Rng base = Rng(seed).substream("concentration");
  Matrix x(d, d);
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = base.substream("trial", static_cast<std::uint64_t>(trial));
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) x(r, c) = rng.sign();
    const Spectrum s = singular_spectrum(x);
    const double s1_sq = s.values(0);
    double tail = 0.0;
    for (Eigen::Index i = k; i < s.values.size(); ++i) tail += s.values(i);
    rep.s1.push_back(std::sqrt(s1_sq));
    rep.tail_fraction.push_back(tail / entry_mass);
    if (std::abs(s.frobenius_sq - entry_mass) > 1e-8 * entry_mass)
      rep.frobenius_exact_all = false;
    if (tail < entry_mass - k * s1_sq - 1e-8 * entry_mass)
      rep.deterministic_bound_all = false;
  }
  double s1_sum = 0.0, tail_sum = 0.0, tail_min = 1.0;
  for (int i = 0; i < trials; ++i) {
    s1_sum += rep.s1[static_cast<size_t>(i)];
    tail_sum += rep.tail_fraction[static_cast<size_t>(i)];
    tail_min = std::min(tail_min, rep.tail_fraction[static_cast<size_t>(i)]);
  }
  rep.c_hat = s1_sum / trials / std::sqrt(dd);
  rep.mean_tail_fraction = tail_sum / trials;
  rep.min_tail_fraction = tail_min;
  rep.t_grid = {0.0, 0.5, 1.0, 2.0, 4.0};
  for (double t : rep.t_grid) {
    const double c = rep.c_hat + t / std::sqrt(dd);
    const double floor_value = 1.0 - c * c * k / dd;
    int meeting = 0;
    for (double f : rep.tail_fraction)
      if (f >= floor_value) ++meeting;
    rep.fraction_meeting.push_back(static_cast<double>(meeting) / trials);
  }
  return rep;
}

}  // namespace spindle
