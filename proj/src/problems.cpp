#include "spindle/problems.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

namespace spindle {

namespace {

using nlohmann::json;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::SignFlip: return "signflip";
    case Family::Complement01: return "complement";
    case Family::Permuted: return "permuted";
    case Family::GaussianSparse: return "gaussian";
    case Family::Duplicated: return "duplicated";
    case Family::DoubledHadamard: return "doubled";
    case Family::ShiftedDoubled: return "shifted-doubled";
    case Family::RandomPM: return "randompm";
  }
  throw std::logic_error("family_name: unknown family");
}

Family family_from_name(const std::string& name) {
  for (Family f : {Family::SignFlip, Family::Complement01, Family::Permuted,
                   Family::GaussianSparse, Family::Duplicated, Family::DoubledHadamard,
                   Family::ShiftedDoubled, Family::RandomPM})
    if (family_name(f) == name) return f;
  throw std::invalid_argument("unknown problem family: " + name);
}

std::string label_range_name(LabelRange r) {
  switch (r) {
    case LabelRange::PlusMinus: return "plus-minus";
    case LabelRange::ZeroOne: return "zero-one";
    case LabelRange::Real: return "real";
  }
  throw std::logic_error("label_range_name: unknown range");
}

LabelRange label_range_from_name(const std::string& name) {
  for (LabelRange r : {LabelRange::PlusMinus, LabelRange::ZeroOne, LabelRange::Real})
    if (label_range_name(r) == name) return r;
  throw std::invalid_argument("unknown label range: " + name);
}

void save_problem(const Problem& p, const std::string& dir, const std::string& stem) {
  const std::string base = dir.empty() ? stem : dir + "/" + stem;
  write_matrix_csv(base + "_X.csv", p.X);
  write_matrix_csv(base + "_Y.csv", p.Y);
  json meta;
  meta["family"] = family_name(p.family);
  meta["seed"] = p.seed;
  meta["target_index"] = p.target_index;
  meta["label_range"] = label_range_name(p.label_range);
  meta["n"] = p.n();
  meta["d"] = p.d();
  meta["m"] = p.m();
  meta["q"] = p.q;
  write_text_file(base + "_meta.json", meta.dump(2) + "\n");
}

Problem load_problem(const std::string& dir, const std::string& stem) {
  const std::string base = dir.empty() ? stem : dir + "/" + stem;
  Problem p;
  p.X = read_matrix_csv(base + "_X.csv");
  p.Y = read_matrix_csv(base + "_Y.csv");
  const json meta = json::parse(read_text_file(base + "_meta.json"));
  p.family = family_from_name(meta.at("family").get<std::string>());
  p.seed = meta.at("seed").get<std::uint64_t>();
  p.target_index = meta.at("target_index").get<int>();
  p.label_range = label_range_from_name(meta.at("label_range").get<std::string>());
  p.q = meta.at("q").get<int>();
  if (p.n() != meta.at("n").get<int>() || p.d() != meta.at("d").get<int>() ||
      p.m() != meta.at("m").get<int>())
    throw std::runtime_error("problem metadata does not match CSV shapes: " + base);
  if (p.target_index < 0 || p.target_index >= p.m())
    throw std::runtime_error("problem metadata has out-of-range target_index: " + base);
  return p;
}

Vector random_signs(int d, Rng rng) {
  Vector s(d);
  for (int i = 0; i < d; ++i) s(i) = rng.sign();
  return s;
}

Problem sign_flip_problem(const HadamardMatrix& h, std::uint64_t seed) {
  const int d = h.dim;
  const Vector s = random_signs(d, Rng(seed).substream("signflip"));
  Problem p;
  p.X = s.asDiagonal() * h.dense();
  p.Y = s;
  p.family = Family::SignFlip;
  p.seed = seed;
  p.label_range = LabelRange::PlusMinus;
  return p;
}

Problem complement_problem(const StrippedHadamard& h, std::uint64_t seed) {
  const int d = h.dim;
  const Vector s = random_signs(d - 1, Rng(seed).substream("complement"));
  Problem p;
  // Exact in floats: entries of diag(s) H~ are +-1, so (v + 1) / 2 is 0 or 1.
  p.X = (((s.asDiagonal() * h.dense()).array() + 1.0) / 2.0).matrix();
  p.Y = ((s.array() + 1.0) / 2.0).matrix();
  p.family = Family::Complement01;
  p.seed = seed;
  p.label_range = LabelRange::ZeroOne;
  return p;
}

Problem permuted_problem(const HadamardMatrix& h, int target_col, std::uint64_t seed) {
  const int d = h.dim;
  require(target_col >= 1 && target_col < d,
          "permuted_problem: target_col must be in [1, d), column 0 is constant");
  const auto perm = Rng(seed).substream("permuted").permutation(static_cast<size_t>(d));
  Problem p;
  p.X.resize(d, d);
  p.Y.resize(d, 1);
  const Matrix dense = h.dense();
  for (int r = 0; r < d; ++r) {
    p.X.row(r) = dense.row(static_cast<Eigen::Index>(perm[static_cast<size_t>(r)]));
    p.Y(r, 0) = dense(static_cast<Eigen::Index>(perm[static_cast<size_t>(r)]), target_col);
  }
  p.family = Family::Permuted;
  p.seed = seed;
  p.label_range = LabelRange::PlusMinus;
  return p;
}

Problem gaussian_problem(int d, int n, const Vector& w_star, std::uint64_t seed) {
  require(d >= 1 && n >= 1, "gaussian_problem: need d >= 1 and n >= 1");
  require(w_star.size() == d, "gaussian_problem: w_star has wrong dimension");
  require(std::abs(w_star.norm() - 1.0) <= 1e-12, "gaussian_problem: w_star must be unit norm");
  Problem p;
  p.X.resize(n, d);
  const Rng base = Rng(seed).substream("gaussian");
  for (int r = 0; r < n; ++r) {
    Rng row = base.substream("row", static_cast<std::uint64_t>(r));
    for (int c = 0; c < d; ++c) p.X(r, c) = row.gaussian();
  }
  p.Y = p.X * w_star;
  p.family = Family::GaussianSparse;
  p.seed = seed;
  p.label_range = LabelRange::Real;
  return p;
}

Problem duplicated_problem(const HadamardMatrix& h, int q,
                           std::optional<std::uint64_t> swap_seed) {
  require(q >= 1, "duplicated_problem: need q >= 1");
  const int d = h.dim;
  const Matrix dense = h.dense();
  Problem p;
  p.X.resize(2 * q * d, d);
  const Rng swaps = swap_seed ? Rng(*swap_seed).substream("dupswap") : Rng(0);
  for (int i = 0; i < d; ++i) {
    double first = 1.0;
    if (swap_seed && swaps.substream("block", static_cast<std::uint64_t>(i)).sign() < 0)
      first = -1.0;
    for (int c = 0; c < q; ++c) {
      p.X.row(2 * q * i + c) = first * dense.row(i);
      p.X.row(2 * q * i + q + c) = -first * dense.row(i);
    }
  }
  p.Y = p.X.col(0);
  p.family = Family::Duplicated;
  p.seed = swap_seed.value_or(0);
  p.label_range = LabelRange::PlusMinus;
  p.q = q;
  return p;
}

Problem doubled_hadamard_problem(const HadamardMatrix& h, bool shifted) {
  const int d = h.dim;
  const Matrix dense = h.dense();
  Problem p;
  p.X = dense;
  p.Y.resize(d, 2 * d);
  p.Y.leftCols(d) = dense;
  p.Y.rightCols(d) = -dense;
  if (shifted) {
    p.X = ((p.X.array() + 1.0) / 2.0).matrix();
    p.Y = ((p.Y.array() + 1.0) / 2.0).matrix();
  }
  p.family = shifted ? Family::ShiftedDoubled : Family::DoubledHadamard;
  p.label_range = shifted ? LabelRange::ZeroOne : LabelRange::PlusMinus;
  return p;
}

Problem random_pm_problem(int d, int n, int target_col, std::uint64_t seed) {
  require(d >= 1 && n >= 1, "random_pm_problem: need d >= 1 and n >= 1");
  require(target_col >= 0 && target_col < d, "random_pm_problem: target_col out of range");
  Problem p;
  p.X.resize(n, d);
  const Rng base = Rng(seed).substream("randompm");
  for (int r = 0; r < n; ++r) {
    Rng row = base.substream("row", static_cast<std::uint64_t>(r));
    for (int c = 0; c < d; ++c) p.X(r, c) = row.sign();
  }
  p.Y = p.X.col(target_col);
  p.family = Family::RandomPM;
  p.seed = seed;
  p.label_range = LabelRange::PlusMinus;
  return p;
}

FeatureMap FeatureMap::identity() { return FeatureMap{Kind::Identity, 0, nullptr}; }

FeatureMap FeatureMap::constant_e1(int output_dim) {
  return FeatureMap{Kind::ConstantE1, output_dim, nullptr};
}

FeatureMap FeatureMap::custom(int output_dim, std::function<Vector(const Vector&)> fn) {
  if (!fn) throw std::invalid_argument("FeatureMap::custom: null function");
  return FeatureMap{Kind::Custom, output_dim, std::move(fn)};
}

Problem apply_feature_map(const Problem& p, const FeatureMap& map) {
  if (map.kind == FeatureMap::Kind::Identity) return p;
  const int out_dim = map.output_dim > 0 ? map.output_dim : p.d();
  Problem mapped = p;
  mapped.X.resize(p.n(), out_dim);
  for (int r = 0; r < p.n(); ++r) {
    const Vector x = p.X.row(r);
    if (map.kind == FeatureMap::Kind::ConstantE1) {
      double sigma = 0.0;
      for (int c = 0; c < x.size(); ++c)
        if (x(c) != 0.0) {
          sigma = x(c) > 0.0 ? 1.0 : -1.0;
          break;
        }
      mapped.X.row(r).setZero();
      mapped.X(r, 0) = sigma;
    } else {
      const Vector fx = map.fn(x);
      if (fx.size() != out_dim)
        throw std::runtime_error("apply_feature_map: custom map returned wrong dimension");
      mapped.X.row(r) = fx;
    }
  }
  return mapped;
}

}  // namespace spindle
