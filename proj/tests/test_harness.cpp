#include "spindle/harness.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

using namespace spindle;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("every family carries a matched reference curve") {
  CHECK(matched_theorem(Family::SignFlip) == Theorem::SignFlip);
  CHECK(matched_theorem(Family::Complement01) == Theorem::Complement01);
  CHECK(matched_theorem(Family::Permuted) == Theorem::Permute);
  CHECK(matched_theorem(Family::GaussianSparse) == Theorem::Gaussian);
  CHECK(matched_theorem(Family::Duplicated) == Theorem::SawTooth);
  CHECK(matched_theorem(Family::DoubledHadamard) == Theorem::SvdTail);
  CHECK(matched_theorem(Family::ShiftedDoubled) == Theorem::ShiftedDoubled);
  CHECK(matched_theorem(Family::RandomPM) == Theorem::SvdTailInit);
}

TEST_CASE("make_problem produces the right shapes per family") {
  ExperimentSpec spec;
  spec.d = 8;
  spec.q = 3;
  spec.target_col = 2;

  spec.family = Family::SignFlip;
  CHECK(make_problem(spec, 1).n() == 8);
  spec.family = Family::Complement01;
  CHECK(make_problem(spec, 1).n() == 7);
  spec.family = Family::Permuted;
  CHECK(make_problem(spec, 1).n() == 8);
  spec.family = Family::Duplicated;
  CHECK(make_problem(spec, 1).n() == 48);
  spec.family = Family::DoubledHadamard;
  CHECK(make_problem(spec, 1).Y.cols() == 16);
  spec.family = Family::ShiftedDoubled;
  CHECK(make_problem(spec, 1).label_range == LabelRange::ZeroOne);
  spec.family = Family::GaussianSparse;
  spec.n = 20;
  const Problem g = make_problem(spec, 1);
  CHECK(g.n() == 20);
  // the planted direction is the requested coordinate
  CHECK(g.Y(0, 0) == doctest::Approx(g.X(0, 2)).epsilon(1e-12));
  spec.family = Family::RandomPM;
  CHECK(make_problem(spec, 1).n() == 20);

  spec.family = Family::SignFlip;
  spec.d = 12;  // not a power of two
  CHECK_THROWS_AS(make_problem(spec, 1), std::invalid_argument);
}

TEST_CASE("experiment output is a pure function of its parameters") {
  ExperimentSpec spec;
  spec.family = Family::GaussianSparse;
  spec.d = 8;
  spec.n = 8;
  spec.target_col = 0;
  spec.learner = LearnerKind::LeastSquares;
  spec.seeds = 12;
  spec.master_seed = 42;

  spec.workers = 1;
  const ExperimentResult serial = run_experiment(spec);
  spec.workers = 3;
  const ExperimentResult pooled = run_experiment(spec);
  REQUIRE(serial.k == pooled.k);
  for (size_t i = 0; i < serial.k.size(); ++i) {
    CHECK(serial.mean[i] == pooled.mean[i]);
    CHECK(serial.stderr_[i] == pooled.stderr_[i]);
  }

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "spindle_harness_csv";
  fs::create_directories(dir);
  write_experiment_csv(serial, (dir / "a.csv").string());
  write_experiment_csv(pooled, (dir / "b.csv").string());
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  const std::string text = slurp(dir / "a.csv");
  CHECK(text.rfind("k,empirical_mean,stderr,bound,theorem\n", 0) == 0);
  CHECK(text.find("gaussian") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("default k grids walk every count up to n, thinning past 64 rows") {
  ExperimentSpec spec;
  spec.family = Family::SignFlip;
  spec.d = 16;
  spec.learner = LearnerKind::LeastSquares;
  spec.seeds = 2;
  spec.workers = 1;
  const ExperimentResult dense = run_experiment(spec);
  REQUIRE(dense.k.size() == 17);
  CHECK(dense.k.front() == 0);
  CHECK(dense.k.back() == 16);

  ExperimentSpec wide = spec;
  wide.family = Family::GaussianSparse;
  wide.d = 8;
  wide.n = 200;
  wide.target_col = 0;
  const ExperimentResult thin = run_experiment(wide);
  CHECK(thin.k.back() == 200);
  CHECK(thin.k[1] - thin.k[0] == 4);  // ceil(200/64)
  CHECK(thin.k.size() == 51);
}

TEST_CASE("seed averaging and the bound column") {
  ExperimentSpec spec;
  spec.family = Family::SignFlip;
  spec.d = 8;
  spec.learner = LearnerKind::LinearGd;
  spec.seeds = 1;
  spec.workers = 1;
  spec.k_values = {0, 2, 8};
  const ExperimentResult r = run_experiment(spec);
  REQUIRE(r.k.size() == 3);
  CHECK(r.seeds == 1);
  for (size_t i = 0; i < r.k.size(); ++i) {
    CHECK(r.stderr_[i] == 0.0);  // single seed has no spread
    CHECK(r.mean[i] == 1.0 - r.k[i] / 8.0);
    CHECK(r.bound[i] == curve_value(Theorem::SignFlip, 8, r.k[i]));
  }

  ExperimentSpec override_bound = spec;
  override_bound.bound = Theorem::SvdTailInit;
  const ExperimentResult rb = run_experiment(override_bound);
  CHECK(rb.theorem == Theorem::SvdTailInit);
  CHECK(rb.bound[1] == curve_value(Theorem::SvdTailInit, 8, 2));

  ExperimentSpec bad = spec;
  bad.k_values = {9};
  CHECK_THROWS_AS(run_experiment(bad), std::runtime_error);
  bad.k_values = {};
  bad.seeds = 0;
  CHECK_THROWS_AS(run_experiment(bad), std::invalid_argument);
}

TEST_CASE("explicit rates keep custom knobs, zero rate selects the tuned default") {
  ExperimentSpec spec;
  spec.family = Family::SignFlip;
  spec.d = 8;
  spec.learner = LearnerKind::Spindly;
  spec.seeds = 3;
  spec.workers = 1;
  spec.k_values = {0, 4, 8};
  spec.config.online_to_batch = true;  // survives the default merge
  const ExperimentResult otb = run_experiment(spec);

  ExperimentSpec manual = spec;
  manual.config = default_config(LearnerKind::Spindly, 8);
  manual.config.online_to_batch = true;
  const ExperimentResult direct = run_experiment(manual);
  for (size_t i = 0; i < otb.k.size(); ++i) CHECK(otb.mean[i] == direct.mean[i]);
}

TEST_CASE("verify dispatch: tags, csv schema, unknown tags") {
  CHECK(verify_tags().size() == 17);
  CHECK_THROWS_AS(verify("T99", 1, 1), std::invalid_argument);

  const VerifyReport rep = verify("T2", 1, 1);
  CHECK(rep.all_pass);
  REQUIRE(!rep.checks.empty());
  for (const VerifyCheck& c : rep.checks) CHECK(c.suite == "T2");

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "spindle_verify_csv";
  fs::create_directories(dir);
  write_verify_csv(rep, (dir / "t2.csv").string());
  const std::string text = slurp(dir / "t2.csv");
  CHECK(text.rfind("suite,check,value,target,relation,pass\n", 0) == 0);
  CHECK(text.find(",0\n") == std::string::npos);  // no failing rows
  fs::remove_all(dir);

  // tag normalization accepts case and separator variants
  const VerifyReport alias = verify("app-d", 1, 1);
  CHECK(alias.all_pass);
  CHECK(alias.checks.front().suite == "AppD");
}

TEST_CASE("figure2 writes its artifact set and reports consistently") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "spindle_fig2_smoke";
  fs::remove_all(dir);
  const Figure2Result r = figure2_reproduction(16, 8, 1, 1, dir.string());

  for (const char* name : {"figure2_hadamard_linear.csv", "figure2_hadamard_spindly.csv",
                           "figure2_random_linear.csv", "figure2_random_spindly.csv",
                           "figure2_summary.json"})
    CHECK(fs::exists(dir / name));
  const std::string svg = slurp(dir / "figure2.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);

  REQUIRE(r.hadamard_linear.k.size() == 9);  // 0..16 step 2
  CHECK(r.hadamard_linear.k == r.random_spindly.k);
  if (r.first_low_k_hadamard >= 0)
    CHECK(r.c_estimate == doctest::Approx(r.first_low_k_hadamard / 4.0).epsilon(1e-12));
  CHECK(r.pass == r.failures.empty());

  const std::string summary = slurp(dir / "figure2_summary.json");
  CHECK(summary.find("\"first_low_k_orthogonal\"") != std::string::npos);
  CHECK(summary.find("\"c_estimate\"") != std::string::npos);
  fs::remove_all(dir);
}
