#include "spindle/harness.hpp"
#include "spindle/svg.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using namespace spindle;

Init parse_init(const std::string& text) {
  if (text == "zero") return Init::zero();
  if (text == "gaussian") return Init::gaussian();
  if (text == "reflective") return Init::reflective_sign();
  if (text.rfind("gaussian:", 0) == 0) return Init::gaussian(std::stod(text.substr(9)));
  if (text.rfind("const:", 0) == 0) return Init::constant(std::stod(text.substr(6)));
  throw CLI::ValidationError(
      "--init", "expected zero | const:V | gaussian | gaussian:SIGMA | reflective, got '" +
                    text + "'");
}

Clip parse_clip(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos)
    throw CLI::ValidationError("--clip", "expected LO,HI, got '" + text + "'");
  const double lo = std::stod(text.substr(0, comma));
  const double hi = std::stod(text.substr(comma + 1));
  if (!(lo < hi)) throw CLI::ValidationError("--clip", "need LO < HI");
  return {lo, hi};
}

// "0,4,8" enumerates; "0:16" and "0:16:2" are inclusive ranges.
std::vector<int> parse_k_values(const std::string& text) {
  std::vector<int> out;
  if (text.find(':') != std::string::npos) {
    std::vector<int> parts;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ':')) parts.push_back(std::stoi(piece));
    if (parts.size() < 2 || parts.size() > 3)
      throw CLI::ValidationError("--k", "range form is FIRST:LAST or FIRST:LAST:STEP");
    const int step = parts.size() == 3 ? parts[2] : 1;
    if (step < 1) throw CLI::ValidationError("--k", "range step must be >= 1");
    for (int k = parts[0]; k <= parts[1]; k += step) out.push_back(k);
    return out;
  }
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) out.push_back(std::stoi(piece));
  if (out.empty()) throw CLI::ValidationError("--k", "no values given");
  return out;
}

struct ProblemOpts {
  std::string family = "signflip";
  int d = 16;
  int n = 0;
  int q = 1;
  int target_col = 1;
};

void add_problem_options(CLI::App& cmd, ProblemOpts& p) {
  cmd.add_option("--problem", p.family,
                 "problem family: signflip | complement | permuted | gaussian | duplicated | "
                 "doubled | shifted-doubled | randompm")
      ->capture_default_str();
  cmd.add_option("--d", p.d, "instance dimension (power of two for the Hadamard families)")
      ->capture_default_str();
  cmd.add_option("--n", p.n, "row count for gaussian/randompm; 0 means d")
      ->capture_default_str();
  cmd.add_option("--q", p.q, "duplication factor for the duplicated family")
      ->capture_default_str();
  cmd.add_option("--target-col", p.target_col, "target column for permuted/randompm/gaussian")
      ->capture_default_str();
}

struct LearnerOpts {
  std::string learner = "linear";
  double eta = 0.0;
  int epochs = 0;
  std::string init;
  std::string clip;
  int hidden_units = 0;
  bool online_to_batch = false;
  std::string loss = "square";
};

void add_learner_options(CLI::App& cmd, LearnerOpts& l) {
  cmd.add_option("--learner", l.learner,
                 "learner: linear | spindly | egu | twolayer | mlp | lsq")
      ->capture_default_str();
  cmd.add_option("--eta", l.eta, "learning rate; 0 selects the recorded default per learner")
      ->capture_default_str();
  cmd.add_option("--epochs", l.epochs, "training passes; 0 selects the default")
      ->capture_default_str();
  cmd.add_option("--init", l.init,
                 "initialization: zero | const:V | gaussian | gaussian:SIGMA | reflective "
                 "(requires explicit --eta)");
  cmd.add_option("--clip", l.clip, "prediction clip LO,HI applied at loss evaluation");
  cmd.add_option("--hidden-units", l.hidden_units, "hidden width for layered learners; 0 means d")
      ->capture_default_str();
  cmd.add_flag("--online-to-batch", l.online_to_batch,
               "spindly only: score the uniform mixture of the per-step hypotheses");
  cmd.add_option("--loss", l.loss, "reported loss: square | absolute | hinge")
      ->capture_default_str();
}

LearnerConfig build_config(const LearnerOpts& l) {
  LearnerConfig cfg;
  cfg.eta = l.eta;
  if (l.epochs > 0) cfg.epochs = l.epochs;
  if (!l.init.empty()) {
    if (l.eta == 0.0)
      throw CLI::ValidationError("--init", "a custom init needs an explicit --eta");
    cfg.init = parse_init(l.init);
  }
  if (!l.clip.empty()) cfg.clip = parse_clip(l.clip);
  cfg.hidden_units = l.hidden_units;
  cfg.online_to_batch = l.online_to_batch;
  return cfg;
}

ExperimentSpec build_spec(const ProblemOpts& p, const LearnerOpts& l) {
  ExperimentSpec spec;
  spec.family = family_from_name(p.family);
  spec.d = p.d;
  spec.n = p.n;
  spec.q = p.q;
  spec.target_col = p.target_col;
  spec.learner = learner_from_name(l.learner);
  spec.config = build_config(l);
  if (l.epochs > 0 && spec.config.eta == 0.0)
    throw CLI::ValidationError("--epochs", "a custom epoch count needs an explicit --eta");
  spec.loss = loss_from_name(l.loss);
  return spec;
}

void print_experiment(const ExperimentResult& r, std::ostream& os) {
  os << "k,empirical_mean,stderr,bound,theorem\n";
  for (size_t i = 0; i < r.k.size(); ++i)
    os << r.k[i] << ',' << format_value(r.mean[i]) << ',' << format_value(r.stderr_[i]) << ','
       << format_value(r.bound[i]) << ',' << theorem_name(r.theorem) << '\n';
}

void plot_experiment(const ExperimentResult& r, const std::string& title,
                     const std::string& path) {
  PlotSeries mean, bound;
  mean.label = "empirical mean";
  mean.color = "#1f77b4";
  bound.label = "reference curve";
  bound.color = "#555555";
  bound.dashed = true;
  for (size_t i = 0; i < r.k.size(); ++i) {
    mean.x.push_back(r.k[i]);
    mean.y.push_back(r.mean[i]);
    bound.x.push_back(r.k[i]);
    bound.y.push_back(r.bound[i]);
  }
  write_svg_plot(path, title, "examples k", "average loss", {mean, bound});
}

int print_verify(const VerifyReport& rep, std::ostream& os) {
  for (const auto& c : rep.checks) {
    if (c.relation == "report") {
      os << "  report [" << c.suite << "] " << c.name << " = " << format_value(c.value)
         << '\n';
      continue;
    }
    os << (c.pass ? "  ok     [" : "  FAIL   [") << c.suite << "] " << c.name << ": "
       << format_value(c.value) << ' ' << c.relation << ' ' << format_value(c.target) << '\n';
  }
  int failed = 0;
  for (const auto& c : rep.checks)
    if (!c.pass) ++failed;
  os << (rep.all_pass ? "PASS" : "FAIL") << " (" << rep.checks.size() << " checks, " << failed
     << " failures)\n";
  return rep.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spindle: orthogonal-design learning experiments"};
  app.require_subcommand(1);
  app.fallthrough();  // --master-seed and --workers may follow the subcommand

  std::uint64_t master_seed = 1;
  int workers = 0;
  app.add_option("--master-seed", master_seed,
                 "root seed for every derived stream (env SPINDLE_SEED)")
      ->envname("SPINDLE_SEED")
      ->capture_default_str();
  app.add_option("--workers", workers, "worker threads; 0 means hardware concurrency")
      ->capture_default_str();
  app.set_config("--config", "", "flat key=value option file");

  // generate
  auto* gen = app.add_subcommand("generate", "draw one problem instance and save it as CSV");
  ProblemOpts gen_p;
  std::string gen_out = ".";
  std::string gen_stem;
  add_problem_options(*gen, gen_p);
  gen->add_option("--out", gen_out, "output directory")->capture_default_str();
  gen->add_option("--stem", gen_stem, "file stem; defaults to the family name");

  // train
  auto* tr = app.add_subcommand("train", "train one learner on the first k rows of one draw");
  ProblemOpts tr_p;
  LearnerOpts tr_l;
  int tr_k = 0;
  add_problem_options(*tr, tr_p);
  add_learner_options(*tr, tr_l);
  tr->add_option("--k", tr_k, "number of training rows")->required();

  // curve
  auto* cv = app.add_subcommand("curve", "tabulate a reference curve");
  std::string cv_theorem = "signflip";
  int cv_d = 16, cv_kmax = 0, cv_q = 1;
  std::string cv_out;
  cv->add_option("--theorem", cv_theorem,
                 "curve tag: signflip | complement | permute | gaussian | sawtooth | iid | "
                 "svdtail | svdtail-init | shifted-doubled | twolayer-rank")
      ->capture_default_str();
  cv->add_option("--d", cv_d, "dimension")->capture_default_str();
  cv->add_option("--k", cv_kmax, "largest k; 0 means d")->capture_default_str();
  cv->add_option("--q", cv_q, "duplication factor for sawtooth")->capture_default_str();
  cv->add_option("--out", cv_out, "CSV path; stdout when omitted");

  // experiment
  auto* ex = app.add_subcommand("experiment", "seed-averaged loss curve against its reference");
  ProblemOpts ex_p;
  LearnerOpts ex_l;
  int ex_seeds = 100;
  std::string ex_k, ex_bound, ex_out, ex_svg;
  add_problem_options(*ex, ex_p);
  add_learner_options(*ex, ex_l);
  ex->add_option("--seeds", ex_seeds, "seed count")->capture_default_str();
  ex->add_option("--k", ex_k, "k values: LIST a,b,c or RANGE first:last[:step]; default 0..n");
  ex->add_option("--bound", ex_bound, "override the matched reference curve");
  ex->add_option("--out", ex_out, "CSV path; stdout when omitted");
  ex->add_option("--svg", ex_svg, "also plot mean vs reference to this SVG path");

  // figure2
  auto* f2 = app.add_subcommand(
      "figure2", "linear vs spindly on orthogonal and random designs, with assertions");
  int f2_d = 64, f2_seeds = 100;
  std::string f2_out = ".";
  f2->add_option("--d", f2_d, "design dimension (power of two)")->capture_default_str();
  f2->add_option("--seeds", f2_seeds, "seed count per curve")->capture_default_str();
  f2->add_option("--out", f2_out, "output directory for CSV/SVG/JSON")->capture_default_str();

  // verify
  auto* vf = app.add_subcommand("verify", "run a tagged invariant suite (or all of them)");
  std::string vf_tag = "all";
  std::string vf_out;
  bool vf_list = false;
  vf->add_option("tag", vf_tag, "suite tag; see --list")->capture_default_str();
  vf->add_option("--out", vf_out, "also write the checks as CSV");
  vf->add_flag("--list", vf_list, "print the known tags and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      ExperimentSpec spec = build_spec(gen_p, LearnerOpts{});
      const Problem p = make_problem(spec, master_seed);
      const std::string stem = gen_stem.empty() ? family_name(p.family) : gen_stem;
      save_problem(p, gen_out, stem);
      std::cout << "wrote " << gen_out << "/" << stem << "_X.csv, " << stem << "_Y.csv, "
                << stem << "_meta.json (" << p.n() << " x " << p.d() << ")\n";
      return 0;
    }

    if (tr->parsed()) {
      ExperimentSpec spec = build_spec(tr_p, tr_l);
      spec.master_seed = master_seed;
      spec.seeds = 1;
      spec.k_values = {tr_k};
      spec.workers = 1;
      const ExperimentResult r = run_experiment(spec);
      std::cout << "family=" << family_name(spec.family) << " learner="
                << learner_name(spec.learner) << " d=" << spec.d << " k=" << tr_k << "\n"
                << "average " << tr_l.loss << " loss over all rows: " << format_value(r.mean[0])
                << "\nreference " << theorem_name(r.theorem) << " curve: "
                << format_value(r.bound[0]) << "\n";
      return 0;
    }

    if (cv->parsed()) {
      const Theorem t = theorem_from_name(cv_theorem);
      const BoundCurve curve = make_curve(t, cv_d, cv_kmax > 0 ? cv_kmax : cv_d, cv_q);
      if (!cv_out.empty()) {
        write_curve_csv(curve, cv_out);
        std::cout << "wrote " << cv_out << "\n";
      } else {
        std::cout << "k,empirical_mean,stderr,bound,theorem\n";
        for (size_t k = 0; k < curve.values.size(); ++k)
          std::cout << k << ",,," << format_value(curve.values[k]) << ','
                    << theorem_name(curve.theorem) << '\n';
      }
      return 0;
    }

    if (ex->parsed()) {
      ExperimentSpec spec = build_spec(ex_p, ex_l);
      spec.seeds = ex_seeds;
      spec.master_seed = master_seed;
      spec.workers = workers;
      if (!ex_k.empty()) spec.k_values = parse_k_values(ex_k);
      if (!ex_bound.empty()) spec.bound = theorem_from_name(ex_bound);
      const ExperimentResult r = run_experiment(spec);
      if (!ex_out.empty()) {
        write_experiment_csv(r, ex_out);
        std::cout << "wrote " << ex_out << "\n";
      } else {
        print_experiment(r, std::cout);
      }
      if (!ex_svg.empty()) {
        plot_experiment(r,
                        family_name(spec.family) + " / " + learner_name(spec.learner) +
                            " (d = " + std::to_string(spec.d) + ")",
                        ex_svg);
        std::cout << "wrote " << ex_svg << "\n";
      }
      return 0;
    }

    if (f2->parsed()) {
      const Figure2Result r = figure2_reproduction(f2_d, f2_seeds, master_seed, workers, f2_out);
      std::cout << "first k with spindly loss < 0.1: orthogonal design "
                << r.first_low_k_hadamard << ", random design " << r.first_low_k_random
                << "\nestimated crossing constant (k / log2 d): " << format_value(r.c_estimate)
                << "\noutputs in " << f2_out << "\n";
      for (const auto& f : r.failures) std::cout << "FAIL: " << f << "\n";
      std::cout << (r.pass ? "PASS" : "FAIL") << "\n";
      return r.pass ? 0 : 1;
    }

    if (vf->parsed()) {
      if (vf_list) {
        for (const auto& t : verify_tags()) std::cout << t << "\n";
        return 0;
      }
      std::cout << "verify " << vf_tag << " (master seed " << master_seed << ")\n";
      const VerifyReport rep = verify(vf_tag, master_seed, workers);
      if (!vf_out.empty()) write_verify_csv(rep, vf_out);
      return print_verify(rep, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
