#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spindle/bounds.hpp"
#include "spindle/hadamard.hpp"
#include "spindle/harness.hpp"
#include "spindle/learners.hpp"
#include "spindle/problems.hpp"
#include "spindle/rotation.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace py = pybind11;
using namespace spindle;

namespace {

using ClipPair = std::optional<std::pair<double, double>>;

Init parse_init(const std::string& s) {
  if (s == "zero") return Init::zero();
  if (s == "gaussian") return Init::gaussian();
  if (s.rfind("gaussian:", 0) == 0) return Init::gaussian(std::stod(s.substr(9)));
  if (s.rfind("const:", 0) == 0) return Init::constant(std::stod(s.substr(6)));
  if (s == "reflective") return Init::reflective_sign();
  throw std::invalid_argument("unknown init spec: " + s +
                              " (use zero, const:V, gaussian[:SIGMA], reflective)");
}

// Full config: tuned defaults for the learner, then explicit overrides.
LearnerConfig build_config(LearnerKind kind, int d, double eta, int epochs,
                           const std::string& init, int hidden_units, bool online_to_batch,
                           const ClipPair& clip, std::uint64_t init_seed) {
  LearnerConfig cfg = default_config(kind, d);
  if (eta > 0.0) cfg.eta = eta;
  if (epochs > 0) cfg.epochs = epochs;
  if (init != "default") cfg.init = parse_init(init);
  if (hidden_units > 0) cfg.hidden_units = hidden_units;
  cfg.online_to_batch = online_to_batch;
  cfg.clip = clip;
  cfg.init_seed = init_seed;
  return cfg;
}

py::dict result_dict(const ExperimentResult& r) {
  py::dict out;
  out["k"] = r.k;
  out["mean"] = r.mean;
  out["stderr"] = r.stderr_;
  out["bound"] = r.bound;
  out["theorem"] = theorem_name(r.theorem);
  out["seeds"] = r.seeds;
  out["d"] = r.d;
  return out;
}

}  // namespace

PYBIND11_MODULE(_spindle, m) {
  m.doc() = "Hadamard designs, sparse-target learners and their lower-bound curves";
  m.attr("__version__") = "0.1.0";

  py::register_exception<DivergenceError>(m, "DivergenceError");

  py::class_<Problem>(m, "Problem")
      .def_readonly("X", &Problem::X)
      .def_readonly("Y", &Problem::Y)
      .def_readonly("target_index", &Problem::target_index)
      .def_readonly("seed", &Problem::seed)
      .def_readonly("q", &Problem::q)
      .def_property_readonly("family",
                             [](const Problem& p) { return family_name(p.family); })
      .def_property_readonly("label_range",
                             [](const Problem& p) { return label_range_name(p.label_range); })
      .def_property_readonly("n", &Problem::n)
      .def_property_readonly("d", &Problem::d)
      .def("y", &Problem::y, "active target column")
      .def("__repr__", [](const Problem& p) {
        return "<Problem " + family_name(p.family) + " n=" + std::to_string(p.n()) +
               " d=" + std::to_string(p.d()) + ">";
      });

  m.def("hadamard", [](int q) { return sylvester(q).entries; }, py::arg("q"),
        "2^q x 2^q +-1 matrix from the doubling recursion, exact int64 entries");
  m.def("bit_pattern_for_row", &bit_pattern_for_row, py::arg("q"), py::arg("t"),
        "length-q +-1 pattern whose expansion is row t");
  m.def("psi_expand", &psi_expand, py::arg("bits"),
        "subset-product expansion of a +-1 pattern to length 2^q");
  m.def("kernel_dot", &kernel_dot, py::arg("b"), py::arg("c"),
        "product form of psi(b) . psi(c): 2^q if b == c else 0");

  m.def(
      "make_problem",
      [](const std::string& family, int d, int n, int q, int target_col, std::uint64_t seed) {
        ExperimentSpec spec;
        spec.family = family_from_name(family);
        spec.d = d;
        spec.n = n;
        spec.q = q;
        spec.target_col = target_col;
        return make_problem(spec, seed);
      },
      py::arg("family"), py::arg("d"), py::arg("n") = 0, py::arg("q") = 1,
      py::arg("target_col") = 1, py::arg("seed") = 1,
      "draw one problem instance; families: signflip, complement, permuted, gaussian, "
      "duplicated, doubled, shifted-doubled, randompm");
  m.def("save_problem", &save_problem, py::arg("problem"), py::arg("dir"), py::arg("stem"));
  m.def("load_problem", &load_problem, py::arg("dir"), py::arg("stem"));

  m.def(
      "curve_value",
      [](const std::string& theorem, int d, int k, int q) {
        return curve_value(theorem_from_name(theorem), d, k, q);
      },
      py::arg("theorem"), py::arg("d"), py::arg("k"), py::arg("q") = 1);
  m.def(
      "curve",
      [](const std::string& theorem, int d, int k_max, int q) {
        return make_curve(theorem_from_name(theorem), d, k_max, q).values;
      },
      py::arg("theorem"), py::arg("d"), py::arg("k_max"), py::arg("q") = 1,
      "lower-bound curve sampled at k = 0..k_max");

  m.def(
      "train_loss",
      [](const std::string& learner, const Problem& p, int k, double eta, int epochs,
         const std::string& init, int hidden_units, bool online_to_batch, const ClipPair& clip,
         std::uint64_t init_seed, const std::string& loss) {
        const LearnerKind kind = learner_from_name(learner);
        const LearnerConfig cfg = build_config(kind, p.d(), eta, epochs, init, hidden_units,
                                               online_to_batch, clip, init_seed);
        const LossKind loss_kind = loss_from_name(loss);
        double value = 0.0;
        {
          py::gil_scoped_release release;
          value = train_learner(kind, p, k, cfg).avg_loss(p, loss_kind);
        }
        return value;
      },
      py::arg("learner"), py::arg("problem"), py::arg("k"), py::arg("eta") = 0.0,
      py::arg("epochs") = 0, py::arg("init") = "default", py::arg("hidden_units") = 0,
      py::arg("online_to_batch") = false, py::arg("clip") = ClipPair{},
      py::arg("init_seed") = 0, py::arg("loss") = "square",
      "train on the first k rows, return the mean reported loss over all rows");

  m.def(
      "experiment",
      [](const std::string& family, const std::string& learner, int d, int n, int q,
         int target_col, const std::optional<std::vector<int>>& k, int seeds,
         std::uint64_t master_seed, int workers, const std::optional<std::string>& bound,
         double eta, int epochs, const std::string& init, int hidden_units,
         bool online_to_batch, const ClipPair& clip, const std::string& loss) {
        ExperimentSpec spec;
        spec.family = family_from_name(family);
        spec.learner = learner_from_name(learner);
        spec.d = d;
        spec.n = n;
        spec.q = q;
        spec.target_col = target_col;
        if (k) spec.k_values = *k;
        spec.seeds = seeds;
        spec.master_seed = master_seed;
        spec.workers = workers;
        if (bound) spec.bound = theorem_from_name(*bound);
        spec.config = build_config(spec.learner, d, eta, epochs, init, hidden_units,
                                   online_to_batch, clip, 0);
        spec.loss = loss_from_name(loss);
        ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(spec);
        }
        return result_dict(r);
      },
      py::arg("family"), py::arg("learner"), py::arg("d"), py::arg("n") = 0, py::arg("q") = 1,
      py::arg("target_col") = 1, py::arg("k") = std::optional<std::vector<int>>{},
      py::arg("seeds") = 100, py::arg("master_seed") = 1, py::arg("workers") = 0,
      py::arg("bound") = std::optional<std::string>{}, py::arg("eta") = 0.0,
      py::arg("epochs") = 0, py::arg("init") = "default", py::arg("hidden_units") = 0,
      py::arg("online_to_batch") = false, py::arg("clip") = ClipPair{},
      py::arg("loss") = "square",
      "seed-averaged loss-vs-k sweep; returns k, mean, stderr, bound, theorem");

  m.def(
      "figure2",
      [](int d, int seeds, std::uint64_t master_seed, int workers, const std::string& out_dir) {
        Figure2Result r;
        {
          py::gil_scoped_release release;
          r = figure2_reproduction(d, seeds, master_seed, workers, out_dir);
        }
        py::dict out;
        out["pass"] = r.pass;
        out["failures"] = r.failures;
        out["first_low_k_orthogonal"] = r.first_low_k_hadamard;
        out["first_low_k_random"] = r.first_low_k_random;
        out["c_estimate"] = r.c_estimate;
        out["hadamard_linear"] = result_dict(r.hadamard_linear);
        out["hadamard_spindly"] = result_dict(r.hadamard_spindly);
        out["random_linear"] = result_dict(r.random_linear);
        out["random_spindly"] = result_dict(r.random_spindly);
        return out;
      },
      py::arg("d") = 64, py::arg("seeds") = 100, py::arg("master_seed") = 1,
      py::arg("workers") = 0, py::arg("out_dir") = ".",
      "rebuild the separation figure; writes CSVs, an SVG and a JSON summary into out_dir");

  m.def(
      "verify",
      [](const std::string& tag, std::uint64_t master_seed, int workers) {
        VerifyReport rep;
        {
          py::gil_scoped_release release;
          rep = verify(tag, master_seed, workers);
        }
        py::list rows;
        for (const VerifyCheck& c : rep.checks)
          rows.append(py::make_tuple(c.suite, c.name, c.value, c.target, c.relation, c.pass));
        return py::make_tuple(rep.all_pass, rows);
      },
      py::arg("tag") = "all", py::arg("master_seed") = 1, py::arg("workers") = 0,
      "run a verify suite; returns (all_pass, rows of (suite, check, value, target, "
      "relation, pass))");
  m.def("verify_tags", &verify_tags);

  m.def("singular_spectrum",
        [](const Matrix& y) { return singular_spectrum(y).values; }, py::arg("y"),
        "squared singular values, descending");
  m.def("svd_tail_bound", &svd_tail_bound, py::arg("y"), py::arg("k"));
  m.def("svd_tail_bound_with_init", &svd_tail_bound_with_init, py::arg("y"), py::arg("k"));
  m.def("shifted_doubled_spectrum",
        [](int d) { return shifted_doubled_spectrum(d).values; }, py::arg("d"));
  m.def(
      "hypergeometric_unseen_loss",
      [](int d, int k) {
        const HypergeomStats h = hypergeometric_unseen_loss(d, k);
        return py::make_tuple(h.expected_total, h.mean_q, h.var_q);
      },
      py::arg("d"), py::arg("k"),
      "(expected total unseen loss, E[q], Var[q]) after k of d balanced labels");
  m.def(
      "simulate_permuted_optimal_predictor",
      [](int d, int k, int trials, std::uint64_t seed) {
        const PermutedSimulation sim = simulate_permuted_optimal_predictor(d, k, trials, seed);
        py::dict out;
        out["mean"] = sim.total_loss.mean;
        out["stderr"] = sim.total_loss.stderr_;
        out["trials"] = sim.total_loss.trials;
        out["mean_q"] = sim.mean_q;
        out["var_q"] = sim.var_q;
        return out;
      },
      py::arg("d"), py::arg("k"), py::arg("trials"), py::arg("seed") = 1);

  m.def("random_orthogonal",
        [](int d, std::uint64_t seed) { return random_orthogonal(d, seed).U; }, py::arg("d"),
        py::arg("seed"), "Haar-distributed d x d orthogonal matrix");
  m.def(
      "rotate_problem",
      [](const Problem& p, const Matrix& u) {
        OrthogonalMatrix o;
        o.U = u;
        return rotate_problem(p, o);
      },
      py::arg("problem"), py::arg("u"), "replace each instance x with U x");
  m.def(
      "invariance_test",
      [](const std::string& learner, const Problem& p, const Matrix& u, int k, double eta,
         int epochs, const std::string& init, int hidden_units, std::uint64_t paired_seed) {
        const LearnerKind kind = learner_from_name(learner);
        const LearnerConfig cfg = build_config(kind, p.d(), eta, epochs, init, hidden_units,
                                               false, ClipPair{}, 0);
        OrthogonalMatrix o;
        o.U = u;
        double dev = 0.0;
        {
          py::gil_scoped_release release;
          dev = invariance_test(kind, cfg, p, o, k, paired_seed);
        }
        return dev;
      },
      py::arg("learner"), py::arg("problem"), py::arg("u"), py::arg("k"), py::arg("eta") = 0.0,
      py::arg("epochs") = 0, py::arg("init") = "default", py::arg("hidden_units") = 0,
      py::arg("paired_seed") = 0,
      "max |f(x) - f_rot(Ux)| over the problem rows with seed-paired inits");
}
