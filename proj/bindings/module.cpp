#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "sublin/bounds.hpp"
#include "sublin/choquet.hpp"
#include "sublin/errors.hpp"
#include "sublin/expectation.hpp"
#include "sublin/functionals.hpp"
#include "sublin/moving_average.hpp"
#include "sublin/normalizer.hpp"
#include "sublin/paths.hpp"
#include "sublin/rng.hpp"
#include "sublin/verify.hpp"

namespace py = pybind11;
using namespace sublin;
using nlohmann::json;

namespace {

GeneratorSet gen_from(const std::string& text) {
  return GeneratorSet::from_json(json::parse(text));
}

py::object to_py(const json& j) {
  auto loads = py::module_::import("json").attr("loads");
  return loads(j.dump());
}

TestFunction make_phi(const std::string& preset) {
  if (preset == "identity") return TestFunction::identity();
  if (preset == "square") return TestFunction::power(2);
  if (preset == "abs") return TestFunction::abs_power(1.0);
  if (preset == "neg_abs") return TestFunction::negative_abs();
  throw Error("unknown test-function preset '" + preset + "'");
}

TestFunction make_phi_callable(const py::function& f, const std::string& kind,
                               double c1, double c2,
                               std::vector<double> breakpoints) {
  auto wrapped = [f](double x) { return f(x).cast<double>(); };
  if (kind == "bounded-lipschitz") {
    return TestFunction::bounded_lipschitz(wrapped, c1, c2,
                                           std::move(breakpoints));
  }
  if (kind == "polynomial-growth") {
    return TestFunction::polynomial_growth(wrapped, static_cast<int>(c1), c2,
                                           std::move(breakpoints));
  }
  throw Error("kind must be bounded-lipschitz|polynomial-growth");
}

StatMode make_mode(const std::string& mode) {
  if (mode == "positive") return StatMode::PositivePart;
  if (mode == "absolute") return StatMode::Absolute;
  throw Error("mode must be positive|absolute");
}

PathFunctional make_functional(const std::string& kind, double r,
                               const std::string& mode) {
  if (kind == "sum") return PathFunctional::terminal_sum();
  if (kind == "abs_sum") return PathFunctional::terminal_abs_sum();
  if (kind == "max_norm") return PathFunctional::max_norm_stat(r, make_mode(mode));
  throw Error("functional must be sum|abs_sum|max_norm");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "sub-linear expectation numerics: envelopes, Choquet moments, "
            "adversarial dynamic programming and iterated-logarithm "
            "simulation";
  m.attr("__version__") = "0.1.0";

  py::register_exception<Error>(m, "SublinError");

  m.def("normalizer", &normalizer, py::arg("n"),
        "sqrt(2 n loglog n) under the clamped-logarithm convention");
  m.def("clamped_log", &clamped_log);
  m.def("clamped_loglog", &clamped_loglog);

  m.def(
      "upper_expectation",
      [](const std::string& gen, const std::string& phi) {
        return upper_expectation(gen_from(gen), make_phi(phi));
      },
      py::arg("generator_set"), py::arg("phi"),
      "Upper envelope expectation of a preset test function "
      "(identity|square|abs|neg_abs)");
  m.def(
      "upper_expectation_fn",
      [](const std::string& gen, const py::function& f, const std::string& kind,
         double c1, double c2, std::vector<double> breakpoints) {
        return upper_expectation(
            gen_from(gen), make_phi_callable(f, kind, c1, c2, std::move(breakpoints)));
      },
      py::arg("generator_set"), py::arg("f"), py::arg("kind"), py::arg("c1"),
      py::arg("c2"), py::arg("breakpoints") = std::vector<double>{});
  m.def(
      "conjugate_expectation",
      [](const std::string& gen, const std::string& phi) {
        return conjugate_expectation(gen_from(gen), make_phi(phi));
      },
      py::arg("generator_set"), py::arg("phi"));

  m.def(
      "capacity_upper",
      [](const std::string& gen, double lo, double hi, bool lo_closed,
         bool hi_closed) {
        return capacity_upper(gen_from(gen),
                              EventSet::interval(lo, hi, lo_closed, hi_closed));
      },
      py::arg("generator_set"), py::arg("lo"), py::arg("hi"),
      py::arg("lo_closed") = true, py::arg("hi_closed") = true);
  m.def(
      "capacity_lower",
      [](const std::string& gen, double lo, double hi, bool lo_closed,
         bool hi_closed) {
        return capacity_lower(gen_from(gen),
                              EventSet::interval(lo, hi, lo_closed, hi_closed));
      },
      py::arg("generator_set"), py::arg("lo"), py::arg("hi"),
      py::arg("lo_closed") = true, py::arg("hi_closed") = true);

  m.def(
      "choquet_integral",
      [](const py::function& survival, std::vector<double> breakpoints,
         double tol, double t_cap) {
        ChoquetOptions opts;
        opts.tol = tol;
        opts.t_cap = t_cap;
        auto s = [survival](double t) { return survival(t).cast<double>(); };
        const ChoquetResult r = choquet_integral(s, breakpoints, opts);
        return to_py(json{{"value", r.value},
                          {"abs_error", r.abs_error},
                          {"status", to_string(r.status)}});
      },
      py::arg("survival"), py::arg("breakpoints") = std::vector<double>{},
      py::arg("tol") = 1e-8, py::arg("t_cap") = 1024.0);

  m.def(
      "functional_report",
      [](const std::string& gen, double r) {
        return to_py(functional_report(gen_from(gen), r).to_json());
      },
      py::arg("generator_set"), py::arg("r") = 2.0,
      "Upper second moment, loglog moment, r-indexed max-moment functional "
      "and the certain-mean pair");

  m.def(
      "series_truncated_moment",
      [](const std::string& gen, double p, double delta, std::int64_t n_max) {
        return to_py(series_truncated_moment(gen_from(gen), p, delta, n_max)
                         .to_json());
      },
      py::arg("generator_set"), py::arg("p") = 3.0, py::arg("delta") = 1.0,
      py::arg("n_max") = std::int64_t{1} << 16);
  m.def(
      "series_excess_moment",
      [](const std::string& gen, double r, std::int64_t n_max,
         bool integral_form) {
        return to_py(series_excess_moment(gen_from(gen), r, n_max, {},
                                          integral_form)
                         .to_json());
      },
      py::arg("generator_set"), py::arg("r") = 1.0,
      py::arg("n_max") = std::int64_t{1} << 16,
      py::arg("integral_form") = false);

  m.def("markov_choquet_bound", &markov_choquet_bound, py::arg("c0"),
        py::arg("p"), py::arg("r"));
  m.def("markov_integral_bound", &markov_integral_bound, py::arg("c0"),
        py::arg("p"), py::arg("r"));

  m.def(
      "exp_inequality_rhs",
      [](std::int64_t n, double x, double y, double p, double delta,
         double a_n, double b_n, double tail_max) {
        ExpIneqInputs in{n, x, y, p, delta, a_n, b_n, tail_max};
        return exp_inequality_rhs(in);
      },
      py::arg("n"), py::arg("x"), py::arg("y"), py::arg("p") = 2.0,
      py::arg("delta") = 1.0, py::arg("a_n") = 0.0, py::arg("b_n") = 0.0,
      py::arg("tail_max") = 0.0);

  m.def(
      "exact_dp_upper",
      [](const std::string& gen, const std::string& functional, int n,
         double r, const std::string& mode) {
        return exact_dp_upper(gen_from(gen), make_functional(functional, r, mode),
                              n);
      },
      py::arg("generator_set"), py::arg("functional") = "max_norm",
      py::arg("n") = 2, py::arg("r") = 1.0, py::arg("mode") = "positive",
      "Adapted-adversary upper expectation by exact backward recursion");
  m.def(
      "brute_force_upper",
      [](const std::string& gen, const std::string& functional, int n,
         double r, const std::string& mode) {
        return brute_force_upper(gen_from(gen),
                                 make_functional(functional, r, mode), n);
      },
      py::arg("generator_set"), py::arg("functional") = "max_norm",
      py::arg("n") = 2, py::arg("r") = 1.0, py::arg("mode") = "positive");

  m.def(
      "mc_max_moment",
      [](const std::string& gen, std::int64_t n, double r,
         const std::string& mode, std::uint64_t seed, std::int64_t reps,
         int threads) {
        MaxStatConfig cfg;
        cfg.n = n;
        cfg.r = r;
        cfg.mode = make_mode(mode);
        cfg.seed = seed;
        cfg.replications = reps;
        cfg.threads = threads;
        return to_py(
            mc_choquet_max_moment(gen_from(gen), {Policy::constant(0)}, cfg)
                .to_json());
      },
      py::arg("generator_set"), py::arg("n") = 256, py::arg("r") = 1.0,
      py::arg("mode") = "positive", py::arg("seed") = 0,
      py::arg("replications") = 1000, py::arg("threads") = 1);

  m.def(
      "plateau_divergence_probe",
      [](const std::string& gen, double r, std::vector<std::int64_t> grid,
         std::int64_t reps, std::uint64_t seed, int threads) {
        ProbeConfig pc;
        pc.n_grid = std::move(grid);
        pc.r = r;
        pc.replications = reps;
        pc.seed = seed;
        pc.threads = threads;
        return to_py(
            plateau_divergence_probe(gen_from(gen), Policy::constant(0), pc)
                .to_json());
      },
      py::arg("generator_set"), py::arg("r") = 1.0,
      py::arg("n_grid") = std::vector<std::int64_t>{},
      py::arg("replications") = 200, py::arg("seed") = 0,
      py::arg("threads") = 1);

  m.def(
      "tail_cutoff",
      [](const std::string& coeffs, double mean_abs_y, double eps, double x) {
        return tail_cutoff(Coefficients::from_json(json::parse(coeffs)),
                           mean_abs_y, eps, x);
      },
      py::arg("coefficients"), py::arg("mean_abs_y"), py::arg("eps"),
      py::arg("x"));

  m.def(
      "lil_estimate",
      [](const std::string& gen, const std::string& coeffs, std::int64_t n,
         int seeds, std::uint64_t seed, int threads) {
        LilConfig cfg;
        cfg.n = n;
        cfg.seeds = seeds;
        cfg.master_seed = seed;
        cfg.threads = threads;
        return to_py(lil_estimate(Coefficients::from_json(json::parse(coeffs)),
                                  gen_from(gen), Policy::constant(0), cfg)
                         .to_json());
      },
      py::arg("generator_set"), py::arg("coefficients"),
      py::arg("n") = std::int64_t{1} << 16, py::arg("seeds") = 16,
      py::arg("seed") = 0, py::arg("threads") = 1);

  m.def(
      "uniform",
      [](std::uint64_t seed, std::uint64_t domain, std::uint64_t rep,
         std::uint64_t step) {
        return RngStream(seed, domain, rep).uniform(step);
      },
      py::arg("seed"), py::arg("domain"), py::arg("rep"), py::arg("step"),
      "Addressed counter-based uniform draw");

  m.def(
      "run_verify_check",
      [](const std::string& name, std::uint64_t seed, int threads) {
        VerifyConfig vc;
        if (seed) vc.seed = seed;
        vc.threads = threads;
        return to_py(run_verify_check(name, vc).to_json());
      },
      py::arg("name"), py::arg("seed") = 0, py::arg("threads") = 4);
  m.def("verify_check_names", &verify_check_names);
}
