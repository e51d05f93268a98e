#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sublin/bounds.hpp"
#include "sublin/choquet.hpp"
#include "sublin/errors.hpp"
#include "sublin/expectation.hpp"
#include "sublin/functionals.hpp"
#include "sublin/moving_average.hpp"
#include "sublin/paths.hpp"
#include "sublin/reports.hpp"
#include "sublin/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sublin;

namespace {

Policy policy_from_json(const json& spec, const GeneratorSet& gen) {
  if (spec.is_null()) return Policy::constant(0);
  const std::string kind = spec.value("kind", "constant");
  if (kind == "constant") return Policy::constant(spec.value("index", 0));
  if (kind == "cyclic") {
    return Policy::cyclic(spec.at("indices").get<std::vector<int>>());
  }
  if (kind == "greedy-mean") {
    std::vector<double> means;
    for (const auto& m : gen.measures) {
      means.push_back(m.expect(TestFunction::identity()));
    }
    const int hi = static_cast<int>(std::max_element(means.begin(), means.end()) -
                                    means.begin());
    const int lo = static_cast<int>(std::min_element(means.begin(), means.end()) -
                                    means.begin());
    return Policy::state_feedback(
        [hi, lo](int, double s, double) { return s >= 0.0 ? hi : lo; },
        "greedy-mean");
  }
  throw Error("unknown policy kind '" + kind + "'");
}

ScaleSequence scale_from_json(const json& spec) {
  if (spec.is_null()) return ScaleSequence::ones();
  const std::string kind = spec.value("kind", "ones");
  if (kind == "ones") return ScaleSequence::ones();
  if (kind == "array") {
    return ScaleSequence::from_array(spec.at("values").get<std::vector<double>>());
  }
  if (kind == "periodic") {
    return ScaleSequence::periodic(spec.at("pattern").get<std::vector<double>>());
  }
  throw Error("unknown scale kind '" + kind + "'");
}

StatMode mode_from_string(const std::string& s) {
  if (s == "positive") return StatMode::PositivePart;
  if (s == "absolute") return StatMode::Absolute;
  throw Error("mode must be positive|absolute");
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

int run_choquet(const ExperimentConfig& cfg, json& results) {
  const GeneratorSet gen = GeneratorSet::from_json(cfg.params.at("dist"));
  ChoquetOptions opts;
  opts.tol = cfg.params.value("tol", 1e-8);
  opts.t_cap = cfg.params.value("t_cap", 1024.0);
  const std::string transform = cfg.params.value("transform", "none");
  ChoquetResult res;
  if (transform == "none") {
    auto surv = [&gen](double t) {
      return capacity_upper(gen, EventSet::at_least(t));
    };
    std::vector<double> bps;
    for (const auto& m : gen.measures) {
      const auto b = m.breakpoints();
      bps.insert(bps.end(), b.begin(), b.end());
    }
    res = choquet_integral(surv, bps, opts);
  } else if (transform == "abs") {
    res = choquet_abs_power(gen, 1.0, opts);
  } else if (transform == "square") {
    res = choquet_abs_power(gen, 2.0, opts);
  } else if (transform == "abs_power") {
    res = choquet_abs_power(gen, cfg.params.value("r", 1.0), opts);
  } else {
    throw Error("unknown transform '" + transform + "'");
  }
  results = {{"value", res.finite() ? json(res.value) : json("inf")},
             {"abs_error", res.abs_error},
             {"status", to_string(res.status)}};
  std::printf("choquet %s value=%.9g status=%s\n", transform.c_str(),
              res.value, to_string(res.status).c_str());
  return 0;
}

int run_functionals(const ExperimentConfig& cfg, json& results,
                    const fs::path& out) {
  const GeneratorSet gen = GeneratorSet::from_json(cfg.params.at("dist"));
  const double r = cfg.params.value("r", 2.0);
  const FunctionalReport rep = functional_report(gen, r);
  results = rep.to_json();
  write_file(out / "functionals.csv", rep.to_csv());
  std::printf("sigma_sq=%.9g lil_moment=%.9g max_moment(r=%g)=%.9g\n",
              rep.sigma_sq, rep.lil.value, r, rep.max_moment.value);
  return 0;
}

int run_series(const ExperimentConfig& cfg, json& results,
               const fs::path& out) {
  const GeneratorSet gen = GeneratorSet::from_json(cfg.params.at("dist"));
  const std::string kind = cfg.params.value("kind", "truncated");
  const std::int64_t n_max = cfg.params.value("n_max", std::int64_t{1} << 20);
  SeriesCurve curve;
  if (kind == "truncated") {
    curve = series_truncated_moment(gen, cfg.params.value("p", 3.0),
                                    cfg.params.value("delta", 1.0), n_max);
  } else {
    curve = series_excess_moment(gen, cfg.params.value("r", 1.0), n_max, {},
                                 cfg.params.value("integral_form", false));
  }
  results = curve.to_json();
  write_file(out / "series.csv", curve.to_csv());
  std::printf("series %s n_max=%lld total=%.9g cauchy=%s\n", kind.c_str(),
              static_cast<long long>(n_max), curve.partial_sums.back(),
              curve.cauchy() ? "yes" : "no");
  return 0;
}

int run_bound(const ExperimentConfig& cfg, json& results,
              const fs::path& out) {
  const std::string type = cfg.params.value("type", "blocking");
  if (type == "exp") {
    ExpIneqInputs in;
    in.n = cfg.params.value("n", std::int64_t{0});
    in.x = cfg.params.at("x").get<double>();
    in.y = cfg.params.at("y").get<double>();
    in.p = cfg.params.value("p", 2.0);
    in.delta = cfg.params.value("delta", 1.0);
    in.a_n = cfg.params.value("a_n", 0.0);
    in.b_n = cfg.params.value("b_n", 0.0);
    in.tail_max = cfg.params.value("tail_max", 0.0);
    const double rhs = exp_inequality_rhs(in);
    results = {{"rhs", rhs}};
    std::printf("exp inequality rhs=%.9g\n", rhs);
    return 0;
  }
  const GeneratorSet gen = GeneratorSet::from_json(cfg.params.at("dist"));
  BlockingInputs in;
  in.r = cfg.params.value("r", 1.0);
  in.p = cfg.params.value("p", 3.0);
  in.z = cfg.params.value("z", 1.0);
  in.k_max = cfg.params.value("k_max", 40);
  in.sigma_sq = cfg.params.value("sigma_sq", 1.0);
  const BoundReport rep = blocking_bound(in, gen);
  results = rep.to_json();
  write_file(out / "bound_blocks.csv", rep.table_csv());
  std::printf("blocking z=%g g1=%.6g g2=%.6g g3=%.6g total=%.6g\n", in.z,
              rep.g1, rep.g2, rep.g3, rep.total());
  if (cfg.params.value("integrate_z", false)) {
    const WedgeIntegral w = integrated_blocking_bound(in, gen);
    results["z_integral"] = {{"value", w.value}, {"settled", w.settled}};
    std::printf("integral of 1^total dz = %.6g settled=%s\n", w.value,
                w.settled ? "yes" : "no");
  }
  return 0;
}

int run_dp(const ExperimentConfig& cfg, json& results) {
  const GeneratorSet gen = GeneratorSet::from_json(cfg.params.at("dist"));
  const std::string fk = cfg.params.value("functional", "max_norm");
  const int n = cfg.params.value("n", 2);
  const double r = cfg.params.value("r", 1.0);
  const StatMode mode =
      mode_from_string(cfg.params.value("mode", std::string("positive")));
  PathFunctional f;
  if (fk == "sum") {
    f = PathFunctional::terminal_sum();
  } else if (fk == "abs_sum") {
    f = PathFunctional::terminal_abs_sum();
  } else if (fk == "max_norm") {
    f = PathFunctional::max_norm_stat(r, mode);
  } else if (fk == "combo") {
    f = PathFunctional::combo(cfg.params.value("c_sum", 0.0),
                              cfg.params.value("c_abs", 0.0),
                              cfg.params.value("c_max", 1.0), r, mode);
  } else {
    throw Error("unknown functional '" + fk + "'");
  }
  const double v = exact_dp_upper(gen, f, n);
  results = {{"value", v}};
  if (cfg.params.value("brute_check", false)) {
    const double b = brute_force_upper(gen, f, n);
    results["brute"] = b;
    results["agree"] = std::fabs(v - b) <= 1e-12 * std::max(1.0, std::fabs(b));
  }
  std::printf("%.6f\n", v);
  return 0;
}

int run_simulate(const ExperimentConfig& cfg, json& results,
                 const fs::path& out) {
  const GeneratorSet gen = GeneratorSet::from_json(cfg.params.at("dist"));
  const Policy policy =
      policy_from_json(cfg.params.value("policy", json()), gen);
  MaxStatConfig mc;
  mc.n = cfg.params.value("n", std::int64_t{256});
  mc.r = cfg.params.value("r", 1.0);
  mc.mode = mode_from_string(cfg.params.value("mode", std::string("positive")));
  mc.scale = scale_from_json(cfg.params.value("scale", json()));
  mc.seed = cfg.seed;
  mc.replications = cfg.params.value("replications", std::int64_t{1000});
  mc.threads = cfg.threads;
  const McMaxMoment est = mc_choquet_max_moment(gen, {policy}, mc);
  results = est.to_json();
  // survival curve of the statistic for tail diagnostics
  std::ostringstream surv;
  surv << "stat,survival\n";
  const auto& sorted = est.per_policy[0].sorted_stats;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    surv << sorted[i] << ','
         << static_cast<double>(sorted.size() - i) /
                static_cast<double>(sorted.size())
         << '\n';
  }
  write_file(out / "survival.csv", surv.str());
  if (cfg.params.value("dump_paths", false)) {
    const RngStream stream(cfg.seed, rng_domain::kPaths, 0);
    const auto path = sample_path(gen, policy, mc.scale, mc.n, stream);
    std::ostringstream os;
    os << "k,x\n";
    for (std::size_t i = 0; i < path.size(); ++i) {
      os << (i + 1) << ',' << path[i] << '\n';
    }
    write_file(out / "path0.csv", os.str());
  }
  std::printf("mc mean=%.9g +- %.3g (policy %s, reps=%lld)\n",
              est.per_policy[0].mean, est.per_policy[0].std_error,
              est.per_policy[0].policy.c_str(),
              static_cast<long long>(mc.replications));
  return 0;
}

int run_probe(const ExperimentConfig& cfg, json& results,
              const fs::path& out) {
  const GeneratorSet gen = GeneratorSet::from_json(cfg.params.at("dist"));
  const Policy policy =
      policy_from_json(cfg.params.value("policy", json()), gen);
  ProbeConfig pc;
  if (cfg.params.contains("n_grid")) {
    pc.n_grid = cfg.params.at("n_grid").get<std::vector<std::int64_t>>();
  }
  pc.r = cfg.params.value("r", 1.0);
  pc.mode = mode_from_string(cfg.params.value("mode", std::string("absolute")));
  pc.replications = cfg.params.value("replications", std::int64_t{200});
  pc.seed = cfg.seed;
  pc.threads = cfg.threads;
  const ProbeResult res = plateau_divergence_probe(gen, policy, pc);
  results = res.to_json();
  std::ostringstream os;
  os << "n,estimate\n";
  for (std::size_t i = 0; i < res.n_grid.size(); ++i) {
    os << res.n_grid[i] << ',' << res.estimates[i] << '\n';
  }
  write_file(out / "probe.csv", os.str());
  std::printf("probe verdict=%s first=%.6g last=%.6g\n", res.verdict.c_str(),
              res.estimates.front(), res.estimates.back());
  return 0;
}

int run_ma_lil(const ExperimentConfig& cfg, json& results,
               const fs::path& out) {
  const GeneratorSet gen = GeneratorSet::from_json(cfg.params.at("dist"));
  const Coefficients coeffs =
      Coefficients::from_json(cfg.params.at("coeffs"));
  const Policy policy =
      policy_from_json(cfg.params.value("policy", json()), gen);
  LilConfig lc;
  lc.n = cfg.params.value("n", std::int64_t{1} << 20);
  lc.window_lo = cfg.params.value("window_lo", std::int64_t{0});
  lc.seeds = cfg.params.value("seeds", 64);
  lc.master_seed = cfg.seed;
  lc.threads = cfg.threads;
  lc.convention = cfg.params.value("convention", std::string("one-sided")) ==
                          std::string("bi-directional")
                      ? MAConvention::BiDirectional
                      : MAConvention::OneSidedZeros;
  lc.cutoff_m = cfg.params.value("cutoff_m", -1);
  const LilEstimate est = lil_estimate(coeffs, gen, policy, lc);
  results = est.to_json();
  write_file(out / "ma_lil.csv", est.to_csv());
  if (cfg.params.contains("bins")) {
    const ClusterCoverage cov =
        cluster_coverage(coeffs, gen, policy, lc, cfg.params.at("bins").get<int>());
    results["cluster"] = cov.to_json();
  }
  std::printf("ma-lil median=%.6g target=%.6g premises_ok=%s\n", est.median,
              est.target, est.premises_ok ? "yes" : "no");
  return 0;
}

int run_verify(const ExperimentConfig& cfg, json& results) {
  VerifyConfig vc;
  vc.seed = cfg.seed ? cfg.seed : 20250807;
  vc.threads = cfg.threads;
  vc.tolerances = cfg.tolerances;
  std::vector<std::string> subset;
  if (cfg.params.contains("checks")) {
    subset = cfg.params.at("checks").get<std::vector<std::string>>();
  }
  const auto checks = run_verify_suite(vc, subset);
  json arr = json::array();
  int failures = 0;
  for (const auto& ck : checks) {
    arr.push_back(ck.to_json());
    failures += ck.pass ? 0 : 1;
    std::printf("[%s] %-20s %6.2fs %s\n", ck.pass ? "PASS" : "FAIL",
                ck.name.c_str(), ck.seconds, ck.detail.c_str());
  }
  results = {{"defaults_version", kVerifyDefaultsVersion},
             {"checks", arr},
             {"failures", failures}};
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sub-linear expectation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false, threads_set = false, out_set = false;
  int threads = 0;
  std::vector<std::string> tol_overrides;

  const std::vector<std::string> subs = {"choquet", "functionals", "series",
                                         "bound",   "dp",          "simulate",
                                         "probe",   "ma-lil",      "verify"};
  for (const auto& name : subs) {
    auto* sc = app.add_subcommand(name);
    sc->add_option("--config", config_path, "JSON config file");
    sc->add_option("--seed", seed, "master seed")->each([&](const std::string&) {
      seed_set = true;
    });
    sc->add_option("--threads", threads, "worker threads")
        ->each([&](const std::string&) { threads_set = true; });
    sc->add_option("--out", out_dir, "output directory")
        ->each([&](const std::string&) { out_set = true; });
    sc->add_option("--tolerance", tol_overrides,
                   "name=value tolerance override (repeatable)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const std::string sub = app.get_subcommands().front()->get_name();
    json doc = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw Error("cannot read config " + config_path);
      std::stringstream buf;
      buf << in.rdbuf();
      doc = parse_json_strict(buf.str());
    }
    doc["subcommand"] = sub;
    if (seed_set) doc["seed"] = seed;
    if (threads_set) doc["threads"] = threads;
    if (out_set) doc["out"] = out_dir;
    for (const auto& ov : tol_overrides) {
      const auto eq = ov.find('=');
      if (eq == std::string::npos) {
        throw Error("tolerance override must be name=value");
      }
      doc["tolerances"][ov.substr(0, eq)] = std::stod(ov.substr(eq + 1));
    }

    const ExperimentConfig cfg = parse_config(doc);
    const fs::path out(cfg.out_dir);
    fs::create_directories(out);

    RunReport report;
    report.config = cfg;
    const auto t0 = std::chrono::steady_clock::now();
    int code = 0;
    if (cfg.subcommand == "choquet") {
      code = run_choquet(cfg, report.results);
    } else if (cfg.subcommand == "functionals") {
      code = run_functionals(cfg, report.results, out);
    } else if (cfg.subcommand == "series") {
      code = run_series(cfg, report.results, out);
    } else if (cfg.subcommand == "bound") {
      code = run_bound(cfg, report.results, out);
    } else if (cfg.subcommand == "dp") {
      code = run_dp(cfg, report.results);
    } else if (cfg.subcommand == "simulate") {
      code = run_simulate(cfg, report.results, out);
    } else if (cfg.subcommand == "probe") {
      code = run_probe(cfg, report.results, out);
    } else if (cfg.subcommand == "ma-lil") {
      code = run_ma_lil(cfg, report.results, out);
    } else {
      code = run_verify(cfg, report.results);
    }
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    report.exit_code = code;
    write_file(out / "report.json", report.to_json().dump(2) + "\n");
    return code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
