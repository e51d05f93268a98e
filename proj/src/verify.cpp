#include "sublin/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>
#include <nlohmann/json.hpp>

#include "sublin/bounds.hpp"
#include "sublin/choquet.hpp"
#include "sublin/errors.hpp"
#include "sublin/expectation.hpp"
#include "sublin/functionals.hpp"
#include "sublin/moving_average.hpp"
#include "sublin/normalizer.hpp"
#include "sublin/parallel.hpp"
#include "sublin/paths.hpp"
#include "sublin/rng.hpp"

namespace sublin {

const char* kVerifyDefaultsVersion = "1";

double clopper_pearson_upper(std::int64_t successes, std::int64_t trials,
                             double confidence) {
  if (trials <= 0) throw Error("clopper_pearson_upper needs trials > 0");
  if (successes >= trials) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(successes + 1),
                                static_cast<double>(trials - successes),
                                confidence);
}

namespace {

using Clock = std::chrono::steady_clock;

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max(1e-300, std::fabs(want));
}

struct Check {
  std::ostringstream detail;
  int failures = 0;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      ++failures;
      detail << "[fail] " << what << "; ";
    }
  }
  void near(double got, double want, double rel, const std::string& what) {
    const double e = rel_err(got, want);
    expect(e <= rel, what + " got " + std::to_string(got) + " want " +
                         std::to_string(want) + " relerr " +
                         std::to_string(e));
  }
  void note(const std::string& s) { detail << s << "; "; }
};

CheckResult finish(const char* name, Check& c, Clock::time_point t0,
                   double budget_s) {
  CheckResult r;
  r.name = name;
  r.seconds =
      std::chrono::duration<double>(Clock::now() - t0).count();
  if (r.seconds >= budget_s) {
    ++c.failures;
    c.detail << "[fail] runtime " << r.seconds << "s exceeds budget "
             << budget_s << "s; ";
  }
  r.pass = c.failures == 0;
  r.detail = c.detail.str();
  return r;
}

// --- 1. Choquet / envelope exactness on the closed-form corpus ------------

CheckResult check_choquet_exactness(const VerifyConfig& cfg) {
  const auto t0 = Clock::now();
  Check c;
  const double tol = cfg.tol("choquet.rel", 1e-6);

  auto exp_surv = [](double t) { return t <= 0 ? 1.0 : std::exp(-t); };
  c.near(choquet_integral(exp_surv).value, 1.0, tol, "exp survival");

  for (double k : {2.5, -1.5}) {
    auto surv = [k](double t) { return t <= k ? 1.0 : 0.0; };
    c.near(choquet_integral(surv, std::vector<double>{k}).value, k, tol,
           "constant " + std::to_string(k));
  }

  const GeneratorSet two_point(
      {Measure::point_mass(1.0), Measure::point_mass(-1.0)}, "two-point");
  auto cap_surv = [&two_point](double t) {
    return capacity_upper(two_point, EventSet::at_least(t));
  };
  c.near(choquet_integral(cap_surv, std::vector<double>{-1.0, 1.0}).value, 1.0,
         tol, "two-point choquet");

  const GeneratorSet normals(
      {Measure::normal(0.0, 1.0), Measure::normal(0.0, 2.0)}, "n12");
  c.near(choquet_abs_power(normals, 2.0).value, 4.0, tol, "C[X^2] envelope");
  c.near(upper_expectation(normals, TestFunction::power(2)), 4.0, tol,
         "upper second moment");
  c.near(conjugate_expectation(normals, TestFunction::power(2)), 1.0, tol,
         "conjugate second moment");
  c.near(upper_expectation(normals, TestFunction::negative_abs()),
         -std::sqrt(2.0 / M_PI), tol, "upper of -|x|");

  c.near(capacity_upper(normals, EventSet::abs_greater(2.0)),
         std::erfc(1.0 / M_SQRT2), tol, "capacity upper |X|>2");
  c.near(capacity_lower(normals, EventSet::abs_greater(2.0)),
         std::erfc(M_SQRT2), tol, "capacity lower |X|>2");

  return finish("choquet-exactness", c, t0, 1.0);
}

// --- 2. DP vs brute-force oracle ------------------------------------------

CheckResult check_dp_oracle(const VerifyConfig& cfg) {
  const auto t0 = Clock::now();
  Check c;
  std::mt19937_64 rng(cfg.seed ^ 0xD1CEULL);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto random_measure = [&]() {
    const int support = 1 + static_cast<int>(rng() % 3);
    std::vector<std::pair<double, double>> rows;
    double wsum = 0.0;
    std::vector<double> w(static_cast<std::size_t>(support));
    for (auto& x : w) {
      x = 0.1 + unif(rng);
      wsum += x;
    }
    for (int i = 0; i < support; ++i) {
      const double v =
          std::round((unif(rng) * 4.0 - 2.0) * 32.0) / 32.0;  // dyadic grid
      rows.emplace_back(v, w[static_cast<std::size_t>(i)] / wsum);
    }
    return Measure::discrete(rows);
  };

  int checked = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const int gens = 1 + static_cast<int>(rng() % 2);
    std::vector<Measure> ms;
    for (int g = 0; g < gens; ++g) ms.push_back(random_measure());
    const GeneratorSet gen(ms, "rand");
    const double r = 1.0 + static_cast<double>(rng() % 3);
    const StatMode mode =
        rng() % 2 ? StatMode::PositivePart : StatMode::Absolute;
    const PathFunctional f = PathFunctional::combo(
        unif(rng) * 4.0 - 2.0, unif(rng) * 2.0, unif(rng) * 2.0, r, mode);

    const double dp = exact_dp_upper(gen, f, n);
    const double brute = brute_force_upper(gen, f, n);
    c.expect(std::fabs(dp - brute) <= 1e-12 * std::max(1.0, std::fabs(brute)),
             "dp==brute inst " + std::to_string(inst) + " dp=" +
                 std::to_string(dp) + " brute=" + std::to_string(brute));
    for (int g = 0; g < gens; ++g) {
      const double classical = constant_policy_expectation(gen, g, f, n);
      c.expect(dp >= classical - 1e-12,
               "dp >= constant policy, inst " + std::to_string(inst));
    }
    ++checked;
  }
  c.note("instances=" + std::to_string(checked));
  return finish("dp-oracle", c, t0, 10.0);
}

// --- 3. Sub-linear expectation property suite ------------------------------

CheckResult check_sublinearity(const VerifyConfig& cfg) {
  const auto t0 = Clock::now();
  Check c;
  std::mt19937_64 rng(cfg.seed ^ 0x50bULL);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto random_measure = [&]() {
    const int support = 1 + static_cast<int>(rng() % 8);
    std::vector<std::pair<double, double>> rows;
    std::vector<double> w(static_cast<std::size_t>(support));
    double wsum = 0.0;
    for (auto& x : w) {
      x = 0.05 + unif(rng);
      wsum += x;
    }
    for (int i = 0; i < support; ++i) {
      rows.emplace_back(unif(rng) * 8.0 - 4.0,
                        w[static_cast<std::size_t>(i)] / wsum);
    }
    return Measure::discrete(rows);
  };
  auto random_fn = [&]() {
    const double a = unif(rng) * 2 - 1, b = unif(rng) * 2 - 1;
    const double d = unif(rng) * 2 - 1, e = unif(rng) * 4 - 2;
    const double s = unif(rng) * 2 - 1;
    return TestFunction::polynomial_growth(
        [a, b, d, e, s](double x) {
          return a + b * x + d * std::fabs(x - e) + s * std::sin(3.0 * x);
        },
        2, 64.0, {e});
  };

  const double tol = cfg.tol("sublinearity.abs", 1e-10);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int gens = 1 + static_cast<int>(rng() % 3);
    std::vector<Measure> ms;
    for (int g = 0; g < gens; ++g) ms.push_back(random_measure());
    const GeneratorSet gen(ms, "prop");
    const TestFunction phi = random_fn();
    const TestFunction psi = random_fn();

    const double e_phi = upper_expectation(gen, phi);
    const double e_psi = upper_expectation(gen, psi);
    const double e_sum = upper_expectation(gen, phi.plus(psi));
    if (e_sum > e_phi + e_psi + tol) ++violations;

    const double lambda = 0.25 + 3.75 * unif(rng);
    if (std::fabs(upper_expectation(gen, phi.scaled(lambda)) -
                  lambda * e_phi) > tol) {
      ++violations;
    }

    const double k = unif(rng) * 10 - 5;
    if (std::fabs(upper_expectation(gen, TestFunction::constant(k)) - k) > tol) {
      ++violations;
    }

    // psi_up dominates phi pointwise
    const double shift = unif(rng) * 2.0;
    const TestFunction bump = TestFunction::polynomial_growth(
        [shift](double x) { return shift + 0.1 * x * x; }, 2, shift + 1.0);
    if (e_phi > upper_expectation(gen, phi.plus(bump)) + tol) ++violations;

    if (conjugate_expectation(gen, phi) > e_phi + tol) ++violations;
  }
  c.expect(violations == 0,
           "property violations: " + std::to_string(violations));
  return finish("sublinearity", c, t0, 5.0);
}

// --- 4. Exponential inequality never violated by the MC tail ---------------

CheckResult check_exp_inequality(const VerifyConfig& cfg) {
  const auto t0 = Clock::now();
  Check c;
  const GeneratorSet gen(
      {Measure::uniform_on({-1.0, 1.0})}, "rademacher");
  const Measure& m = gen.measures[0];
  const double mean_t = extended_expectation(gen).value;  // 0 here

  const std::int64_t reps = 100000;
  double worst_ratio = 0.0;
  for (const int n : {16, 64, 256}) {
    std::vector<double> max_sum(static_cast<std::size_t>(reps));
    parallel_for(reps, cfg.threads, [&](std::int64_t j) {
      const RngStream stream(cfg.seed, rng_domain::kTests,
                             static_cast<std::uint64_t>(j));
      double s = 0.0, best = -1e300;
      for (int k = 1; k <= n; ++k) {
        s += m.sample(stream.uniform(static_cast<std::uint64_t>(
                 static_cast<std::uint64_t>(n) * 1000 + k))) -
             mean_t;
        best = std::max(best, s);
      }
      max_sum[static_cast<std::size_t>(j)] = best;
    });

    const double root_n = std::sqrt(static_cast<double>(n));
    for (int gi = 0; gi < 12; ++gi) {
      const double x = (0.5 + 2.5 * gi / 11.0) * root_n;
      const double y = x / 30.0;
      std::int64_t hits = 0;
      for (double v : max_sum) {
        if (v >= x) ++hits;
      }
      const double ucb = clopper_pearson_upper(hits, reps, 0.99);

      ExpIneqInputs in;
      in.n = n;
      in.x = x;
      in.y = y;
      in.p = 2.0;
      in.delta = 1.0;
      in.a_n = n * upper_expectation(gen, TestFunction::clamped_pos_power(y, 2.0));
      in.b_n = n * upper_expectation(gen, TestFunction::clamped_min_square(y));
      const double p_tail = m.prob_greater(y);
      in.tail_max = 1.0 - std::pow(1.0 - p_tail, n);
      const double rhs = exp_inequality_rhs(in);
      worst_ratio = std::max(worst_ratio, ucb / rhs);
      c.expect(ucb <= rhs * (1.0 + 1e-12),
               "n=" + std::to_string(n) + " x=" + std::to_string(x) +
                   " ucb=" + std::to_string(ucb) + " rhs=" +
                   std::to_string(rhs));
    }
  }
  c.note("worst ucb/rhs=" + std::to_string(worst_ratio));
  return finish("exp-inequality", c, t0, 120.0);
}

// --- 5. Series-lemma consistency on pareto tails ----------------------------

CheckResult check_series_lemma(const VerifyConfig&) {
  const auto t0 = Clock::now();
  Check c;
  const std::int64_t n_max = std::int64_t{1} << 20;
  const GeneratorSet cubic(
      {Measure::pareto(3.0, 1.0, ParetoSign::Positive)}, "x^-3");
  const GeneratorSet square(
      {Measure::pareto(2.0, 1.0, ParetoSign::Positive)}, "x^-2");

  const SeriesCurve trunc3 = series_truncated_moment(cubic, 3.0, 1.0, n_max);
  const SeriesCurve exc3 = series_excess_moment(cubic, 1.0, n_max);
  const SeriesCurve trunc2 = series_truncated_moment(square, 3.0, 1.0, n_max);

  c.expect(trunc3.cauchy(1e-3), "x^-3 truncated curve is Cauchy");
  c.expect(exc3.cauchy(1e-3), "x^-3 excess curve is Cauchy");
  c.expect(!trunc2.cauchy(1e-3), "x^-2 truncated curve fails Cauchy");

  // Persistent failure across the last 4 dyadic decades: the decade
  // increment keeps exceeding the Cauchy threshold instead of dying out.
  {
    const auto& ps = trunc2.partial_sums;
    const std::size_t L = ps.size();
    bool persists = L >= 5;
    bool monotone = true;
    for (std::size_t i = L - 4; persists && i < L; ++i) {
      const double inc = ps[i] - ps[i - 1];
      if (!(inc >= 1e-3 * ps[i])) persists = false;
      if (i + 1 < L && ps[i + 1] - ps[i] < inc) monotone = false;
    }
    c.expect(persists, "x^-2 increments keep failing Cauchy over last 4 decades");
    c.note(std::string("x^-2 decade increments monotone non-decreasing: ") +
           (monotone ? "yes" : "no (slowly shrinking like 1/loglog)"));
  }

  // Closed-form partial sums as the oracle, 1e-4 relative.
  double o3 = 0.0, oe = 0.0, o2 = 0.0;
  std::size_t cp = 0;
  for (std::int64_t n = 1; n <= n_max && cp < trunc3.checkpoints.size(); ++n) {
    const double a = normalizer(n);
    const double a3 = a * a * a;
    o3 += (1.0 + 3.0 * std::log(a)) / a3;
    oe += 0.5 / a3;
    o2 += 3.0 * (a - 2.0 / 3.0) / a3;
    if (n == trunc3.checkpoints[cp]) {
      c.near(trunc3.partial_sums[cp], o3, 1e-4,
             "truncated x^-3 oracle at n=" + std::to_string(n));
      c.near(exc3.partial_sums[cp], oe, 1e-4,
             "excess x^-3 oracle at n=" + std::to_string(n));
      c.near(trunc2.partial_sums[cp], o2, 1e-4,
             "truncated x^-2 oracle at n=" + std::to_string(n));
      ++cp;
    }
  }
  return finish("series-lemma", c, t0, 30.0);
}

// --- 6. Plateau vs divergence of the max statistic --------------------------

CheckResult check_plateau_divergence(const VerifyConfig& cfg) {
  const auto t0 = Clock::now();
  Check c;
  ProbeConfig pc;
  pc.replications = 200;
  pc.r = 1.0;
  pc.mode = StatMode::Absolute;
  pc.seed = cfg.seed;
  pc.threads = cfg.threads;

  const GeneratorSet gauss({Measure::normal(0.0, 1.0)}, "normal");
  const ProbeResult pr_g =
      plateau_divergence_probe(gauss, Policy::constant(0), pc);
  c.expect(pr_g.verdict == "plateau",
           "normal verdict=" + pr_g.verdict + " first=" +
               std::to_string(pr_g.estimates.front()) + " last=" +
               std::to_string(pr_g.estimates.back()));

  const GeneratorSet heavy(
      {Measure::pareto(1.5, 1.0, ParetoSign::Symmetric)}, "pareto15");
  const ProbeResult pr_h =
      plateau_divergence_probe(heavy, Policy::constant(0), pc);
  c.expect(pr_h.verdict == "growing",
           "pareto verdict=" + pr_h.verdict + " first=" +
               std::to_string(pr_h.estimates.front()) + " last=" +
               std::to_string(pr_h.estimates.back()));
  return finish("plateau-divergence", c, t0, 600.0);
}

// --- 7. Optimality bracket for r > 2 ----------------------------------------

CheckResult check_optimality_bracket(const VerifyConfig& cfg) {
  const auto t0 = Clock::now();
  Check c;
  const double multiple_cap = cfg.tol("bracket.multiple", 100.0);

  struct Instance {
    GeneratorSet gen;
    std::vector<Policy> policies;
    const char* name;
  };
  std::vector<Instance> instances;
  instances.push_back({GeneratorSet({Measure::uniform_on({-1.0, 1.0})}, "u"),
                       {Policy::constant(0)},
                       "rademacher"});
  instances.push_back(
      {GeneratorSet(
           {Measure::uniform_on({-1.0, 1.0}), Measure::point_mass(-1.0)},
           "mix"),
       {Policy::constant(0), Policy::constant(1),
        Policy::cyclic({0, 1}),
        Policy::state_feedback(
            [](int, double s, double) { return s >= 0.0 ? 0 : 1; },
            "uniform-above-drop-below")},
       "mix"});

  for (const auto& inst : instances) {
    MaxStatConfig mc;
    mc.n = 256;
    mc.r = 3.0;
    mc.mode = StatMode::PositivePart;
    mc.seed = cfg.seed;
    mc.replications = 6000;
    mc.threads = cfg.threads;
    const McMaxMoment est = mc_choquet_max_moment(inst.gen, inst.policies, mc);

    const MomentBracket lower = moment_lower_bracket(inst.gen, 3.0);
    double env_se = 0.0;
    for (const auto& pe : est.per_policy) {
      if (pe.policy == est.envelope_policy) env_se = pe.std_error;
    }
    c.expect(est.envelope >= lower.pos_part - 3.0 * env_se,
             std::string(inst.name) + ": envelope " +
                 std::to_string(est.envelope) + " >= lower bracket " +
                 std::to_string(lower.pos_part) + " - 3se");

    const ChoquetResult upper = choquet_abs_power(inst.gen, 3.0);
    const double ratio = est.envelope / upper.value;
    c.expect(ratio <= multiple_cap,
             std::string(inst.name) + ": envelope/upper ratio " +
                 std::to_string(ratio) + " exceeds " +
                 std::to_string(multiple_cap));
    c.note(std::string(inst.name) + " calibrated multiple=" +
           std::to_string(ratio));
  }
  return finish("optimality-bracket", c, t0, 300.0);
}

// --- 8. Moving-average residual ---------------------------------------------

CheckResult check_ma_residual(const VerifyConfig& cfg) {
  const auto t0 = Clock::now();
  Check c;
  LilConfig lc;
  lc.n = std::int64_t{1} << 20;
  lc.window_lo = std::int64_t{1} << 10;
  lc.seeds = 32;
  lc.master_seed = cfg.seed;
  lc.threads = cfg.threads;
  const Coefficients coeffs = Coefficients::finite_window({0.5, 0.5}, 0);
  const GeneratorSet gauss({Measure::normal(0.0, 1.0)}, "normal");
  const LilEstimate est =
      lil_estimate(coeffs, gauss, Policy::constant(0), lc);
  const double med = median_of(est.per_seed_residual);
  c.expect(med < 0.05,
           "median residual " + std::to_string(med) + " not < 0.05");
  c.note("median residual=" + std::to_string(med));
  return finish("ma-residual", c, t0, 300.0);
}

// --- 9. Moving-average iterated-logarithm band ------------------------------

CheckResult check_ma_lil_band(const VerifyConfig& cfg) {
  const auto t0 = Clock::now();
  Check c;
  LilConfig lc;
  lc.n = std::int64_t{1} << 20;
  lc.window_lo = std::int64_t{1} << 10;
  lc.seeds = 64;
  lc.master_seed = cfg.seed;
  lc.threads = cfg.threads;
  const GeneratorSet gauss({Measure::normal(0.0, 1.0)}, "normal");

  const LilEstimate id =
      lil_estimate(Coefficients::identity(), gauss, Policy::constant(0), lc);
  const LilEstimate geo = lil_estimate(Coefficients::geometric(0.5, 1.0),
                                       gauss, Policy::constant(0), lc);
  c.expect(id.premises_ok, "identity premises hold");
  c.expect(geo.premises_ok, "geometric premises hold");
  c.near(id.target, 1.0, 1e-6, "identity target");
  c.near(geo.target, 3.0, 1e-6, "geometric target");

  c.expect(id.median >= 0.6 * id.target && id.median <= 1.2 * id.target,
           "identity median " + std::to_string(id.median) +
               " outside [0.6, 1.2]");
  c.expect(geo.median >= 0.6 * geo.target && geo.median <= 1.2 * geo.target,
           "geometric median " + std::to_string(geo.median) +
               " outside [0.6, 1.2] * 3");
  const double ratio = geo.median / id.median;
  c.expect(ratio >= 0.85 * 3.0 && ratio <= 1.15 * 3.0,
           "median ratio " + std::to_string(ratio) +
               " not within 15% of 3");
  c.note("id median=" + std::to_string(id.median) + " geo median=" +
         std::to_string(geo.median) + " ratio=" + std::to_string(ratio));
  return finish("ma-lil-band", c, t0, 900.0);
}

// --- 10. Determinism across thread counts -----------------------------------

CheckResult check_determinism(const VerifyConfig& cfg) {
  const auto t0 = Clock::now();
  Check c;

  auto bits_equal = [](const std::vector<double>& a,
                       const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
  };

  {
    const GeneratorSet gen(
        {Measure::uniform_on({-1.0, 1.0}), Measure::point_mass(-1.0)}, "mix");
    std::vector<Policy> pols = {Policy::constant(0), Policy::constant(1),
                                Policy::cyclic({0, 1})};
    MaxStatConfig mc;
    mc.n = 512;
    mc.r = 3.0;
    mc.seed = cfg.seed;
    mc.replications = 800;
    mc.threads = 1;
    const McMaxMoment a = mc_choquet_max_moment(gen, pols, mc);
    mc.threads = 8;
    const McMaxMoment b = mc_choquet_max_moment(gen, pols, mc);
    bool ok = a.per_policy.size() == b.per_policy.size();
    for (std::size_t i = 0; ok && i < a.per_policy.size(); ++i) {
      ok = bits_equal(a.per_policy[i].sorted_stats,
                      b.per_policy[i].sorted_stats) &&
           a.per_policy[i].mean == b.per_policy[i].mean;
    }
    c.expect(ok, "mc max-moment estimates bit-identical at 1 vs 8 threads");
  }

  {
    LilConfig lc;
    lc.n = std::int64_t{1} << 16;
    lc.seeds = 8;
    lc.master_seed = cfg.seed;
    const GeneratorSet gauss({Measure::normal(0.0, 1.0)}, "normal");
    lc.threads = 1;
    const LilEstimate a =
        lil_estimate(Coefficients::identity(), gauss, Policy::constant(0), lc);
    lc.threads = 8;
    const LilEstimate b =
        lil_estimate(Coefficients::identity(), gauss, Policy::constant(0), lc);
    c.expect(bits_equal(a.per_seed_max, b.per_seed_max) &&
                 bits_equal(a.per_seed_residual, b.per_seed_residual),
             "per-seed moving-average stats bit-identical at 1 vs 8 threads");
  }

  {
    ProbeConfig pc;
    pc.n_grid = {1 << 10, 1 << 12, 1 << 14};
    pc.replications = 50;
    pc.seed = cfg.seed;
    const GeneratorSet gauss({Measure::normal(0.0, 1.0)}, "normal");
    pc.threads = 1;
    const ProbeResult a =
        plateau_divergence_probe(gauss, Policy::constant(0), pc);
    pc.threads = 8;
    const ProbeResult b =
        plateau_divergence_probe(gauss, Policy::constant(0), pc);
    const ProbeResult b2 =
        plateau_divergence_probe(gauss, Policy::constant(0), pc);
    c.expect(bits_equal(a.estimates, b.estimates),
             "probe estimates bit-identical at 1 vs 8 threads");
    c.expect(bits_equal(b.estimates, b2.estimates),
             "probe estimates bit-identical across repeated runs");
  }

  return finish("determinism", c, t0, 300.0);
}

}  // namespace

std::vector<std::string> verify_check_names() {
  return {"choquet-exactness", "dp-oracle",        "sublinearity",
          "exp-inequality",    "series-lemma",     "plateau-divergence",
          "optimality-bracket", "ma-residual",     "ma-lil-band",
          "determinism"};
}

CheckResult run_verify_check(const std::string& name, const VerifyConfig& cfg) {
  if (name == "choquet-exactness") return check_choquet_exactness(cfg);
  if (name == "dp-oracle") return check_dp_oracle(cfg);
  if (name == "sublinearity") return check_sublinearity(cfg);
  if (name == "exp-inequality") return check_exp_inequality(cfg);
  if (name == "series-lemma") return check_series_lemma(cfg);
  if (name == "plateau-divergence") return check_plateau_divergence(cfg);
  if (name == "optimality-bracket") return check_optimality_bracket(cfg);
  if (name == "ma-residual") return check_ma_residual(cfg);
  if (name == "ma-lil-band") return check_ma_lil_band(cfg);
  if (name == "determinism") return check_determinism(cfg);
  throw Error("unknown verify check '" + name + "'");
}

std::vector<CheckResult> run_verify_suite(const VerifyConfig& cfg,
                                          const std::vector<std::string>& subset) {
  const std::vector<std::string> names =
      subset.empty() ? verify_check_names() : subset;
  std::vector<CheckResult> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(run_verify_check(n, cfg));
  return out;
}

nlohmann::json CheckResult::to_json() const {
  return nlohmann::json{{"name", name},
                        {"pass", pass},
                        {"detail", detail},
                        {"seconds", seconds}};
}

}  // namespace sublin
