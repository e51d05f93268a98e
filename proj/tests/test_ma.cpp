#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sublin/errors.hpp"
#include "sublin/moving_average.hpp"

#include <nlohmann/json.hpp>

using namespace sublin;

TEST_CASE("coefficients: sums, tails and serialization") {
  const Coefficients fw = Coefficients::finite_window({0.25, -0.5, 0.25}, -1);
  CHECK(fw.at(-1) == 0.25);
  CHECK(fw.at(0) == -0.5);
  CHECK(fw.at(2) == 0.0);
  CHECK(fw.abs_sum() == doctest::Approx(1.0));
  CHECK(fw.sum() == doctest::Approx(0.0));
  CHECK(fw.window() == 1);
  CHECK(fw.abs_tail(0) == doctest::Approx(0.5));
  CHECK(fw.abs_tail(1) == 0.0);

  const Coefficients geo = Coefficients::geometric(0.5, 1.0);
  CHECK(geo.abs_sum() == doctest::Approx(3.0));
  CHECK(geo.sum() == doctest::Approx(3.0));
  CHECK(geo.at(-3) == doctest::Approx(0.125));
  CHECK(geo.abs_tail(2) == doctest::Approx(0.5));

  const Coefficients back = Coefficients::from_json(geo.to_json());
  CHECK(back.abs_sum() == doctest::Approx(3.0));
  const Coefficients fw2 = Coefficients::from_json(fw.to_json());
  CHECK(fw2.at(-1) == 0.25);
  CHECK(Coefficients::from_json(nlohmann::json{{"kind", "identity"}}).sum() ==
        1.0);
}

TEST_CASE("tail cutoff matches the union-bound budget") {
  const Coefficients fw =
      Coefficients::finite_window({0.1, 0.2, 0.4, 0.2, 0.1, 0.05, 0.05,
                                   0.05, 0.05, 0.1, 0.1},
                                  -5);
  CHECK(tail_cutoff(fw, 1.0, 1e-12, 1.0) == 5);

  const Coefficients geo = Coefficients::geometric(0.5, 1.0);
  // tail(m) = 2^{1-m}; budget 0.01 first met at m = 8
  CHECK(tail_cutoff(geo, 1.0, 0.01, 1.0) == 8);
  CHECK(tail_cutoff(geo, 1.0, 1.0, 4.0) == 0);  // budget above B

  // smaller budget can only push the cutoff out
  int prev = 0;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const int m = tail_cutoff(geo, 1.0, eps, 1.0);
    CHECK(m >= prev);
    prev = m;
  }
}

TEST_CASE("convolution in the one-sided convention: hand values") {
  // identity coefficients reproduce the innovation partial sums
  const std::vector<double> y{1.0, 2.0, 3.0};
  const MAPath id = ma_from_innovations(Coefficients::identity(), y, 1, 3, -1,
                                        MAConvention::OneSidedZeros);
  CHECK(id.t_partial == std::vector<double>{1.0, 3.0, 6.0});

  const Coefficients half = Coefficients::finite_window({0.5, 0.5}, 0);
  const MAPath p = ma_from_innovations(half, y, 1, 3, -1,
                                       MAConvention::OneSidedZeros);
  CHECK(p.x[0] == doctest::Approx(0.5));
  CHECK(p.x[1] == doctest::Approx(1.5));
  CHECK(p.x[2] == doctest::Approx(2.5));
  CHECK(p.t_partial[2] == doctest::Approx(4.5));

  const Coefficients zero = Coefficients::finite_window({0.0, 0.0}, 0);
  const MAPath z = ma_from_innovations(zero, y, 1, 3, -1,
                                       MAConvention::OneSidedZeros);
  CHECK(z.t_partial == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("bi-directional convention consumes pre-time innovations") {
  const Coefficients sym = Coefficients::finite_window({0.5, 0.0, 0.5}, -1);
  // Y_0 = 7 only reachable in the bi-directional convention at t = 1, j = 1
  const std::vector<double> y{7.0, 1.0, 1.0, 1.0};
  const MAPath bi =
      ma_from_innovations(sym, y, 0, 3, -1, MAConvention::BiDirectional);
  CHECK(bi.x[0] == doctest::Approx(0.5 * 7.0 + 0.5 * 1.0));
  const MAPath one =
      ma_from_innovations(sym, y, 0, 3, -1, MAConvention::OneSidedZeros);
  CHECK(one.x[0] == doctest::Approx(0.5 * 1.0));  // Y_0 suppressed
}

TEST_CASE("scaling the coefficients by two scales the path bit-exactly") {
  const GeneratorSet gauss({Measure::normal(0.0, 1.0)}, "g");
  const Coefficients base = Coefficients::finite_window({0.25, 0.25, 0.25}, -1);
  const RngStream stream(11, rng_domain::kInnovations, 0);
  const MAPath a = simulate_ma(base, gauss, Policy::constant(0), 256, stream,
                               MAConvention::OneSidedZeros, 1);
  const MAPath b = simulate_ma(base.scaled(2.0), gauss, Policy::constant(0),
                               256, stream, MAConvention::OneSidedZeros, 1);
  for (std::size_t i = 0; i < a.t_partial.size(); ++i) {
    CHECK(b.t_partial[i] == 2.0 * a.t_partial[i]);
  }
}

TEST_CASE("residual: identity law, hand value and boundary locality") {
  const std::vector<double> y{1.0, 2.0, 3.0};
  const MAPath id = ma_from_innovations(Coefficients::identity(), y, 1, 3, -1,
                                        MAConvention::OneSidedZeros);
  CHECK(approx_residual(id, Coefficients::identity(), 1, 3) == 0.0);

  const Coefficients half = Coefficients::finite_window({0.5, 0.5}, 0);
  const MAPath p = ma_from_innovations(half, y, 1, 3, -1,
                                       MAConvention::OneSidedZeros);
  // T_3 - beta * sum Y = 4.5 - 6 = -1.5, and a_3 = sqrt(6)
  CHECK(approx_residual(p, half, 3, 3) ==
        doctest::Approx(1.5 / std::sqrt(6.0)).epsilon(1e-12));

  // interior innovations cancel out of T_n - beta * C_n
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> base(64);
  for (auto& v : base) v = unif(rng);
  const Coefficients w2 = Coefficients::finite_window({0.3, 0.4, 0.3}, -1);
  const std::int64_t n = 48;
  const MAPath p1 = ma_from_innovations(w2, base, 1, n, -1,
                                        MAConvention::OneSidedZeros);
  std::vector<double> bumped = base;
  bumped[20] += 0.77;  // interior: farther than the window from 1 and n
  const MAPath p2 = ma_from_innovations(w2, bumped, 1, n, -1,
                                        MAConvention::OneSidedZeros);
  const double beta = w2.sum();
  const double r1 = p1.t_partial[n - 1] - beta * p1.innov_cum[n - 1];
  const double r2 = p2.t_partial[n - 1] - beta * p2.innov_cum[n - 1];
  CHECK(r1 == doctest::Approx(r2).epsilon(1e-12));
}

TEST_CASE("lil estimate: degenerate innovations and premise flags") {
  LilConfig cfg;
  cfg.n = 1 << 10;
  cfg.seeds = 4;
  cfg.master_seed = 5;
  cfg.threads = 2;

  const GeneratorSet zero({Measure::point_mass(0.0)}, "zero");
  const LilEstimate z =
      lil_estimate(Coefficients::identity(), zero, Policy::constant(0), cfg);
  CHECK(z.median == 0.0);
  CHECK(z.target == 0.0);
  CHECK(z.premises_ok);

  // heavy innovations break the premises but the run still reports
  const GeneratorSet heavy(
      {Measure::pareto(1.5, 1.0, ParetoSign::Symmetric)}, "heavy");
  const LilEstimate h =
      lil_estimate(Coefficients::identity(), heavy, Policy::constant(0), cfg);
  CHECK_FALSE(h.premises_ok);
  CHECK(h.premise_note.find("second moment") != std::string::npos);
  CHECK(h.per_seed_max.size() == 4);
  CHECK(h.to_csv().find("seed,max_over_window") != std::string::npos);
}

TEST_CASE("per-seed maxima are invariant under a global sign flip") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> y(512), flipped(512);
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = gauss(rng);
    flipped[i] = -y[i];
  }
  const Coefficients geo = Coefficients::geometric(0.5, 1.0);
  const MAPath a = ma_from_innovations(geo, y, 1, 400, 16,
                                       MAConvention::OneSidedZeros);
  const MAPath b = ma_from_innovations(geo, flipped, 1, 400, 16,
                                       MAConvention::OneSidedZeros);
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 19; i < a.t_partial.size(); ++i) {
    const double an = normalizer(static_cast<std::int64_t>(i + 1));
    ma = std::max(ma, std::fabs(a.t_partial[i]) / an);
    mb = std::max(mb, std::fabs(b.t_partial[i]) / an);
  }
  CHECK(ma == doctest::Approx(mb).epsilon(1e-12));
}

TEST_CASE("cluster coverage bins the normalized partial sums") {
  LilConfig cfg;
  cfg.n = 1 << 12;
  cfg.seeds = 8;
  cfg.master_seed = 9;
  cfg.threads = 2;
  const GeneratorSet gauss({Measure::normal(0.0, 1.0)}, "g");
  const ClusterCoverage cov = cluster_coverage(Coefficients::identity(), gauss,
                                               Policy::constant(0), cfg, 12);
  CHECK(cov.target == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(cov.bin_centers.size() == 12);
  std::int64_t total = 0;
  for (auto c : cov.counts) total += c;
  CHECK(total > 0);

  // Visits within one path are strongly autocorrelated, so bin-count
  // symmetry only holds in distribution. A sign test across independent
  // runs is the right symmetry oracle: the per-run imbalance between
  // positive and negative bins is a fair coin under a symmetric law.
  int pos_runs = 0, neg_runs = 0;
  for (std::uint64_t master = 0; master < 12; ++master) {
    LilConfig one = cfg;
    one.seeds = 1;
    one.master_seed = 1000 + master;
    const ClusterCoverage c1 = cluster_coverage(Coefficients::identity(),
                                                gauss, Policy::constant(0),
                                                one, 12);
    std::int64_t imbalance = 0;
    for (std::size_t b = 0; b < 6; ++b) {
      imbalance -= c1.counts[b];
      imbalance += c1.counts[11 - b];
    }
    if (imbalance > 0) ++pos_runs;
    if (imbalance < 0) ++neg_runs;
  }
  CHECK(pos_runs >= 1);
  CHECK(neg_runs >= 1);

  const GeneratorSet zero({Measure::point_mass(0.0)}, "zero");
  const ClusterCoverage zc = cluster_coverage(Coefficients::identity(), zero,
                                              Policy::constant(0), cfg, 1);
  CHECK(zc.counts[0] > 0);
}
