#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sublin/choquet.hpp"
#include "sublin/errors.hpp"
#include "sublin/events.hpp"
#include "sublin/expectation.hpp"
#include "sublin/normalizer.hpp"
#include "sublin/quadrature.hpp"
#include "test_support.hpp"

#include <nlohmann/json.hpp>

using namespace sublin;
using sublin::testing::random_discrete;
using sublin::testing::simpson;

TEST_CASE("normalizer follows the clamped logarithm convention") {
  CHECK(normalizer(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(normalizer(15) == doctest::Approx(std::sqrt(30.0)).epsilon(1e-14));
  // ln 16 > e, so the inner clamp releases at n = 16
  CHECK(normalizer(16) ==
        doctest::Approx(std::sqrt(32.0 * std::log(std::log(16.0))))
            .epsilon(1e-14));
  for (std::int64_t n = 1; n <= 15; ++n) {
    CHECK(normalizer(n) == doctest::Approx(std::sqrt(2.0 * n)).epsilon(1e-14));
  }
  double prev = 0.0;
  for (std::int64_t n = 1; n <= 100000; n += 7) {
    const double a = normalizer(n);
    CHECK(a >= prev);
    prev = a;
  }
  CHECK(clamped_log(0.001) == doctest::Approx(1.0));
  CHECK(clamped_loglog(1e9) >= 1.0);
}

TEST_CASE("finite quadrature handles breakpoints exactly") {
  auto f = [](double x) { return x * x; };
  CHECK(integrate_finite(f, 0, 1, {}, 1e-10) == doctest::Approx(1.0 / 3).epsilon(1e-10));
  // step function needs the split
  auto step = [](double x) { return x < 0.3 ? 1.0 : 0.0; };
  const std::vector<double> bp{0.3};
  CHECK(integrate_finite(step, 0, 1, bp, 1e-10) == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("tail quadrature converges, truncates or flags divergence") {
  QuadratureOptions opts;
  auto decay = [](double t) { return std::exp(-t); };
  auto r = integrate_tail(decay, 0.0, +1, {}, opts);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_FALSE(r.diverging);

  auto harmonic = [](double t) { return 1.0 / (1.0 + t); };
  CHECK(integrate_tail(harmonic, 0.0, +1, {}, opts).diverging);

  auto heavy = [](double t) { return std::pow(1.0 + t, -1.5); };
  auto h = integrate_tail(heavy, 0.0, +1, {}, opts);
  CHECK_FALSE(h.diverging);
  CHECK(h.value == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("event sets normalize, complement and describe") {
  const EventSet e = EventSet::abs_at_least(2.0);
  CHECK(e.parts().size() == 2);
  const EventSet c = e.complement();
  REQUIRE(c.parts().size() == 1);
  CHECK(c.parts()[0].lo == -2.0);
  CHECK(c.parts()[0].hi == 2.0);
  CHECK_FALSE(c.parts()[0].lo_closed);
  CHECK_FALSE(c.parts()[0].hi_closed);
  // complement is an involution
  const EventSet cc = c.complement();
  REQUIRE(cc.parts().size() == 2);
  CHECK(cc.parts()[1].lo_closed);

  // overlapping parts merge
  const EventSet m({Interval{0, 2, true, true}, Interval{1, 3, true, false}});
  CHECK(m.parts().size() == 1);
  CHECK_THROWS_AS(EventSet({Interval{2, 1, true, true}}), Error);
}

TEST_CASE("discrete measures validate, merge ties and sum exactly") {
  CHECK_THROWS_AS(Measure::discrete({{0.0, 0.5}}), Error);
  CHECK_THROWS_AS(Measure::discrete({{0.0, -0.1}, {1.0, 1.1}}), Error);
  const Measure m = Measure::discrete({{1.0, 0.25}, {1.0, 0.25}, {-1.0, 0.5}});
  CHECK(m.values().size() == 2);
  CHECK(m.probabilities()[1] == doctest::Approx(0.5));

  CHECK(m.prob_at_least(1.0) == doctest::Approx(0.5));
  CHECK(m.prob_greater(1.0) == 0.0);
  CHECK(m.prob_at_least(-1.0) == doctest::Approx(1.0));
  CHECK(m.abs_survival(1.0) == doctest::Approx(1.0));
  CHECK(m.expect(TestFunction::identity()) == doctest::Approx(0.0));
  CHECK(m.abs_bound() == 1.0);

  // inverse-cdf sampling hits the atoms at the right rates
  CHECK(m.sample(0.25) == -1.0);
  CHECK(m.sample(0.75) == 1.0);
}

TEST_CASE("normal measures match the closed-form survival") {
  const Measure n = Measure::normal(0.0, 2.0);
  CHECK(n.prob_greater(2.0) ==
        doctest::Approx(0.5 * std::erfc(1.0 / M_SQRT2)).epsilon(1e-12));
  CHECK(n.expect(TestFunction::power(2)) == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(n.sample(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  const Measure shifted = Measure::normal(1.0, 1.0);
  CHECK(shifted.expect(TestFunction::power(2)) ==
        doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("pareto measures expose both tails and flag divergent moments") {
  const Measure p = Measure::pareto(3.0, 1.0, ParetoSign::Positive);
  CHECK(p.prob_at_least(2.0) == doctest::Approx(std::pow(2.0, -3.0)));
  CHECK(p.prob_at_least(0.5) == doctest::Approx(1.0));
  CHECK(p.expect(TestFunction::identity()) == doctest::Approx(1.5).epsilon(1e-8));

  const Measure s = Measure::pareto(1.5, 1.0, ParetoSign::Symmetric);
  CHECK(s.prob_greater(0.0) == doctest::Approx(0.5));
  CHECK(s.prob_greater(-2.0) ==
        doctest::Approx(1.0 - 0.5 * std::pow(2.0, -1.5)).epsilon(1e-12));
  CHECK(s.abs_survival(2.0) == doctest::Approx(std::pow(2.0, -1.5)));
  CHECK_THROWS_AS(s.expect(TestFunction::power(2)), DivergentIntegral);

  try {
    const GeneratorSet gen({Measure::normal(0, 1), s}, "pair");
    upper_expectation(gen, TestFunction::power(2));
    CHECK(false);
  } catch (const DivergentIntegral& e) {
    CHECK(e.generator().find("1") != std::string::npos);
    CHECK(e.generator().find("pareto") != std::string::npos);
  }
}

TEST_CASE("survival- and quantile-defined measures agree with parametric twins") {
  const Measure direct = Measure::pareto(3.0, 1.0, ParetoSign::Positive);
  const Measure via_g = Measure::from_survival(
      [](double x) { return std::min(1.0, std::pow(std::max(x, 1e-300), -3.0)); },
      0.0);
  const TestFunction phi = TestFunction::bounded_lipschitz(
      [](double x) { return 1.0 / (1.0 + x * x); }, 1.0, 1.0);
  CHECK(via_g.expect(phi) == doctest::Approx(direct.expect(phi)).epsilon(1e-6));
  CHECK(via_g.abs_survival(2.0) == doctest::Approx(direct.abs_survival(2.0)));
  CHECK(via_g.sample(0.5) == doctest::Approx(direct.sample(0.5)).epsilon(1e-9));

  // a logistic law makes an easy closed-form monotone quantile
  const Measure qn =
      Measure::from_quantile([](double u) { return std::log(u / (1.0 - u)); });
  CHECK(qn.prob_at_least(0.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(qn.expect(TestFunction::identity()) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(qn.sample(0.75) == doctest::Approx(std::log(3.0)).epsilon(1e-12));

  CHECK_THROWS_AS(Measure::from_survival([](double x) { return x < 1 ? 0.2 : 0.9; }, 0.0),
                  Error);
  CHECK_THROWS_AS(Measure::from_quantile([](double u) { return -u; }), Error);
}

TEST_CASE("measure JSON round trip covers the parametric kinds") {
  for (const Measure& m :
       {Measure::discrete({{-1.0, 0.5}, {1.0, 0.5}}), Measure::normal(0.5, 2.0),
        Measure::pareto(2.5, 1.5, ParetoSign::Symmetric)}) {
    const Measure back = Measure::from_json(m.to_json());
    CHECK(back.kind_name() == m.kind_name());
    CHECK(back.prob_at_least(0.7) == doctest::Approx(m.prob_at_least(0.7)));
  }
  CHECK_THROWS_AS(Measure::from_survival([](double) { return 0.5; }, 0.0).to_json(),
                  Error);
  CHECK_THROWS_AS(Measure::from_json(nlohmann::json{{"kind", "cauchy"}}), Error);
}

TEST_CASE("envelope expectations: two-point and normal-family examples") {
  const GeneratorSet two({Measure::point_mass(1.0), Measure::point_mass(-1.0)},
                         "two");
  CHECK(upper_expectation(two, TestFunction::identity()) == doctest::Approx(1.0));
  CHECK(conjugate_expectation(two, TestFunction::identity()) ==
        doctest::Approx(-1.0));

  const GeneratorSet normals(
      {Measure::normal(0.0, 1.0), Measure::normal(0.0, 2.0)}, "n");
  CHECK(upper_expectation(normals, TestFunction::power(2)) ==
        doctest::Approx(4.0).epsilon(1e-6));
  CHECK(conjugate_expectation(normals, TestFunction::power(2)) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK(upper_expectation(normals, TestFunction::negative_abs()) ==
        doctest::Approx(-std::sqrt(2.0 / M_PI)).epsilon(1e-6));

  // singleton set recovers the classical expectation; Simpson is the oracle
  const GeneratorSet single({Measure::normal(0.3, 1.2)}, "single");
  const TestFunction phi = TestFunction::bounded_lipschitz(
      [](double x) { return std::tanh(x); }, 1.0, 1.0);
  const double oracle = simpson(
      [](double x) {
        const double z = (x - 0.3) / 1.2;
        return std::tanh(x) * std::exp(-0.5 * z * z) /
               (1.2 * std::sqrt(2.0 * M_PI));
      },
      -12.0, 12.0);
  CHECK(upper_expectation(single, phi) == doctest::Approx(oracle).epsilon(1e-8));
  CHECK(conjugate_expectation(single, phi) ==
        doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("capacities: examples, complement pairing and the sandwich") {
  const GeneratorSet two({Measure::point_mass(1.0), Measure::point_mass(-1.0)},
                         "two");
  CHECK(capacity_upper(two, EventSet::at_least(0.5)) == doctest::Approx(1.0));
  CHECK(capacity_lower(two, EventSet::at_least(0.5)) == doctest::Approx(0.0));

  const GeneratorSet g1({Measure::normal(0.0, 1.0)}, "g1");
  CHECK(capacity_upper(g1, EventSet::greater_than(0.0)) == doctest::Approx(0.5));
  CHECK(capacity_upper(g1, EventSet::abs_greater(1.0)) ==
        doctest::Approx(capacity_lower(g1, EventSet::abs_greater(1.0)))
            .epsilon(1e-12));

  const GeneratorSet normals(
      {Measure::normal(0.0, 1.0), Measure::normal(0.0, 2.0)}, "n");
  CHECK(capacity_upper(normals, EventSet::abs_greater(2.0)) ==
        doctest::Approx(std::erfc(1.0 / M_SQRT2)).epsilon(1e-9));
  CHECK(capacity_lower(normals, EventSet::abs_greater(2.0)) ==
        doctest::Approx(std::erfc(M_SQRT2)).epsilon(1e-9));

  // trapezoid sandwich around random intervals
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    double a = unif(rng), b = unif(rng);
    if (a > b) std::swap(a, b);
    const double w = 0.2;
    const EventSet ev = EventSet::interval(a, b);
    const double v = capacity_upper(normals, ev);
    const TestFunction above = TestFunction::trapezoid(a, b, w);
    CHECK(v <= upper_expectation(normals, above) + 1e-7);
    if (b - a > 2 * w) {
      // ramps tucked inside [a, b], so below <= indicator of the event
      const TestFunction below = TestFunction::trapezoid(a + w, b - w, w);
      CHECK(upper_expectation(normals, below) <= v + 1e-7);
    }
  }
}

TEST_CASE("capacity upper is finitely sub-additive on random unions") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  const GeneratorSet gen(
      {Measure::normal(0.0, 1.0), random_discrete(rng), random_discrete(rng)},
      "mixed");
  for (int trial = 0; trial < 100; ++trial) {
    double a1 = unif(rng), b1 = unif(rng), a2 = unif(rng), b2 = unif(rng);
    if (a1 > b1) std::swap(a1, b1);
    if (a2 > b2) std::swap(a2, b2);
    const EventSet e1 = EventSet::interval(a1, b1);
    const EventSet e2 = EventSet::interval(a2, b2);
    const EventSet uni({Interval{a1, b1, true, true}, Interval{a2, b2, true, true}});
    CHECK(capacity_upper(gen, uni) <=
          capacity_upper(gen, e1) + capacity_upper(gen, e2) + 1e-12);
  }
}

TEST_CASE("sub-linearity holds for continuous generators at quadrature slack") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const GeneratorSet gen(
      {Measure::normal(0.0, 1.0), Measure::normal(0.5, 2.0)}, "pair");
  for (int trial = 0; trial < 50; ++trial) {
    const double a = unif(rng) * 2 - 1, b = unif(rng) * 2 - 1;
    const double c = unif(rng) * 2 - 1, e = unif(rng) * 2 - 1;
    const TestFunction phi = TestFunction::polynomial_growth(
        [a, b](double x) { return a * x + b * std::fabs(x); }, 1, 8.0);
    const TestFunction psi = TestFunction::polynomial_growth(
        [c, e](double x) { return c * std::sin(2 * x) + e * x; }, 1, 8.0);
    const double s = upper_expectation(gen, phi.plus(psi));
    CHECK(s <= upper_expectation(gen, phi) + upper_expectation(gen, psi) + 1e-6);
    const double lambda = 0.5 + 2.0 * unif(rng);
    CHECK(upper_expectation(gen, phi.scaled(lambda)) ==
          doctest::Approx(lambda * upper_expectation(gen, phi)).epsilon(1e-6));
    CHECK(conjugate_expectation(gen, phi) <=
          upper_expectation(gen, phi) + 1e-6);
  }
  CHECK(upper_expectation(gen, TestFunction::constant(3.25)) ==
        doctest::Approx(3.25).epsilon(1e-10));
}

TEST_CASE("choquet integral: closed forms, statuses and the error contract") {
  auto exp_surv = [](double t) { return t <= 0 ? 1.0 : std::exp(-t); };
  const ChoquetResult r = choquet_integral(exp_surv);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.status == ChoquetStatus::Converged);
  CHECK(r.abs_error <= 1e-8 * std::max(1.0, r.value));

  for (double c : {2.0, -3.0}) {
    auto surv = [c](double t) { return t <= c ? 1.0 : 0.0; };
    CHECK(choquet_integral(surv, std::vector<double>{c}).value ==
          doctest::Approx(c).epsilon(1e-8));
  }

  const GeneratorSet two({Measure::point_mass(1.0), Measure::point_mass(-1.0)},
                         "two");
  auto cap = [&two](double t) {
    return capacity_upper(two, EventSet::at_least(t));
  };
  CHECK(choquet_integral(cap, std::vector<double>{-1.0, 1.0}).value ==
        doctest::Approx(1.0).epsilon(1e-8));

  auto slow = [](double t) { return t <= 1 ? 1.0 : 1.0 / t; };
  CHECK(choquet_integral(slow).status == ChoquetStatus::Diverging);

  auto rising = [](double t) { return t <= 0 ? 1.0 : std::min(1.0, 0.2 + t); };
  CHECK_THROWS_AS(choquet_integral(rising), Error);
}

TEST_CASE("declared test-function classes are spot-checked during use") {
  const GeneratorSet gauss({Measure::normal(0.0, 1.0)}, "g");
  // bound declared too small: |x| escapes 0.5 inside the integration window
  const TestFunction lying_bound = TestFunction::bounded_lipschitz(
      [](double x) { return x; }, 0.5, 1.0);
  CHECK_THROWS_AS(upper_expectation(gauss, lying_bound), Error);
  // Lipschitz constant declared too small for the slope
  const TestFunction lying_lip = TestFunction::bounded_lipschitz(
      [](double x) { return std::max(-50.0, std::min(5.0 * x, 50.0)); }, 50.0,
      1.0);
  CHECK_THROWS_AS(upper_expectation(gauss, lying_lip), Error);
  // honest declarations sail through
  const TestFunction honest = TestFunction::bounded_lipschitz(
      [](double x) { return std::max(-50.0, std::min(5.0 * x, 50.0)); }, 50.0,
      5.0, {-10.0, 10.0});
  CHECK(upper_expectation(gauss, honest) == doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("choquet of a nonnegative variable is nonnegative") {
  for (double alpha : {3.0, 5.0}) {
    const GeneratorSet gen(
        {Measure::pareto(alpha, 1.0, ParetoSign::Positive)}, "p");
    auto surv = [&gen](double t) {
      return t <= 0 ? 1.0 : abs_survival_upper(gen, t);
    };
    CHECK(choquet_integral(surv).value >= 0.0);
  }
}

TEST_CASE("truncation and the extended expectation") {
  CHECK(truncate(5.0, 2.0) == 2.0);
  CHECK(truncate(-5.0, 2.0) == -2.0);
  CHECK(truncate(1.5, 2.0) == 1.5);
  CHECK_THROWS_AS(truncate(1.0, 0.0), Error);

  // bounded variable settles at the first schedule step
  const GeneratorSet b({Measure::discrete({{-0.5, 0.5}, {0.25, 0.5}})}, "b");
  const auto eb = extended_expectation(b);
  CHECK(eb.converged);
  CHECK(eb.c_used == 2.0);
  CHECK(eb.value == doctest::Approx(-0.125).epsilon(1e-12));

  const GeneratorSet gauss({Measure::normal(0.0, 1.0)}, "g");
  const auto eg = extended_expectation(gauss);
  CHECK(eg.converged);
  CHECK(eg.value == doctest::Approx(0.0).epsilon(1e-7));

  // heavy positive tail: truncated means grow like 2 sqrt(c) - 1 forever
  const GeneratorSet heavy({Measure::pareto(0.5, 1.0, ParetoSign::Positive)},
                           "h");
  const auto eh = extended_expectation(heavy);
  CHECK_FALSE(eh.converged);
  const double at4 =
      upper_expectation(heavy, TestFunction::clamp(4.0));
  CHECK(at4 == doctest::Approx(2.0 * std::sqrt(4.0) - 1.0).epsilon(1e-6));

  // extended expectation of |X| never exceeds the Choquet moment of |X|
  for (const GeneratorSet* gen : {&b, &gauss}) {
    double ext = 0.0;
    for (double c : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
      const TestFunction abs_clamp = TestFunction::bounded_lipschitz(
          [c](double x) { return std::min(std::fabs(x), c); }, c, 1.0,
          {-c, 0.0, c});
      ext = upper_expectation(*gen, abs_clamp);
    }
    auto abs_surv = [gen](double t) {
      return t <= 0 ? 1.0 : abs_survival_upper(*gen, t);
    };
    const double cho = choquet_integral(abs_surv).value;
    CHECK(ext <= cho + 1e-6);
  }
}
