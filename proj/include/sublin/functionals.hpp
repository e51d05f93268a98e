#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sublin/choquet.hpp"
#include "sublin/expectation.hpp"

namespace sublin {

// Choquet moment of a monotone transform of |X|: C[g(|X|)] via the
// pushforward survival t -> V(|X| >= g^{-1}(t)). g must be increasing on
// [0, inf) with g(0) = 0.
ChoquetResult choquet_transformed_abs(const GeneratorSet& gen, const RealFn& g,
                                      const RealFn& g_inverse,
                                      const ChoquetOptions& opts = {});

// C[X^2 / loglog|X|] — the second-moment functional under the logarithm
// convention; finiteness of this quantity is what the iterated-logarithm
// normalization needs.
ChoquetResult lil_moment(const GeneratorSet& gen, const ChoquetOptions& opts = {});

// The r-indexed moment functional behind the max-of-normalized-sums moments:
// equal to lil_moment for 0 < r < 2, C[X^2 log|X| / loglog|X|] at r = 2, and
// C[|X|^r] for r > 2.
ChoquetResult max_moment_functional(const GeneratorSet& gen, double r,
                                    const ChoquetOptions& opts = {});

ChoquetResult choquet_abs_power(const GeneratorSet& gen, double r,
                                const ChoquetOptions& opts = {});
ChoquetResult choquet_pos_power(const GeneratorSet& gen, double r,
                                const ChoquetOptions& opts = {});

struct FunctionalReport {
  double r = 2.0;
  double sigma_sq = 0.0;  // truncated-limit upper second moment
  bool sigma_sq_finite = false;
  ChoquetResult lil;        // C[X^2 / loglog|X|]
  ChoquetResult max_moment; // the r-indexed functional
  double mean_upper = 0.0;
  double mean_lower = 0.0;
  bool means_converged = false;
  // finite max_moment at r >= 2 must force the other two finite
  bool consistent = true;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

FunctionalReport functional_report(const GeneratorSet& gen, double r);

// Partial sums of a term sequence on a dyadic checkpoint grid.
struct SeriesCurve {
  std::vector<std::int64_t> checkpoints;
  std::vector<double> terms;         // term value at each checkpoint index n
  std::vector<double> partial_sums;  // sum over n' <= n
  bool term_diverged = false;
  double integral_form = 0.0;  // excess series only; 0 when not computed
  bool has_integral_form = false;

  // Last-decade increment below rel * total.
  bool cauchy(double rel = 1e-3) const;
  double last_increment() const;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

std::vector<std::int64_t> dyadic_checkpoints(std::int64_t n_max);

// sum_n C[(|X| ^ delta a_n)^p] / a_n^p, every term up to N, recorded at the
// checkpoints.
SeriesCurve series_truncated_moment(const GeneratorSet& gen, double p,
                                    double delta, std::int64_t n_max,
                                    std::vector<std::int64_t> checkpoints = {});

// sum_n C[((|X| - a_n)^+)^r] / a_n^r, plus the integral form
// int_16^N a_y^{-r} int_{a_y}^inf r u^{r-1} V(|X| > u) du dy.
SeriesCurve series_excess_moment(const GeneratorSet& gen, double r,
                                 std::int64_t n_max,
                                 std::vector<std::int64_t> checkpoints = {},
                                 bool with_integral_form = false);

// Bound r/(p-r) * C0^{r/p} for C[|X|^r] given the tail premise
// x^p V(|X| >= x) <= C0. The companion integral evaluates
// int_0^inf 1 ^ (C0 x^{-p/r}) dx numerically, which is the quantity the
// premise actually controls.
double markov_choquet_bound(double C0, double p, double r);
double markov_integral_bound(double C0, double p, double r);
bool markov_premise_holds(const GeneratorSet& gen, double C0, double p);

}  // namespace sublin
