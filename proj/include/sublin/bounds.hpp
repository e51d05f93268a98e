#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sublin/expectation.hpp"

namespace sublin {

// Aggregated inputs for the maximal-inequality right-hand side:
//   A_n = sum_i E_up[(X_i^+ ^ y)^p],  B_n = sum_i E_trunc[(X_i ^ y)^2],
//   tail_max = V(max_k X_k > y).
struct ExpIneqInputs {
  std::int64_t n = 0;
  double x = 0.0;
  double y = 0.0;
  double p = 2.0;
  double delta = 1.0;
  double a_n = 0.0;
  double b_n = 0.0;  // 0 or +inf both zero out the Gaussian term
  double tail_max = 0.0;
};

// tail_max + 2 exp{p^p} (A_n / y^p)^{delta x / (10 y)}
//          + exp{-x^2 / (2 B_n (1 + delta))}.
// The value may exceed 1; it bounds a probability and is then vacuous but
// still valid.
double exp_inequality_rhs(const ExpIneqInputs& in);

struct BlockingInputs {
  double r = 1.0;
  double p = 3.0;  // must exceed max(2, r)
  double z = 1.0;
  int k_max = 40;  // blocks cover n in [1, 2^{k_max+1})
  double sigma_sq = 1.0;
};

struct BlockRow {
  int k = 0;
  double n_top = 0.0;  // 2^{k+1}
  double g1 = 0.0, g2 = 0.0, g3 = 0.0;
};

struct BoundReport {
  double z = 0.0, r = 0.0, p = 0.0;
  double g1 = 0.0, g2 = 0.0, g3 = 0.0;
  double g1_tail = 0.0, g2_tail = 0.0, g3_tail = 0.0;  // extrapolated
  double g1_error = 0.0;  // bracketing error of the large-block sums
  bool g1_diverging = false, g2_diverging = false;
  std::vector<BlockRow> rows;

  double total() const { return g1 + g2 + g3; }
  nlohmann::json to_json() const;
  std::string table_csv() const;
};

// The three-series split over dyadic blocks n_k = 2^k with the proof-scale
// choices x = z^{1/r} a_{n_{k+1}}, y = x / 30, delta = 1:
//   g1(z) = 2 sum_n V(|X| >= z^{1/r} a_n / 30)
//   g2(z) = sum_k 2 exp{p^p} (n_{k+1} E_up[(|X| ^ y_{k+1})^p] / y_{k+1}^p)^3
//   g3(z) = sum_k exp{-z^{2/r} loglog n_{k+1} / (4 sigma^2)}
BoundReport blocking_bound(const BlockingInputs& in, const GeneratorSet& gen);

// int_0^inf 1 ^ (g1+g2+g3)(z) dz on the log grid z = 2^j, j in [-10, 30],
// by trapezoid. Returns the integral and whether the grid tail settled.
struct WedgeIntegral {
  double value = 0.0;
  bool settled = false;
};
WedgeIntegral integrated_blocking_bound(const BlockingInputs& shape,
                                        const GeneratorSet& gen);

// eta + varsigma^{r/p} + sigma_bar^r; infinite inputs propagate.
double max_moment_bracket(double varsigma, double eta_r, double sigma_bar,
                          double r, double p);

// N = 1 brackets for the max statistic: C[(X^+)^r]/a_1^r and C[|X|^r]/a_1^r.
struct MomentBracket {
  double pos_part = 0.0;
  double abs_part = 0.0;
};
MomentBracket moment_lower_bracket(const GeneratorSet& gen, double r);

}  // namespace sublin
