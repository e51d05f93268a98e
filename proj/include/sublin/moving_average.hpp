#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sublin/expectation.hpp"
#include "sublin/paths.hpp"

namespace sublin {

// Absolutely summable two-sided coefficients beta_j.
class Coefficients {
 public:
  // beta[i] is the coefficient at j = j_min + i.
  static Coefficients finite_window(std::vector<double> beta,
                                    std::int64_t j_min);
  static Coefficients identity();  // beta_0 = 1
  // beta_j = scale * rho^{|j|}, 0 < rho < 1.
  static Coefficients geometric(double rho, double scale);

  double at(std::int64_t j) const;
  double abs_sum() const;            // B = sum |beta_j|
  double sum() const;                // beta = sum beta_j
  double abs_tail(std::int64_t m) const;  // sum_{|j| > m} |beta_j|
  bool is_finite_window() const { return finite_; }
  std::int64_t window() const;  // largest |j| carrying weight (finite case)

  Coefficients scaled(double lambda) const;

  nlohmann::json to_json() const;
  static Coefficients from_json(const nlohmann::json& j);

 private:
  Coefficients() = default;
  bool finite_ = true;
  std::vector<double> beta_;  // finite window storage
  std::int64_t j_min_ = 0;
  double rho_ = 0.0, scale_ = 0.0;
};

enum class MAConvention { OneSidedZeros, BiDirectional };

// Smallest m with sum_{|j|>m} |beta_j| * E|Y| <= eps * x, so the discarded
// tail exceeds x with capacity at most eps.
int tail_cutoff(const Coefficients& coeffs, double mean_abs_y, double eps,
                double x);

struct MAPath {
  std::vector<double> innovations;  // Y_t for t in [t_lo, N + m]
  std::int64_t t_lo = 1;
  std::vector<double> x;          // X_1..X_N
  std::vector<double> t_partial;  // T_n
  std::vector<double> innov_cum;  // sum_{t<=n} Y_t
  int cutoff_m = 0;
  MAConvention convention = MAConvention::OneSidedZeros;

  double innovation_at(std::int64_t t) const;
};

// X_t = sum_{|j|<=m} beta_j Y_{t-j}; innovations drawn through the policy
// from the generator set, Y_t = 0 for t <= 0 under the one-sided convention.
MAPath simulate_ma(const Coefficients& coeffs, const GeneratorSet& gen,
                   const Policy& policy, std::int64_t n, const RngStream& stream,
                   MAConvention convention, int cutoff_m);

// Same path arithmetic over caller-supplied innovations Y_{start_t},
// Y_{start_t + 1}, ...
MAPath ma_from_innovations(const Coefficients& coeffs,
                           std::span<const double> innovations,
                           std::int64_t start_t, std::int64_t n, int cutoff_m,
                           MAConvention convention);

// max over the window of |T_n - beta * sum_{t<=n} Y_t| / a_n.
double approx_residual(const MAPath& path, const Coefficients& coeffs,
                       std::int64_t n_lo, std::int64_t n_hi);

struct LilConfig {
  std::int64_t n = 1 << 20;
  std::int64_t window_lo = 0;  // 0 means floor(sqrt(N))
  int seeds = 64;
  std::uint64_t master_seed = 0;
  int threads = 1;
  MAConvention convention = MAConvention::OneSidedZeros;
  int cutoff_m = -1;  // -1: tail_cutoff with eps=1e-6, x=1
};

struct LilEstimate {
  std::vector<double> per_seed_max;       // max over window of |T_n|/a_n
  std::vector<double> per_seed_residual;  // approx residual over the window
  double median = 0.0;
  double target = 0.0;  // |beta| * sigma_bar_Y
  double sigma_bar = 0.0;
  bool premises_ok = true;
  std::string premise_note;
  int cutoff_m = 0;

  nlohmann::json to_json() const;
  std::string to_csv() const;  // seed, max_over_window, residual, target
};

// Empirical band for limsup |T_n|/a_n against the |beta| sigma_bar_Y target.
// Premise violations are reported, not fatal.
LilEstimate lil_estimate(const Coefficients& coeffs, const GeneratorSet& gen,
                         const Policy& policy, const LilConfig& cfg);

struct ClusterCoverage {
  double target = 0.0;
  std::vector<double> bin_centers;
  std::vector<std::int64_t> counts;  // visits of T_n/a_n per bin

  // every interior bin (|center| <= frac * target) visited at least once
  bool interior_covered(double frac) const;
  nlohmann::json to_json() const;
};

// Visit frequencies of T_n/a_n over the window, binned over
// [-target, target]. Diagnostic only.
ClusterCoverage cluster_coverage(const Coefficients& coeffs,
                                 const GeneratorSet& gen, const Policy& policy,
                                 const LilConfig& cfg, int bins);

double median_of(std::vector<double> values);

}  // namespace sublin
