#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sublin/expectation.hpp"
#include "sublin/normalizer.hpp"
#include "sublin/rng.hpp"

namespace sublin {

enum class StatMode { PositivePart, Absolute };

// Per-step scaling X_n = alpha_n X with |alpha_n| <= 1.
class ScaleSequence {
 public:
  static ScaleSequence ones();
  static ScaleSequence from_array(std::vector<double> alphas);
  static ScaleSequence periodic(std::vector<double> pattern);
  double at(std::int64_t n) const;  // n is 1-based
  bool is_ones() const { return kind_ == Kind::Ones; }

 private:
  enum class Kind { Ones, Array, Periodic };
  Kind kind_ = Kind::Ones;
  std::vector<double> data_;
};

// Deterministic finite-state payoff of (X_1, ..., X_n): an initial state, a
// per-step transition and a terminal payoff. Consumed by the exact backward
// recursion and replayed by the samplers.
struct PathFunctional {
  std::vector<double> initial;
  // step index k is 1-based
  std::function<std::vector<double>(const std::vector<double>&, int, double)>
      step;
  std::function<double(const std::vector<double>&)> payoff;
  bool bounded = false;

  static PathFunctional terminal_sum();
  static PathFunctional terminal_abs_sum();
  // state {S, M} with M = running max of ((S+ or |S|)/a_k)^r
  static PathFunctional max_norm_stat(double r, StatMode mode);
  // c_sum * S + c_abs * |S| + c_max * M
  static PathFunctional combo(double c_sum, double c_abs, double c_max,
                              double r, StatMode mode);
};

struct DpOptions {
  std::int64_t state_cap = 1000000;
  ScaleSequence scale = ScaleSequence::ones();
};

// Solved backward recursion; retains the per-level state maps so a policy
// can replay the argmax choices.
class DpSolution {
 public:
  double value() const { return value_; }
  int horizon() const { return n_; }
  int choice(int k, const std::vector<double>& state) const;  // k 1-based
  const PathFunctional& functional() const { return f_; }

 private:
  friend DpSolution exact_dp_solve(const GeneratorSet&, const PathFunctional&,
                                   int, const DpOptions&);
  struct VecHash {
    std::size_t operator()(const std::vector<double>& v) const;
  };
  using Level = std::unordered_map<std::vector<double>, int, VecHash>;
  double value_ = 0.0;
  int n_ = 0;
  PathFunctional f_;
  std::vector<Level> levels_;               // 0..n-1
  std::vector<std::vector<int>> argmax_;    // per level, per state index
};

// Upper expectation of f(X_1..X_n) under adapted adversarial selection of a
// generator at every step (the sequential-independence recursion).
DpSolution exact_dp_solve(const GeneratorSet& gen, const PathFunctional& f,
                          int n, const DpOptions& opts = {});
double exact_dp_upper(const GeneratorSet& gen, const PathFunctional& f, int n,
                      const DpOptions& opts = {});

// Independent oracle: direct recursion over the history tree, no state
// merging. Guarded to tiny instances.
double brute_force_upper(const GeneratorSet& gen, const PathFunctional& f,
                         int n, const DpOptions& opts = {});

// Classical expectation of f under one fixed generator, by path enumeration.
double constant_policy_expectation(const GeneratorSet& gen, int theta,
                                   const PathFunctional& f, int n,
                                   const DpOptions& opts = {});

struct PolicyCursor {
  std::vector<double> dp_state;
};

// Adapted rule selecting a generator index per step. Selection sees the
// quantized pair (S_{k-1}, running max of S_n^+/a_n); buckets are 0.01 a_k
// for the sum and 0.01 for the max.
class Policy {
 public:
  static Policy constant(int index);
  static Policy cyclic(std::vector<int> indices);
  static Policy state_feedback(
      std::function<int(int, double, double)> rule, std::string label);
  static Policy dp_derived(std::shared_ptr<const DpSolution> solution);

  int select(int k, double s_prev, double running_max,
             PolicyCursor& cursor) const;
  void advance(PolicyCursor& cursor, int k, double x) const;
  PolicyCursor make_cursor() const;
  const std::string& label() const { return label_; }

 private:
  enum class Kind { Constant, Cyclic, StateFeedback, DpDerived };
  Kind kind_ = Kind::Constant;
  int index_ = 0;
  std::vector<int> cycle_;
  std::function<int(int, double, double)> rule_;
  std::shared_ptr<const DpSolution> dp_;
  std::string label_;
};

// X_k = alpha_k * (draw from the generator the policy picks at step k).
// Deterministic given the stream.
std::vector<double> sample_path(const GeneratorSet& gen, const Policy& policy,
                                const ScaleSequence& scale, std::int64_t n,
                                const RngStream& stream);

// max over n of ((S_n^+ or |S_n|) / a_n)^r.
double max_stat(std::span<const double> path, double r, StatMode mode,
                const NormalizerTable* table = nullptr);

struct MaxStatConfig {
  std::int64_t n = 256;
  double r = 1.0;
  StatMode mode = StatMode::PositivePart;
  ScaleSequence scale = ScaleSequence::ones();
  std::uint64_t seed = 0;
  std::int64_t replications = 1000;
  int threads = 1;
};

struct PolicyEstimate {
  std::string policy;
  double mean = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;  // 95% normal approximation
  std::int64_t replications = 0;
  std::vector<double> sorted_stats;  // survival-curve data
};

// Per-policy Monte Carlo means of the max statistic. The envelope (max over
// the supplied policies) is a one-sided LOWER estimate of the sub-linear
// Choquet moment; no unbiased estimator of the policy supremum exists.
struct McMaxMoment {
  std::vector<PolicyEstimate> per_policy;
  double envelope = 0.0;
  std::string envelope_policy;
  std::uint64_t seed = 0;
  nlohmann::json to_json() const;
};

McMaxMoment mc_choquet_max_moment(const GeneratorSet& gen,
                                  const std::vector<Policy>& policies,
                                  const MaxStatConfig& cfg);

struct ProbeConfig {
  std::vector<std::int64_t> n_grid;  // default 2^10 .. 2^20
  double r = 1.0;
  StatMode mode = StatMode::Absolute;
  std::int64_t replications = 200;
  std::uint64_t seed = 0;
  int threads = 1;
  double plateau_tol = 0.05;      // last two grid points within 5%
  double growth_threshold = 0.5;  // first-to-last rise of 50%
};

struct ProbeResult {
  std::vector<std::int64_t> n_grid;
  std::vector<double> estimates;
  std::string verdict;  // plateau | growing | inconclusive
  nlohmann::json to_json() const;
};

// Growth probe for E[max_{n<=N} stat] along an N-grid; one pass per
// replication records the running statistic at every grid point.
ProbeResult plateau_divergence_probe(const GeneratorSet& gen,
                                     const Policy& policy,
                                     const ProbeConfig& cfg);

}  // namespace sublin
