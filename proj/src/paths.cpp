#include "sublin/paths.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "sublin/errors.hpp"
#include "sublin/parallel.hpp"

namespace sublin {

ScaleSequence ScaleSequence::ones() { return ScaleSequence(); }

ScaleSequence ScaleSequence::from_array(std::vector<double> alphas) {
  ScaleSequence s;
  s.kind_ = Kind::Array;
  s.data_ = std::move(alphas);
  for (double a : s.data_) {
    if (std::fabs(a) > 1.0) throw Error("scale sequence requires |alpha_n| <= 1");
  }
  return s;
}

ScaleSequence ScaleSequence::periodic(std::vector<double> pattern) {
  if (pattern.empty()) throw Error("periodic scale needs a nonempty pattern");
  ScaleSequence s = from_array(std::move(pattern));
  s.kind_ = Kind::Periodic;
  return s;
}

double ScaleSequence::at(std::int64_t n) const {
  if (n < 1) throw Error("scale index is 1-based");
  switch (kind_) {
    case Kind::Ones:
      return 1.0;
    case Kind::Array: {
      const auto i = static_cast<std::size_t>(n - 1);
      if (i >= data_.size()) {
        throw Error("scale array exhausted at n=" + std::to_string(n));
      }
      return data_[i];
    }
    default:
      return data_[static_cast<std::size_t>((n - 1) %
                                            static_cast<std::int64_t>(data_.size()))];
  }
}

PathFunctional PathFunctional::terminal_sum() {
  PathFunctional f;
  f.initial = {0.0};
  f.step = [](const std::vector<double>& s, int, double x) {
    return std::vector<double>{s[0] + x};
  };
  f.payoff = [](const std::vector<double>& s) { return s[0]; };
  return f;
}

PathFunctional PathFunctional::terminal_abs_sum() {
  PathFunctional f = terminal_sum();
  f.payoff = [](const std::vector<double>& s) { return std::fabs(s[0]); };
  return f;
}

PathFunctional PathFunctional::max_norm_stat(double r, StatMode mode) {
  if (!(r > 0)) throw Error("max_norm_stat requires r > 0");
  PathFunctional f;
  f.initial = {0.0, 0.0};
  f.step = [r, mode](const std::vector<double>& s, int k, double x) {
    const double sum = s[0] + x;
    const double num = mode == StatMode::PositivePart ? std::max(sum, 0.0)
                                                      : std::fabs(sum);
    const double stat = std::pow(num / normalizer(k), r);
    return std::vector<double>{sum, std::max(s[1], stat)};
  };
  f.payoff = [](const std::vector<double>& s) { return s[1]; };
  return f;
}

PathFunctional PathFunctional::combo(double c_sum, double c_abs, double c_max,
                                     double r, StatMode mode) {
  PathFunctional f = max_norm_stat(r, mode);
  f.payoff = [c_sum, c_abs, c_max](const std::vector<double>& s) {
    return c_sum * s[0] + c_abs * std::fabs(s[0]) + c_max * s[1];
  };
  return f;
}

std::size_t DpSolution::VecHash::operator()(
    const std::vector<double>& v) const {
  std::size_t h = 1469598103934665603ULL;
  for (double d : v) {
    // +0.0 and -0.0 compare equal and must hash equal
    const auto bits = std::bit_cast<std::uint64_t>(d == 0.0 ? 0.0 : d);
    h ^= static_cast<std::size_t>(bits);
    h *= 1099511628211ULL;
  }
  return h;
}

int DpSolution::choice(int k, const std::vector<double>& state) const {
  if (k < 1 || k > n_) throw Error("dp policy queried outside its horizon");
  const auto& level = levels_[static_cast<std::size_t>(k - 1)];
  auto it = level.find(state);
  if (it == level.end()) {
    throw Error("dp policy met a state outside the solved recursion");
  }
  return argmax_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(
      it->second)];
}

namespace {

// Distinct scaled outcomes at a step, with per-generator probabilities
// aligned to them (zero when a generator lacks the atom).
struct StepOutcomes {
  std::vector<double> values;              // scaled by alpha_k
  std::vector<std::vector<double>> probs;  // [generator][value index]
};

StepOutcomes step_outcomes(const GeneratorSet& gen, double alpha) {
  StepOutcomes out;
  for (const auto& m : gen.measures) {
    for (double v : m.values()) out.values.push_back(alpha * v);
  }
  std::sort(out.values.begin(), out.values.end());
  out.values.erase(std::unique(out.values.begin(), out.values.end()),
                   out.values.end());
  out.probs.resize(gen.size());
  for (std::size_t g = 0; g < gen.size(); ++g) {
    auto& row = out.probs[g];
    row.assign(out.values.size(), 0.0);
    const auto& vs = gen.measures[g].values();
    const auto& ps = gen.measures[g].probabilities();
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const double scaled = alpha * vs[i];
      auto it = std::lower_bound(out.values.begin(), out.values.end(), scaled);
      row[static_cast<std::size_t>(it - out.values.begin())] += ps[i];
    }
  }
  return out;
}

void require_discrete(const GeneratorSet& gen, const char* who) {
  if (!gen.all_discrete()) {
    throw Error(std::string(who) + " requires discrete generators");
  }
}

}  // namespace

DpSolution exact_dp_solve(const GeneratorSet& gen, const PathFunctional& f,
                          int n, const DpOptions& opts) {
  require_discrete(gen, "exact_dp_upper");
  if (n < 1) throw Error("exact_dp_upper requires n >= 1");

  DpSolution sol;
  sol.n_ = n;
  sol.f_ = f;
  sol.levels_.resize(static_cast<std::size_t>(n));
  std::vector<std::vector<std::vector<double>>> states(
      static_cast<std::size_t>(n + 1));

  // Forward reachability.
  states[0].push_back(f.initial);
  sol.levels_[0].emplace(f.initial, 0);
  std::int64_t total_states = 1;
  for (int k = 1; k <= n; ++k) {
    const StepOutcomes oc = step_outcomes(gen, opts.scale.at(k));
    auto& next = states[static_cast<std::size_t>(k)];
    DpSolution::Level scratch;
    for (const auto& s : states[static_cast<std::size_t>(k - 1)]) {
      for (double x : oc.values) {
        std::vector<double> t = f.step(s, k, x);
        auto [it, inserted] = scratch.emplace(std::move(t),
                                              static_cast<int>(next.size()));
        if (inserted) {
          next.push_back(it->first);
          if (++total_states > opts.state_cap) {
            throw Error("exact_dp_upper state cap exceeded (" +
                        std::to_string(opts.state_cap) + ")");
          }
        }
      }
    }
    if (k < n) sol.levels_[static_cast<std::size_t>(k)] = std::move(scratch);
  }

  // Terminal values.
  std::vector<double> value_next;
  value_next.reserve(states[static_cast<std::size_t>(n)].size());
  for (const auto& s : states[static_cast<std::size_t>(n)]) {
    value_next.push_back(f.payoff(s));
  }

  // Backward recursion with the adversary's argmax recorded per state.
  sol.argmax_.resize(static_cast<std::size_t>(n));
  for (int k = n; k >= 1; --k) {
    const StepOutcomes oc = step_outcomes(gen, opts.scale.at(k));
    const auto& here = states[static_cast<std::size_t>(k - 1)];
    std::vector<double> value_here(here.size());
    auto& choices = sol.argmax_[static_cast<std::size_t>(k - 1)];
    choices.resize(here.size());

    // index of successor states; level k's map was moved out for k == n
    const DpSolution::Level* next_index = nullptr;
    DpSolution::Level terminal_scratch;
    if (k < n) {
      next_index = &sol.levels_[static_cast<std::size_t>(k)];
    } else {
      for (std::size_t i = 0; i < states[static_cast<std::size_t>(n)].size();
           ++i) {
        terminal_scratch.emplace(states[static_cast<std::size_t>(n)][i],
                                 static_cast<int>(i));
      }
      next_index = &terminal_scratch;
    }

    for (std::size_t i = 0; i < here.size(); ++i) {
      double best = -std::numeric_limits<double>::infinity();
      int best_g = 0;
      std::vector<int> succ(oc.values.size());
      for (std::size_t vi = 0; vi < oc.values.size(); ++vi) {
        std::vector<double> t = f.step(here[i], k, oc.values[vi]);
        succ[vi] = next_index->at(t);
      }
      for (std::size_t g = 0; g < gen.size(); ++g) {
        double acc = 0.0;
        for (std::size_t vi = 0; vi < oc.values.size(); ++vi) {
          const double pr = oc.probs[g][vi];
          if (pr > 0.0) {
            acc += pr * value_next[static_cast<std::size_t>(succ[vi])];
          }
        }
        if (acc > best) {
          best = acc;
          best_g = static_cast<int>(g);
        }
      }
      value_here[i] = best;
      choices[i] = best_g;
    }
    value_next = std::move(value_here);
  }
  sol.value_ = value_next[0];
  return sol;
}

double exact_dp_upper(const GeneratorSet& gen, const PathFunctional& f, int n,
                      const DpOptions& opts) {
  return exact_dp_solve(gen, f, n, opts).value();
}

namespace {

double brute_value(const GeneratorSet& gen, const PathFunctional& f, int n,
                   const DpOptions& opts, const std::vector<double>& state,
                   int k) {
  if (k > n) return f.payoff(state);
  const StepOutcomes oc = step_outcomes(gen, opts.scale.at(k));
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < gen.size(); ++g) {
    double acc = 0.0;
    for (std::size_t vi = 0; vi < oc.values.size(); ++vi) {
      const double pr = oc.probs[g][vi];
      if (pr > 0.0) {
        acc += pr * brute_value(gen, f, n, opts, f.step(state, k, oc.values[vi]),
                                k + 1);
      }
    }
    best = std::max(best, acc);
  }
  return best;
}

}  // namespace

double brute_force_upper(const GeneratorSet& gen, const PathFunctional& f,
                         int n, const DpOptions& opts) {
  require_discrete(gen, "brute_force_upper");
  if (n > 8) throw Error("brute_force_upper is guarded to n <= 8");
  if (gen.size() > 3) throw Error("brute_force_upper is guarded to |gen| <= 3");
  for (const auto& m : gen.measures) {
    if (m.values().size() > 4) {
      throw Error("brute_force_upper is guarded to support size <= 4");
    }
  }
  return brute_value(gen, f, n, opts, f.initial, 1);
}

double constant_policy_expectation(const GeneratorSet& gen, int theta,
                                   const PathFunctional& f, int n,
                                   const DpOptions& opts) {
  require_discrete(gen, "constant_policy_expectation");
  if (theta < 0 || static_cast<std::size_t>(theta) >= gen.size()) {
    throw Error("generator index out of range");
  }
  const auto& vs = gen.measures[static_cast<std::size_t>(theta)].values();
  const auto& ps = gen.measures[static_cast<std::size_t>(theta)].probabilities();
  std::function<double(const std::vector<double>&, int)> walk =
      [&](const std::vector<double>& state, int k) -> double {
    if (k > n) return f.payoff(state);
    double acc = 0.0;
    const double alpha = opts.scale.at(k);
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (ps[i] > 0.0) {
        acc += ps[i] * walk(f.step(state, k, alpha * vs[i]), k + 1);
      }
    }
    return acc;
  };
  return walk(f.initial, 1);
}

Policy Policy::constant(int index) {
  Policy p;
  p.kind_ = Kind::Constant;
  p.index_ = index;
  p.label_ = "constant(" + std::to_string(index) + ")";
  return p;
}

Policy Policy::cyclic(std::vector<int> indices) {
  if (indices.empty()) throw Error("cyclic policy needs indices");
  Policy p;
  p.kind_ = Kind::Cyclic;
  p.cycle_ = std::move(indices);
  p.label_ = "cyclic";
  return p;
}

Policy Policy::state_feedback(std::function<int(int, double, double)> rule,
                              std::string label) {
  Policy p;
  p.kind_ = Kind::StateFeedback;
  p.rule_ = std::move(rule);
  p.label_ = std::move(label);
  return p;
}

Policy Policy::dp_derived(std::shared_ptr<const DpSolution> solution) {
  Policy p;
  p.kind_ = Kind::DpDerived;
  p.dp_ = std::move(solution);
  p.label_ = "dp";
  return p;
}

PolicyCursor Policy::make_cursor() const {
  PolicyCursor c;
  if (kind_ == Kind::DpDerived) c.dp_state = dp_->functional().initial;
  return c;
}

int Policy::select(int k, double s_prev, double running_max,
                   PolicyCursor& cursor) const {
  switch (kind_) {
    case Kind::Constant:
      return index_;
    case Kind::Cyclic:
      return cycle_[static_cast<std::size_t>((k - 1) %
                                             static_cast<int>(cycle_.size()))];
    case Kind::StateFeedback: {
      const double s_res = 0.01 * normalizer(k);
      const double s_q = std::round(s_prev / s_res) * s_res;
      const double m_q = std::round(running_max / 0.01) * 0.01;
      return rule_(k, s_q, m_q);
    }
    default:
      return dp_->choice(k, cursor.dp_state);
  }
}

void Policy::advance(PolicyCursor& cursor, int k, double x) const {
  if (kind_ == Kind::DpDerived) {
    cursor.dp_state = dp_->functional().step(cursor.dp_state, k, x);
  }
}

std::vector<double> sample_path(const GeneratorSet& gen, const Policy& policy,
                                const ScaleSequence& scale, std::int64_t n,
                                const RngStream& stream) {
  if (!gen.all_samplable()) throw Error("generator set is not samplable");
  std::vector<double> path;
  path.reserve(static_cast<std::size_t>(n));
  PolicyCursor cursor = policy.make_cursor();
  double sum = 0.0;
  double run_max = 0.0;
  for (std::int64_t k = 1; k <= n; ++k) {
    const int g = policy.select(static_cast<int>(k), sum, run_max, cursor);
    if (g < 0 || static_cast<std::size_t>(g) >= gen.size()) {
      throw Error("policy selected generator " + std::to_string(g) +
                  " outside the set");
    }
    const double u = stream.uniform(static_cast<std::uint64_t>(k));
    const double x =
        scale.at(k) * gen.measures[static_cast<std::size_t>(g)].sample(u);
    path.push_back(x);
    policy.advance(cursor, static_cast<int>(k), x);
    sum += x;
    run_max = std::max(run_max, std::max(sum, 0.0) / normalizer(k));
  }
  return path;
}

double max_stat(std::span<const double> path, double r, StatMode mode,
                const NormalizerTable* table) {
  if (path.empty()) throw Error("max_stat needs a nonempty path");
  double sum = 0.0;
  double best = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    sum += path[i];
    const double num =
        mode == StatMode::PositivePart ? std::max(sum, 0.0) : std::fabs(sum);
    const double a = table ? (*table)[static_cast<std::int64_t>(i + 1)]
                           : normalizer(static_cast<std::int64_t>(i + 1));
    best = std::max(best, std::pow(num / a, r));
  }
  return best;
}

namespace {

int checked_select(const Policy& pol, const GeneratorSet& gen, int k,
                   double sum, double run_max, PolicyCursor& cursor) {
  const int g = pol.select(k, sum, run_max, cursor);
  if (g < 0 || static_cast<std::size_t>(g) >= gen.size()) {
    throw Error("policy selected generator " + std::to_string(g) +
                " outside the set");
  }
  return g;
}

}  // namespace

McMaxMoment mc_choquet_max_moment(const GeneratorSet& gen,
                                  const std::vector<Policy>& policies,
                                  const MaxStatConfig& cfg) {
  if (policies.empty()) throw Error("mc_choquet_max_moment needs policies");
  if (cfg.replications < 2) throw Error("mc_choquet_max_moment needs replications >= 2");
  if (!gen.all_samplable()) throw Error("generator set is not samplable");

  const NormalizerTable table(cfg.n);
  const std::size_t reps = static_cast<std::size_t>(cfg.replications);
  std::vector<std::vector<double>> stats(
      policies.size(), std::vector<double>(reps, 0.0));

  parallel_for(cfg.replications, cfg.threads, [&](std::int64_t j) {
    const RngStream stream(cfg.seed, rng_domain::kPaths,
                           static_cast<std::uint64_t>(j));
    for (std::size_t pi = 0; pi < policies.size(); ++pi) {
      const Policy& pol = policies[pi];
      PolicyCursor cursor = pol.make_cursor();
      double sum = 0.0, run_max = 0.0, best = 0.0;
      for (std::int64_t k = 1; k <= cfg.n; ++k) {
        const int g = checked_select(pol, gen, static_cast<int>(k), sum,
                                     run_max, cursor);
        const double u = stream.uniform(static_cast<std::uint64_t>(k));
        const double x =
            cfg.scale.at(k) * gen.measures[static_cast<std::size_t>(g)].sample(u);
        pol.advance(cursor, static_cast<int>(k), x);
        sum += x;
        run_max = std::max(run_max, std::max(sum, 0.0) / table[k]);
        const double num = cfg.mode == StatMode::PositivePart
                               ? std::max(sum, 0.0)
                               : std::fabs(sum);
        best = std::max(best, std::pow(num / table[k], cfg.r));
      }
      stats[pi][static_cast<std::size_t>(j)] = best;
    }
  });

  McMaxMoment out;
  out.seed = cfg.seed;
  for (std::size_t pi = 0; pi < policies.size(); ++pi) {
    PolicyEstimate est;
    est.policy = policies[pi].label();
    est.replications = cfg.replications;
    double mean = 0.0;
    for (double v : stats[pi]) mean += v;  // fixed index order
    mean /= static_cast<double>(reps);
    double ss = 0.0;
    for (double v : stats[pi]) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(reps - 1));
    est.mean = mean;
    est.std_error = sd / std::sqrt(static_cast<double>(reps));
    est.ci_lo = mean - 1.959963984540054 * est.std_error;
    est.ci_hi = mean + 1.959963984540054 * est.std_error;
    est.sorted_stats = stats[pi];
    std::sort(est.sorted_stats.begin(), est.sorted_stats.end());
    out.per_policy.push_back(std::move(est));
  }
  const auto best_it = std::max_element(
      out.per_policy.begin(), out.per_policy.end(),
      [](const PolicyEstimate& a, const PolicyEstimate& b) {
        return a.mean < b.mean;
      });
  out.envelope = best_it->mean;
  out.envelope_policy = best_it->policy;
  return out;
}

ProbeResult plateau_divergence_probe(const GeneratorSet& gen,
                                     const Policy& policy,
                                     const ProbeConfig& cfg) {
  ProbeResult out;
  out.n_grid = cfg.n_grid;
  if (out.n_grid.empty()) {
    for (int k = 10; k <= 20; ++k) out.n_grid.push_back(std::int64_t{1} << k);
  }
  if (!std::is_sorted(out.n_grid.begin(), out.n_grid.end())) {
    throw Error("probe n-grid must be ascending");
  }
  if (!gen.all_samplable()) throw Error("generator set is not samplable");
  const std::int64_t n_max = out.n_grid.back();
  const NormalizerTable table(n_max);
  const std::size_t grid = out.n_grid.size();
  std::vector<std::vector<double>> per_rep(
      static_cast<std::size_t>(cfg.replications), std::vector<double>(grid));

  parallel_for(cfg.replications, cfg.threads, [&](std::int64_t j) {
    const RngStream stream(cfg.seed, rng_domain::kPaths,
                           static_cast<std::uint64_t>(j));
    PolicyCursor cursor = policy.make_cursor();
    double sum = 0.0, run_max = 0.0, best = 0.0;
    std::size_t gi = 0;
    for (std::int64_t k = 1; k <= n_max; ++k) {
      const int g = checked_select(policy, gen, static_cast<int>(k), sum,
                                   run_max, cursor);
      const double u = stream.uniform(static_cast<std::uint64_t>(k));
      const double x =
          gen.measures[static_cast<std::size_t>(g)].sample(u);
      policy.advance(cursor, static_cast<int>(k), x);
      sum += x;
      run_max = std::max(run_max, std::max(sum, 0.0) / table[k]);
      const double num = cfg.mode == StatMode::PositivePart
                             ? std::max(sum, 0.0)
                             : std::fabs(sum);
      best = std::max(best, std::pow(num / table[k], cfg.r));
      if (gi < grid && k == out.n_grid[gi]) {
        per_rep[static_cast<std::size_t>(j)][gi] = best;
        ++gi;
      }
    }
  });

  out.estimates.assign(grid, 0.0);
  for (std::int64_t j = 0; j < cfg.replications; ++j) {
    for (std::size_t gi = 0; gi < grid; ++gi) {
      out.estimates[gi] += per_rep[static_cast<std::size_t>(j)][gi];
    }
  }
  for (double& e : out.estimates) e /= static_cast<double>(cfg.replications);

  const double last = out.estimates.back();
  const double first = out.estimates.front();
  const double prev = grid >= 2 ? out.estimates[grid - 2] : last;
  if (grid >= 2 &&
      std::fabs(last - prev) < cfg.plateau_tol * std::max(std::fabs(prev), 1e-12)) {
    out.verdict = "plateau";
  } else if (last >= (1.0 + cfg.growth_threshold) * first) {
    out.verdict = "growing";
  } else {
    out.verdict = "inconclusive";
  }
  return out;
}

nlohmann::json McMaxMoment::to_json() const {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& e : per_policy) {
    per.push_back({{"policy", e.policy},
                   {"mean", e.mean},
                   {"std_error", e.std_error},
                   {"ci_lo", e.ci_lo},
                   {"ci_hi", e.ci_hi},
                   {"reps", e.replications}});
  }
  return nlohmann::json{{"per_policy", per},
                        {"envelope", envelope},
                        {"envelope_policy", envelope_policy},
                        {"seed", seed}};
}

nlohmann::json ProbeResult::to_json() const {
  return nlohmann::json{{"n_grid", n_grid},
                        {"estimates", estimates},
                        {"verdict", verdict}};
}

}  // namespace sublin
