#include "sublin/moving_average.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sublin/errors.hpp"
#include "sublin/functionals.hpp"
#include "sublin/parallel.hpp"

namespace sublin {

Coefficients Coefficients::finite_window(std::vector<double> beta,
                                         std::int64_t j_min) {
  if (beta.empty()) throw Error("finite_window needs coefficients");
  Coefficients c;
  c.finite_ = true;
  c.beta_ = std::move(beta);
  c.j_min_ = j_min;
  return c;
}

Coefficients Coefficients::identity() { return finite_window({1.0}, 0); }

Coefficients Coefficients::geometric(double rho, double scale) {
  if (!(rho > 0.0 && rho < 1.0)) throw Error("geometric requires 0 < rho < 1");
  Coefficients c;
  c.finite_ = false;
  c.rho_ = rho;
  c.scale_ = scale;
  return c;
}

double Coefficients::at(std::int64_t j) const {
  if (finite_) {
    const std::int64_t i = j - j_min_;
    if (i < 0 || i >= static_cast<std::int64_t>(beta_.size())) return 0.0;
    return beta_[static_cast<std::size_t>(i)];
  }
  return scale_ * std::pow(rho_, static_cast<double>(std::llabs(j)));
}

double Coefficients::abs_sum() const {
  if (finite_) {
    double b = 0.0;
    for (double v : beta_) b += std::fabs(v);
    return b;
  }
  // scale * (1 + 2 rho / (1 - rho))
  return std::fabs(scale_) * (1.0 + rho_) / (1.0 - rho_);
}

double Coefficients::sum() const {
  if (finite_) {
    double b = 0.0;
    for (double v : beta_) b += v;
    return b;
  }
  return scale_ * (1.0 + rho_) / (1.0 - rho_);
}

double Coefficients::abs_tail(std::int64_t m) const {
  if (m < 0) return abs_sum();
  if (finite_) {
    double b = 0.0;
    for (std::size_t i = 0; i < beta_.size(); ++i) {
      const std::int64_t j = j_min_ + static_cast<std::int64_t>(i);
      if (std::llabs(j) > m) b += std::fabs(beta_[i]);
    }
    return b;
  }
  // 2 * scale * rho^{m+1} / (1 - rho)
  return 2.0 * std::fabs(scale_) *
         std::pow(rho_, static_cast<double>(m + 1)) / (1.0 - rho_);
}

std::int64_t Coefficients::window() const {
  if (!finite_) throw Error("window() is only defined for finite coefficients");
  std::int64_t w = 0;
  for (std::size_t i = 0; i < beta_.size(); ++i) {
    if (beta_[i] != 0.0) {
      w = std::max<std::int64_t>(
          w, std::llabs(j_min_ + static_cast<std::int64_t>(i)));
    }
  }
  return w;
}

Coefficients Coefficients::scaled(double lambda) const {
  Coefficients c = *this;
  if (finite_) {
    for (double& v : c.beta_) v *= lambda;
  } else {
    c.scale_ *= lambda;
  }
  return c;
}

nlohmann::json Coefficients::to_json() const {
  if (finite_) {
    return nlohmann::json{{"kind", "finite-window"},
                          {"beta", beta_},
                          {"j_min", j_min_}};
  }
  return nlohmann::json{{"kind", "geometric"}, {"rho", rho_}, {"scale", scale_}};
}

Coefficients Coefficients::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "finite-window") {
    return finite_window(j.at("beta").get<std::vector<double>>(),
                         j.value("j_min", std::int64_t{0}));
  }
  if (kind == "geometric") {
    return geometric(j.at("rho").get<double>(), j.value("scale", 1.0));
  }
  if (kind == "identity") return identity();
  throw Error("unknown coefficient kind '" + kind + "'");
}

int tail_cutoff(const Coefficients& coeffs, double mean_abs_y, double eps,
                double x) {
  if (!(eps > 0) || !(x > 0)) throw Error("tail_cutoff requires eps, x > 0");
  if (!(mean_abs_y >= 0) || !std::isfinite(mean_abs_y)) {
    throw Error("tail_cutoff requires finite E|Y|");
  }
  const double budget = eps * x;
  for (int m = 0; m <= 4096; ++m) {
    if (coeffs.abs_tail(m) * mean_abs_y <= budget) return m;
  }
  throw Error("tail_cutoff found no m <= 4096; coefficients decay too slowly");
}

double MAPath::innovation_at(std::int64_t t) const {
  const std::int64_t i = t - t_lo;
  if (i < 0 || i >= static_cast<std::int64_t>(innovations.size())) {
    return 0.0;  // one-sided zero extension
  }
  return innovations[static_cast<std::size_t>(i)];
}

namespace {

// Core recurrence: draws the innovations in stored order, then walks t = 1..N
// computing X_t by direct convolution over the cutoff window, invoking
// visit(t, X_t, T_t, C_t) with the running partial sums.
void run_ma(const Coefficients& coeffs, std::int64_t n, int m,
            MAConvention convention,
            const std::function<double(std::int64_t)>& draw,
            const std::function<void(std::int64_t, double, double, double)>&
                visit) {
  const std::int64_t t_first =
      convention == MAConvention::BiDirectional ? 1 - m : 1;
  const std::int64_t t_last = n + m;
  // innovations indexed t_first..t_last
  std::vector<double> y(static_cast<std::size_t>(t_last - t_first + 1), 0.0);
  auto y_at = [&y, t_first, t_last](std::int64_t t) {
    if (t < t_first || t > t_last) return 0.0;
    return y[static_cast<std::size_t>(t - t_first)];
  };
  for (std::int64_t t = t_first; t <= t_last; ++t) {
    y[static_cast<std::size_t>(t - t_first)] = draw(t);
  }
  std::vector<double> b(static_cast<std::size_t>(2 * m + 1));
  for (int j = -m; j <= m; ++j) {
    b[static_cast<std::size_t>(j + m)] = coeffs.at(j);
  }
  double t_n = 0.0;
  double c_n = 0.0;
  for (std::int64_t t = 1; t <= n; ++t) {
    double x_t = 0.0;
    for (int j = -m; j <= m; ++j) {
      x_t += b[static_cast<std::size_t>(j + m)] * y_at(t - j);
    }
    t_n += x_t;
    c_n += y_at(t);
    visit(t, x_t, t_n, c_n);
  }
}

// One policy-driven innovation drawer over a stream; draw order follows the
// stored index so runs are reproducible for either convention.
std::function<double(std::int64_t)> policy_drawer(const GeneratorSet& gen,
                                                  const Policy& policy,
                                                  const RngStream& stream,
                                                  std::int64_t t_first,
                                                  std::shared_ptr<void>& keep) {
  struct State {
    PolicyCursor cursor;
    double sum = 0.0;
    double run_max = 0.0;
  };
  auto st = std::make_shared<State>();
  st->cursor = policy.make_cursor();
  keep = st;
  return [&gen, &policy, stream, t_first, st](std::int64_t t) {
    const std::int64_t step = t - t_first + 1;  // 1-based draw order
    const int g = policy.select(static_cast<int>(step), st->sum, st->run_max,
                                st->cursor);
    if (g < 0 || static_cast<std::size_t>(g) >= gen.size()) {
      throw Error("policy selected generator " + std::to_string(g) +
                  " outside the set");
    }
    const double u = stream.uniform(static_cast<std::uint64_t>(step));
    const double value =
        gen.measures[static_cast<std::size_t>(g)].sample(u);
    policy.advance(st->cursor, static_cast<int>(step), value);
    st->sum += value;
    st->run_max = std::max(st->run_max,
                           std::max(st->sum, 0.0) / normalizer(step));
    return value;
  };
}

int resolve_cutoff(const Coefficients& coeffs, const GeneratorSet& gen,
                   int requested) {
  if (requested >= 0) return requested;
  // E|Y| upper envelope for the tail budget
  const double mean_abs =
      upper_expectation(gen, TestFunction::abs_power(1.0));
  return tail_cutoff(coeffs, std::max(mean_abs, 1e-12), 1e-6, 1.0);
}

}  // namespace

MAPath simulate_ma(const Coefficients& coeffs, const GeneratorSet& gen,
                   const Policy& policy, std::int64_t n, const RngStream& stream,
                   MAConvention convention, int cutoff_m) {
  if (!gen.all_samplable()) throw Error("innovation generator is not samplable");
  const int m = resolve_cutoff(coeffs, gen, cutoff_m);
  MAPath path;
  path.cutoff_m = m;
  path.convention = convention;
  path.t_lo = convention == MAConvention::BiDirectional ? 1 - m : 1;
  path.x.reserve(static_cast<std::size_t>(n));
  path.t_partial.reserve(static_cast<std::size_t>(n));
  path.innov_cum.reserve(static_cast<std::size_t>(n));

  std::shared_ptr<void> keep;
  auto draw = policy_drawer(gen, policy, stream, path.t_lo, keep);
  std::vector<double> drawn;
  drawn.reserve(static_cast<std::size_t>(n + m - path.t_lo + 1));
  auto record_draw = [&drawn, &draw](std::int64_t t) {
    const double v = draw(t);
    drawn.push_back(v);
    return v;
  };
  run_ma(coeffs, n, m, convention, record_draw,
         [&path](std::int64_t, double x_t, double t_n, double c_n) {
           path.x.push_back(x_t);
           path.t_partial.push_back(t_n);
           path.innov_cum.push_back(c_n);
         });
  path.innovations = std::move(drawn);
  return path;
}

MAPath ma_from_innovations(const Coefficients& coeffs,
                           std::span<const double> innovations,
                           std::int64_t start_t, std::int64_t n, int cutoff_m,
                           MAConvention convention) {
  if (cutoff_m < 0) {
    cutoff_m = coeffs.is_finite_window() ? static_cast<int>(coeffs.window())
                                         : 64;
  }
  MAPath path;
  path.cutoff_m = cutoff_m;
  path.convention = convention;
  path.t_lo = convention == MAConvention::BiDirectional ? 1 - cutoff_m : 1;
  auto supplied = [&innovations, start_t](std::int64_t t) {
    const std::int64_t i = t - start_t;
    if (i < 0 || i >= static_cast<std::int64_t>(innovations.size())) return 0.0;
    return innovations[static_cast<std::size_t>(i)];
  };
  std::vector<double> drawn;
  auto record = [&drawn, &supplied](std::int64_t t) {
    const double v = supplied(t);
    drawn.push_back(v);
    return v;
  };
  run_ma(coeffs, n, cutoff_m, convention, record,
         [&path](std::int64_t, double x_t, double t_n, double c_n) {
           path.x.push_back(x_t);
           path.t_partial.push_back(t_n);
           path.innov_cum.push_back(c_n);
         });
  path.innovations = std::move(drawn);
  return path;
}

double approx_residual(const MAPath& path, const Coefficients& coeffs,
                       std::int64_t n_lo, std::int64_t n_hi) {
  if (path.t_partial.empty()) throw Error("approx_residual needs a path");
  const std::int64_t n_max = static_cast<std::int64_t>(path.t_partial.size());
  n_lo = std::max<std::int64_t>(1, n_lo);
  n_hi = std::min(n_hi, n_max);
  const double beta = coeffs.sum();
  double best = 0.0;
  for (std::int64_t nn = n_lo; nn <= n_hi; ++nn) {
    const double res =
        std::fabs(path.t_partial[static_cast<std::size_t>(nn - 1)] -
                  beta * path.innov_cum[static_cast<std::size_t>(nn - 1)]) /
        normalizer(nn);
    best = std::max(best, res);
  }
  return best;
}

double median_of(std::vector<double> values) {
  if (values.empty()) throw Error("median of nothing");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2]
               : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

struct SeedRun {
  double max_stat = 0.0;
  double residual = 0.0;
};

SeedRun run_seed(const Coefficients& coeffs, const GeneratorSet& gen,
                 const Policy& policy, const LilConfig& cfg, int m,
                 std::int64_t window_lo, std::uint64_t seed_index,
                 const NormalizerTable& table, double beta,
                 const std::function<void(std::int64_t, double)>* bin_visit) {
  const RngStream stream(cfg.master_seed, rng_domain::kInnovations, seed_index);
  const std::int64_t t_first =
      cfg.convention == MAConvention::BiDirectional ? 1 - m : 1;
  std::shared_ptr<void> keep;
  auto draw = policy_drawer(gen, policy, stream, t_first, keep);
  SeedRun out;
  run_ma(coeffs, cfg.n, m, cfg.convention, draw,
         [&](std::int64_t nn, double, double t_n, double c_n) {
           if (nn < window_lo) return;
           const double a = table[nn];
           out.max_stat = std::max(out.max_stat, std::fabs(t_n) / a);
           out.residual =
               std::max(out.residual, std::fabs(t_n - beta * c_n) / a);
           if (bin_visit) (*bin_visit)(nn, t_n / a);
         });
  return out;
}

}  // namespace

LilEstimate lil_estimate(const Coefficients& coeffs, const GeneratorSet& gen,
                         const Policy& policy, const LilConfig& cfg) {
  LilEstimate out;
  const int m = resolve_cutoff(coeffs, gen, cfg.cutoff_m);
  out.cutoff_m = m;
  const std::int64_t window_lo =
      cfg.window_lo > 0
          ? cfg.window_lo
          : static_cast<std::int64_t>(std::floor(std::sqrt(
                static_cast<double>(cfg.n))));

  // Premises: zero certain mean, finite upper variance, finite loglog moment.
  const auto up = extended_expectation(gen);
  const auto dn = extended_expectation_negated(gen);
  const auto second = extended_second_moment(gen);
  const auto lil = lil_moment(gen);
  std::ostringstream note;
  if (!up.converged || std::fabs(up.value) > 1e-6 || !dn.converged ||
      std::fabs(dn.value) > 1e-6) {
    out.premises_ok = false;
    note << "mean pair not (0, 0); ";
  }
  if (!second.converged) {
    out.premises_ok = false;
    note << "upper second moment did not settle; ";
  }
  if (!lil.finite()) {
    out.premises_ok = false;
    note << "loglog moment infinite; ";
  }
  out.premise_note = note.str();
  out.sigma_bar = second.converged ? std::sqrt(std::max(0.0, second.value))
                                   : std::numeric_limits<double>::infinity();
  out.target = std::fabs(coeffs.sum()) * out.sigma_bar;

  const NormalizerTable table(cfg.n);
  const double beta = coeffs.sum();
  out.per_seed_max.assign(static_cast<std::size_t>(cfg.seeds), 0.0);
  out.per_seed_residual.assign(static_cast<std::size_t>(cfg.seeds), 0.0);
  parallel_for(cfg.seeds, cfg.threads, [&](std::int64_t s) {
    const SeedRun run =
        run_seed(coeffs, gen, policy, cfg, m, window_lo,
                 static_cast<std::uint64_t>(s), table, beta, nullptr);
    out.per_seed_max[static_cast<std::size_t>(s)] = run.max_stat;
    out.per_seed_residual[static_cast<std::size_t>(s)] = run.residual;
  });
  out.median = median_of(out.per_seed_max);
  return out;
}

ClusterCoverage cluster_coverage(const Coefficients& coeffs,
                                 const GeneratorSet& gen, const Policy& policy,
                                 const LilConfig& cfg, int bins) {
  if (bins < 1) throw Error("cluster_coverage needs bins >= 1");
  ClusterCoverage out;
  const auto second = extended_second_moment(gen);
  const double sigma = second.converged
                           ? std::sqrt(std::max(0.0, second.value))
                           : std::numeric_limits<double>::infinity();
  out.target = std::fabs(coeffs.sum()) * sigma;
  if (!std::isfinite(out.target)) {
    throw Error("cluster_coverage target is infinite");
  }
  const int m = resolve_cutoff(coeffs, gen, cfg.cutoff_m);
  const std::int64_t window_lo =
      cfg.window_lo > 0
          ? cfg.window_lo
          : static_cast<std::int64_t>(std::floor(std::sqrt(
                static_cast<double>(cfg.n))));
  const double half = out.target > 0 ? out.target : 1e-12;
  const double width = 2.0 * half / bins;
  out.bin_centers.resize(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    out.bin_centers[static_cast<std::size_t>(b)] = -half + (b + 0.5) * width;
  }
  std::vector<std::vector<std::int64_t>> per_seed(
      static_cast<std::size_t>(cfg.seeds),
      std::vector<std::int64_t>(static_cast<std::size_t>(bins), 0));

  const NormalizerTable table(cfg.n);
  const double beta = coeffs.sum();
  parallel_for(cfg.seeds, cfg.threads, [&](std::int64_t s) {
    auto& counts = per_seed[static_cast<std::size_t>(s)];
    std::function<void(std::int64_t, double)> visit =
        [&counts, half, width, bins](std::int64_t, double v) {
          if (v < -half || v > half) return;
          int b = static_cast<int>((v + half) / width);
          b = std::clamp(b, 0, bins - 1);
          ++counts[static_cast<std::size_t>(b)];
        };
    run_seed(coeffs, gen, policy, cfg, m, window_lo,
             static_cast<std::uint64_t>(s), table, beta, &visit);
  });
  out.counts.assign(static_cast<std::size_t>(bins), 0);
  for (const auto& row : per_seed) {
    for (int b = 0; b < bins; ++b) {
      out.counts[static_cast<std::size_t>(b)] += row[static_cast<std::size_t>(b)];
    }
  }
  return out;
}

bool ClusterCoverage::interior_covered(double frac) const {
  for (std::size_t b = 0; b < bin_centers.size(); ++b) {
    if (std::fabs(bin_centers[b]) <= frac * target && counts[b] == 0) {
      return false;
    }
  }
  return true;
}

nlohmann::json LilEstimate::to_json() const {
  return nlohmann::json{{"per_seed_max", per_seed_max},
                        {"per_seed_residual", per_seed_residual},
                        {"median", median},
                        {"target", target},
                        {"sigma_bar", sigma_bar},
                        {"premises_ok", premises_ok},
                        {"premise_note", premise_note},
                        {"cutoff_m", cutoff_m}};
}

std::string LilEstimate::to_csv() const {
  std::ostringstream os;
  os << "seed,max_over_window,residual,target\n";
  os.precision(17);
  for (std::size_t s = 0; s < per_seed_max.size(); ++s) {
    os << s << ',' << per_seed_max[s] << ',' << per_seed_residual[s] << ','
       << target << '\n';
  }
  return os.str();
}

nlohmann::json ClusterCoverage::to_json() const {
  return nlohmann::json{{"target", target},
                        {"bin_centers", bin_centers},
                        {"counts", counts}};
}

}  // namespace sublin
