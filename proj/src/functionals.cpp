#include "sublin/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <nlohmann/json.hpp>

#include "sublin/errors.hpp"
#include "sublin/normalizer.hpp"

namespace sublin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogKink = std::exp(1.0);          // clamped_log kink
const double kLoglogKink = std::exp(M_E);       // clamped_loglog kink

double invert_increasing(const RealFn& g, double t) {
  if (t <= 0.0) return 0.0;
  double hi = 1.0;
  int guard = 0;
  while (g(hi) < t) {
    hi *= 2.0;
    if (++guard > 1100) throw Error("transform inverse failed to bracket");
  }
  double lo = hi > 1.0 ? hi * 0.5 : 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) >= t) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
  }
  return hi;
}

// Breakpoints of the pushforward survival: atoms/kinks of |X| and the
// convention kinks, mapped through g.
std::vector<double> pushforward_breakpoints(const GeneratorSet& gen,
                                            const RealFn& g) {
  std::vector<double> out;
  auto add = [&out, &g](double x) {
    if (x > 0 && std::isfinite(x)) out.push_back(g(x));
  };
  for (const auto& m : gen.measures) {
    for (double b : m.breakpoints()) add(std::fabs(b));
  }
  add(kLogKink);
  add(kLoglogKink);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

using GK15 = boost::math::quadrature::gauss_kronrod<double, 15>;

}  // namespace

ChoquetResult choquet_transformed_abs(const GeneratorSet& gen, const RealFn& g,
                                      const RealFn& g_inverse,
                                      const ChoquetOptions& opts) {
  auto survival = [&gen, &g_inverse](double t) {
    if (t <= 0.0) return 1.0;
    return abs_survival_upper(gen, g_inverse(t));
  };
  return choquet_integral(survival, pushforward_breakpoints(gen, g), opts);
}

ChoquetResult lil_moment(const GeneratorSet& gen, const ChoquetOptions& opts) {
  auto g = [](double x) { return x * x / clamped_loglog(x); };
  auto ginv = [&g](double t) { return invert_increasing(g, t); };
  return choquet_transformed_abs(gen, g, ginv, opts);
}

ChoquetResult max_moment_functional(const GeneratorSet& gen, double r,
                                    const ChoquetOptions& opts) {
  if (!(r > 0)) throw Error("max_moment_functional requires r > 0");
  if (r < 2.0) return lil_moment(gen, opts);
  if (r == 2.0) {
    auto g = [](double x) {
      return x * x * clamped_log(x) / clamped_loglog(x);
    };
    auto ginv = [&g](double t) { return invert_increasing(g, t); };
    return choquet_transformed_abs(gen, g, ginv, opts);
  }
  return choquet_abs_power(gen, r, opts);
}

ChoquetResult choquet_abs_power(const GeneratorSet& gen, double r,
                                const ChoquetOptions& opts) {
  if (!(r > 0)) throw Error("choquet_abs_power requires r > 0");
  auto g = [r](double x) { return std::pow(x, r); };
  auto ginv = [r](double t) { return t <= 0 ? 0.0 : std::pow(t, 1.0 / r); };
  return choquet_transformed_abs(gen, g, ginv, opts);
}

ChoquetResult choquet_pos_power(const GeneratorSet& gen, double r,
                                const ChoquetOptions& opts) {
  if (!(r > 0)) throw Error("choquet_pos_power requires r > 0");
  auto survival = [&gen, r](double t) {
    if (t <= 0.0) return 1.0;
    const double x = std::pow(t, 1.0 / r);
    double best = 0.0;
    for (const auto& m : gen.measures) {
      best = std::max(best, m.prob_at_least(x));
    }
    return best;
  };
  std::vector<double> bps;
  for (const auto& m : gen.measures) {
    for (double b : m.breakpoints()) {
      if (b > 0) bps.push_back(std::pow(b, r));
    }
  }
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  return choquet_integral(survival, bps, opts);
}

FunctionalReport functional_report(const GeneratorSet& gen, double r) {
  FunctionalReport rep;
  rep.r = r;
  const auto second = extended_second_moment(gen);
  rep.sigma_sq_finite = second.converged;
  rep.sigma_sq = second.converged ? second.value : kInf;
  rep.lil = lil_moment(gen);
  rep.max_moment = max_moment_functional(gen, r);
  const auto up = extended_expectation(gen);
  const auto dn = extended_expectation_negated(gen);
  rep.mean_upper = up.value;
  rep.mean_lower = -dn.value;
  rep.means_converged = up.converged && dn.converged;
  if (r >= 2.0 && rep.max_moment.finite()) {
    rep.consistent = rep.lil.finite() && rep.sigma_sq_finite;
  }
  return rep;
}

nlohmann::json FunctionalReport::to_json() const {
  auto enc = [](const ChoquetResult& c) {
    return nlohmann::json{{"value", c.finite() ? nlohmann::json(c.value)
                                               : nlohmann::json("inf")},
                          {"abs_error", c.abs_error},
                          {"status", to_string(c.status)}};
  };
  return nlohmann::json{
      {"r", r},
      {"sigma_sq", sigma_sq_finite ? nlohmann::json(sigma_sq)
                                   : nlohmann::json("inf")},
      {"lil_moment", enc(lil)},
      {"max_moment", enc(max_moment)},
      {"mean_upper", mean_upper},
      {"mean_lower", mean_lower},
      {"means_converged", means_converged},
      {"consistent", consistent}};
}

std::string FunctionalReport::to_csv() const {
  std::ostringstream os;
  os << "r,sigma_sq,lil_moment,max_moment,mean_upper,mean_lower\n";
  os.precision(17);
  os << r << ',' << (sigma_sq_finite ? sigma_sq : kInf) << ','
     << (lil.finite() ? lil.value : kInf) << ','
     << (max_moment.finite() ? max_moment.value : kInf) << ',' << mean_upper
     << ',' << mean_lower << '\n';
  return os.str();
}

bool SeriesCurve::cauchy(double rel) const {
  if (term_diverged) return false;
  if (partial_sums.size() < 2) return false;
  const double total = partial_sums.back();
  if (!std::isfinite(total)) return false;
  return last_increment() < rel * std::max(total, 1e-300);
}

double SeriesCurve::last_increment() const {
  const std::size_t n = partial_sums.size();
  if (n < 2) return 0.0;
  return partial_sums[n - 1] - partial_sums[n - 2];
}

nlohmann::json SeriesCurve::to_json() const {
  nlohmann::json j{{"checkpoints", checkpoints},
                   {"terms", terms},
                   {"partial_sums", partial_sums},
                   {"term_diverged", term_diverged},
                   {"cauchy", cauchy()}};
  if (has_integral_form) j["integral_form"] = integral_form;
  return j;
}

std::string SeriesCurve::to_csv() const {
  std::ostringstream os;
  os << "n,term,partial_sum\n";
  os.precision(17);
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    os << checkpoints[i] << ',' << terms[i] << ',' << partial_sums[i] << '\n';
  }
  return os.str();
}

std::vector<std::int64_t> dyadic_checkpoints(std::int64_t n_max) {
  std::vector<std::int64_t> cps;
  for (std::int64_t n = 1; n <= n_max; n *= 2) cps.push_back(n);
  if (cps.empty() || cps.back() != n_max) cps.push_back(n_max);
  return cps;
}

namespace {

// Envelope survival of |X| with precollected split points (atoms, kinks).
struct AbsSurvival {
  const GeneratorSet& gen;
  std::vector<double> splits;

  explicit AbsSurvival(const GeneratorSet& g) : gen(g) {
    for (const auto& m : gen.measures) {
      for (double b : m.breakpoints()) {
        const double a = std::fabs(b);
        if (a > 0 && std::isfinite(a)) splits.push_back(a);
      }
    }
    std::sort(splits.begin(), splits.end());
    splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
  }

  double operator()(double x) const { return abs_survival_upper(gen, x); }

  double integrate_weighted(double lo, double hi, double p) const {
    // int_lo^hi x^{p-1} V(|X| >= x) dx, split at atoms
    double total = 0.0;
    double a = lo;
    auto piece = [this, p](double u, double v) {
      if (v <= u) return 0.0;
      auto f = [this, p](double x) {
        return std::pow(x, p - 1.0) * (*this)(x);
      };
      return GK15::integrate(f, u, v, 3, 1e-10);
    };
    for (double s : splits) {
      if (s <= a) continue;
      if (s >= hi) break;
      total += piece(a, s);
      a = s;
    }
    total += piece(a, hi);
    return total;
  }
};

}  // namespace

SeriesCurve series_truncated_moment(const GeneratorSet& gen, double p,
                                    double delta, std::int64_t n_max,
                                    std::vector<std::int64_t> checkpoints) {
  if (!(p > 2)) throw Error("series_truncated_moment requires p > 2");
  if (!(delta > 0)) throw Error("series_truncated_moment requires delta > 0");
  if (checkpoints.empty()) checkpoints = dyadic_checkpoints(n_max);
  AbsSurvival surv(gen);

  SeriesCurve curve;
  double running = 0.0;
  double w = 0.0;        // int_0^c x^{p-1} V dx at c = delta * a_n
  double c_prev = 0.0;
  bool tail_gone = false;
  std::size_t cp = 0;
  for (std::int64_t n = 1; n <= n_max && cp < checkpoints.size(); ++n) {
    const double a_n = normalizer(n);
    const double c = delta * a_n;
    if (!tail_gone) {
      if (surv(c_prev) == 0.0) {
        tail_gone = true;  // non-increasing, so the increment is 0 from here
      } else {
        w += surv.integrate_weighted(c_prev, c, p);
      }
    }
    c_prev = c;
    const double term = p * w / std::pow(a_n, p);
    running += term;
    if (n == checkpoints[cp]) {
      curve.checkpoints.push_back(n);
      curve.terms.push_back(term);
      curve.partial_sums.push_back(running);
      ++cp;
    }
  }
  return curve;
}

namespace {

// C[((|X| - a)^+)^r] = int_0^inf V(|X| >= a + t^{1/r}) dt, via the rescaled
// variable t = a^r u so that the integrand decays on a unit scale.
ChoquetResult excess_choquet(const AbsSurvival& surv, double a, double r) {
  ChoquetResult out;
  if (surv(a) == 0.0) return out;
  QuadratureOptions opts;
  opts.rel_tol = 1e-9;
  opts.abs_floor = 0.0;
  auto f = [&surv, a, r](double u) {
    return u <= 0 ? surv(a) : surv(a * (1.0 + std::pow(u, 1.0 / r)));
  };
  std::vector<double> bps;
  for (double s : surv.splits) {
    if (s > a) bps.push_back(std::pow((s - a) / a, r));
  }
  TailIntegral ti = integrate_tail(f, 0.0, +1, bps, opts);
  if (ti.diverging) {
    out.value = kInf;
    out.status = ChoquetStatus::Diverging;
    return out;
  }
  out.value = ti.value * std::pow(a, r);
  out.abs_error = ti.abs_error * std::pow(a, r);
  if (ti.truncated) out.status = ChoquetStatus::TailTruncated;
  return out;
}

// For integer r the excess moment expands into tail power moments
// M_j(a) = int_a^inf x^j V dx, which update incrementally along the a_n grid.
class ExcessMomentLadder {
 public:
  ExcessMomentLadder(const AbsSurvival& surv, int r, double a0)
      : surv_(surv), r_(r), cursor_(a0) {
    tail_moments_.resize(static_cast<std::size_t>(r));
    QuadratureOptions opts;
    opts.rel_tol = 1e-10;
    opts.abs_floor = 0.0;
    for (int j = 0; j < r_; ++j) {
      auto f = [this, j](double x) {
        return std::pow(x, static_cast<double>(j)) * surv_(x);
      };
      TailIntegral ti = integrate_tail(f, a0, +1, surv_.splits, opts);
      if (ti.diverging) {
        diverged_ = true;
        return;
      }
      tail_moments_[static_cast<std::size_t>(j)] = ti.value;
    }
  }

  bool diverged() const { return diverged_; }

  // r int_a^inf (x - a)^{r-1} V dx with a moving right along the grid.
  double value_at(double a) {
    if (a > cursor_) {
      for (int j = 0; j < r_; ++j) {
        tail_moments_[static_cast<std::size_t>(j)] -=
            surv_.integrate_weighted(cursor_, a, static_cast<double>(j) + 1.0);
      }
      cursor_ = a;
    }
    double acc = 0.0;
    double binom = 1.0;  // C(r-1, j)
    for (int j = r_ - 1; j >= 0; --j) {
      const double coeff =
          binom * std::pow(-a, static_cast<double>(r_ - 1 - j));
      acc += coeff * std::max(0.0, tail_moments_[static_cast<std::size_t>(j)]);
      binom *= static_cast<double>(j) / static_cast<double>(r_ - j);
    }
    return std::max(0.0, static_cast<double>(r_) * acc);
  }

 private:
  const AbsSurvival& surv_;
  int r_;
  double cursor_;
  std::vector<double> tail_moments_;
  bool diverged_ = false;
};

}  // namespace

SeriesCurve series_excess_moment(const GeneratorSet& gen, double r,
                                 std::int64_t n_max,
                                 std::vector<std::int64_t> checkpoints,
                                 bool with_integral_form) {
  if (!(r > 0)) throw Error("series_excess_moment requires r > 0");
  if (checkpoints.empty()) checkpoints = dyadic_checkpoints(n_max);
  AbsSurvival surv(gen);

  const bool integer_r = r == std::floor(r) && r <= 8.0;
  std::optional<ExcessMomentLadder> ladder;
  if (integer_r) {
    ladder.emplace(surv, static_cast<int>(r), normalizer(1));
    if (ladder->diverged()) ladder.reset();
  }

  SeriesCurve curve;
  double running = 0.0;
  std::size_t cp = 0;
  for (std::int64_t n = 1; n <= n_max && cp < checkpoints.size(); ++n) {
    const double a_n = normalizer(n);
    double term;
    if (integer_r && !ladder.has_value()) {
      curve.term_diverged = true;  // the n=1 tail moment already diverges
      term = kInf;
    } else if (curve.term_diverged) {
      term = kInf;
    } else if (surv(a_n) == 0.0) {
      term = 0.0;
    } else if (ladder.has_value()) {
      term = ladder->value_at(a_n) / std::pow(a_n, r);
    } else {
      const ChoquetResult c = excess_choquet(surv, a_n, r);
      if (c.status == ChoquetStatus::Diverging) {
        curve.term_diverged = true;
        term = kInf;
      } else {
        term = c.value / std::pow(a_n, r);
      }
    }
    running += term;
    if (n == checkpoints[cp]) {
      curve.checkpoints.push_back(n);
      curve.terms.push_back(term);
      curve.partial_sums.push_back(running);
      ++cp;
    }
  }

  if (with_integral_form && !curve.term_diverged) {
    // int_16^N a_y^{-r} int_{a_y}^inf r u^{r-1} V(|X| > u) du dy
    auto inner = [&surv, r](double y) {
      const double a = normalizer_at(y);
      if (surv(a) == 0.0) return 0.0;
      QuadratureOptions opts;
      opts.rel_tol = 1e-8;
      opts.abs_floor = 0.0;
      auto f = [&surv, a, r](double t) {
        return surv(std::pow(std::max(t, std::pow(a, r)), 1.0 / r));
      };
      // substitute t = u^r: inner = int_{a^r}^inf V(t^{1/r}) dt
      TailIntegral ti = integrate_tail(f, std::pow(a, r), +1, {}, opts);
      return ti.diverging ? kInf : ti.value / std::pow(a, r);
    };
    double total = 0.0;
    double lo = 16.0;
    const double n_end = static_cast<double>(n_max);
    while (lo < n_end) {
      const double hi = std::min(lo * 2.0, n_end);
      total += integrate_finite(inner, lo, hi, {}, 1e-7);
      lo = hi;
    }
    curve.integral_form = total;
    curve.has_integral_form = true;
  }
  return curve;
}

double markov_choquet_bound(double C0, double p, double r) {
  if (!(C0 > 0) || !(p > 0) || !(r > 0) || r >= p) {
    throw Error("markov_choquet_bound requires C0, p > 0 and 0 < r < p");
  }
  return r / (p - r) * std::pow(C0, r / p);
}

double markov_integral_bound(double C0, double p, double r) {
  if (!(C0 > 0) || !(p > 0) || !(r > 0) || r >= p) {
    throw Error("markov_integral_bound requires C0, p > 0 and 0 < r < p");
  }
  const double x0 = std::pow(C0, r / p);  // where C0 x^{-p/r} crosses 1
  QuadratureOptions opts;
  opts.rel_tol = 1e-10;
  opts.abs_floor = 0.0;
  auto f = [C0, p, r](double x) {
    return std::min(1.0, C0 * std::pow(x, -p / r));
  };
  TailIntegral tail = integrate_tail(f, x0, +1, {}, opts);
  if (tail.diverging) return kInf;
  return x0 + tail.value;
}

bool markov_premise_holds(const GeneratorSet& gen, double C0, double p) {
  for (int k = -20; k <= 60; ++k) {
    const double x = std::ldexp(1.0, k);
    if (std::pow(x, p) * abs_survival_upper(gen, x) > C0 * (1.0 + 1e-9)) {
      return false;
    }
  }
  return true;
}

}  // namespace sublin
