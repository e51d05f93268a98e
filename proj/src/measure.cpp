#include "sublin/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>
#include <nlohmann/json.hpp>

#include "sublin/errors.hpp"
#include "sublin/quadrature.hpp"

namespace sublin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double checked_eval(const TestFunction& phi, double x) {
  const double v = phi(x);
  if (!std::isfinite(v)) {
    throw Error("test function returned a non-finite value at x=" +
                std::to_string(x));
  }
  const double env = phi.declared_envelope(x);
  if (std::fabs(v) > env * (1.0 + 1e-9) + 1e-300) {
    throw Error("test function violates its declared envelope at x=" +
                std::to_string(x));
  }
  return v;
}

// Pairwise Lipschitz probe for the bounded-Lipschitz class on a fixed grid.
void lipschitz_probe(const TestFunction& phi) {
  if (phi.kind() != TestFunction::Kind::BoundedLipschitz) return;
  const double lip = phi.lipschitz();
  double prev_x = -64.0;
  double prev_v = checked_eval(phi, prev_x);
  for (int i = 1; i <= 128; ++i) {
    const double x = -64.0 + i;
    const double v = checked_eval(phi, x);
    if (std::fabs(v - prev_v) >
        lip * (x - prev_x) * (1.0 + 1e-9) + 1e-12) {
      throw Error("test function violates its declared Lipschitz constant near x=" +
                  std::to_string(x));
    }
    prev_x = x;
    prev_v = v;
  }
}

double bisect_increasing(const std::function<bool(double)>& above, double lo,
                         double hi) {
  // smallest point where `above` flips true; assumes monotone predicate
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (above(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo <= 1e-12 * std::max(1.0, std::fabs(hi))) break;
  }
  return hi;
}

}  // namespace

Measure Measure::discrete(std::vector<std::pair<double, double>> support) {
  if (support.empty()) throw Error("discrete measure needs a nonempty support");
  std::sort(support.begin(), support.end());
  Discrete d;
  for (const auto& [v, p] : support) {
    if (!std::isfinite(v)) throw Error("discrete support value must be finite");
    if (p < 0.0) throw Error("discrete probability must be >= 0");
    if (!d.values.empty() && d.values.back() == v) {
      d.probs.back() += p;  // merge ties
    } else {
      d.values.push_back(v);
      d.probs.push_back(p);
    }
  }
  double sum = 0.0;
  for (double p : d.probs) sum += p;
  if (std::fabs(sum - 1.0) > 1e-12) {
    throw Error("discrete probabilities sum to " + std::to_string(sum) +
                ", expected 1 within 1e-12");
  }
  const std::size_t n = d.values.size();
  d.suffix.resize(n);
  d.prefix.resize(n);
  double acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    acc += d.probs[i];
    d.suffix[i] = acc;
  }
  acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += d.probs[i];
    d.prefix[i] = acc;
  }
  return Measure(Impl{std::move(d)});
}

Measure Measure::point_mass(double v) { return discrete({{v, 1.0}}); }

Measure Measure::uniform_on(std::vector<double> values) {
  if (values.empty()) throw Error("uniform_on needs a nonempty list");
  std::vector<std::pair<double, double>> support;
  const double p = 1.0 / static_cast<double>(values.size());
  support.reserve(values.size());
  for (double v : values) support.emplace_back(v, p);
  return discrete(std::move(support));
}

Measure Measure::normal(double mean, double sd) {
  if (!(sd > 0)) throw Error("normal requires sd > 0");
  return Measure(Impl{Normal{mean, sd}});
}

Measure Measure::pareto(double alpha, double xmin, ParetoSign sign) {
  if (!(alpha > 0) || !(xmin > 0)) throw Error("pareto requires alpha, xmin > 0");
  return Measure(Impl{Pareto{alpha, xmin, sign}});
}

Measure Measure::from_survival(std::function<double(double)> g,
                               double neg_fraction, bool samplable) {
  if (neg_fraction < 0 || neg_fraction > 1) {
    throw Error("neg_fraction must lie in [0, 1]");
  }
  if (g(0.0) > 1.0 + 1e-12) throw Error("survival function must satisfy G(0) <= 1");
  // Monotone probe on a geometric grid.
  double prev = g(0.0);
  for (int k = -10; k <= 40; ++k) {
    const double x = std::ldexp(1.0, k);
    const double v = g(x);
    if (v < -1e-12 || v > 1.0 + 1e-12) {
      throw Error("survival function left [0, 1] at x=" + std::to_string(x));
    }
    if (v > prev + 1e-10) {
      throw Error("survival function increased at x=" + std::to_string(x));
    }
    prev = v;
  }
  return Measure(Impl{SurvivalDef{std::move(g), neg_fraction, samplable}});
}

Measure Measure::from_quantile(std::function<double(double)> q) {
  double prev = q(0.002);
  for (int i = 1; i <= 200; ++i) {
    const double u = 0.002 + 0.996 * i / 200.0;
    const double v = q(u);
    if (v < prev - 1e-10) {
      throw Error("quantile function decreased at u=" + std::to_string(u));
    }
    prev = v;
  }
  return Measure(Impl{QuantileDef{std::move(q)}});
}

double Measure::prob_greater(double t) const {
  return std::visit(
      [t](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Discrete>) {
          auto it = std::upper_bound(m.values.begin(), m.values.end(), t);
          if (it == m.values.end()) return 0.0;
          return m.suffix[static_cast<std::size_t>(it - m.values.begin())];
        } else if constexpr (std::is_same_v<T, Normal>) {
          if (t == -kInf) return 1.0;
          if (t == kInf) return 0.0;
          return 0.5 * std::erfc((t - m.mean) / (m.sd * M_SQRT2));
        } else if constexpr (std::is_same_v<T, Pareto>) {
          const double pos = m.sign == ParetoSign::Negative
                                 ? 0.0
                                 : (m.sign == ParetoSign::Symmetric ? 0.5 : 1.0);
          const double neg = 1.0 - pos;
          auto tail = [&m](double x) {
            return x <= m.xmin ? 1.0 : std::pow(x / m.xmin, -m.alpha);
          };
          if (t >= 0) return pos * tail(t);
          return pos + neg * (1.0 - tail(-t));
        } else if constexpr (std::is_same_v<T, SurvivalDef>) {
          const double q = m.neg_fraction;
          if (t >= 0) return (1.0 - q) * m.g(t);
          return (1.0 - q) + q * (1.0 - m.g(-t));
        } else {
          // QuantileDef: inf{u : Q(u) > t}
          if (m.q(1.0 - 1e-15) <= t) return 0.0;
          if (m.q(1e-15) > t) return 1.0;
          const double u = bisect_increasing(
              [&m, t](double v) { return m.q(v) > t; }, 1e-15, 1.0 - 1e-15);
          return 1.0 - u;
        }
      },
      impl_);
}

double Measure::prob_at_least(double t) const {
  return std::visit(
      [t, this](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Discrete>) {
          auto it = std::lower_bound(m.values.begin(), m.values.end(), t);
          if (it == m.values.end()) return 0.0;
          return m.suffix[static_cast<std::size_t>(it - m.values.begin())];
        } else if constexpr (std::is_same_v<T, QuantileDef>) {
          if (m.q(1.0 - 1e-15) < t) return 0.0;
          if (m.q(1e-15) >= t) return 1.0;
          const double u = bisect_increasing(
              [&m, t](double v) { return m.q(v) >= t; }, 1e-15, 1.0 - 1e-15);
          return 1.0 - u;
        } else {
          return prob_greater(t);  // atomless kinds
        }
      },
      impl_);
}

double Measure::prob(const EventSet& event) const {
  double total = 0.0;
  for (const Interval& p : event.parts()) {
    const double s_lo = p.lo == -kInf
                            ? 1.0
                            : (p.lo_closed ? prob_at_least(p.lo)
                                           : prob_greater(p.lo));
    const double s_hi = p.hi == kInf
                            ? 0.0
                            : (p.hi_closed ? prob_greater(p.hi)
                                           : prob_at_least(p.hi));
    total += std::max(0.0, s_lo - s_hi);
  }
  return std::min(1.0, total);
}

double Measure::abs_survival(double x) const {
  if (x <= 0) return 1.0;
  return std::min(1.0, prob_at_least(x) + (1.0 - prob_greater(-x)));
}

double Measure::expect(const TestFunction& phi, double rel_tol) const {
  lipschitz_probe(phi);
  return std::visit(
      [&phi, rel_tol, this](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Discrete>) {
          double acc = 0.0;
          for (std::size_t i = 0; i < m.values.size(); ++i) {
            acc += m.probs[i] * checked_eval(phi, m.values[i]);
          }
          return acc;
        } else if constexpr (std::is_same_v<T, Normal>) {
          const double mu = m.mean, sd = m.sd;
          const double norm = 1.0 / (sd * std::sqrt(2.0 * M_PI));
          auto integrand = [&phi, mu, sd, norm](double x) {
            const double z = (x - mu) / sd;
            return checked_eval(phi, x) * norm * std::exp(-0.5 * z * z);
          };
          // Gaussian weight kills polynomial growth well inside 10 sigma.
          return integrate_finite(integrand, mu - 10.0 * sd, mu + 10.0 * sd,
                                  phi.breakpoints(), rel_tol);
        } else if constexpr (std::is_same_v<T, Pareto>) {
          const double pos = m.sign == ParetoSign::Negative
                                 ? 0.0
                                 : (m.sign == ParetoSign::Symmetric ? 0.5 : 1.0);
          const double neg = 1.0 - pos;
          const double a = m.alpha, x0 = m.xmin;
          const double dens_scale = a * std::pow(x0, a);
          double total = 0.0;
          QuadratureOptions opts;
          opts.rel_tol = rel_tol;
          opts.abs_floor = 0.0;
          for (int branch = 0; branch < 2; ++branch) {
            const double w = branch == 0 ? pos : neg;
            if (w == 0.0) continue;
            const double s = branch == 0 ? 1.0 : -1.0;
            auto integrand = [&phi, s, dens_scale, a](double x) {
              return checked_eval(phi, s * x) * dens_scale *
                     std::pow(x, -a - 1.0);
            };
            std::vector<double> bps;
            for (double b : phi.breakpoints()) {
              if (s * b >= x0) bps.push_back(s * b);
            }
            TailIntegral ti = integrate_tail(integrand, x0, +1, bps, opts);
            if (ti.diverging) {
              throw DivergentIntegral(
                  kind_name(), "expectation diverges against " + kind_name());
            }
            total += w * ti.value;
          }
          return total;
        } else if constexpr (std::is_same_v<T, SurvivalDef>) {
          const double q = m.neg_fraction;
          double total = 0.0;
          QuadratureOptions opts;
          opts.rel_tol = rel_tol;
          opts.abs_floor = 0.0;
          for (int branch = 0; branch < 2; ++branch) {
            const double w = branch == 0 ? 1.0 - q : q;
            if (w == 0.0) continue;
            const double s = branch == 0 ? 1.0 : -1.0;
            auto integrand = [&phi, &m, s](double v) {
              return checked_eval(phi, s * survival_quantile(m, v));
            };
            TailIntegral ti = integrate_unit(integrand, opts);
            if (ti.diverging) {
              throw DivergentIntegral(
                  kind_name(), "expectation diverges against " + kind_name());
            }
            total += w * ti.value;
          }
          return total;
        } else {
          QuadratureOptions opts;
          opts.rel_tol = rel_tol;
          opts.abs_floor = 0.0;
          auto integrand = [&phi, &m](double u) {
            return checked_eval(phi, m.q(u));
          };
          TailIntegral ti = integrate_unit(integrand, opts);
          if (ti.diverging) {
            throw DivergentIntegral(kind_name(),
                                    "expectation diverges against " + kind_name());
          }
          return ti.value;
        }
      },
      impl_);
}

// inf{x >= 0 : G(x) <= v}; v near 0 walks out along the tail.
double Measure::survival_quantile(const SurvivalDef& m, double v) {
  if (m.g(0.0) <= v) return 0.0;
  double hi = 1.0;
  int guard = 0;
  while (m.g(hi) > v) {
    hi *= 2.0;
    if (++guard > 1024) {
      throw Error("survival quantile failed to bracket; tail too heavy");
    }
  }
  double lo = hi > 1.0 ? hi * 0.5 : 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (m.g(mid) <= v) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
  }
  return hi;
}

bool Measure::samplable() const {
  return std::visit(
      [](const auto& m) -> bool {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SurvivalDef>) {
          return m.samplable;
        } else {
          (void)m;
          return true;
        }
      },
      impl_);
}

double Measure::sample(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw Error("sample requires u in (0, 1)");
  return std::visit(
      [u](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Discrete>) {
          auto it = std::lower_bound(m.prefix.begin(), m.prefix.end(), u);
          std::size_t i = it == m.prefix.end()
                              ? m.prefix.size() - 1
                              : static_cast<std::size_t>(it - m.prefix.begin());
          return m.values[i];
        } else if constexpr (std::is_same_v<T, Normal>) {
          boost::math::normal_distribution<double> d(m.mean, m.sd);
          return boost::math::quantile(d, u);
        } else if constexpr (std::is_same_v<T, Pareto>) {
          const double pos = m.sign == ParetoSign::Negative
                                 ? 0.0
                                 : (m.sign == ParetoSign::Symmetric ? 0.5 : 1.0);
          const double q = 1.0 - pos;
          auto radius = [&m](double v) {
            return m.xmin * std::pow(v, -1.0 / m.alpha);
          };
          if (u <= q) return -radius(u / q);
          return radius((1.0 - u) / (1.0 - q));
        } else if constexpr (std::is_same_v<T, SurvivalDef>) {
          if (!m.samplable) throw Error("measure is not samplable");
          const double q = m.neg_fraction;
          if (q > 0 && u <= q) return -survival_quantile(m, u / q);
          return survival_quantile(m, (1.0 - u) / (1.0 - q));
        } else {
          return m.q(u);
        }
      },
      impl_);
}

std::vector<double> Measure::breakpoints() const {
  return std::visit(
      [](const auto& m) -> std::vector<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Discrete>) {
          return m.values;
        } else if constexpr (std::is_same_v<T, Pareto>) {
          if (m.sign == ParetoSign::Positive) return {m.xmin};
          if (m.sign == ParetoSign::Negative) return {-m.xmin};
          return {-m.xmin, m.xmin};
        } else if constexpr (std::is_same_v<T, SurvivalDef>) {
          return {0.0};
        } else {
          return {};
        }
      },
      impl_);
}

double Measure::abs_bound() const {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Discrete>) {
          return std::max(std::fabs(m.values.front()),
                          std::fabs(m.values.back()));
        } else {
          (void)m;
          return kInf;
        }
      },
      impl_);
}

bool Measure::is_discrete() const {
  return std::holds_alternative<Discrete>(impl_);
}

const std::vector<double>& Measure::values() const {
  if (!is_discrete()) throw Error("values() requires a discrete measure");
  return std::get<Discrete>(impl_).values;
}

const std::vector<double>& Measure::probabilities() const {
  if (!is_discrete()) throw Error("probabilities() requires a discrete measure");
  return std::get<Discrete>(impl_).probs;
}

std::string Measure::kind_name() const {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Discrete>) return "discrete";
        if constexpr (std::is_same_v<T, Normal>) return "normal";
        if constexpr (std::is_same_v<T, Pareto>) return "pareto";
        if constexpr (std::is_same_v<T, SurvivalDef>) return "survival";
        return "quantile";
      },
      impl_);
}

nlohmann::json Measure::to_json() const {
  using nlohmann::json;
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Discrete>) {
          json support = json::array();
          for (std::size_t i = 0; i < m.values.size(); ++i) {
            support.push_back({m.values[i], m.probs[i]});
          }
          return json{{"kind", "discrete"}, {"support", support}};
        } else if constexpr (std::is_same_v<T, Normal>) {
          return json{{"kind", "normal"}, {"mean", m.mean}, {"sd", m.sd}};
        } else if constexpr (std::is_same_v<T, Pareto>) {
          const char* s = m.sign == ParetoSign::Positive
                              ? "positive"
                              : (m.sign == ParetoSign::Negative ? "negative"
                                                                : "symmetric");
          return json{{"kind", "pareto"},
                      {"alpha", m.alpha},
                      {"xmin", m.xmin},
                      {"sign", s}};
        } else {
          throw Error("callable-backed measures are not JSON-serializable");
        }
      },
      impl_);
}

Measure Measure::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw Error("measure JSON needs a 'kind' tag");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "discrete") {
    std::vector<std::pair<double, double>> support;
    for (const auto& row : j.at("support")) {
      if (!row.is_array() || row.size() != 2) {
        throw Error("discrete support rows must be [value, prob] pairs");
      }
      support.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    return discrete(std::move(support));
  }
  if (kind == "normal") {
    return normal(j.at("mean").get<double>(), j.at("sd").get<double>());
  }
  if (kind == "pareto") {
    const std::string s = j.value("sign", "positive");
    ParetoSign sign;
    if (s == "positive") {
      sign = ParetoSign::Positive;
    } else if (s == "negative") {
      sign = ParetoSign::Negative;
    } else if (s == "symmetric") {
      sign = ParetoSign::Symmetric;
    } else {
      throw Error("pareto sign must be positive|negative|symmetric");
    }
    return pareto(j.at("alpha").get<double>(), j.value("xmin", 1.0), sign);
  }
  throw Error("unknown measure kind '" + kind + "'");
}

}  // namespace sublin
