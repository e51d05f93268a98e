#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sublin/events.hpp"
#include "sublin/test_function.hpp"

namespace sublin {

enum class ParetoSign { Positive, Negative, Symmetric };

// A one-dimensional law exposing survival probabilities, test-function
// integration and (where possible) quantile-transform sampling. Immutable
// after construction; all queries are pure.
class Measure {
 public:
  static Measure discrete(std::vector<std::pair<double, double>> support);
  static Measure point_mass(double v);
  static Measure uniform_on(std::vector<double> values);
  static Measure normal(double mean, double sd);
  static Measure pareto(double alpha, double xmin, ParetoSign sign);
  // G(x) = P(|X| > x) on [0, inf); neg_fraction of the mass sits on the
  // negative axis. Assumed atomless away from zero.
  static Measure from_survival(std::function<double(double)> g,
                               double neg_fraction, bool samplable = true);
  // Q non-decreasing on (0,1); X = Q(U).
  static Measure from_quantile(std::function<double(double)> q);

  double prob_greater(double t) const;   // P(X > t)
  double prob_at_least(double t) const;  // P(X >= t)
  double prob(const EventSet& event) const;
  double abs_survival(double x) const;   // P(|X| >= x)

  // E[phi(X)] by exact summation (discrete) or adaptive quadrature.
  // Throws DivergentIntegral when the integral fails to converge.
  double expect(const TestFunction& phi, double rel_tol = 1e-8) const;

  bool samplable() const;
  double sample(double u) const;  // quantile transform, u in (0,1)

  // Atoms and kinks relevant for quadrature splitting.
  std::vector<double> breakpoints() const;
  // sup |X|, +inf when unbounded or unknown.
  double abs_bound() const;

  bool is_discrete() const;
  // Discrete accessors (throw for other kinds).
  const std::vector<double>& values() const;
  const std::vector<double>& probabilities() const;

  std::string kind_name() const;
  nlohmann::json to_json() const;
  static Measure from_json(const nlohmann::json& j);

 private:
  struct Discrete {
    std::vector<double> values;  // ascending, ties merged
    std::vector<double> probs;
    std::vector<double> suffix;  // suffix[i] = P(X >= values[i])
    std::vector<double> prefix;  // prefix[i] = P(X <= values[i])
  };
  struct Normal {
    double mean, sd;
  };
  struct Pareto {
    double alpha, xmin;
    ParetoSign sign;
  };
  struct SurvivalDef {
    std::function<double(double)> g;
    double neg_fraction;
    bool samplable;
  };
  struct QuantileDef {
    std::function<double(double)> q;
  };

  using Impl = std::variant<Discrete, Normal, Pareto, SurvivalDef, QuantileDef>;
  explicit Measure(Impl impl) : impl_(std::move(impl)) {}
  static double survival_quantile(const SurvivalDef& m, double v);
  Impl impl_;
};

}  // namespace sublin
