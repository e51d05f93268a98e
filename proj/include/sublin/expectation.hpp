#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sublin/choquet.hpp"
#include "sublin/events.hpp"
#include "sublin/measure.hpp"
#include "sublin/test_function.hpp"

namespace sublin {

// A nonempty finite family of classical laws. Its upper envelope plays the
// sub-linear expectation; a singleton recovers an ordinary probability space.
struct GeneratorSet {
  std::vector<Measure> measures;
  std::string label;

  GeneratorSet(std::vector<Measure> m, std::string l = "");
  static GeneratorSet singleton(Measure m, std::string label = "");

  std::size_t size() const { return measures.size(); }
  bool all_discrete() const;
  bool all_samplable() const;

  nlohmann::json to_json() const;
  static GeneratorSet from_json(const nlohmann::json& j);
};

// max over the generators of E_theta[phi(X)].
double upper_expectation(const GeneratorSet& gen, const TestFunction& phi,
                         double rel_tol = 1e-8);

// -upper_expectation(gen, -phi) = min over the generators.
double conjugate_expectation(const GeneratorSet& gen, const TestFunction& phi,
                             double rel_tol = 1e-8);

// Capacity pair: V(A) = max P_theta(A), v(A) = 1 - V(A^c).
double capacity_upper(const GeneratorSet& gen, const EventSet& event);
double capacity_lower(const GeneratorSet& gen, const EventSet& event);

// Upper envelope of P(|X| >= x); the survival map feeding the Choquet
// functionals.
double abs_survival_upper(const GeneratorSet& gen, double x);

// (-c) v x ^ c
double truncate(double x, double c);

struct ExtendedExpectation {
  double value = 0.0;
  bool converged = false;
  double c_used = 0.0;  // truncation level at which the limit settled
};

// lim over the truncation schedule of the upper expectation of the clamped
// variable. Non-convergence is a flag, not an error.
ExtendedExpectation extended_expectation(const GeneratorSet& gen,
                                         std::vector<double> c_schedule = {},
                                         double tol = 1e-9);

// Same truncated limit for X^2 (upper second moment).
ExtendedExpectation extended_second_moment(const GeneratorSet& gen,
                                           std::vector<double> c_schedule = {},
                                           double tol = 1e-9);

// Truncated limit of -X, so that [-mean_lower, mean_upper] brackets the mean.
ExtendedExpectation extended_expectation_negated(const GeneratorSet& gen,
                                                 std::vector<double> c_schedule = {},
                                                 double tol = 1e-9);

std::vector<double> default_truncation_schedule();

}  // namespace sublin
