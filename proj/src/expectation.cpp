#include "sublin/expectation.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "sublin/errors.hpp"

namespace sublin {

GeneratorSet::GeneratorSet(std::vector<Measure> m, std::string l)
    : measures(std::move(m)), label(std::move(l)) {
  if (measures.empty()) throw Error("generator set must be nonempty");
}

GeneratorSet GeneratorSet::singleton(Measure m, std::string label) {
  std::vector<Measure> v;
  v.push_back(std::move(m));
  return GeneratorSet(std::move(v), std::move(label));
}

bool GeneratorSet::all_discrete() const {
  return std::all_of(measures.begin(), measures.end(),
                     [](const Measure& m) { return m.is_discrete(); });
}

bool GeneratorSet::all_samplable() const {
  return std::all_of(measures.begin(), measures.end(),
                     [](const Measure& m) { return m.samplable(); });
}

nlohmann::json GeneratorSet::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& m : measures) arr.push_back(m.to_json());
  return nlohmann::json{{"label", label}, {"measures", arr}};
}

GeneratorSet GeneratorSet::from_json(const nlohmann::json& j) {
  if (j.is_object() && j.contains("kind")) {
    // A bare measure doubles as a singleton set.
    return singleton(Measure::from_json(j));
  }
  if (!j.is_object() || !j.contains("measures")) {
    throw Error("generator set JSON needs a 'measures' array or a bare measure");
  }
  std::vector<Measure> ms;
  for (const auto& mj : j.at("measures")) ms.push_back(Measure::from_json(mj));
  return GeneratorSet(std::move(ms), j.value("label", ""));
}

double upper_expectation(const GeneratorSet& gen, const TestFunction& phi,
                         double rel_tol) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < gen.measures.size(); ++i) {
    double v;
    try {
      v = gen.measures[i].expect(phi, rel_tol);
    } catch (const DivergentIntegral& e) {
      throw DivergentIntegral(
          "generator " + std::to_string(i) + " (" +
              gen.measures[i].kind_name() + ")",
          std::string(e.what()) + " [generator " + std::to_string(i) + "]");
    }
    best = std::max(best, v);
  }
  return best;
}

double conjugate_expectation(const GeneratorSet& gen, const TestFunction& phi,
                             double rel_tol) {
  return -upper_expectation(gen, phi.negated(), rel_tol);
}

double capacity_upper(const GeneratorSet& gen, const EventSet& event) {
  double best = 0.0;
  for (const auto& m : gen.measures) best = std::max(best, m.prob(event));
  return best;
}

double capacity_lower(const GeneratorSet& gen, const EventSet& event) {
  return 1.0 - capacity_upper(gen, event.complement());
}

double abs_survival_upper(const GeneratorSet& gen, double x) {
  double best = 0.0;
  for (const auto& m : gen.measures) best = std::max(best, m.abs_survival(x));
  return best;
}

double truncate(double x, double c) {
  if (!(c > 0)) throw Error("truncate requires c > 0");
  return std::max(-c, std::min(x, c));
}

std::vector<double> default_truncation_schedule() {
  std::vector<double> s;
  s.reserve(41);
  for (int k = 0; k <= 40; ++k) s.push_back(std::ldexp(1.0, k));
  return s;
}

namespace {

ExtendedExpectation truncated_limit(
    const GeneratorSet& gen, const std::function<TestFunction(double)>& clamp_at,
    std::vector<double> schedule, double tol) {
  if (schedule.empty()) schedule = default_truncation_schedule();
  ExtendedExpectation out;
  bool have_prev = false;
  double prev = 0.0;
  for (double c : schedule) {
    const double v = upper_expectation(gen, clamp_at(c));
    if (have_prev && std::fabs(v - prev) < tol) {
      out.value = v;
      out.converged = true;
      out.c_used = c;
      return out;
    }
    prev = v;
    have_prev = true;
  }
  out.value = prev;
  out.converged = false;
  out.c_used = schedule.back();
  return out;
}

}  // namespace

ExtendedExpectation extended_expectation(const GeneratorSet& gen,
                                         std::vector<double> c_schedule,
                                         double tol) {
  return truncated_limit(
      gen, [](double c) { return TestFunction::clamp(c); },
      std::move(c_schedule), tol);
}

ExtendedExpectation extended_expectation_negated(const GeneratorSet& gen,
                                                 std::vector<double> c_schedule,
                                                 double tol) {
  return truncated_limit(
      gen, [](double c) { return TestFunction::clamp(c).negated(); },
      std::move(c_schedule), tol);
}

ExtendedExpectation extended_second_moment(const GeneratorSet& gen,
                                           std::vector<double> c_schedule,
                                           double tol) {
  // X^2 is nonnegative, so clamping the square from above is the truncation.
  if (c_schedule.empty()) {
    // squares need a taller default ladder
    for (int k = 0; k <= 80; k += 2) c_schedule.push_back(std::ldexp(1.0, k));
  }
  return truncated_limit(
      gen, [](double c) { return TestFunction::clamped_square(c); },
      std::move(c_schedule), tol);
}

}  // namespace sublin
