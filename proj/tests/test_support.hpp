#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "sublin/measure.hpp"

namespace sublin::testing {

// Composite Simpson on a log grid after x = e^u; the tests' independent
// integration route for [x_lo, x_hi] with x_lo > 0.
inline double simpson_log(const std::function<double(double)>& f, double x_lo,
                          double x_hi, int panels = 200000) {
  const double u_lo = std::log(x_lo);
  const double u_hi = std::log(x_hi);
  const double h = (u_hi - u_lo) / (2 * panels);
  auto g = [&f](double u) {
    const double x = std::exp(u);
    return f(x) * x;
  };
  double acc = g(u_lo) + g(u_hi);
  for (int i = 1; i < 2 * panels; ++i) {
    acc += g(u_lo + i * h) * (i % 2 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

// Plain composite Simpson on a linear grid.
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int panels = 100000) {
  const double h = (b - a) / (2 * panels);
  double acc = f(a) + f(b);
  for (int i = 1; i < 2 * panels; ++i) {
    acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

inline Measure random_discrete(std::mt19937_64& rng, int max_support = 6,
                               double span = 4.0) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int support = 1 + static_cast<int>(rng() % max_support);
  std::vector<double> w(static_cast<std::size_t>(support));
  double wsum = 0.0;
  for (auto& x : w) {
    x = 0.05 + unif(rng);
    wsum += x;
  }
  std::vector<std::pair<double, double>> rows;
  for (int i = 0; i < support; ++i) {
    rows.emplace_back(unif(rng) * 2.0 * span - span,
                      w[static_cast<std::size_t>(i)] / wsum);
  }
  return Measure::discrete(rows);
}

}  // namespace sublin::testing
