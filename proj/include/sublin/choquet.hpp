#pragma once

#include <functional>
#include <span>
#include <string>

#include "sublin/quadrature.hpp"

namespace sublin {

enum class ChoquetStatus { Converged, Diverging, TailTruncated };

// Result of a Choquet integral. Infinite values are first-class: a diverging
// positive part yields value = +inf with status Diverging rather than an
// exception.
struct ChoquetResult {
  double value = 0.0;
  double abs_error = 0.0;
  ChoquetStatus status = ChoquetStatus::Converged;

  bool finite() const { return status == ChoquetStatus::Converged; }
};

std::string to_string(ChoquetStatus s);

struct ChoquetOptions {
  double tol = 1e-8;
  double t_cap = 1024.0;  // divergence detection engages past this point
};

// C[X] = int_0^inf s(t) dt + int_{-inf}^0 [s(t) - 1] dt for a survival map
// s(t) = V(X >= t). The map must be non-increasing; an increase > 1e-10 on
// the evaluation grid raises an error. Breakpoints split the quadrature.
ChoquetResult choquet_integral(const RealFn& survival,
                               std::span<const double> breakpoints = {},
                               const ChoquetOptions& opts = {});

}  // namespace sublin
