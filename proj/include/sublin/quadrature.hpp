#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sublin {

using RealFn = std::function<double(double)>;

struct QuadratureOptions {
  double rel_tol = 1e-8;
  // Settle/divergence thresholds compare increments against
  // rel_tol * max(abs_floor, |total|); abs_floor = 0 gives purely relative
  // behavior for integrals whose value may be far below 1.
  double abs_floor = 1.0;
  int max_depth = 15;             // adaptive bisection depth per finite segment
  double survival_floor = 1e-14;  // tail cut for survival-type integrands
  double tail_cap = 1024.0;       // divergence checks engage past this point
  int divergence_run = 4;         // consecutive non-contracting doublings
  double contraction_floor = 0.98;  // increment ratio at or above this counts
                                    // as non-contracting
  int max_doublings = 260;
  // Called with each segment [a, b] before it is integrated.
  std::function<void(double, double)> segment_hook;
};

struct TailIntegral {
  double value = 0.0;
  double abs_error = 0.0;
  bool diverging = false;
  bool truncated = false;  // hit the doubling cap before the tail settled
};

// Integral of f over the finite interval [a, b], split at the interior
// breakpoints, Gauss-Kronrod refinement per sub-segment. Throws on
// non-finite integrand values.
double integrate_finite(const RealFn& f, double a, double b,
                        std::span<const double> breakpoints, double rel_tol,
                        double* abs_error = nullptr);

// Integral of f over [t0, +inf) (direction +1) or (-inf, t0] (direction -1),
// evaluated on geometrically doubling segments. Stops when the segment
// increments project to a negligible tail; flags divergence when increments
// keep failing to contract past opts.tail_cap.
TailIntegral integrate_tail(const RealFn& f, double t0, int direction,
                            std::span<const double> breakpoints,
                            const QuadratureOptions& opts = {});

// Integral over the open unit interval (0, 1) with dyadic refinement toward
// both endpoints; used for quantile-space expectations where the transform
// may blow up at 0 or 1.
TailIntegral integrate_unit(const RealFn& f, const QuadratureOptions& opts = {});

}  // namespace sublin
