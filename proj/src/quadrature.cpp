#include "sublin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sublin/errors.hpp"

namespace sublin {

namespace {

using GK15 = boost::math::quadrature::gauss_kronrod<double, 15>;

double segment(const RealFn& f, double a, double b, int max_depth,
               double rel_tol, double* err) {
  double e = 0.0;
  double v = GK15::integrate(f, a, b, max_depth, rel_tol, &e);
  if (!std::isfinite(v)) {
    throw Error("integrand produced a non-finite value on [" +
                std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  if (err) *err += e;
  return v;
}

// Collect breakpoints strictly inside (a, b), sorted, deduplicated.
std::vector<double> interior_points(std::span<const double> breakpoints,
                                    double a, double b) {
  std::vector<double> pts;
  for (double t : breakpoints) {
    if (t > a && t < b) pts.push_back(t);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double split_integrate(const RealFn& f, double a, double b,
                       std::span<const double> breakpoints, int max_depth,
                       double rel_tol, double* err) {
  std::vector<double> pts = interior_points(breakpoints, a, b);
  double total = 0.0;
  double lo = a;
  for (double p : pts) {
    total += segment(f, lo, p, max_depth, rel_tol, err);
    lo = p;
  }
  total += segment(f, lo, b, max_depth, rel_tol, err);
  return total;
}

}  // namespace

double integrate_finite(const RealFn& f, double a, double b,
                        std::span<const double> breakpoints, double rel_tol,
                        double* abs_error) {
  if (!(a <= b)) throw Error("integrate_finite requires a <= b");
  double err = 0.0;
  double v = split_integrate(f, a, b, breakpoints, 15, rel_tol, &err);
  if (abs_error) *abs_error = err;
  return v;
}

TailIntegral integrate_tail(const RealFn& f, double t0, int direction,
                            std::span<const double> breakpoints,
                            const QuadratureOptions& opts) {
  TailIntegral out;
  const double sgn = direction >= 0 ? 1.0 : -1.0;
  // Growth before the last declared breakpoint is structure (clamp corners,
  // atoms), not divergence; the detector engages beyond it.
  double structure_end = t0;
  for (double b : breakpoints) {
    if (sgn > 0 ? b > structure_end : b < structure_end) structure_end = b;
  }
  // Segment ends at t0 + sgn * 2^k, anchored to a unit first step.
  double width = 1.0;
  double lo = t0;
  double prev_inc = std::numeric_limits<double>::quiet_NaN();
  int quiet_run = 0;
  int grow_run = 0;
  for (int k = 0; k < opts.max_doublings; ++k) {
    const double hi = lo + sgn * width;
    if (opts.segment_hook) opts.segment_hook(std::min(lo, hi), std::max(lo, hi));
    double seg_err = 0.0;
    double inc = (sgn > 0)
                     ? split_integrate(f, lo, hi, breakpoints, opts.max_depth,
                                       opts.rel_tol, &seg_err)
                     : split_integrate(f, hi, lo, breakpoints, opts.max_depth,
                                       opts.rel_tol, &seg_err);
    out.value += inc;
    out.abs_error += seg_err;

    const double scale = std::max(opts.abs_floor, std::fabs(out.value));
    const double tol_eff = opts.rel_tol * scale;
    const double mag = std::fabs(inc);

    bool settled = false;
    if (mag <= tol_eff) {
      settled = true;
    } else if (std::isfinite(prev_inc) && std::fabs(prev_inc) > 0.0) {
      const double ratio = mag / std::fabs(prev_inc);
      if (ratio < 1.0) {
        // Geometric projection of the remaining tail.
        const double projected = mag * ratio / (1.0 - ratio);
        if (projected <= tol_eff && std::fabs(f(hi)) < opts.survival_floor) {
          settled = true;
          out.abs_error += projected;
        }
      }
    }
    if (settled) {
      if (++quiet_run >= 2) {
        out.abs_error += 2.0 * mag;
        return out;
      }
    } else {
      quiet_run = 0;
    }

    // Divergence: increments keep failing to contract past the cap.
    const double dist = std::fabs(hi - t0);
    const bool past_structure = sgn > 0 ? hi > structure_end : hi < structure_end;
    if (dist > opts.tail_cap && past_structure && mag > tol_eff) {
      const double ratio = std::isfinite(prev_inc) && std::fabs(prev_inc) > 0.0
                               ? mag / std::fabs(prev_inc)
                               : 0.0;
      if (ratio >= opts.contraction_floor) {
        if (++grow_run >= opts.divergence_run) {
          out.diverging = true;
          out.value = sgn > 0 ? std::numeric_limits<double>::infinity()
                              : -std::numeric_limits<double>::infinity();
          return out;
        }
      } else {
        grow_run = 0;
      }
    }

    prev_inc = inc;
    lo = hi;
    width *= 2.0;
  }
  out.truncated = true;
  if (std::isfinite(prev_inc)) out.abs_error += std::fabs(prev_inc);
  return out;
}

TailIntegral integrate_unit(const RealFn& f, const QuadratureOptions& opts) {
  TailIntegral out;
  // Central chunk plus dyadic shells toward each endpoint.
  double err = 0.0;
  out.value = split_integrate(f, 0.25, 0.75, {}, opts.max_depth, opts.rel_tol,
                              &err);
  out.abs_error = err;
  for (int side = 0; side < 2; ++side) {
    double width = 0.25;
    double prev_inc = std::numeric_limits<double>::quiet_NaN();
    int quiet_run = 0;
    int grow_run = 0;
    for (int k = 0; k < 60; ++k) {
      const double w_next = width * 0.5;
      double a = side == 0 ? w_next : 1.0 - width;
      double b = side == 0 ? width : 1.0 - w_next;
      if (a >= b || b >= 1.0) break;  // shell no longer representable
      double seg_err = 0.0;
      double inc =
          split_integrate(f, a, b, {}, opts.max_depth, opts.rel_tol, &seg_err);
      out.value += inc;
      out.abs_error += seg_err;
      const double tol_eff =
          opts.rel_tol * std::max(opts.abs_floor, std::fabs(out.value));
      const double mag = std::fabs(inc);
      if (mag <= tol_eff) {
        if (++quiet_run >= 2) {
          out.abs_error += 2.0 * mag;
          break;
        }
      } else {
        quiet_run = 0;
        if (std::isfinite(prev_inc) && std::fabs(prev_inc) > 0.0 &&
            mag / std::fabs(prev_inc) >= opts.contraction_floor && k > 8) {
          if (++grow_run >= opts.divergence_run) {
            out.diverging = true;
            out.value = inc > 0 ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
            return out;
          }
        } else {
          grow_run = 0;
        }
      }
      prev_inc = inc;
      width = w_next;
      if (k == 59) out.truncated = true;
    }
  }
  return out;
}

}  // namespace sublin
