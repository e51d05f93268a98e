#include "sublin/choquet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sublin/errors.hpp"

namespace sublin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Wraps the survival map with a monotonicity probe: every segment the
// quadrature visits is first sampled on an ascending grid.
class MonotoneChecked {
 public:
  explicit MonotoneChecked(const RealFn& s) : s_(s) {}

  void probe_segment(double a, double b) const {
    double prev = value_at(a);
    for (int i = 1; i <= 8; ++i) {
      const double t = a + (b - a) * i / 8.0;
      const double v = value_at(t);
      if (v > prev + 1e-10) {
        throw Error("survival map increased by " + std::to_string(v - prev) +
                    " near t=" + std::to_string(t));
      }
      prev = v;
    }
  }

  double value_at(double t) const {
    const double v = s_(t);
    if (!std::isfinite(v) || v < -1e-12 || v > 1.0 + 1e-12) {
      throw Error("survival map left [0, 1] at t=" + std::to_string(t));
    }
    return std::clamp(v, 0.0, 1.0);
  }

 private:
  const RealFn& s_;
};

}  // namespace

std::string to_string(ChoquetStatus s) {
  switch (s) {
    case ChoquetStatus::Converged:
      return "converged";
    case ChoquetStatus::Diverging:
      return "diverging";
    default:
      return "tail-truncated";
  }
}

ChoquetResult choquet_integral(const RealFn& survival,
                               std::span<const double> breakpoints,
                               const ChoquetOptions& opts) {
  if (!(opts.tol > 0)) throw Error("choquet_integral requires tol > 0");
  MonotoneChecked checked(survival);

  QuadratureOptions qopts;
  qopts.rel_tol = opts.tol;
  qopts.tail_cap = opts.t_cap;

  ChoquetResult out;

  qopts.segment_hook = [&checked](double a, double b) {
    checked.probe_segment(a, b);
  };

  // Positive half-line: int_0^inf s(t) dt.
  {
    auto integrand = [&checked](double t) { return checked.value_at(t); };
    TailIntegral pos = integrate_tail(integrand, 0.0, +1, breakpoints, qopts);
    if (pos.diverging) {
      out.value = kInf;
      out.status = ChoquetStatus::Diverging;
      return out;
    }
    out.value += pos.value;
    out.abs_error += pos.abs_error;
    if (pos.truncated) out.status = ChoquetStatus::TailTruncated;
  }

  // Negative half-line: int_{-inf}^0 [s(t) - 1] dt.
  {
    auto integrand = [&checked](double t) { return checked.value_at(t) - 1.0; };
    TailIntegral neg = integrate_tail(integrand, 0.0, -1, breakpoints, qopts);
    if (neg.diverging) {
      out.value = -kInf;
      out.status = ChoquetStatus::Diverging;
      return out;
    }
    out.value += neg.value;
    out.abs_error += neg.abs_error;
    if (neg.truncated) out.status = ChoquetStatus::TailTruncated;
  }

  return out;
}

}  // namespace sublin
