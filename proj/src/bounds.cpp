#include "sublin/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sublin/errors.hpp"
#include "sublin/functionals.hpp"
#include "sublin/normalizer.hpp"
#include "sublin/quadrature.hpp"

namespace sublin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double exp_inequality_rhs(const ExpIneqInputs& in) {
  if (!(in.p >= 2.0)) throw Error("exp_inequality_rhs requires p >= 2");
  if (!(in.x > 0.0) || !(in.y > 0.0)) {
    throw Error("exp_inequality_rhs requires x, y > 0");
  }
  if (!(in.delta > 0.0) || in.delta > 1.0) {
    throw Error("exp_inequality_rhs requires 0 < delta <= 1");
  }
  if (in.a_n < 0 || in.b_n < 0 || in.tail_max < 0 || in.tail_max > 1) {
    throw Error("exp_inequality_rhs inputs out of range");
  }

  const double exponent = in.delta * in.x / (10.0 * in.y);
  const double base = in.a_n / std::pow(in.y, in.p);
  const double middle =
      2.0 * std::exp(std::pow(in.p, in.p)) * std::pow(base, exponent);

  // Both a zero and an absent (infinite) second-moment bound zero out the
  // Gaussian term.
  double gauss = 0.0;
  if (in.b_n > 0.0 && std::isfinite(in.b_n)) {
    gauss = std::exp(-in.x * in.x / (2.0 * in.b_n * (1.0 + in.delta)));
  }
  return in.tail_max + middle + gauss;
}

namespace {

// sum_{n=a}^{b} h(n) for h non-increasing; exact for small blocks, integral
// midpoint with bracketing error otherwise.
struct BlockSum {
  double value = 0.0;
  double error = 0.0;
};

BlockSum sum_decreasing(const std::function<double(double)>& h, std::int64_t a,
                        std::int64_t b) {
  BlockSum out;
  if (b - a <= 4096) {
    for (std::int64_t n = a; n <= b; ++n) out.value += h(static_cast<double>(n));
    return out;
  }
  const double head = h(static_cast<double>(a));
  if (head == 0.0) return out;
  const double integral = integrate_finite(h, static_cast<double>(a),
                                           static_cast<double>(b) + 1.0, {},
                                           1e-9);
  out.value = integral + 0.5 * head;
  out.error = 0.5 * head;
  return out;
}

}  // namespace

BoundReport blocking_bound(const BlockingInputs& in, const GeneratorSet& gen) {
  if (!(in.p > std::max(2.0, in.r))) {
    throw Error("blocking_bound requires p > 2\xE2\x88\xA8r");
  }
  if (!(in.z > 0.0)) throw Error("blocking_bound requires z > 0");
  if (!(in.sigma_sq > 0.0)) throw Error("blocking_bound requires sigma_sq > 0");

  BoundReport rep;
  rep.z = in.z;
  rep.r = in.r;
  rep.p = in.p;

  const double z_scale = std::pow(in.z, 1.0 / in.r);
  const double c1 = z_scale / 30.0;
  auto g1_term = [&gen, c1](double y) {
    return abs_survival_upper(gen, c1 * normalizer_at(y));
  };
  const double cp = 2.0 * std::exp(std::pow(in.p, in.p));

  double prev_g1 = -1.0, prev_g2 = -1.0;
  for (int k = 0; k <= in.k_max; ++k) {
    BlockRow row;
    row.k = k;
    const double n_top = std::ldexp(1.0, k + 1);
    row.n_top = n_top;

    // g1 block: n in [2^k, 2^{k+1})
    if (!rep.g1_diverging) {
      const std::int64_t lo = static_cast<std::int64_t>(std::ldexp(1.0, k));
      const std::int64_t hi =
          static_cast<std::int64_t>(std::ldexp(1.0, k + 1)) - 1;
      BlockSum bs = sum_decreasing(g1_term, lo, hi);
      row.g1 = 2.0 * bs.value;
      rep.g1 += row.g1;
      rep.g1_error += 2.0 * bs.error;
    }

    // g2 block
    const double y_k = c1 * normalizer_at(n_top);
    auto clipped_abs_p = TestFunction::bounded_lipschitz(
        [y_k, p = in.p](double v) {
          return std::pow(std::min(std::fabs(v), y_k), p);
        },
        std::pow(y_k, in.p),
        in.p * std::pow(std::max(y_k, 1.0), in.p - 1.0), {-y_k, 0.0, y_k});
    const double m_clip = upper_expectation(gen, clipped_abs_p);
    const double ratio = n_top * m_clip / std::pow(y_k, in.p);
    row.g2 = cp * ratio * ratio * ratio;
    rep.g2 += row.g2;

    // g3 block
    row.g3 = std::exp(-std::pow(in.z, 2.0 / in.r) * clamped_loglog(n_top) /
                      (4.0 * in.sigma_sq));
    rep.g3 += row.g3;

    rep.rows.push_back(row);

    if (k == in.k_max) {
      // geometric tail extrapolation past the last block
      auto extrapolate = [](double last, double prev) {
        if (last <= 0.0) return 0.0;
        if (prev <= 0.0 || last >= prev) return kInf;
        const double rho = last / prev;
        return last * rho / (1.0 - rho);
      };
      rep.g1_tail = extrapolate(row.g1, prev_g1);
      rep.g2_tail = extrapolate(row.g2, prev_g2);
      rep.g3_tail = extrapolate(row.g3, rep.rows.size() >= 2
                                            ? rep.rows[rep.rows.size() - 2].g3
                                            : -1.0);
      rep.g1_diverging = rep.g1_diverging || std::isinf(rep.g1_tail);
      rep.g2_diverging = std::isinf(rep.g2_tail);
    }
    prev_g1 = row.g1;
    prev_g2 = row.g2;
  }
  return rep;
}

WedgeIntegral integrated_blocking_bound(const BlockingInputs& shape,
                                        const GeneratorSet& gen) {
  WedgeIntegral out;
  double prev_z = 0.0;
  double prev_f = 1.0;  // 1 ^ total at z -> 0 is 1
  double last_contrib = 0.0;
  for (int j = -10; j <= 30; ++j) {
    const double z = std::ldexp(1.0, j);
    BlockingInputs in = shape;
    in.z = z;
    BoundReport rep = blocking_bound(in, gen);
    const double f = std::min(1.0, rep.total());
    const double contrib = 0.5 * (prev_f + f) * (z - prev_z);
    out.value += contrib;
    last_contrib = contrib;
    prev_z = z;
    prev_f = f;
  }
  // settled when the top-of-grid trapezoid contributes a vanishing share
  out.settled = last_contrib <= 1e-4 * std::max(out.value, 1e-300);
  return out;
}

double max_moment_bracket(double varsigma, double eta_r, double sigma_bar,
                          double r, double p) {
  if (!(p > std::max(2.0, r))) {
    throw Error("max_moment_bracket requires p > 2\xE2\x88\xA8r");
  }
  if (varsigma < 0 || eta_r < 0 || sigma_bar < 0) {
    throw Error("max_moment_bracket inputs must be >= 0");
  }
  return eta_r + std::pow(varsigma, r / p) + std::pow(sigma_bar, r);
}

MomentBracket moment_lower_bracket(const GeneratorSet& gen, double r) {
  if (!(r > 0)) throw Error("moment_lower_bracket requires r > 0");
  MomentBracket out;
  const double a1_r = std::pow(normalizer(1), r);
  const ChoquetResult pos = choquet_pos_power(gen, r);
  const ChoquetResult abs = choquet_abs_power(gen, r);
  out.pos_part = pos.finite() ? pos.value / a1_r : kInf;
  out.abs_part = abs.finite() ? abs.value / a1_r : kInf;
  return out;
}

nlohmann::json BoundReport::to_json() const {
  return nlohmann::json{{"z", z},
                        {"r", r},
                        {"p", p},
                        {"g1", g1},
                        {"g2", g2},
                        {"g3", g3},
                        {"total", total()},
                        {"g1_tail", g1_tail},
                        {"g2_tail", g2_tail},
                        {"g3_tail", g3_tail},
                        {"g1_error", g1_error},
                        {"g1_diverging", g1_diverging},
                        {"g2_diverging", g2_diverging}};
}

std::string BoundReport::table_csv() const {
  std::ostringstream os;
  os << "k,n_k,g1_k,g2_k,g3_k\n";
  os.precision(17);
  for (const auto& row : rows) {
    os << row.k << ',' << row.n_top << ',' << row.g1 << ',' << row.g2 << ','
       << row.g3 << '\n';
  }
  return os.str();
}

}  // namespace sublin
