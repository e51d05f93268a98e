#include "sublin/test_function.hpp"

#include <algorithm>
#include <cmath>

#include "sublin/errors.hpp"

namespace sublin {

TestFunction TestFunction::bounded_lipschitz(std::function<double(double)> f,
                                             double bound, double lip,
                                             std::vector<double> breakpoints) {
  if (bound < 0 || lip < 0) throw Error("bounded_lipschitz constants must be >= 0");
  TestFunction t;
  t.kind_ = Kind::BoundedLipschitz;
  t.bound_ = bound;
  t.lip_ = lip;
  t.f_ = std::move(f);
  t.breakpoints_ = std::move(breakpoints);
  return t;
}

TestFunction TestFunction::polynomial_growth(std::function<double(double)> f,
                                             int degree, double coeff_bound,
                                             std::vector<double> breakpoints) {
  if (degree < 0 || coeff_bound < 0) throw Error("polynomial_growth constants must be >= 0");
  TestFunction t;
  t.kind_ = Kind::PolynomialGrowth;
  t.degree_ = degree;
  t.coeff_bound_ = coeff_bound;
  t.f_ = std::move(f);
  t.breakpoints_ = std::move(breakpoints);
  return t;
}

TestFunction TestFunction::identity() {
  return polynomial_growth([](double x) { return x; }, 1, 1.0);
}

TestFunction TestFunction::power(int k) {
  return polynomial_growth([k](double x) { return std::pow(x, k); }, k, 1.0);
}

TestFunction TestFunction::abs_power(double r) {
  int deg = static_cast<int>(std::ceil(r));
  return polynomial_growth(
      [r](double x) { return std::pow(std::fabs(x), r); }, deg, 1.0);
}

TestFunction TestFunction::negative_abs() {
  return polynomial_growth([](double x) { return -std::fabs(x); }, 1, 1.0);
}

TestFunction TestFunction::constant(double c) {
  return bounded_lipschitz([c](double) { return c; }, std::fabs(c), 0.0);
}

TestFunction TestFunction::clamp(double c) {
  if (c <= 0) throw Error("clamp requires c > 0");
  return bounded_lipschitz(
      [c](double x) { return std::max(-c, std::min(x, c)); }, c, 1.0, {-c, c});
}

TestFunction TestFunction::clamped_square(double c) {
  if (c < 0) throw Error("clamped_square requires c >= 0");
  const double s = std::sqrt(c);
  return bounded_lipschitz(
      [c](double x) { return std::min(x * x, c); }, c, 2.0 * s, {-s, s});
}

TestFunction TestFunction::clamped_pos_power(double y, double p) {
  if (y < 0 || p < 1) throw Error("clamped_pos_power requires y >= 0, p >= 1");
  const double top = std::pow(y, p);
  return bounded_lipschitz(
      [y, p](double x) {
        double v = std::min(std::max(x, 0.0), y);
        return std::pow(v, p);
      },
      top, p * std::pow(std::max(y, 1.0), p - 1.0), {0.0, y});
}

TestFunction TestFunction::clamped_min_square(double y) {
  // (x ^ y)^2 is unbounded below in x, so it lives in the polynomial class.
  return polynomial_growth(
      [y](double x) {
        double v = std::min(x, y);
        return v * v;
      },
      2, std::max(1.0, y * y), {y});
}

TestFunction TestFunction::trapezoid(double a, double b, double w) {
  if (!(a <= b) || w <= 0) throw Error("trapezoid requires a <= b, w > 0");
  auto f = [a, b, w](double x) {
    if (x <= a - w || x >= b + w) return 0.0;
    if (x >= a && x <= b) return 1.0;
    if (x < a) return (x - (a - w)) / w;
    return ((b + w) - x) / w;
  };
  return bounded_lipschitz(f, 1.0, 1.0 / w, {a - w, a, b, b + w});
}

double TestFunction::declared_envelope(double x) const {
  if (kind_ == Kind::BoundedLipschitz) return bound_;
  return coeff_bound_ * (1.0 + std::pow(std::fabs(x), degree_));
}

TestFunction TestFunction::scaled(double lambda) const {
  TestFunction t = *this;
  auto f = f_;
  t.f_ = [f, lambda](double x) { return lambda * f(x); };
  const double m = std::fabs(lambda);
  t.bound_ *= m;
  t.lip_ *= m;
  t.coeff_bound_ *= m;
  return t;
}

TestFunction TestFunction::negated() const { return scaled(-1.0); }

TestFunction TestFunction::plus(const TestFunction& other) const {
  TestFunction t;
  auto f = f_;
  auto g = other.f_;
  t.f_ = [f, g](double x) { return f(x) + g(x); };
  if (kind_ == Kind::BoundedLipschitz &&
      other.kind_ == Kind::BoundedLipschitz) {
    t.kind_ = Kind::BoundedLipschitz;
    t.bound_ = bound_ + other.bound_;
    t.lip_ = lip_ + other.lip_;
  } else {
    t.kind_ = Kind::PolynomialGrowth;
    const double ca = kind_ == Kind::BoundedLipschitz ? bound_ : coeff_bound_;
    const double cb = other.kind_ == Kind::BoundedLipschitz ? other.bound_
                                                            : other.coeff_bound_;
    t.degree_ = std::max(degree_, other.degree_);
    t.coeff_bound_ = ca + cb;
  }
  t.breakpoints_ = breakpoints_;
  t.breakpoints_.insert(t.breakpoints_.end(), other.breakpoints_.begin(),
                        other.breakpoints_.end());
  std::sort(t.breakpoints_.begin(), t.breakpoints_.end());
  t.breakpoints_.erase(std::unique(t.breakpoints_.begin(), t.breakpoints_.end()),
                       t.breakpoints_.end());
  return t;
}

}  // namespace sublin
