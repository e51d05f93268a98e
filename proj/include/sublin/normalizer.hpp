#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace sublin {

// Logarithm convention used throughout: log x = ln max(e, x), so that both
// log x and loglog x are >= 1 for every x. In particular loglog n = 1 for
// n <= 15 and the normalizer below starts at sqrt(2).
inline double clamped_log(double x) { return std::log(std::max(M_E, x)); }

inline double clamped_loglog(double x) {
  return std::log(std::max(M_E, clamped_log(x)));
}

// a_n = sqrt(2 n loglog n); equals sqrt(2n) exactly for 1 <= n <= 15.
inline double normalizer(std::int64_t n) {
  return std::sqrt(2.0 * static_cast<double>(n) *
                   clamped_loglog(static_cast<double>(n)));
}

// Continuous-argument version a_y, used by integral forms of series bounds.
inline double normalizer_at(double y) {
  return std::sqrt(2.0 * y * clamped_loglog(y));
}

// Precomputed a_1..a_n for hot loops (path statistics, series terms).
class NormalizerTable {
 public:
  explicit NormalizerTable(std::int64_t n_max);
  double operator[](std::int64_t n) const {
    return values_[static_cast<std::size_t>(n)];
  }
  std::int64_t size() const {
    return static_cast<std::int64_t>(values_.size()) - 1;
  }

 private:
  std::vector<double> values_;
};

}  // namespace sublin
