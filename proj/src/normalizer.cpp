#include "sublin/normalizer.hpp"

#include "sublin/errors.hpp"

namespace sublin {

NormalizerTable::NormalizerTable(std::int64_t n_max) {
  if (n_max < 1) throw Error("NormalizerTable requires n_max >= 1");
  values_.resize(static_cast<std::size_t>(n_max) + 1);
  values_[0] = 0.0;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    values_[static_cast<std::size_t>(n)] = normalizer(n);
  }
}

}  // namespace sublin
