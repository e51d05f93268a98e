#pragma once

#include <array>
#include <cstdint>

namespace sublin {

// Philox 4x64 with 10 rounds. Pure function of (counter, key), which is what
// makes replication-parallel runs bit-stable: every draw is addressed, never
// streamed.
struct Philox4x64 {
  using Block = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;
  static Block block(Block counter, Key key);
};

// Uniform draws addressed by (step, lane) within one replication of one
// domain. Lanes index the four words of a block.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t domain,
            std::uint64_t replication)
      : key_{master_seed, domain}, rep_(replication) {}

  std::uint64_t raw(std::uint64_t step, int lane = 0) const {
    const auto b = Philox4x64::block({rep_, step, 0, 0}, key_);
    return b[static_cast<std::size_t>(lane) & 3];
  }

  // Open-interval uniform, safe to feed quantile transforms.
  double uniform(std::uint64_t step, int lane = 0) const {
    return (static_cast<double>(raw(step, lane) >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t replication() const { return rep_; }

 private:
  Philox4x64::Key key_;
  std::uint64_t rep_;
};

// Domain tags keep independent uses of the same master seed apart.
namespace rng_domain {
inline constexpr std::uint64_t kPaths = 1;
inline constexpr std::uint64_t kInnovations = 2;
inline constexpr std::uint64_t kTests = 99;
}  // namespace rng_domain

}  // namespace sublin
