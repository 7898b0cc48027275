#pragma once

#include <boost/math/special_functions/erf.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace fracvol {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3").
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }
};

/// Stream ids used by the path simulator.
enum class Stream : std::uint32_t { V = 0, VTilde = 1 };

/// Standard normal draws addressed by (seed, path index, stream id, draw index).
/// Normals come from the inverse CDF, one per 64 random bits, so draw k of a
/// stream never depends on how many draws other streams or paths consumed.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t path_index, Stream stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        path_lo_(static_cast<std::uint32_t>(path_index)),
        path_hi_(static_cast<std::uint32_t>(path_index >> 32)),
        stream_(static_cast<std::uint32_t>(stream)) {}

  /// Uniform on the open interval (0,1) with 53 random bits.
  double uniform() noexcept {
    if (slot_ == 2) refill();
    const std::uint64_t bits = (static_cast<std::uint64_t>(buffer_[2 * slot_ + 1]) << 32) | buffer_[2 * slot_];
    ++slot_;
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * uniform()); }

 private:
  void refill() noexcept {
    buffer_ = Philox4x32::block({path_lo_, path_hi_, stream_, block_++}, key_);
    slot_ = 0;
  }

  Philox4x32::Key key_;
  std::uint32_t path_lo_;
  std::uint32_t path_hi_;
  std::uint32_t stream_;
  std::uint32_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int slot_ = 2;
};

}  // namespace fracvol
