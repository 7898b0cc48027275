#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fracvol/rng.hpp"

using fracvol::NormalStream;
using fracvol::Philox4x32;
using fracvol::Stream;

namespace {

// Known-answer vectors from the Random123 distribution (kat_vectors, philox4x32_10).
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(Philox4x32::block({0, 0, 0, 0}, {0, 0}),
            (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
            (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, IsConstexpr) {
  constexpr auto out = Philox4x32::block({1, 2, 3, 4}, {5, 6});
  static_assert(out[0] != 0 || out[1] != 0);
  SUCCEED();
}

TEST(NormalStream, UniformsInOpenInterval) {
  NormalStream s(1, 2, Stream::V);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(NormalStream, Reproducible) {
  NormalStream a(42, 7, Stream::VTilde), b(42, 7, Stream::VTilde);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.normal(), b.normal());
}

TEST(NormalStream, StreamsPathsAndSeedsDiffer) {
  NormalStream base(42, 7, Stream::V), other_stream(42, 7, Stream::VTilde), other_path(42, 8, Stream::V),
      other_seed(43, 7, Stream::V);
  const double x = base.normal();
  EXPECT_NE(x, other_stream.normal());
  EXPECT_NE(x, other_path.normal());
  EXPECT_NE(x, other_seed.normal());
}

TEST(NormalStream, HighSeedBitsMatter) {
  NormalStream a(1, 0, Stream::V), b(1 + (std::uint64_t{1} << 40), 0, Stream::V);
  EXPECT_NE(a.normal(), b.normal());
}

TEST(NormalStream, DrawsDoNotDependOnOtherStreams) {
  NormalStream lone(9, 3, Stream::V);
  std::vector<double> want;
  for (int i = 0; i < 50; ++i) want.push_back(lone.normal());

  NormalStream v(9, 3, Stream::V), vt(9, 3, Stream::VTilde);
  for (int i = 0; i < 50; ++i) {
    for (int k = 0; k < 3; ++k) (void)vt.normal();
    EXPECT_EQ(v.normal(), want[static_cast<std::size_t>(i)]);
  }
}

TEST(NormalStream, FirstTwoMoments) {
  const int n = 200000;
  NormalStream s(2024, 0, Stream::V);
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 3.0 / std::sqrt(n));
  EXPECT_NEAR(var, 1.0, 3.0 * std::sqrt(2.0 / n));
}

TEST(NormalStream, TailProbability) {
  const int n = 200000;
  NormalStream s(5, 1, Stream::VTilde);
  int beyond = 0;
  for (int i = 0; i < n; ++i) beyond += std::abs(s.normal()) > 1.959963985 ? 1 : 0;
  const double p = static_cast<double>(beyond) / n;
  EXPECT_NEAR(p, 0.05, 3.0 * std::sqrt(0.05 * 0.95 / n));
}

}  // namespace
