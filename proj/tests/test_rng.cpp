#include <gtest/gtest.h>

#include <cmath>

#include "cchaos/chaos.hpp"
#include "cchaos/rng.hpp"

using namespace cchaos;

TEST(Philox, KnownAnswers) {
  // Published known-answer vectors for Philox4x32-10.
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32(Philox4x32::Key{0, 0})(C{0, 0, 0, 0}), (C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Philox4x32(Philox4x32::Key{0xffffffffu, 0xffffffffu})(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}),
            (C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox4x32(Philox4x32::Key{0xa4093822u, 0x299f31d0u})(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}),
            (C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(NormalQuantile, InvertsCdf) {
  for (double p : {1e-15, 1e-9, 1e-4, 0.01, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.97575, 0.99, 1 - 1e-9}) {
    const double x = normal_quantile(p);
    EXPECT_LT(std::abs(normal_cdf(x) - p), 1e-9 * std::max(1.0, 0.0)) << p;
    EXPECT_LT(std::abs(normal_cdf(x) - p), 1e-12 * std::max(p, 1e-3)) << p;
  }
  EXPECT_DOUBLE_EQ(normal_quantile(0.5), 0.0);
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-13);
}

TEST(OpenUniform, StaysInsideUnitInterval) {
  EXPECT_GT(open_uniform(0, 0), 0.0);
  EXPECT_LT(open_uniform(0xffffffffu, 0xffffffffu), 1.0);
}

TEST(SampleBatch, Deterministic) {
  auto a = sample_batch(3, 50, 42), b = sample_batch(3, 50, 42), c = sample_batch(3, 50, 43);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].xi, b[i].xi);
    EXPECT_EQ(a[i].eta, b[i].eta);
  }
  EXPECT_NE(a[0].xi, c[0].xi);
  // a coordinate does not depend on the sample dimension or batch position
  EXPECT_EQ(sample_at(7, 42, 10).xi[2], a[10].xi[2]);
  EXPECT_EQ(sample_at(7, 42, 10).eta[1], a[10].eta[1]);
  EXPECT_THROW(sample_batch(0, 5, 1), std::invalid_argument);
}

TEST(SampleBatch, MomentsAtOneMillion) {
  const std::size_t N = 1000000;
  double sx = 0, sxx = 0, sxy = 0, sx4 = 0;
  for (std::size_t i = 0; i < N; ++i) {
    auto s = sample_at(1, 7, i);
    sx += s.xi[0];
    sxx += s.xi[0] * s.xi[0];
    sxy += s.xi[0] * s.eta[0];
    sx4 += std::pow(s.xi[0], 4);
  }
  const double bound = 4 / std::sqrt(double(N));
  EXPECT_LT(std::abs(sx / N), bound);
  EXPECT_LT(std::abs(sxy / N), bound);
  EXPECT_LT(std::abs(sxx / N - 1), 4 * std::sqrt(2.0 / N));
  EXPECT_LT(std::abs(sx4 / N - 3), 4 * std::sqrt(96.0 / N));
}
