#include "cascade/rng.h"

#include <cmath>
#include <set>
#include <vector>

#include "gtest/gtest.h"

using namespace cascade;

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST(Philox, known_answers) {
  using Block = PhiloxEngine::Block;
  using Key = PhiloxEngine::Key;
  EXPECT_EQ(PhiloxEngine::encrypt(Block{0, 0, 0, 0}, Key{0, 0}),
            (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(PhiloxEngine::encrypt(Block{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                  Key{0xffffffff, 0xffffffff}),
            (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(PhiloxEngine::encrypt(Block{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                  Key{0xa4093822, 0x299f31d0}),
            (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, first_output_packs_first_block) {
  PhiloxEngine engine(0, 0);
  const auto block = PhiloxEngine::encrypt({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(engine(), (std::uint64_t{block[1]} << 32) | block[0]);
  EXPECT_EQ(engine(), (std::uint64_t{block[3]} << 32) | block[2]);
}

TEST(Philox, reproducible_per_stream) {
  PhiloxEngine a(42, 7);
  PhiloxEngine b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
  EXPECT_EQ((RngStream{42, 7}.engine()()), (PhiloxEngine(42, 7)()));
}

TEST(Philox, streams_and_seeds_differ) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    for (std::uint64_t stream = 0; stream < 16; ++stream) firsts.insert(PhiloxEngine(seed, stream)());
  }
  EXPECT_EQ(firsts.size(), 256u);
}

TEST(Philox, uniform_bits_and_low_correlation) {
  PhiloxEngine a(1, 0);
  PhiloxEngine b(1, 1);
  const int n = 200000;
  double mean_a = 0.0;
  double cross = 0.0;
  std::vector<int> ones(64, 0);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t x = a();
    const std::uint64_t y = b();
    for (int bit = 0; bit < 64; ++bit) ones[bit] += static_cast<int>((x >> bit) & 1u);
    const double u = static_cast<double>(x >> 11) * 0x1.0p-53 - 0.5;
    const double v = static_cast<double>(y >> 11) * 0x1.0p-53 - 0.5;
    mean_a += u;
    cross += u * v;
  }
  // Each bit is Bernoulli(1/2); 5 sigma bounds.
  const double sigma = 0.5 * std::sqrt(static_cast<double>(n));
  for (int bit = 0; bit < 64; ++bit) EXPECT_LT(std::abs(ones[bit] - n / 2.0), 5.0 * sigma) << bit;
  // Var(u) = Var(u v) * 12 = 1/12; 5 sigma.
  EXPECT_LT(std::abs(mean_a / n), 5.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_LT(std::abs(cross / n), 5.0 * std::sqrt(1.0 / 144.0 / n));
}

TEST(MixSeed, splitmix_reference_values) {
  // First outputs of SplitMix64 seeded with 0 and 1234567.
  EXPECT_EQ(mix_seed(0), 0xe220a8397b1dcdafull);
  EXPECT_EQ(mix_seed(1234567), 0x599ed017fb08fc85ull);
  EXPECT_NE(mix_seed(1), mix_seed(2));
}
