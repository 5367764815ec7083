// Copyright 2026 The symdist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "symdist/heavy_hitter.hpp"
#include "symdist/reference.hpp"
#include "symdist/selftest.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace symdist;

namespace {

HHConfig light(double eps, std::size_t slots, std::size_t d, std::uint64_t seed) {
  HHConfig c;
  c.eps_hh = eps;
  c.n_slots = slots;
  c.d = d;
  c.seed = seed;
  c.c_T = 1.0;
  c.c_m = 2.0;
  return c;
}

bool contains(const DecodeResult& r, std::uint32_t j) {
  return std::binary_search(r.indices.begin(), r.indices.end(), j);
}

}  // namespace

TEST(HeavyHitter, InitShape) {
  const HHBank b = hh_init(0.5, 2, 8, 0.1, 1);
  EXPECT_EQ(b.top_level(), 3u);
  for (unsigned l = 0; l <= 3; ++l) EXPECT_EQ(b.level(l).level(), l);
  EXPECT_EQ(b.tail().k(), 4u);
  EXPECT_NEAR(b.delta_prime(), 0.5 * 0.1 / (12 * 3 + 1), 1e-15);
  EXPECT_TRUE(b.decode(0).indices.empty());
  EXPECT_THROW(hh_init(0.5, 1, 12, 0.1, 1), std::invalid_argument);
  EXPECT_THROW(hh_init(1.5, 1, 8, 0.1, 1), std::invalid_argument);
}

TEST(HeavyHitter, SingleSpike) {
  for (int s = 0; s < 20; ++s) {
    HHBank b(light(0.3, 1, 256, 40 + s));
    b.encode_single(0, 77, -4.5);
    const DecodeResult r = b.decode(0);
    EXPECT_EQ(r.indices, (std::vector<std::uint32_t>{77}));
  }
}

TEST(HeavyHitter, RestoreAfterInverseUpdate) {
  HHBank b(light(0.5, 1, 64, 3));
  for (std::size_t j = 0; j < 64; ++j) b.encode_single(0, j, std::cos(double(j)));
  const std::vector<double> before = b.counters();
  b.encode_single(0, 9, 3.25);
  b.encode_single(0, 9, -3.25);
  for (std::size_t i = 0; i < before.size(); ++i) ASSERT_NEAR(b.counters()[i], before[i], 1e-12);
}

TEST(HeavyHitter, TwoEqualSpikes) {
  int both = 0;
  for (int s = 0; s < 100; ++s) {
    HHBank b(light(0.5, 1, 64, 500 + s));
    b.encode_single(0, 3, 2.0);
    b.encode_single(0, 40, -2.0);
    const DecodeResult r = b.decode(0);
    both += contains(r, 3) && contains(r, 40);
  }
  EXPECT_GE(both, 90);
}

TEST(HeavyHitter, SpecVectorExample) {
  const DenseVector x{10, 0, 0, 0, 1, 0, 0, 0};
  int ok = 0;
  for (int s = 0; s < 200; ++s) {
    HHBank b = hh_init(0.5, 1, 8, 0.1, 100 + s);
    b.encode(0, x);
    const DecodeResult r = b.decode(0);
    ok += contains(r, 0) && contains(r, 4);
  }
  EXPECT_GE(ok, 180);
}

TEST(HeavyHitter, EncodeMatchesSingles) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  HHBank b(light(0.4, 3, 32, 8));
  DenseVector v(32), w;
  for (auto& x : v) x = g(rng);
  b.encode(0, v);
  for (std::size_t j = 0; j < 32; ++j) b.encode_single(1, j, v[j]);
  const auto s0 = b.slot_span(0), s1 = b.slot_span(1);
  for (std::size_t i = 0; i < s0.size(); ++i) ASSERT_NEAR(s0[i], s1[i], 1e-12 * std::max(1.0, std::abs(s1[i])));
  // a one-coordinate correction equals encoding the modified vector
  w = v;
  w[11] += 1.75;
  b.encode_single(0, 11, 1.75);
  b.encode(2, w);
  const auto s2 = b.slot_span(2);
  for (std::size_t i = 0; i < s0.size(); ++i) ASSERT_NEAR(s0[i], s2[i], 1e-9 * std::max(1.0, std::abs(s2[i])));
  const std::vector<double> snap = b.counters();
  b.encode(1, DenseVector(32, 0.0));
  EXPECT_EQ(b.counters(), snap);
}

TEST(HeavyHitter, EncodeBatchMatchesPerSlot) {
  HHBank a(light(0.4, 3, 16, 21)), b(light(0.4, 3, 16, 21));
  for (std::size_t j = 0; j < 16; ++j) {
    const double z[3] = {double(j), -0.5 * double(j), 1.0};
    a.encode_batch(j, z);
    for (std::size_t s = 0; s < 3; ++s) b.encode_single(s, j, z[s]);
  }
  for (std::size_t i = 0; i < a.counters().size(); ++i) {
    ASSERT_NEAR(a.counters()[i], b.counters()[i], 1e-12 * std::max(1.0, std::abs(b.counters()[i])));
  }
}

TEST(HeavyHitter, PlantedSignal) {
  int hit = 0;
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (int s = 0; s < 200; ++s) {
    const std::size_t d = 256;
    DenseVector x(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) x[j] = g(rng);
    const double scale = 0.1 / exact_tail_norm(x, 16);
    for (auto& v : x) v *= scale;
    const std::size_t plant = static_cast<std::size_t>(s * 37 % d);
    x[plant] = 1.0;
    HHBank b(light(0.25, 1, d, 3000 + s));
    b.encode(0, x);
    hit += contains(b.decode(0), static_cast<std::uint32_t>(plant));
  }
  EXPECT_GE(hit, 190);
}

TEST(HeavyHitter, SizeCapAlwaysHolds) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  for (int s = 0; s < 50; ++s) {
    HHBank b(light(0.3, 1, 512, 70 + s));
    for (std::size_t j = 0; j < 512; ++j) b.encode_single(0, j, g(rng));
    const DecodeResult r = b.decode(0);
    ASSERT_LE(static_cast<double>(r.indices.size()), 8.0 / (0.3 * 0.3));
    ASSERT_TRUE(std::is_sorted(r.indices.begin(), r.indices.end()));
  }
}

TEST(HeavyHitter, SubtractDecodesLikeDirectDifference) {
  const SuiteResult r = suite_linearity(30, 0, 17);
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(HeavyHitter, CompletenessQuick) {
  const SuiteResult r = suite_hh_completeness(20, 23);
  EXPECT_TRUE(r.passed) << r.detail;
}
