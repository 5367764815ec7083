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

#include "symdist/oracle.hpp"
#include "symdist/reference.hpp"
#include "symdist/selftest.hpp"

#include <gtest/gtest.h>

using namespace symdist;

namespace {

Oracle small_oracle(std::uint64_t seed, std::size_t n = 6, std::size_t d = 64, const char* norm = "lp:1") {
  return Oracle::build(gaussian_points(n, d, seed), parse_norm(norm, d), 0.25, 0.1, seed, OracleKnobs::desk());
}

}  // namespace

TEST(Params, DerivationFormulas) {
  const OracleKnobs k = OracleKnobs::paper();
  const OracleParams p = OracleParams::derive(0.5, 0.1, 10, 256, MmcBound{}, k, 0.75);
  EXPECT_EQ(p.L, 8u);
  EXPECT_DOUBLE_EQ(p.log2d, 8.0);
  EXPECT_DOUBLE_EQ(p.eps1, 0.25 / 8.0);
  const double R = std::pow(p.eps1, -2) * std::log(10 / 0.1) * 64.0;
  EXPECT_EQ(p.R, static_cast<std::size_t>(std::ceil(R - 1e-9)));
  EXPECT_EQ(p.U, static_cast<std::size_t>(std::ceil(std::log(10 * 256.0 * 256.0 / 0.1))));
  EXPECT_DOUBLE_EQ(p.beta, std::pow(0.5, 5) / std::pow(8.0, 5));
  EXPECT_DOUBLE_EQ(p.eps_hh, std::sqrt(p.beta));
  EXPECT_DOUBLE_EQ(p.gamma, 0.5);
  EXPECT_DOUBLE_EQ(p.alpha, 1.375);
  EXPECT_GT(p.alpha, 1.0);
  EXPECT_LE(p.alpha, 1.0 + k.k_gamma * 0.5);
  EXPECT_NEAR(p.count_threshold(), p.R * std::log(10.0) / 800.0, 1e-9);
}

TEST(Params, Validation) {
  const OracleKnobs k = OracleKnobs::desk();
  EXPECT_THROW(OracleParams::derive(0.0, 0.1, 4, 64, MmcBound{}, k, 0.75), std::invalid_argument);
  EXPECT_THROW(OracleParams::derive(0.25, 1.0, 4, 64, MmcBound{}, k, 0.75), std::invalid_argument);
  EXPECT_THROW(OracleParams::derive(0.25, 0.1, 4, 64, MmcBound{}, k, 0.25), std::invalid_argument);
  OracleKnobs bad = k;
  bad.k_R = -1.0;
  EXPECT_THROW(OracleParams::derive(0.25, 0.1, 4, 64, MmcBound{}, bad, 0.75), std::invalid_argument);
  bad = k;
  bad.k_eps1 = 1e3;
  EXPECT_THROW(OracleParams::derive(0.25, 0.1, 4, 64, MmcBound{}, bad, 0.75), std::invalid_argument);
  EXPECT_THROW(OracleKnobs::by_name("fast"), std::invalid_argument);
  // beta is clamped so the heavy-hitter parameter stays below 1
  const OracleParams p = OracleParams::derive(0.25, 0.1, 4, 64, MmcBound{}, k, 0.75);
  EXPECT_LE(p.beta, k.beta_max);
  EXPECT_LT(p.eps_hh, 1.0);
}

TEST(Inversion, SpecExample) {
  const double eta = 1.0 - std::pow(1.0 - 0.25, 8.0);
  EXPECT_NEAR(invert_track_probability(eta, 2), 8.0, 1e-9);
  EXPECT_NEAR(track_probability(8.0, 2), eta, 1e-15);
}

TEST(Inversion, Grid) {
  const SuiteResult r = suite_inversion();
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(LayerEstimate, EmptyHitsGiveZero) {
  const std::vector<std::vector<int>> hits(5 * 10);
  const LayerEstimate e = layer_estimate_from_hits(hits, 10, 5, 1.0, 0.1);
  EXPECT_TRUE(e.exponents.empty());
  EXPECT_TRUE(e.profile(1.5, 64).empty());
}

TEST(LayerEstimate, CountsRepsPerLevel) {
  const std::size_t R = 4, L = 3;
  std::vector<std::vector<int>> hits(L * R);
  // exponent 2 seen in every rep at level 1, in 3 at level 2, in 1 at level 3
  for (std::size_t r = 0; r < R; ++r) hits[0 * R + r] = {2};
  for (std::size_t r = 0; r < 3; ++r) hits[1 * R + r] = {2};
  hits[2 * R + 0] = {-1, 2};
  const LayerEstimate e = layer_estimate_from_hits(hits, R, L, 2.0, 0.0);
  ASSERT_EQ(e.exponents, (std::vector<int>{-1, 2}));
  EXPECT_EQ(e.A[0][1], 4.0);
  EXPECT_EQ(e.A[1][1], 3.0);
  EXPECT_EQ(e.A[2][1], 1.0);
  EXPECT_EQ(e.q[1], 2);
  EXPECT_EQ(e.q[0], 0);
  EXPECT_EQ(e.c[0], 0.0);
  EXPECT_DOUBLE_EQ(e.eta_hat[1], 0.75);
  EXPECT_NEAR(e.c[1], std::log(0.25) / std::log(0.75), 1e-12);
  for (const auto& row : e.A) {
    for (double a : row) EXPECT_LE(a, double(R));
  }
}

TEST(LayerEstimate, Verification) {
  const double a = 1.5;
  EXPECT_EQ(verified_layer(1.2, a, 1e-9), std::optional<int>(1));
  EXPECT_EQ(verified_layer(0.0, a, 1e-9), std::nullopt);
  EXPECT_EQ(verified_layer(a * a, a, 1e-9), std::optional<int>(2));
  // just above a lower layer edge is ambiguous
  EXPECT_EQ(verified_layer(a * (1 + 1e-12), a, 1e-9), std::nullopt);
  EXPECT_EQ(verified_layer(a * a * (1 + 1e-6), a, 1e-9), std::optional<int>(3));
}

TEST(LayerEstimate, RecoveryQuick) {
  const SuiteResult r = suite_layer_recovery(10, 4000, 3);
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Oracle, ZeroPointHasEmptyState) {
  const Oracle o = Oracle::build({DenseVector(32, 0.0)}, SymNorm::lp(2.0, 32), 0.25, 0.1, 4, OracleKnobs::desk());
  for (const auto& c : o.cells()) {
    for (double v : c.bank.counters()) ASSERT_EQ(v, 0.0);
    for (double v : c.xbar) ASSERT_EQ(v, 0.0);
  }
  EXPECT_EQ(o.query_all(DenseVector(32, 0.0))[0], 0.0);
}

TEST(Oracle, Determinism) {
  const Oracle a = small_oracle(9), b = small_oracle(9);
  ASSERT_EQ(a.cells().size(), b.cells().size());
  for (std::size_t c = 0; c < a.cells().size(); ++c) {
    ASSERT_EQ(a.cells()[c].bank.counters(), b.cells()[c].bank.counters());
    ASSERT_EQ(a.cells()[c].coords, b.cells()[c].coords);
  }
  EXPECT_EQ(a.params().xi, b.params().xi);
}

TEST(Oracle, SubsamplingRate) {
  // top level keeps each coordinate with probability 1/d
  const Oracle o = small_oracle(2, 2, 256);
  const auto& p = o.params();
  double kept = 0.0;
  std::size_t cells = 0;
  for (std::size_t r = 0; r < p.R; ++r) {
    for (std::size_t u = 0; u < p.U; ++u) {
      kept += static_cast<double>(o.cells()[o.cell_index(r, p.L, u)].coords.size());
      ++cells;
    }
  }
  const double mean = kept / static_cast<double>(cells);
  EXPECT_NEAR(mean, 1.0, 4.0 / std::sqrt(double(cells)));
  for (std::size_t j = 0; j < 256; ++j) {
    EXPECT_EQ(o.sampled(0, 1, 0, j),
              std::binary_search(o.cells()[o.cell_index(0, 1, 0)].coords.begin(),
                                 o.cells()[o.cell_index(0, 1, 0)].coords.end(), j));
  }
}

TEST(Oracle, SelfQueriesAreZero) {
  const Oracle o = small_oracle(5, 8);
  for (std::size_t j = 0; j < o.n(); ++j) EXPECT_EQ(o.query_all(o.points()[j])[j], 0.0);
}

TEST(Oracle, QuerySetRestrictsQueryAll) {
  const Oracle o = small_oracle(6, 8);
  const DenseVector q = gaussian_points(1, 64, 99).front();
  const auto all = o.query_all(q);
  const std::size_t S[] = {6, 1, 3};
  const auto some = o.query_set(q, S);
  EXPECT_EQ(some[0], all[6]);
  EXPECT_EQ(some[1], all[1]);
  EXPECT_EQ(some[2], all[3]);
  EXPECT_EQ(o.query_all(q, 3), all);
  const std::size_t bad[] = {8};
  EXPECT_THROW(o.query_set(q, bad), std::out_of_range);
  EXPECT_THROW(o.query_all(DenseVector(63, 0.0)), std::invalid_argument);
}

TEST(Oracle, EstPairSymmetry) {
  const Oracle o = small_oracle(7, 6);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(o.est_pair(i, i), 0.0);
    for (std::size_t j = i + 1; j < 6; ++j) EXPECT_EQ(o.est_pair(i, j), o.est_pair(j, i));
  }
  EXPECT_THROW(o.est_pair(0, 6), std::out_of_range);
}

TEST(Oracle, EstPairAccuracy) {
  std::size_t ok = 0, total = 0;
  for (std::uint64_t s = 0; s < 4; ++s) {
    const Oracle o = small_oracle(100 + s, 6, 256, "lp:2");
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = i + 1; j < 6; ++j) {
        const double ex = exact_distance(o.norm(), o.points()[i], o.points()[j]);
        const double est = o.est_pair(i, j);
        ok += est >= 0.7 * ex && est <= 1.3 * ex;
        ++total;
      }
    }
  }
  EXPECT_GE(static_cast<double>(ok), 0.9 * static_cast<double>(total));
}

TEST(Oracle, UpdateSemantics) {
  Oracle o = small_oracle(8, 4);
  std::vector<std::vector<double>> before;
  for (const auto& c : o.cells()) before.push_back(c.bank.counters());
  o.update_x(2, o.points()[2]);
  for (std::size_t c = 0; c < o.cells().size(); ++c) {
    const auto& now = o.cells()[c].bank.counters();
    for (std::size_t e = 0; e < now.size(); ++e) ASSERT_NEAR(now[e], before[c][e], 1e-12);
  }
  const DenseVector z1 = gaussian_points(1, 64, 1).front(), z2 = gaussian_points(1, 64, 2).front();
  Oracle twice = small_oracle(8, 4);
  twice.update_x(1, z1);
  twice.update_x(1, z2);
  Oracle once = small_oracle(8, 4);
  once.update_x(1, z2);
  for (std::size_t c = 0; c < once.cells().size(); ++c) {
    const auto& a = once.cells()[c].bank.counters();
    const auto& b = twice.cells()[c].bank.counters();
    for (std::size_t e = 0; e < a.size(); ++e) ASSERT_NEAR(a[e], b[e], 1e-9 * std::max(1.0, std::abs(a[e])));
  }
  EXPECT_THROW(o.update_x(4, z1), std::out_of_range);
  EXPECT_THROW(o.update_x(0, DenseVector(3, 0.0)), std::invalid_argument);
}

TEST(Oracle, RejectsBadInput) {
  EXPECT_THROW(Oracle::build({}, SymNorm::lp(2.0), 0.25, 0.1, 1, OracleKnobs::desk()), std::invalid_argument);
  EXPECT_THROW(Oracle::build({DenseVector{1, 2}, DenseVector{1}}, SymNorm::lp(2.0), 0.25, 0.1, 1, OracleKnobs::desk()),
               std::invalid_argument);
  DenseVector with_nan(64, 1.0);
  with_nan[5] = NAN;
  EXPECT_THROW(Oracle::build({with_nan}, SymNorm::lp(2.0), 0.25, 0.1, 1, OracleKnobs::desk()), DataError);
  const SymNorm custom = SymNorm::custom("c", [](std::span<const double> v) { return SymNorm::eval_lp(v, 1.0); });
  EXPECT_THROW(Oracle::build({DenseVector{1, 2}}, custom, 0.25, 0.1, 1, OracleKnobs::desk()), std::invalid_argument);
}

TEST(Oracle, EndToEndSmall) {
  const SuiteResult r = suite_end_to_end(1, 11, 16, 256);
  EXPECT_TRUE(r.passed) << r.detail;
}
