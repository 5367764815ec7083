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

#include "symdist/dataset.hpp"
#include "symdist/persist.hpp"
#include "symdist/selftest.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <sstream>

using namespace symdist;

namespace {

std::string temp(const std::string& name) { return ::testing::TempDir() + name; }

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST(Dataset, TextRoundTrip) {
  std::istringstream in("1, 2.5e-3, -4\n# comment\n\n0,0,1e2\n");
  const auto pts = read_dataset_text(in);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0], (DenseVector{1, 2.5e-3, -4}));
  EXPECT_EQ(pts[1][2], 100.0);
  std::ostringstream out;
  write_dataset_text(out, pts);
  std::istringstream back(out.str());
  EXPECT_EQ(read_dataset_text(back), pts);
}

TEST(Dataset, TextRejectsBadInput) {
  for (const char* bad : {"1,2\n3\n", "1,nan\n", "1,inf\n", "1,abc\n", "1,,2\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(read_dataset_text(in), DataError) << bad;
  }
}

TEST(Dataset, BinaryRoundTripAndValidation) {
  const auto pts = gaussian_points(5, 7, 3);
  const std::string path = temp("pts.snds");
  write_dataset(path, pts, true);
  EXPECT_EQ(read_dataset(path), pts);
  const std::string bytes = slurp(path);
  EXPECT_EQ(bytes.substr(0, 4), "SNDS");
  EXPECT_EQ(bytes.size(), 4 + 4 + 8 + 8 + 5 * 7 * 8u);
  {
    std::ofstream f(temp("short.snds"), std::ios::binary);
    f << bytes.substr(0, bytes.size() - 3);
  }
  EXPECT_THROW(read_dataset(temp("short.snds")), DataError);
  {
    std::ofstream f(temp("long.snds"), std::ios::binary);
    f << bytes << 'x';
  }
  EXPECT_THROW(read_dataset(temp("long.snds")), DataError);
  std::string nan = bytes;
  const double q = NAN;
  std::memcpy(nan.data() + 24, &q, 8);
  {
    std::ofstream f(temp("nan.snds"), std::ios::binary);
    f << nan;
  }
  EXPECT_THROW(read_dataset(temp("nan.snds")), DataError);
  EXPECT_THROW(read_dataset(temp("missing.snds")), DataError);
}

TEST(Dataset, VectorArgument) {
  EXPECT_EQ(read_vector_arg("3,4"), (DenseVector{3, 4}));
  const std::string path = temp("q.txt");
  {
    std::ofstream f(path);
    f << "1,2,3\n";
  }
  EXPECT_EQ(read_vector_arg(path), (DenseVector{1, 2, 3}));
}

TEST(Persist, ReplayableRoundTripIsBitExact) {
  const SuiteResult r = suite_persistence(3, 4);
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Persist, MaterializedMatchesReplayable) {
  const auto pts = gaussian_points(4, 64, 12);
  Oracle o = Oracle::build(pts, SymNorm::top_k(4, 64), 0.25, 0.1, 5, OracleKnobs::desk());
  o.update_x(1, gaussian_points(1, 64, 13).front());
  const std::string path = temp("idx.sndo");
  save_index(path, o, PersistMode::materialized);
  PersistMode mode = PersistMode::replayable;
  const Oracle back = load_index(path, &mode);
  EXPECT_EQ(mode, PersistMode::materialized);
  for (std::size_t c = 0; c < o.cells().size(); ++c) {
    ASSERT_EQ(o.cells()[c].bank.counters(), back.cells()[c].bank.counters());
  }
  const DenseVector q = gaussian_points(1, 64, 14).front();
  EXPECT_EQ(o.query_all(q), back.query_all(q));
  EXPECT_EQ(back.norm().descriptor(), "topk:4");
  EXPECT_EQ(back.params().xi, o.params().xi);
}

TEST(Persist, SameSeedSameBytes) {
  const auto pts = gaussian_points(3, 32, 1);
  const Oracle a = Oracle::build(pts, SymNorm::lp(1.0, 32), 0.25, 0.1, 9, OracleKnobs::desk());
  const Oracle b = Oracle::build(pts, SymNorm::lp(1.0, 32), 0.25, 0.1, 9, OracleKnobs::desk());
  EXPECT_EQ(serialize_index(a, PersistMode::replayable), serialize_index(b, PersistMode::replayable));
  EXPECT_EQ(serialize_index(a, PersistMode::materialized), serialize_index(b, PersistMode::materialized));
}

TEST(Persist, OrliczGridTravelsWithTheIndex) {
  const OrliczGrid g({0.5, 1.0, 2.0}, {0.2, 1.0, 5.0}, "inline");
  const SymNorm n = SymNorm::orlicz(g, std::nullopt, 16);
  const Oracle o = Oracle::build(gaussian_points(2, 16, 3), n, 0.25, 0.1, 2, OracleKnobs::desk());
  const Oracle back = deserialize_index(serialize_index(o, PersistMode::replayable));
  EXPECT_EQ(back.norm().orlicz_growth(), n.orlicz_growth());
  const DenseVector q = gaussian_points(1, 16, 4).front();
  EXPECT_EQ(o.query_all(q), back.query_all(q));
}

TEST(Persist, CorruptionIsDetected) {
  const Oracle o = Oracle::build(gaussian_points(2, 16, 3), SymNorm::lp(2.0, 16), 0.25, 0.1, 2, OracleKnobs::desk());
  const std::string bytes = serialize_index(o, PersistMode::replayable);
  EXPECT_THROW(deserialize_index("SNDX" + bytes.substr(4)), DataError);
  EXPECT_THROW(deserialize_index(bytes.substr(0, bytes.size() - 1)), DataError);
  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x20;
  EXPECT_THROW(deserialize_index(flipped), DataError);
  EXPECT_THROW(deserialize_index(bytes + "zz"), DataError);
  EXPECT_THROW(load_index(temp("nope.sndo")), DataError);
}
