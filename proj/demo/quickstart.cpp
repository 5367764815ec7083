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

// Build an oracle over random points, query it, and compare with exact distances.

#include "symdist/symdist.hpp"

#include <cstdio>

int main() {
  using namespace symdist;
  const std::size_t n = 16, d = 512;
  const auto points = gaussian_points(n, d, 1);
  const DenseVector q = gaussian_points(1, d, 2).front();

  for (const char* spec : {"lp:1", "lp:2", "topk:8"}) {
    const SymNorm norm = parse_norm(spec, d);
    const Oracle oracle = Oracle::build(points, norm, 0.25, 0.1, 42, OracleKnobs::desk());
    const auto est = oracle.query_all(q);
    std::printf("%s  R=%zu L=%zu U=%zu alpha=%.4f\n", spec, oracle.params().R, oracle.params().L,
                oracle.params().U, oracle.params().alpha);
    for (std::size_t i = 0; i < 4; ++i) {
      const double ex = exact_distance(norm, q, points[i]);
      std::printf("  i=%zu  estimate=%10.4f  exact=%10.4f  ratio=%.3f\n", i, est[i], ex, est[i] / ex);
    }
    std::printf("  est_pair(0,1)=%.4f exact=%.4f\n", oracle.est_pair(0, 1),
                exact_distance(norm, points[0], points[1]));
  }
}
