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

// Layer profile of a vector and the layer-vector sandwich for several norms.

#include "symdist/symdist.hpp"

#include <cstdio>

int main() {
  using namespace symdist;
  const DenseVector v = gaussian_points(1, 64, 5).front();
  const double alpha = 1.25;
  const LayerProfile p = layer_profile_exact(v, alpha);
  std::printf("alpha=%.2f occupied exponents %d..%d\n", alpha, p.offset, p.top_exponent());
  for (std::size_t t = 0; t < p.counts.size(); ++t) {
    if (p.counts[t] > 0) std::printf("  layer %3d: %g coordinates\n", p.offset + static_cast<int>(t), p.counts[t]);
  }
  for (const char* spec : {"lp:1", "lp:2", "lp:4", "topk:4", "ksupport:4", "maxmix:0.5"}) {
    const SymNorm norm = parse_norm(spec, v.size());
    const double exact = norm(v);
    const double layered = layer_vector_norm(norm, p).value;
    std::printf("%-11s exact=%9.4f  layer vector=%9.4f  ratio=%.4f (at most %.2f)\n", spec, exact, layered,
                layered / exact, alpha);
  }
  const LayerClasses c = classify_layers(p, 0.2, SymNorm::lp(2.0));
  std::printf("0.2-important layers:");
  for (std::size_t t = 0; t < c.exponents.size(); ++t) {
    if (c.important[t]) std::printf(" %d", c.exponents[t]);
  }
  std::printf("\n");
}
