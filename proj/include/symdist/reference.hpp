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

// Brute-force ground truth for everything the sketches estimate.

#pragma once

#include "symdist/common.hpp"
#include "symdist/norms.hpp"

#include <numeric>

namespace symdist {

inline DenseVector difference(std::span<const double> q, std::span<const double> x) {
  detail::require(q.size() == x.size(), "dimension mismatch");
  DenseVector v(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) v[j] = q[j] - x[j];
  return v;
}

inline double exact_distance(const SymNorm& norm, std::span<const double> q, std::span<const double> x) {
  return norm(difference(q, x));
}

/// Indices of the k largest magnitudes; equal magnitudes go to the lower index first.
inline std::vector<std::size_t> top_indices(std::span<const double> v, std::size_t k) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t take = std::min(k, v.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double x = std::abs(v[a]), y = std::abs(v[b]);
                      return x > y || (x == y && a < b);
                    });
  idx.resize(take);
  return idx;
}

/// l2 norm of v with its k largest magnitudes zeroed.
inline double exact_tail_norm(std::span<const double> v, std::size_t k) {
  std::vector<char> removed(v.size(), 0);
  for (std::size_t j : top_indices(v, k)) removed[j] = 1;
  DenseVector rest;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!removed[j]) rest.push_back(v[j]);
  }
  return SymNorm::eval_lp(rest, 2.0);
}

inline std::size_t heavy_tail_k(double eps) {
  return static_cast<std::size_t>(std::ceil(1.0 / (eps * eps) - 1e-12));
}

/// All j with |v_j| >= eps * ||v_tail(ceil(eps^-2))||_2, ascending.
inline std::vector<std::size_t> exact_heavy_hitters(std::span<const double> v, double eps) {
  detail::require(eps > 0.0 && eps < 1.0, "exact_heavy_hitters: eps must lie in (0, 1)");
  const double bar = eps * exact_tail_norm(v, heavy_tail_k(eps));
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j] != 0.0 && std::abs(v[j]) >= bar) out.push_back(j);
  }
  return out;
}

struct LayerClasses {
  std::vector<int> exponents;  // occupied exponents, ascending
  std::vector<bool> important;
  std::vector<bool> contributing;
  std::vector<bool> trackable;
};

/// Evaluates the importance, contribution and trackability tests on every occupied layer.
/// Trackability is measured against the tail of the layer vector itself.
inline LayerClasses classify_layers(const LayerProfile& profile, double beta, const SymNorm& norm) {
  detail::require(beta > 0.0 && beta <= 1.0, "classify_layers: beta must lie in (0, 1]");
  LayerClasses out;
  const double a = profile.alpha;
  std::vector<double> b;
  for (std::size_t t = 0; t < profile.counts.size(); ++t) {
    if (profile.counts[t] > 0.0) {
      out.exponents.push_back(profile.offset + static_cast<int>(t));
      b.push_back(profile.counts[t]);
    }
  }
  const std::size_t n = b.size();
  const double full = layer_vector_norm(norm, profile).value;
  const DenseVector lv = materialize_layer_vector(profile);
  const double tail_sq = [&] {
    const double t = exact_tail_norm(lv, heavy_tail_k(std::sqrt(beta)));
    return t * t;
  }();
  // squared masses relative to the top exponent keep the sums finite
  const int top = n ? out.exponents.back() : 0;
  auto mass = [&](std::size_t s) { return b[s] * std::pow(a, 2.0 * (out.exponents[s] - top)); };
  for (std::size_t s = 0; s < n; ++s) {
    double above = 0.0, below_mass = 0.0;
    for (std::size_t u = s + 1; u < n; ++u) above += b[u];
    for (std::size_t u = 0; u <= s; ++u) below_mass += mass(u);
    out.important.push_back(b[s] > beta * above && mass(s) >= beta * below_mass);

    LayerProfile only = profile;
    std::fill(only.counts.begin(), only.counts.end(), 0.0);
    only.counts[static_cast<std::size_t>(out.exponents[s] - profile.offset)] = b[s];
    out.contributing.push_back(layer_vector_norm(norm, only).value >= beta * full);

    out.trackable.push_back(std::pow(a, 2.0 * out.exponents[s]) >= beta * tail_sq);
  }
  return out;
}

/// Exact layer profile of q - x pushed through the layer-vector norm.
/// Isolates quantization error: the result lies in [exact, alpha * exact].
inline double reference_query(const SymNorm& norm, std::span<const double> q, std::span<const double> x,
                              double alpha) {
  return layer_vector_norm(norm, layer_profile_exact(difference(q, x), alpha)).value;
}

struct ExactReport {
  double distance = 0.0;
  LayerProfile profile;
  LayerClasses classes;
  std::vector<std::size_t> heavy;
  std::vector<double> tail;  // tail[k] = ||v_tail(k)||_2 for k = 0..nnz
};

inline ExactReport exact_report(const SymNorm& norm, std::span<const double> q, std::span<const double> x,
                                double alpha, double beta, double eps) {
  ExactReport r;
  const DenseVector v = difference(q, x);
  r.distance = norm(v);
  r.profile = layer_profile_exact(v, alpha);
  r.classes = classify_layers(r.profile, beta, norm);
  r.heavy = exact_heavy_hitters(v, eps);
  DenseVector mags;
  for (double z : v) {
    if (z != 0.0) mags.push_back(std::abs(z));
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());
  r.tail.assign(mags.size() + 1, 0.0);
  for (std::size_t k = mags.size(); k-- > 0;) {
    r.tail[k] = SymNorm::eval_lp(std::span<const double>(mags).subspan(k), 2.0);
  }
  return r;
}

}  // namespace symdist
