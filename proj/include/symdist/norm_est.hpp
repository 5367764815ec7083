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

// FpEst: one dyadic level of squared-l2 block-mass estimation.
//
// Each slot holds T x B x m counters. Coordinate j lands in block
// floor(j * 2^level / d), block xi lands in bucket h_t(xi), and every counter
// of that bucket receives g_{j,t,zeta} * z. Gaussians are regenerated from
// (seed, j, t), never stored.

#pragma once

#include "symdist/common.hpp"

namespace symdist {

struct FpEstConfig {
  std::size_t n_slots = 1;
  std::size_t d = 1;
  unsigned level = 0;
  double phi = 1.0 / 7.0;
  double eps_fp = 0.1;
  double delta = 0.1;
  std::uint64_t seed = 0;
  double c_T = 4.0;
  double c_m = 8.0;
};

class FpEstSketch {
 public:
  /// With own_storage = false the sketch is only a codec for caller-held blocks.
  explicit FpEstSketch(const FpEstConfig& cfg, bool own_storage = true)
      : n_slots_(cfg.n_slots), d_(cfg.d), level_(cfg.level), seed_(cfg.seed) {
    detail::require(cfg.n_slots >= 1 && cfg.d >= 1, "fp_init: n_slots and d must be positive");
    detail::require(cfg.phi > 0.0 && cfg.phi < 1.0, "fp_init: phi must lie in (0, 1)");
    detail::require(cfg.eps_fp > 0.0 && cfg.eps_fp < 1.0, "fp_init: eps_fp must lie in (0, 1)");
    detail::require(cfg.delta > 0.0 && cfg.delta < 1.0, "fp_init: delta must lie in (0, 1)");
    detail::require(cfg.c_T > 0.0 && cfg.c_m > 0.0, "fp_init: constants must be positive");
    detail::require(cfg.level < 63 && (std::size_t{1} << cfg.level) <= cfg.d, "fp_init: level exceeds log2(d)");
    blocks_ = std::size_t{1} << level_;
    reps_ = detail::ceil_count(cfg.c_T * std::log(static_cast<double>(cfg.n_slots) / cfg.delta));
    m_ = detail::ceil_count(cfg.c_m / (cfg.phi * cfg.phi));
    const auto want = detail::ceil_count(1.0 / cfg.eps_fp);
    buckets_ = std::min(want, blocks_);
    identity_hash_ = blocks_ <= buckets_;
    if (!identity_hash_) {
      bucket_of_.resize(reps_ * blocks_);
      for (std::size_t t = 0; t < reps_; ++t) {
        for (std::size_t xi = 0; xi < blocks_; ++xi) {
          bucket_of_[t * blocks_ + xi] =
              static_cast<std::uint32_t>(detail::hash_key(seed_, 0x68ULL, t, xi) % buckets_);
        }
      }
    }
    if (own_storage) counters_.assign(n_slots_ * block_size(), 0.0);
  }

  std::size_t n_slots() const { return n_slots_; }
  std::size_t dim() const { return d_; }
  unsigned level() const { return level_; }
  std::size_t reps() const { return reps_; }
  std::size_t buckets() const { return buckets_; }
  std::size_t counters_per_bucket() const { return m_; }
  std::size_t blocks() const { return blocks_; }
  std::size_t block_size() const { return reps_ * buckets_ * m_; }

  std::size_t block_of(std::size_t j) const {
    __extension__ using wide = unsigned __int128;
    return static_cast<std::size_t>((static_cast<wide>(j) << level_) / d_);
  }
  std::size_t bucket(std::size_t t, std::size_t xi) const {
    return identity_hash_ ? xi : bucket_of_[t * blocks_ + xi];
  }

  // --- slot API over owned storage

  void update(std::size_t slot, std::size_t j, double z) {
    check_slot(slot);
    update_block(slot_span(slot), j, z);
  }

  /// Adds z[s] at coordinate j of slot s for every s < z.size(); Gaussians are drawn once.
  void update_batch(std::size_t j, std::span<const double> z) {
    detail::require_index(z.size() <= n_slots_, "fp_update: more values than slots");
    detail::require_index(j < d_, "fp_update: coordinate out of range");
    const std::size_t xi = block_of(j);
    std::vector<double> g(m_);
    const std::size_t stride = block_size();
    for (std::size_t t = 0; t < reps_; ++t) {
      detail::gaussian_stream(gauss_key(j, t), g);
      const std::size_t off = (t * buckets_ + bucket(t, xi)) * m_;
      for (std::size_t s = 0; s < z.size(); ++s) {
        if (z[s] == 0.0) continue;
        double* row = counters_.data() + s * stride + off;
        for (std::size_t c = 0; c < m_; ++c) row[c] += g[c] * z[s];
      }
    }
  }

  void subtract(std::size_t dst, std::size_t a, std::size_t b) {
    check_slot(dst);
    check_slot(a);
    check_slot(b);
    const std::size_t w = block_size();
    double* out = counters_.data() + dst * w;
    const double* pa = counters_.data() + a * w;
    const double* pb = counters_.data() + b * w;
    for (std::size_t c = 0; c < w; ++c) out[c] = pa[c] - pb[c];
  }

  double query(std::size_t slot, std::size_t xi) const {
    check_slot(slot);
    return query_block(slot_span(slot), xi);
  }

  // --- codec over caller-held blocks of block_size() doubles

  void update_block(std::span<double> blk, std::size_t j, double z) const {
    detail::require_index(j < d_, "fp_update: coordinate out of range");
    if (z == 0.0) return;
    const std::size_t xi = block_of(j);
    std::vector<double> g(m_);
    for (std::size_t t = 0; t < reps_; ++t) {
      detail::gaussian_stream(gauss_key(j, t), g);
      double* row = blk.data() + (t * buckets_ + bucket(t, xi)) * m_;
      for (std::size_t c = 0; c < m_; ++c) row[c] += g[c] * z;
    }
  }

  /// median over reps of (median_zeta |counter| / median|N(0,1)|)^2
  double query_block(std::span<const double> blk, std::size_t xi) const {
    detail::require_index(xi < blocks_, "fp_query: block out of range");
    thread_local std::vector<double> abs_row, per_rep;
    abs_row.resize(m_);
    per_rep.resize(reps_);
    for (std::size_t t = 0; t < reps_; ++t) {
      const double* row = blk.data() + (t * buckets_ + bucket(t, xi)) * m_;
      for (std::size_t c = 0; c < m_; ++c) abs_row[c] = std::abs(row[c]);
      const double s = detail::small_median(abs_row.data(), m_) / kAbsGaussianMedian;
      per_rep[t] = s * s;
    }
    return detail::small_median(per_rep.data(), reps_);
  }

  std::span<double> slot_span(std::size_t slot) {
    return {counters_.data() + slot * block_size(), block_size()};
  }
  std::span<const double> slot_span(std::size_t slot) const {
    return {counters_.data() + slot * block_size(), block_size()};
  }
  std::vector<double>& counters() { return counters_; }
  const std::vector<double>& counters() const { return counters_; }

  std::uint64_t gauss_key(std::size_t j, std::size_t t) const { return detail::hash_key(seed_, 0x67ULL, j, t); }

 private:
  void check_slot(std::size_t slot) const {
    detail::require_index(slot < n_slots_ && !counters_.empty(), "fp sketch: slot out of range");
  }

  std::size_t n_slots_, d_;
  unsigned level_;
  std::uint64_t seed_;
  std::size_t blocks_ = 1, reps_ = 1, m_ = 1, buckets_ = 1;
  bool identity_hash_ = true;
  std::vector<std::uint32_t> bucket_of_;
  std::vector<double> counters_;
};

inline FpEstSketch fp_init(std::size_t n_slots, std::size_t d, unsigned level, double phi, double eps_fp,
                           double delta, std::uint64_t seed) {
  return FpEstSketch(FpEstConfig{n_slots, d, level, phi, eps_fp, delta, seed});
}

}  // namespace symdist
