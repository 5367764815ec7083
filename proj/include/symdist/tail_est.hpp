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

// Tail-mass sketch: y_t = sum_j delta_{j,t} g_{j,t} x_j with
// delta_{j,t} ~ Bernoulli(1/(100k)); the query is median_t y_t^2.

#pragma once

#include "symdist/common.hpp"

namespace symdist {

struct TailConfig {
  std::size_t n_slots = 1;
  std::size_t k = 1;
  double C0 = 1000.0;
  double delta = 0.1;
  std::uint64_t seed = 0;
  double c_t = 6.0;
};

class TailSketch {
 public:
  explicit TailSketch(const TailConfig& cfg, bool own_storage = true)
      : n_slots_(cfg.n_slots), k_(cfg.k), C0_(cfg.C0), seed_(cfg.seed) {
    detail::require(cfg.n_slots >= 1, "tail_init: n_slots must be positive");
    detail::require(cfg.k >= 1, "tail_init: k must be >= 1");
    detail::require(cfg.C0 >= 1000.0, "tail_init: C0 must be >= 1000");
    detail::require(cfg.delta > 0.0 && cfg.delta < 1.0, "tail_init: delta must lie in (0, 1)");
    detail::require(cfg.c_t > 0.0, "tail_init: c_t must be positive");
    m_ = detail::ceil_count(cfg.c_t * std::log(static_cast<double>(cfg.n_slots) / cfg.delta));
    keep_ = 1.0 / (100.0 * static_cast<double>(k_));
    if (own_storage) y_.assign(n_slots_ * m_, 0.0);
  }

  std::size_t n_slots() const { return n_slots_; }
  std::size_t reps() const { return m_; }
  std::size_t k() const { return k_; }
  double C0() const { return C0_; }
  std::size_t block_size() const { return m_; }

  /// delta_{j,t} * g_{j,t}; zero for most (j, t).
  double weight(std::size_t j, std::size_t t) const {
    if (detail::to_unit(detail::hash_key(seed_, 0x62ULL, j, t)) >= keep_) return 0.0;
    return detail::gaussian_at(detail::hash_key(seed_, 0x67ULL, j, t));
  }

  void update(std::size_t slot, std::size_t j, double z) {
    check_slot(slot);
    update_block(slot_span(slot), j, z);
  }

  void update_batch(std::size_t j, std::span<const double> z) {
    detail::require_index(z.size() <= n_slots_, "tail_update: more values than slots");
    for (std::size_t t = 0; t < m_; ++t) {
      const double w = weight(j, t);
      if (w == 0.0) continue;
      for (std::size_t s = 0; s < z.size(); ++s) y_[s * m_ + t] += w * z[s];
    }
  }

  void subtract(std::size_t dst, std::size_t a, std::size_t b) {
    check_slot(dst);
    check_slot(a);
    check_slot(b);
    for (std::size_t t = 0; t < m_; ++t) y_[dst * m_ + t] = y_[a * m_ + t] - y_[b * m_ + t];
  }

  double query(std::size_t slot) const {
    check_slot(slot);
    return query_block(slot_span(slot));
  }

  void update_block(std::span<double> blk, std::size_t j, double z) const {
    if (z == 0.0) return;
    for (std::size_t t = 0; t < m_; ++t) {
      const double w = weight(j, t);
      if (w != 0.0) blk[t] += w * z;
    }
  }

  double query_block(std::span<const double> blk) const {
    std::vector<double> sq(m_);
    for (std::size_t t = 0; t < m_; ++t) sq[t] = blk[t] * blk[t];
    return detail::median_inplace(sq);
  }

  std::span<double> slot_span(std::size_t slot) { return {y_.data() + slot * m_, m_}; }
  std::span<const double> slot_span(std::size_t slot) const { return {y_.data() + slot * m_, m_}; }
  std::vector<double>& counters() { return y_; }
  const std::vector<double>& counters() const { return y_; }

 private:
  void check_slot(std::size_t slot) const {
    detail::require_index(slot < n_slots_ && !y_.empty(), "tail sketch: slot out of range");
  }

  std::size_t n_slots_, k_;
  double C0_;
  std::uint64_t seed_;
  std::size_t m_ = 1;
  double keep_ = 0.01;
  std::vector<double> y_;
};

inline TailSketch tail_init(std::size_t n_slots, std::size_t k, double C0, double delta, std::uint64_t seed) {
  return TailSketch(TailConfig{n_slots, k, C0, delta, seed});
}

}  // namespace symdist
