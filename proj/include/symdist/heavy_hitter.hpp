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

// Heavy-hitter bank: one FpEst per dyadic level plus a tail sketch, all
// sharing one per-slot counter layout, decoded by dyadic descent.

#pragma once

#include "symdist/common.hpp"
#include "symdist/norm_est.hpp"
#include "symdist/tail_est.hpp"

#include <optional>
#include <utility>

namespace symdist {

struct HHConfig {
  double eps_hh = 0.5;
  std::size_t n_slots = 1;
  std::size_t d = 1;  // power of two
  double delta = 0.1;
  std::uint64_t seed = 0;
  double phi = 1.0 / 7.0;
  double c_T = 4.0;
  double c_m = 8.0;
  double c_t = 6.0;
  double c_cap = 8.0;
};

struct DecodeResult {
  std::vector<std::uint32_t> indices;  // ascending
  double est_norm = 0.0;
  double threshold = 0.0;
  bool capped = false;  // some level overflowed the survivor cap
};

struct HeavyHitterSet {
  std::vector<std::pair<std::uint32_t, double>> entries;  // (index, magnitude), index ascending
  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
};

class HHBank {
 public:
  explicit HHBank(const HHConfig& cfg) : cfg_(cfg) {
    detail::require(cfg.eps_hh > 0.0 && cfg.eps_hh < 1.0, "hh_init: eps_hh must lie in (0, 1)");
    detail::require(cfg.d >= 1 && std::has_single_bit(cfg.d), "hh_init: d must be a power of two");
    detail::require(cfg.n_slots >= 1, "hh_init: n_slots must be positive");
    detail::require(cfg.c_cap > 0.0, "hh_init: c_cap must be positive");
    L_ = detail::log2_exact(cfg.d);
    delta_prime_ = cfg.eps_hh * cfg.delta / (12.0 * static_cast<double>(L_) + 1.0);
    const double eps_fp = cfg.eps_hh * cfg.eps_hh;
    std::size_t off = 0;
    for (unsigned l = 0; l <= L_; ++l) {
      FpEstConfig fc{cfg.n_slots, cfg.d, l, cfg.phi, eps_fp, delta_prime_,
                     detail::hash_key(cfg.seed, 0x6c76ULL, l), cfg.c_T, cfg.c_m};
      levels_.emplace_back(fc, false);
      level_off_.push_back(off);
      off += levels_.back().block_size();
    }
    const std::size_t k = detail::ceil_count(1.0 / eps_fp);
    tail_.emplace(TailConfig{cfg.n_slots, k, 1000.0, delta_prime_, detail::hash_key(cfg.seed, 0x7461ULL), cfg.c_t},
                  false);
    tail_off_ = off;
    width_ = off + tail_->block_size();
    // floor, so the output never exceeds c_cap / eps^2
    cap_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(cfg.c_cap / eps_fp + 1e-9)));
    data_.assign(cfg.n_slots * width_, 0.0);
  }

  const HHConfig& config() const { return cfg_; }
  double eps_hh() const { return cfg_.eps_hh; }
  std::size_t n_slots() const { return cfg_.n_slots; }
  std::size_t dim() const { return cfg_.d; }
  unsigned top_level() const { return L_; }
  double delta_prime() const { return delta_prime_; }
  std::size_t width() const { return width_; }
  std::size_t survivor_cap() const { return cap_; }
  const FpEstSketch& level(unsigned l) const { return levels_.at(l); }
  const TailSketch& tail() const { return *tail_; }

  std::span<double> slot_span(std::size_t slot) {
    check_slot(slot);
    return {data_.data() + slot * width_, width_};
  }
  std::span<const double> slot_span(std::size_t slot) const {
    check_slot(slot);
    return {data_.data() + slot * width_, width_};
  }
  std::vector<double>& counters() { return data_; }
  const std::vector<double>& counters() const { return data_; }

  void encode_single(std::size_t slot, std::size_t j, double z) { encode_block(slot_span(slot), j, z); }

  void encode(std::size_t slot, std::span<const double> v) {
    detail::require(v.size() == cfg_.d, "hh_encode: dimension mismatch");
    auto blk = slot_span(slot);
    for (std::size_t j = 0; j < v.size(); ++j) encode_block(blk, j, v[j]);
  }

  /// Adds z[s] at coordinate j of slot s for s < z.size(); each Gaussian row is drawn once.
  void encode_batch(std::size_t j, std::span<const double> z) {
    detail::require_index(j < cfg_.d, "hh_encode: coordinate out of range");
    detail::require_index(z.size() <= cfg_.n_slots, "hh_encode: more values than slots");
    std::vector<double> g;
    for (unsigned l = 0; l <= L_; ++l) {
      const FpEstSketch& sk = levels_[l];
      const std::size_t m = sk.counters_per_bucket();
      g.resize(m);
      const std::size_t xi = sk.block_of(j);
      for (std::size_t t = 0; t < sk.reps(); ++t) {
        detail::gaussian_stream(sk.gauss_key(j, t), g);
        const std::size_t off = level_off_[l] + (t * sk.buckets() + sk.bucket(t, xi)) * m;
        for (std::size_t s = 0; s < z.size(); ++s) {
          if (z[s] == 0.0) continue;
          double* row = data_.data() + s * width_ + off;
          for (std::size_t c = 0; c < m; ++c) row[c] += g[c] * z[s];
        }
      }
    }
    for (std::size_t t = 0; t < tail_->reps(); ++t) {
      const double w = tail_->weight(j, t);
      if (w == 0.0) continue;
      for (std::size_t s = 0; s < z.size(); ++s) data_[s * width_ + tail_off_ + t] += w * z[s];
    }
  }

  void subtract(std::size_t dst, std::size_t a, std::size_t b) {
    check_slot(a);
    check_slot(b);
    subtract_into(slot_span(dst), slot_span(a), slot_span(b));
  }

  DecodeResult decode(std::size_t slot) const { return decode_block(slot_span(slot)); }

  // --- codec over caller-held blocks of width() doubles

  void encode_block(std::span<double> blk, std::size_t j, double z) const {
    detail::require_index(j < cfg_.d, "hh_encode: coordinate out of range");
    if (z == 0.0) return;
    for (unsigned l = 0; l <= L_; ++l) levels_[l].update_block(level_span(blk, l), j, z);
    tail_->update_block(blk.subspan(tail_off_, tail_->block_size()), j, z);
  }

  void subtract_into(std::span<double> dst, std::span<const double> a, std::span<const double> b) const {
    for (std::size_t c = 0; c < width_; ++c) dst[c] = a[c] - b[c];
  }

  DecodeResult decode_block(std::span<const double> blk) const {
    DecodeResult out;
    const double tail_v = tail_->query_block(blk.subspan(tail_off_, tail_->block_size()));
    out.est_norm = static_cast<double>(tail_->k()) * tail_v;
    out.threshold = std::max(0.75 * cfg_.eps_hh * cfg_.eps_hh * out.est_norm, 1e-300);
    std::vector<std::pair<double, std::size_t>> live{{0.0, 0}};
    for (unsigned l = 0; l <= L_; ++l) {
      const FpEstSketch& sk = levels_[l];
      const auto lblk = level_span(blk, l);
      std::vector<std::pair<double, std::size_t>> next;
      for (const auto& [unused, parent] : live) {
        (void)unused;
        const std::size_t first = l == 0 ? 0 : 2 * parent;
        const std::size_t last = l == 0 ? 0 : 2 * parent + 1;
        for (std::size_t xi = first; xi <= last; ++xi) {
          const double est = sk.query_block(lblk, xi);
          if (est >= out.threshold) next.emplace_back(est, xi);
        }
      }
      if (next.size() > cap_) {
        out.capped = true;
        std::nth_element(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(cap_), next.end(),
                         [](const auto& x, const auto& y) { return x.first > y.first || (x.first == y.first && x.second < y.second); });
        next.resize(cap_);
      }
      live = std::move(next);
      if (live.empty()) break;
    }
    for (const auto& [est, xi] : live) out.indices.push_back(static_cast<std::uint32_t>(xi));
    std::sort(out.indices.begin(), out.indices.end());
    return out;
  }

 private:
  std::span<double> level_span(std::span<double> blk, unsigned l) const {
    return blk.subspan(level_off_[l], levels_[l].block_size());
  }
  std::span<const double> level_span(std::span<const double> blk, unsigned l) const {
    return blk.subspan(level_off_[l], levels_[l].block_size());
  }
  void check_slot(std::size_t slot) const {
    detail::require_index(slot < cfg_.n_slots, "hh bank: slot out of range");
  }

  HHConfig cfg_;
  unsigned L_ = 0;
  double delta_prime_ = 0.0;
  std::vector<FpEstSketch> levels_;
  std::vector<std::size_t> level_off_;
  std::optional<TailSketch> tail_;
  std::size_t tail_off_ = 0;
  std::size_t width_ = 0;
  std::size_t cap_ = 1;
  std::vector<double> data_;
};

inline HHBank hh_init(double eps_hh, std::size_t n_slots, std::size_t d, double delta, std::uint64_t seed) {
  HHConfig c;
  c.eps_hh = eps_hh;
  c.n_slots = n_slots;
  c.d = d;
  c.delta = delta;
  c.seed = seed;
  return HHBank(c);
}

}  // namespace symdist
