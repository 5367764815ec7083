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

// Distance oracle for symmetric norms.
//
// Every (r, l, u) cell subsamples coordinates with probability 2^-l, using the
// same bitmap for all points and for queries. A query subtracts its cell
// sketch from point i's, decodes heavy coordinates, keeps them only if their
// stored magnitudes sit unambiguously inside one layer, and turns per-level
// hit frequencies into layer-size estimates.

#pragma once

#include "symdist/common.hpp"
#include "symdist/heavy_hitter.hpp"
#include "symdist/norms.hpp"

#include <exception>
#include <map>
#include <numeric>
#include <optional>
#include <thread>

namespace symdist {

/// Leading constants of every derived parameter plus the sketch constants.
struct OracleKnobs {
  double k_R = 1.0;
  double k_U = 1.0;
  double k_beta = 1.0;
  double k_gamma = 1.0;
  double k_eps1 = 1.0;
  double k_A = 1.0;  // multiplier on the hit-count threshold that defines q_k
  double c_T = 4.0;
  double c_m = 8.0;
  double c_t = 6.0;
  double c_cap = 8.0;
  double verify_slack = 1e-9;
  double beta_max = 0.5;

  static OracleKnobs paper() { return {}; }

  /// Small grids for laptop-sized runs; the per-query failure bound is then
  /// checked empirically rather than implied by the formulas.
  static OracleKnobs desk() {
    OracleKnobs k;
    k.k_R = 7.5e-4;
    k.k_U = 0.05;
    k.k_beta = 3.02e7;
    k.k_eps1 = 14.4;
    k.k_A = 150.0;
    k.c_T = 0.25;
    k.c_m = 8.0 / 49.0;
    k.c_t = 1.0;
    k.c_cap = 8.0;
    return k;
  }

  static OracleKnobs by_name(const std::string& name) {
    if (name == "paper") return paper();
    if (name == "desk") return desk();
    throw std::invalid_argument("unknown parameter profile '" + name + "' (expected paper or desk)");
  }

  void validate() const {
    for (double v : {k_R, k_U, k_beta, k_gamma, k_eps1, k_A, c_T, c_m, c_t, c_cap}) {
      detail::require(std::isfinite(v) && v > 0.0, "knob values must be positive and finite");
    }
    detail::require(verify_slack >= 0.0 && verify_slack < 1.0, "verify_slack must lie in [0, 1)");
    detail::require(beta_max > 0.0 && beta_max < 1.0, "beta_max must lie in (0, 1)");
  }
};

struct OracleParams {
  double eps = 0.25;
  double delta = 0.1;
  std::size_t n = 1;
  std::size_t d = 1;
  double log2d = 1.0;  // max(1, log2 d)
  std::size_t L = 1;
  std::size_t R = 1;
  std::size_t U = 1;
  double eps1 = 0.0;
  double beta = 0.0;
  double eps_hh = 0.0;
  double gamma = 0.0;
  double xi = 1.0;
  double alpha = 2.0;
  std::size_t P = 1;
  MmcBound mmc;
  OracleKnobs knobs;

  /// xi in [1/2, 1] is an input so that it can be frozen and persisted.
  static OracleParams derive(double eps, double delta, std::size_t n, std::size_t d, const MmcBound& mmc,
                             const OracleKnobs& knobs, double xi) {
    detail::require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
    detail::require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
    detail::require(n >= 1 && d >= 1, "need n >= 1 and d >= 1");
    detail::require(xi >= 0.5 && xi <= 1.0, "xi must lie in [1/2, 1]");
    detail::require(mmc.value >= 1.0 && std::isfinite(mmc.value), "mmc must be >= 1");
    knobs.validate();
    OracleParams p;
    p.eps = eps;
    p.delta = delta;
    p.n = n;
    p.d = d;
    p.mmc = mmc;
    p.knobs = knobs;
    p.xi = xi;
    const double dd = static_cast<double>(d);
    p.log2d = std::max(1.0, std::log2(dd));
    p.L = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::log2(dd) - 1e-12)));
    p.eps1 = knobs.k_eps1 * eps * eps / p.log2d;
    detail::require(p.eps1 < eps, "derived eps1 must be below eps (lower k_eps1)");
    auto ceil_pos = [](double x) {
      detail::require(std::isfinite(x) && x < 1e15, "derived grid size overflows");
      return detail::ceil_count(x);
    };
    const double ln_n = std::log(static_cast<double>(n) / delta);
    p.R = ceil_pos(knobs.k_R / (p.eps1 * p.eps1) * ln_n * p.log2d * p.log2d);
    p.U = ceil_pos(knobs.k_U * std::log(static_cast<double>(n) * dd * dd / delta));
    p.beta = std::min(knobs.beta_max, knobs.k_beta * std::pow(eps, 5) / (mmc.value * mmc.value * std::pow(p.log2d, 5)));
    p.eps_hh = std::sqrt(p.beta);
    p.gamma = knobs.k_gamma * eps;
    detail::require(p.gamma <= 1.0, "k_gamma * eps must be <= 1 so that alpha <= 2");
    p.alpha = 1.0 + p.gamma * xi;
    p.P = static_cast<std::size_t>(std::ceil(std::log(dd) / std::log(p.alpha))) + 1;
    return p;
  }

  /// Hit count a level needs before it can define q_k.
  double count_threshold() const {
    return knobs.k_A * static_cast<double>(R) * std::log(1.0 / delta) / (100.0 * log2d);
  }

  std::size_t cells() const { return R * L * U; }
};

/// Probability that none of b coordinates survives level-q subsampling: (1 - 2^-q)^b.
inline double track_miss_probability(double b, int q) {
  return std::exp(b * std::log1p(-std::ldexp(1.0, -q)));
}

inline double track_probability(double b, int q) {
  return -std::expm1(b * std::log1p(-std::ldexp(1.0, -q)));
}

/// Layer size b with (1 - 2^-q)^b = miss. Taking the miss probability rather
/// than eta avoids the cancellation in 1 - eta once eta is close to 1.
inline double invert_miss_probability(double miss, int q) {
  detail::require(miss > 0.0 && miss <= 1.0, "miss probability must lie in (0, 1]");
  detail::require(q >= 1, "level q must be >= 1");
  return std::log(miss) / std::log1p(-std::ldexp(1.0, -q));
}

/// Layer size b with 1 - (1 - 2^-q)^b = eta, i.e. ln(1 - eta) / ln(1 - 2^-q).
inline double invert_track_probability(double eta, int q) {
  if (eta <= 0.0) return 0.0;
  detail::require(eta < 1.0, "track probability must be < 1");
  detail::require(q >= 1, "level q must be >= 1");
  return std::log1p(-eta) / std::log1p(-std::ldexp(1.0, -q));
}

/// Per-layer output of the frequency-to-size pipeline.
struct LayerEstimate {
  std::size_t levels = 0;      // rows of A are levels 1..levels
  std::vector<int> exponents;  // columns, ascending
  std::vector<std::vector<std::uint32_t>> A;  // A[l-1][k]
  std::vector<int> q;          // 0 when undefined
  std::vector<double> eta_hat;
  std::vector<double> c;

  LayerProfile profile(double alpha, std::size_t d) const {
    std::map<int, double> m;
    for (std::size_t k = 0; k < exponents.size(); ++k) {
      if (c[k] > 0.0) m[exponents[k]] = c[k];
    }
    return LayerProfile::from_map(alpha, m, d);
  }
};

/// Turns hit counts A[l-1][k] into (q_k, eta_hat_k, c_k).
inline void estimate_layer_sizes(LayerEstimate& est, std::size_t R, double threshold, double eps1) {
  const std::size_t P = est.exponents.size();
  est.q.assign(P, 0);
  est.eta_hat.assign(P, 0.0);
  est.c.assign(P, 0.0);
  for (std::size_t k = 0; k < P; ++k) {
    for (std::size_t l = est.levels; l >= 1; --l) {
      if (static_cast<double>(est.A[l - 1][k]) >= threshold) {
        est.q[k] = static_cast<int>(l);
        break;
      }
    }
    if (est.q[k] == 0) continue;
    const double hits = static_cast<double>(est.A[static_cast<std::size_t>(est.q[k]) - 1][k]);
    const double denom = static_cast<double>(R) * (1.0 + eps1);
    est.eta_hat[k] = hits / denom;
    est.c[k] = invert_miss_probability((denom - hits) / denom, est.q[k]);
  }
}

/// Builds a LayerEstimate from the layer exponents seen in each good set H_{r,l}.
/// hits[(l-1) * R + r] lists the distinct exponents found by repetition r at level l.
inline LayerEstimate layer_estimate_from_hits(const std::vector<std::vector<int>>& hits, std::size_t R,
                                              std::size_t levels, double threshold, double eps1) {
  LayerEstimate est;
  est.levels = levels;
  std::map<int, std::size_t> col;
  for (const auto& h : hits) {
    for (int e : h) col.emplace(e, 0);
  }
  std::size_t t = 0;
  for (auto& [e, c] : col) {
    c = t++;
    est.exponents.push_back(e);
  }
  est.A.assign(levels, std::vector<std::uint32_t>(est.exponents.size(), 0));
  for (std::size_t l = 1; l <= levels; ++l) {
    for (std::size_t r = 0; r < R; ++r) {
      for (int e : hits[(l - 1) * R + r]) ++est.A[l - 1][col[e]];
    }
  }
  estimate_layer_sizes(est, R, threshold, eps1);
  return est;
}

/// Layer exponent of a verified magnitude, or nullopt when the magnitude is
/// too close to the layer's lower edge to be placed with confidence.
inline std::optional<int> verified_layer(double value, double alpha, double slack) {
  if (!(value > 0.0) || !std::isfinite(value)) return std::nullopt;
  const int w = layer_index(value, alpha);
  if (std::pow(alpha, w - 1) >= value / (1.0 + slack)) return std::nullopt;
  return w;
}

struct OracleCell {
  std::vector<std::uint32_t> coords;  // sampled coordinates, ascending
  HHBank bank;
  std::vector<double> xbar;  // n x |coords|, row-major
};

/// Per-query encodings; owned by the caller so queries never share writable state.
struct QuerySketch {
  std::vector<std::vector<double>> blocks;  // one per cell
  std::vector<std::vector<double>> qbar;    // q restricted to each cell's coordinates
};

class Oracle {
 public:
  static Oracle build(std::vector<DenseVector> points, const SymNorm& norm, double eps, double delta,
                      std::uint64_t seed, const OracleKnobs& knobs = OracleKnobs::paper(),
                      std::optional<MmcBound> mmc = std::nullopt) {
    detail::require(!points.empty(), "oracle needs at least one point");
    const std::size_t d = points.front().size();
    detail::require(d >= 1, "points must have positive dimension");
    const MmcBound m = mmc ? *mmc : mmc_bound(norm, d);
    const double xi = 0.5 + 0.5 * detail::to_unit(detail::hash_key(seed, 0x7869ULL));
    OracleParams p = OracleParams::derive(eps, delta, points.size(), d, m, knobs, xi);
    return Oracle(p, norm, seed, std::move(points), true);
  }

  /// Rebuilds from persisted state. With encode = false the counters stay
  /// zero and must be filled by the caller.
  Oracle(OracleParams params, const SymNorm& norm, std::uint64_t seed, std::vector<DenseVector> points,
         bool encode)
      : params_(std::move(params)), norm_(norm.with_dim(params_.d)), seed_(seed), points_(std::move(points)) {
    detail::require(points_.size() == params_.n, "point count does not match parameters");
    for (const auto& x : points_) {
      detail::require(x.size() == params_.d, "all points must have the same dimension");
      for (double v : x) {
        if (!std::isfinite(v)) throw DataError("non-finite point coordinate");
      }
    }
    init_cells(encode);
  }

  const OracleParams& params() const { return params_; }
  const SymNorm& norm() const { return norm_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t n() const { return params_.n; }
  std::size_t d() const { return params_.d; }
  const std::vector<DenseVector>& points() const { return points_; }
  const std::vector<OracleCell>& cells() const { return cells_; }
  std::vector<OracleCell>& cells() { return cells_; }

  std::size_t cell_index(std::size_t r, std::size_t l, std::size_t u) const {
    return (r * params_.L + (l - 1)) * params_.U + u;
  }
  bool sampled(std::size_t r, std::size_t l, std::size_t u, std::size_t j) const {
    return detail::to_unit(detail::hash_key(seed_, 0x626dULL, r, l, u, j)) < std::ldexp(1.0, -static_cast<int>(l));
  }

  void update_x(std::size_t i, const DenseVector& z) {
    detail::require_index(i < params_.n, "update: point index out of range");
    detail::require(z.size() == params_.d, "update: dimension mismatch");
    for (double v : z) {
      if (!std::isfinite(v)) throw DataError("update: non-finite coordinate");
    }
    for (auto& cell : cells_) {
      const std::size_t s = cell.coords.size();
      double* row = cell.xbar.data() + i * s;
      for (std::size_t p = 0; p < s; ++p) {
        const double nz = z[cell.coords[p]];
        if (nz != row[p]) cell.bank.encode_single(i, p, nz - row[p]);
        row[p] = nz;
      }
    }
    points_[i] = z;
  }

  QuerySketch encode_query(std::span<const double> q) const {
    detail::require(q.size() == params_.d, "query: dimension mismatch");
    for (double v : q) {
      if (!std::isfinite(v)) throw DataError("query: non-finite coordinate");
    }
    QuerySketch qs;
    qs.blocks.resize(cells_.size());
    qs.qbar.resize(cells_.size());
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      const auto& cell = cells_[c];
      qs.blocks[c].assign(cell.bank.width(), 0.0);
      qs.qbar[c].resize(cell.coords.size());
      for (std::size_t p = 0; p < cell.coords.size(); ++p) {
        const double v = q[cell.coords[p]];
        qs.qbar[c][p] = v;
        cell.bank.encode_block(qs.blocks[c], p, v);
      }
    }
    return qs;
  }

  std::vector<double> query_all(std::span<const double> q, unsigned threads = 1) const {
    std::vector<std::size_t> all(params_.n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return query_set(q, all, threads);
  }

  /// Estimates for the listed indices, in the order given.
  std::vector<double> query_set(std::span<const double> q, std::span<const std::size_t> S,
                                unsigned threads = 1) const {
    for (std::size_t i : S) detail::require_index(i < params_.n, "query: subset index out of range");
    const QuerySketch qs = encode_query(q);
    std::vector<double> out(S.size(), 0.0);
    parallel_for(S.size(), threads, [&](std::size_t t, std::vector<double>& scratch) {
      out[t] = estimate_from_query(qs, S[t], scratch).value;
    });
    return out;
  }

  double est_pair(std::size_t i, std::size_t j) const {
    detail::require_index(i < params_.n && j < params_.n, "estpair: point index out of range");
    std::vector<double> scratch;
    const LayerEstimate est = decode_layers(
        [&](std::size_t c, std::vector<double>& buf) {
          const auto& bank = cells_[c].bank;
          buf.resize(bank.width());
          bank.subtract_into(buf, bank.slot_span(j), bank.slot_span(i));
        },
        [&](std::size_t c, std::size_t p) {
          const auto& cell = cells_[c];
          const std::size_t s = cell.coords.size();
          return std::abs(cell.xbar[j * s + p] - cell.xbar[i * s + p]);
        },
        scratch);
    return layer_vector_norm(norm_, est.profile(params_.alpha, params_.d)).value;
  }

  /// Full diagnostic for one point: the layer estimate and the resulting distance.
  struct PointEstimate {
    LayerEstimate layers;
    double value = 0.0;
    bool clamped = false;
  };

  PointEstimate estimate_from_query(const QuerySketch& qs, std::size_t i, std::vector<double>& scratch) const {
    PointEstimate pe;
    pe.layers = decode_layers(
        [&](std::size_t c, std::vector<double>& buf) {
          const auto& bank = cells_[c].bank;
          buf.resize(bank.width());
          bank.subtract_into(buf, qs.blocks[c], bank.slot_span(i));
        },
        [&](std::size_t c, std::size_t p) {
          const auto& cell = cells_[c];
          return std::abs(qs.qbar[c][p] - cell.xbar[i * cell.coords.size() + p]);
        },
        scratch);
    const LayerNorm ln = layer_vector_norm(norm_, pe.layers.profile(params_.alpha, params_.d));
    pe.value = ln.value;
    pe.clamped = ln.clamped;
    return pe;
  }

  /// Locate-and-verify over every cell followed by the size estimate.
  /// fill(c, buf) writes the difference sketch of cell c; value(c, p) returns
  /// the stored magnitude of the difference at local coordinate p.
  template <typename Fill, typename Value>
  LayerEstimate decode_layers(Fill&& fill, Value&& value, std::vector<double>& buf) const {
    const std::size_t R = params_.R, L = params_.L, U = params_.U;
    std::vector<std::vector<int>> hits(L * R);
    std::vector<int> layers;
    for (std::size_t r = 0; r < R; ++r) {
      for (std::size_t l = 1; l <= L; ++l) {
        for (std::size_t u = 0; u < U; ++u) {
          const std::size_t c = cell_index(r, l, u);
          const auto& cell = cells_[c];
          if (cell.coords.empty()) break;  // empty good set
          fill(c, buf);
          const DecodeResult dec = cell.bank.decode_block(buf);
          layers.clear();
          bool void_set = false;
          for (std::uint32_t p : dec.indices) {
            if (p >= cell.coords.size()) continue;
            const double v = value(c, p);
            if (!(v > 0.0)) continue;
            const auto w = verified_layer(v, params_.alpha, params_.knobs.verify_slack);
            if (!w) {
              void_set = true;
              break;
            }
            layers.push_back(*w);
          }
          if (void_set) continue;
          std::sort(layers.begin(), layers.end());
          layers.erase(std::unique(layers.begin(), layers.end()), layers.end());
          hits[(l - 1) * R + r] = layers;
          break;
        }
      }
    }
    return layer_estimate_from_hits(hits, R, L, params_.count_threshold(), params_.eps1);
  }

 private:
  void init_cells(bool encode) {
    const auto& p = params_;
    cells_.clear();
    cells_.reserve(p.cells());
    std::vector<double> column(p.n);
    for (std::size_t r = 0; r < p.R; ++r) {
      for (std::size_t l = 1; l <= p.L; ++l) {
        for (std::size_t u = 0; u < p.U; ++u) {
          std::vector<std::uint32_t> coords;
          for (std::size_t j = 0; j < p.d; ++j) {
            if (sampled(r, l, u, j)) coords.push_back(static_cast<std::uint32_t>(j));
          }
          HHConfig hc;
          hc.eps_hh = p.eps_hh;
          hc.n_slots = p.n;
          hc.d = detail::next_pow2(coords.size());
          hc.delta = p.delta;
          hc.seed = detail::hash_key(seed_, 0x63656c6cULL, r, l, u);
          hc.c_T = p.knobs.c_T;
          hc.c_m = p.knobs.c_m;
          hc.c_t = p.knobs.c_t;
          hc.c_cap = p.knobs.c_cap;
          OracleCell cell{std::move(coords), HHBank(hc), {}};
          const std::size_t s = cell.coords.size();
          cell.xbar.resize(p.n * s);
          for (std::size_t i = 0; i < p.n; ++i) {
            for (std::size_t q = 0; q < s; ++q) cell.xbar[i * s + q] = points_[i][cell.coords[q]];
          }
          if (encode) {
            for (std::size_t q = 0; q < s; ++q) {
              for (std::size_t i = 0; i < p.n; ++i) column[i] = cell.xbar[i * s + q];
              cell.bank.encode_batch(q, column);
            }
          }
          cells_.push_back(std::move(cell));
        }
      }
    }
  }

  template <typename Body>
  static void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), count);
    if (workers <= 1) {
      std::vector<double> scratch;
      for (std::size_t t = 0; t < count; ++t) body(t, scratch);
      return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          std::vector<double> scratch;
          for (std::size_t t = w; t < count; t += workers) body(t, scratch);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  OracleParams params_;
  SymNorm norm_;
  std::uint64_t seed_;
  std::vector<DenseVector> points_;
  std::vector<OracleCell> cells_;
};

}  // namespace symdist
