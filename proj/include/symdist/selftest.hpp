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

// Statistical and deterministic suites shared by `sndo selftest` and the
// acceptance binary. Ground truth always comes from reference.hpp.

#pragma once

#include "symdist/dataset.hpp"
#include "symdist/heavy_hitter.hpp"
#include "symdist/norms.hpp"
#include "symdist/oracle.hpp"
#include "symdist/persist.hpp"
#include "symdist/reference.hpp"

#include <chrono>
#include <cstring>
#include <functional>
#include <random>
#include <set>

namespace symdist {

struct SuiteResult {
  std::string name;
  bool passed = false;
  double coverage = 0.0;  // fraction meeting the check (1 for deterministic suites)
  double required = 1.0;
  double seconds = 0.0;
  double time_limit = 0.0;  // 0 means no limit
  std::string detail;
};

struct SelftestScale {
  std::size_t sandwich_trials = 1000;
  std::size_t recovery_seeds = 200;
  std::size_t recovery_R = 4000;
  std::size_t hh_seeds = 200;
  std::size_t tail_seeds = 500;
  std::size_t fp_seeds = 500;
  std::size_t e2e_seeds = 20;
  std::size_t linearity_trials = 100;
  std::size_t update_trials = 10;
  std::size_t persist_seeds = 10;
  std::size_t mc_trials = 1001;

  static SelftestScale full() { return {}; }
  static SelftestScale quick() {
    SelftestScale s;
    s.sandwich_trials = 200;
    s.recovery_seeds = 20;
    s.recovery_R = 4000;
    s.hh_seeds = 30;
    s.tail_seeds = 100;
    s.fp_seeds = 60;
    s.e2e_seeds = 3;
    s.linearity_trials = 20;
    s.update_trials = 3;
    s.persist_seeds = 3;
    s.mc_trials = 301;
    return s;
  }
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline SuiteResult finish(SuiteResult r, std::chrono::steady_clock::time_point t0) {
  r.seconds = seconds_since(t0);
  r.passed = r.coverage >= r.required && (r.time_limit <= 0.0 || r.seconds < r.time_limit);
  return r;
}

inline double rel_gap(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace detail

/// ||L(v)||/alpha <= ||v|| <= ||L(v)|| on random vectors, alphas and norms.
inline SuiteResult suite_layer_sandwich(std::size_t trials, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  r.name = "layer sandwich";
  r.time_limit = 5.0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dim(16, 256);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  std::size_t fails = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t d = dim(rng);
    const double alpha = 1.0 + 0.001 + 0.999 * u(rng);
    DenseVector v(d);
    for (auto& x : v) x = u(rng) < 0.1 ? 0.0 : g(rng) * std::exp(10.0 * u(rng) - 5.0);
    SymNorm norm = [&] {
      switch (t % 5) {
        case 0: return SymNorm::lp(1.0, d);
        case 1: return SymNorm::lp(2.0, d);
        case 2: return SymNorm::lp(4.0, d);
        case 3: return SymNorm::top_k(16, d);
        default: return SymNorm::max_mix(0.5, d);
      }
    }();
    const double exact = norm(v);
    const double lv = layer_vector_norm(norm, layer_profile_exact(v, alpha)).value;
    if (lv / alpha > exact * (1.0 + 1e-9) || exact > lv * (1.0 + 1e-9)) ++fails;
  }
  r.coverage = trials ? 1.0 - static_cast<double>(fails) / static_cast<double>(trials) : 1.0;
  r.detail = std::to_string(fails) + " failures in " + std::to_string(trials) + " triples";
  return detail::finish(r, t0);
}

/// Planted layer profile: four layers ten exponents apart with growing counts.
inline DenseVector planted_layers(std::size_t d, double alpha, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int top = static_cast<int>(u(rng) * 6.0);
  const int counts[4] = {1 + static_cast<int>(u(rng) * 3), 4 + static_cast<int>(u(rng) * 7),
                         15 + static_cast<int>(u(rng) * 16), 40 + static_cast<int>(u(rng) * 41)};
  std::vector<std::size_t> pos(d);
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  std::shuffle(pos.begin(), pos.end(), rng);
  DenseVector v(d, 0.0);
  std::size_t next = 0;
  for (int layer = 0; layer < 4; ++layer) {
    const int e = top - 10 * layer;
    const double lo = std::pow(alpha, e - 1), hi = std::pow(alpha, e);
    for (int c = 0; c < counts[layer] && next < d; ++c) {
      // stay clear of the edges so the exact layer is unambiguous
      const double x = lo + (0.05 + 0.9 * u(rng)) * (hi - lo);
      v[pos[next++]] = u(rng) < 0.5 ? -x : x;
    }
  }
  return v;
}

/// Simulated frequency-to-size pipeline with exact subsampling and ideal
/// heavy-hitter recovery.
inline SuiteResult suite_layer_recovery(std::size_t seeds, std::size_t R, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  r.name = "layer-size recovery";
  r.time_limit = 60.0;
  r.required = 0.9;
  const std::size_t d = 128;
  const double eps = 0.25, delta = 0.1, eps1 = 0.1, k_A = 30.0;
  const OracleKnobs desk = OracleKnobs::desk();
  std::size_t good = 0, total = 0, side = 0, side_bad = 0;
  for (std::size_t s = 0; s < seeds; ++s) {
    std::mt19937_64 rng(detail::hash_key(seed, s));
    const double xi = 0.5 + 0.5 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const OracleParams p = OracleParams::derive(eps, delta, 1, d, MmcBound{}, desk, xi);
    const DenseVector v = planted_layers(d, p.alpha, rng);
    const LayerProfile exact = layer_profile_exact(v, p.alpha);
    const LayerClasses cls = classify_layers(exact, p.beta, SymNorm::lp(2.0));
    const std::size_t L = p.L;
    std::vector<std::vector<int>> hits(L * R);
    DenseVector sub(d);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t l = 1; l <= L; ++l) {
      const double keep = std::ldexp(1.0, -static_cast<int>(l));
      for (std::size_t rep = 0; rep < R; ++rep) {
        for (std::size_t j = 0; j < d; ++j) sub[j] = (v[j] != 0.0 && u(rng) < keep) ? v[j] : 0.0;
        auto& h = hits[(l - 1) * R + rep];
        for (std::size_t j : exact_heavy_hitters(sub, p.eps_hh)) h.push_back(layer_index(std::abs(sub[j]), p.alpha));
        std::sort(h.begin(), h.end());
        h.erase(std::unique(h.begin(), h.end()), h.end());
      }
    }
    const double tau = k_A * static_cast<double>(R) * std::log(1.0 / delta) / (100.0 * p.log2d);
    const LayerEstimate est = layer_estimate_from_hits(hits, R, L, tau, eps1);
    for (std::size_t k = 0; k < est.exponents.size(); ++k) {
      const double b = exact.count_at(est.exponents[k]);
      if (est.q[k] > 0 && est.eta_hat[k] <= track_probability(b, est.q[k])) {
        ++side;
        if (est.c[k] > b * (1.0 + 1e-12)) ++side_bad;
      }
    }
    for (std::size_t t = 0; t < cls.exponents.size(); ++t) {
      if (!cls.important[t]) continue;
      const int e = cls.exponents[t];
      const double b = exact.count_at(e);
      ++total;
      const auto it = std::find(est.exponents.begin(), est.exponents.end(), e);
      if (it == est.exponents.end()) continue;
      const std::size_t k = static_cast<std::size_t>(it - est.exponents.begin());
      if (est.q[k] > 0 && est.c[k] >= (1.0 - 2.0 * eps1) * b && est.c[k] <= b) ++good;
    }
  }
  r.coverage = total ? static_cast<double>(good) / static_cast<double>(total) : 0.0;
  if (side_bad > 0) r.coverage = std::min(r.coverage, 0.0);
  r.detail = std::to_string(good) + "/" + std::to_string(total) + " important layers recovered; c<=b violations " +
             std::to_string(side_bad) + " of " + std::to_string(side);
  return detail::finish(r, t0);
}

/// Recall of planted heavy coordinates in a sparse-noise vector, d = 4096.
inline SuiteResult suite_hh_completeness(std::size_t seeds, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  r.name = "heavy-hitter completeness";
  r.time_limit = 60.0;
  r.required = 0.95;
  const std::size_t d = 4096, noise = 256, planted = 4;
  const double eps = 0.25;
  std::size_t found = 0, total = 0, oversize = 0, weak = 0;
  std::size_t biggest = 0;
  for (std::size_t s = 0; s < seeds; ++s) {
    std::mt19937_64 rng(detail::hash_key(seed, s));
    std::normal_distribution<double> g;
    std::vector<std::size_t> pos(d);
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    std::shuffle(pos.begin(), pos.end(), rng);
    DenseVector x(d, 0.0);
    for (std::size_t t = 0; t < noise; ++t) x[pos[planted + t]] = g(rng);
    const double bar = exact_tail_norm(x, heavy_tail_k(eps) - planted);
    for (std::size_t t = 0; t < planted; ++t) {
      const double mag = 4.0 * eps * bar * (1.0 + 0.5 * std::abs(g(rng)));
      x[pos[t]] = g(rng) < 0.0 ? -mag : mag;
    }
    const double margin = eps * exact_tail_norm(x, heavy_tail_k(eps));
    HHConfig hc;
    hc.eps_hh = eps;
    hc.d = d;
    hc.seed = detail::hash_key(seed, s, 0x6868ULL);
    hc.c_T = 1.0;
    hc.c_m = 1.0;
    hc.c_t = 6.0;
    HHBank bank(hc);
    for (std::size_t j = 0; j < d; ++j) {
      if (x[j] != 0.0) bank.encode_single(0, j, x[j]);
    }
    const DecodeResult dec = bank.decode(0);
    biggest = std::max(biggest, dec.indices.size());
    if (static_cast<double>(dec.indices.size()) > 8.0 / (eps * eps)) ++oversize;
    for (std::size_t t = 0; t < planted; ++t) {
      if (std::abs(x[pos[t]]) < 4.0 * margin) ++weak;
      ++total;
      if (std::binary_search(dec.indices.begin(), dec.indices.end(), static_cast<std::uint32_t>(pos[t]))) ++found;
    }
  }
  r.coverage = total ? static_cast<double>(found) / static_cast<double>(total) : 0.0;
  if (oversize > 0 || weak > 0) r.coverage = 0.0;
  r.detail = "recall " + std::to_string(found) + "/" + std::to_string(total) + ", largest output " +
             std::to_string(biggest) + ", oversize " + std::to_string(oversize) + ", weak plants " + std::to_string(weak);
  return detail::finish(r, t0);
}

inline SuiteResult suite_tail_sandwich(std::size_t seeds, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  r.name = "tail sandwich";
  r.time_limit = 30.0;
  const double delta = 0.1;
  r.required = 1.0 - 2.0 * delta;
  const std::size_t d = 256, k = 16;
  const double C0 = 1000.0;
  std::size_t ok = 0;
  for (std::size_t s = 0; s < seeds; ++s) {
    std::mt19937_64 rng(detail::hash_key(seed, s));
    std::normal_distribution<double> g;
    DenseVector x(d);
    for (auto& v : x) v = g(rng);
    TailSketch sk(TailConfig{1, k, C0, delta, detail::hash_key(seed, s, 0x74ULL)});
    for (std::size_t j = 0; j < d; ++j) sk.update(0, j, x[j]);
    const double V = sk.query(0);
    const double hi = exact_tail_norm(x, k);
    const double lo = exact_tail_norm(x, static_cast<std::size_t>(C0) * k);
    const double kk = static_cast<double>(k);
    if (lo * lo / (10.0 * kk) <= V && V <= hi * hi / kk) ++ok;
  }
  r.coverage = seeds ? static_cast<double>(ok) / static_cast<double>(seeds) : 0.0;
  r.detail = std::to_string(ok) + "/" + std::to_string(seeds) + " seeds inside the sandwich";
  return detail::finish(r, t0);
}

inline SuiteResult suite_fp_contract(std::size_t seeds, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  r.name = "FpEst contract";
  r.time_limit = 30.0;
  const double delta = 0.1, phi = 1.0 / 7.0, eps_fp = 0.1;
  r.required = 1.0 - 2.0 * delta;
  const std::size_t d = 256;
  std::size_t ok = 0, total = 0;
  for (std::size_t s = 0; s < seeds; ++s) {
    std::mt19937_64 rng(detail::hash_key(seed, s));
    std::normal_distribution<double> g;
    DenseVector x(d);
    for (auto& v : x) v = g(rng);
    const double mass = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
    for (unsigned level : {0u, 2u, 4u}) {
      FpEstSketch sk(FpEstConfig{1, d, level, phi, eps_fp, delta, detail::hash_key(seed, s, level)});
      for (std::size_t j = 0; j < d; ++j) sk.update(0, j, x[j]);
      std::vector<double> F(sk.blocks(), 0.0);
      for (std::size_t j = 0; j < d; ++j) F[(j << level) / d] += x[j] * x[j];
      for (std::size_t xi = 0; xi < sk.blocks(); ++xi) {
        const double V = sk.query(0, xi);
        ++total;
        if ((1.0 - phi) * F[xi] <= V && V <= (1.0 + phi) * (F[xi] + 5.0 * eps_fp * mass)) ++ok;
      }
    }
  }
  r.coverage = total ? static_cast<double>(ok) / static_cast<double>(total) : 0.0;
  r.detail = std::to_string(ok) + "/" + std::to_string(total) + " (seed, level, block) triples";
  return detail::finish(r, t0);
}

/// Acceptance workload: n Gaussian points with per-point scales in [1/e, e]
/// and an independent query drawn the same way.
struct OracleWorkload {
  std::vector<DenseVector> points;
  DenseVector query;
};

inline OracleWorkload make_workload(std::size_t n, std::size_t d, std::uint64_t seed) {
  OracleWorkload w;
  w.points = gaussian_points(n, d, seed);
  w.query = gaussian_points(1, d, detail::hash_key(seed, 0x71ULL)).front();
  return w;
}

inline SuiteResult suite_end_to_end(std::size_t seeds, std::uint64_t seed, std::size_t n = 32, std::size_t d = 512) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  r.name = "end-to-end oracle";
  r.time_limit = 120.0;
  r.required = 0.9;
  const double eps = 0.25, delta = 0.1, tol = 0.3;
  double worst = 1.0;
  std::ostringstream det;
  bool self_zero = true;
  for (const char* spec : {"lp:1", "lp:2", "topk:16"}) {
    const SymNorm norm = parse_norm(spec, d);
    std::size_t ok = 0, total = 0;
    for (std::size_t s = 0; s < seeds; ++s) {
      const std::uint64_t ws = detail::hash_key(seed, s);
      const OracleWorkload w = make_workload(n, d, ws);
      const Oracle o = Oracle::build(w.points, norm, eps, delta, detail::hash_key(ws, 0x6fULL), OracleKnobs::desk());
      const auto dst = o.query_all(w.query, 1);
      for (std::size_t i = 0; i < n; ++i) {
        const double ex = exact_distance(norm, w.query, w.points[i]);
        ++total;
        if (dst[i] >= (1.0 - tol) * ex && dst[i] <= (1.0 + tol) * ex) ++ok;
      }
      const std::size_t j = s % n;
      const std::size_t sel[1] = {j};
      if (o.query_set(w.points[j], sel)[0] != 0.0) self_zero = false;
    }
    const double frac = total ? static_cast<double>(ok) / static_cast<double>(total) : 0.0;
    worst = std::min(worst, frac);
    det << spec << " " << ok << "/" << total << "; ";
  }
  r.coverage = self_zero ? worst : 0.0;
  det << (self_zero ? "self-queries exactly 0" : "a self-query was nonzero");
  r.detail = det.str();
  return detail::finish(r, t0);
}

inline SuiteResult suite_linearity(std::size_t trials, std::size_t update_trials, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  r.name = "linearity and update equivalence";
  r.time_limit = 30.0;
  std::size_t bad = 0;
  std::string why;
  for (std::size_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(detail::hash_key(seed, t));
    std::normal_distribution<double> g;
    const std::size_t d = 64;
    DenseVector x(d), y(d), diff(d);
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = g(rng) * (j % 9 == 0 ? 8.0 : 1.0);
      y[j] = g(rng);
      diff[j] = x[j] - y[j];
    }
    HHConfig hc;
    hc.eps_hh = 0.5;
    hc.n_slots = 4;
    hc.d = d;
    hc.seed = detail::hash_key(seed, t, 0x6cULL);
    hc.c_T = 1.0;
    hc.c_m = 1.0;
    HHBank bank(hc);
    bank.encode(0, x);
    bank.encode(1, y);
    bank.encode(2, diff);
    bank.subtract(3, 0, 1);
    const auto a = bank.slot_span(2), b = bank.slot_span(3);
    double scale = 1.0, gap = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
      scale = std::max(scale, std::abs(a[c]));
      gap = std::max(gap, std::abs(a[c] - b[c]));
    }
    if (gap > 1e-9 * scale) {
      ++bad;
      why = "counter gap";
    }
    if (bank.decode(2).indices != bank.decode(3).indices) {
      ++bad;
      why = "decoded sets differ";
    }
  }
  for (std::size_t t = 0; t < update_trials; ++t) {
    const std::uint64_t ws = detail::hash_key(seed, 0x7570ULL, t);
    const std::size_t n = 8, d = 128;
    OracleWorkload w = make_workload(n, d, ws);
    const SymNorm norm = SymNorm::lp(1.0, d);
    const std::uint64_t os = detail::hash_key(ws, 1);
    Oracle live = Oracle::build(w.points, norm, 0.25, 0.1, os, OracleKnobs::desk());
    const std::size_t i = t % n;
    const DenseVector z = gaussian_points(1, d, detail::hash_key(ws, 2)).front();
    live.update_x(i, z);
    w.points[i] = z;
    const Oracle fresh = Oracle::build(w.points, norm, 0.25, 0.1, os, OracleKnobs::desk());
    for (std::size_t c = 0; c < live.cells().size(); ++c) {
      const auto& a = live.cells()[c].bank.counters();
      const auto& b = fresh.cells()[c].bank.counters();
      double scale = 1.0, gap = 0.0;
      for (std::size_t e = 0; e < a.size(); ++e) {
        scale = std::max(scale, std::abs(b[e]));
        gap = std::max(gap, std::abs(a[e] - b[e]));
      }
      if (gap > 1e-9 * scale) {
        ++bad;
        why = "updated counters drift from a rebuild";
        break;
      }
    }
    const auto du = live.query_all(w.query), df = fresh.query_all(w.query);
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(du[k] - df[k]) > 0.3 * df[k]) {
        ++bad;
        why = "updated query differs from rebuild";
      }
    }
  }
  r.coverage = bad ? 0.0 : 1.0;
  r.detail = bad ? std::to_string(bad) + " mismatches (" + why + ")"
                 : std::to_string(trials) + " subtract trials and " + std::to_string(update_trials) + " update trials agree";
  return detail::finish(r, t0);
}

inline SuiteResult suite_inversion() {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  r.name = "inversion exactness";
  r.time_limit = 1.0;
  double worst = 0.0;
  std::size_t bad = 0;
  for (int q = 1; q <= 10; ++q) {
    for (int t = 0; t < 10; ++t) {
      const double b = std::pow(1000.0, t / 9.0);
      const double c = invert_miss_probability(track_miss_probability(b, q), q);
      const double gap = std::abs(c - b) / b;
      worst = std::max(worst, gap);
      if (gap > 1e-9) ++bad;
    }
  }
  r.coverage = bad ? 0.0 : 1.0;
  std::ostringstream det;
  det << "worst relative gap " << worst << " over a 10x10 (q, b) grid";
  r.detail = det.str();
  return detail::finish(r, t0);
}

inline SuiteResult suite_persistence(std::size_t seeds, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  r.name = "persistence round-trip";
  r.time_limit = 30.0;
  std::size_t bad = 0;
  for (std::size_t s = 0; s < seeds; ++s) {
    const std::uint64_t ws = detail::hash_key(seed, s);
    const OracleWorkload w = make_workload(16, 128, ws);
    const Oracle o = Oracle::build(w.points, SymNorm::lp(2.0, 128), 0.25, 0.1, ws, OracleKnobs::desk());
    const auto before = o.query_all(w.query);
    const std::string bytes = serialize_index(o, PersistMode::replayable);
    const Oracle back = deserialize_index(bytes);
    const auto after = back.query_all(w.query);
    if (std::memcmp(before.data(), after.data(), before.size() * sizeof(double)) != 0) ++bad;
    if (serialize_index(back, PersistMode::replayable) != bytes) ++bad;
  }
  r.coverage = bad ? 0.0 : 1.0;
  r.detail = std::to_string(seeds - std::min(seeds, bad)) + "/" + std::to_string(seeds) + " seeds bit-identical";
  return detail::finish(r, t0);
}

inline SuiteResult suite_mmc_brackets(std::size_t trials, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  r.name = "mmc brackets";
  r.time_limit = 30.0;
  const std::size_t d = 1024;
  std::ostringstream det;
  bool ok = true;
  for (std::size_t k : {1u, 16u, 256u}) {
    const SymNorm norm = SymNorm::top_k(k, d);
    const double mc = estimate_mc(norm, d, trials, detail::hash_key(seed, k));
    const double ref = std::sqrt(static_cast<double>(d) / static_cast<double>(k)) / std::sqrt(std::log(static_cast<double>(d)));
    const double ratio = mc / ref;
    if (!(ratio >= 0.125 && ratio <= 8.0)) ok = false;
    det << "top-" << k << " mc/ref " << ratio << "; ";
  }
  const double med = estimate_median(SymNorm::lp(2.0, d), d, trials, seed);
  if (std::abs(med - 1.0) > 1e-12) ok = false;
  det << "l2 median - 1 = " << (med - 1.0);
  r.coverage = ok ? 1.0 : 0.0;
  r.detail = det.str();
  return detail::finish(r, t0);
}

/// The statistical suites `sndo selftest` runs.
inline std::vector<SuiteResult> run_selftest(const SelftestScale& sc, std::uint64_t seed) {
  std::vector<SuiteResult> out;
  out.push_back(suite_fp_contract(sc.fp_seeds, seed));
  out.push_back(suite_tail_sandwich(sc.tail_seeds, seed));
  out.push_back(suite_hh_completeness(sc.hh_seeds, seed));
  out.push_back(suite_layer_recovery(sc.recovery_seeds, sc.recovery_R, seed));
  out.push_back(suite_end_to_end(sc.e2e_seeds, seed));
  return out;
}

}  // namespace symdist
