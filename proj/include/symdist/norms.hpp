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

// Symmetric norms: evaluation, the built-in catalog with its concentration
// bounds, and layer (level-set) profiles of vectors.

#pragma once

#include "symdist/common.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string_view>
#include <utility>

namespace symdist {

enum class NormFamily { lp, top_k, k_support, box, max_mix, sum_mix, orlicz, custom };

/// Piecewise-linear Young function sampled on a strictly increasing grid.
/// G(0) = 0 is implied; beyond the last sample the last slope is extended.
class OrliczGrid {
 public:
  OrliczGrid() = default;
  OrliczGrid(std::vector<double> x, std::vector<double> g, std::string source = {})
      : x_(std::move(x)), g_(std::move(g)), source_(std::move(source)) {
    detail::require(!x_.empty() && x_.size() == g_.size(), "orlicz grid: need matching, non-empty columns");
    double px = 0.0, pg = 0.0, slope = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      detail::require(std::isfinite(x_[i]) && std::isfinite(g_[i]), "orlicz grid: non-finite sample");
      detail::require(x_[i] > px && g_[i] > pg, "orlicz grid: columns must be strictly increasing and positive");
      const double s = (g_[i] - pg) / (x_[i] - px);
      detail::require(s >= slope * (1.0 - 1e-12), "orlicz grid: samples do not describe a convex function");
      slope = s;
      px = x_[i];
      pg = g_[i];
    }
  }

  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - x_.begin());
    if (hi == x_.size()) hi = x_.size() - 1;
    const double x0 = hi == 0 ? 0.0 : x_[hi - 1];
    const double g0 = hi == 0 ? 0.0 : g_[hi - 1];
    return g0 + (g_[hi] - g0) * (t - x0) / (x_[hi] - x0);
  }

  /// max over sampled 0 < x < y of G(y)/G(x) * (x/y)^2, at least 1.
  double growth_constant() const {
    double best = 1.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const double hi_ = g_[i] / (x_[i] * x_[i]);
      for (std::size_t j = i + 1; j < x_.size(); ++j) {
        best = std::max(best, (g_[j] / (x_[j] * x_[j])) / hi_);
      }
    }
    return best;
  }

  const std::vector<double>& xs() const { return x_; }
  const std::vector<double>& gs() const { return g_; }
  const std::string& source() const { return source_; }

 private:
  std::vector<double> x_;
  std::vector<double> g_;
  std::string source_;
};

/// Two comma-separated columns per line; blank lines and '#' comments skipped.
inline OrliczGrid load_orlicz_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open orlicz grid file: " + path);
  std::vector<double> xs, gs;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x = 0, g = 0;
    if (!(row >> x >> g)) throw DataError("malformed orlicz grid line: " + line);
    xs.push_back(x);
    gs.push_back(g);
  }
  try {
    return OrliczGrid(std::move(xs), std::move(gs), path);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
}

class SymNorm {
 public:
  using Evaluator = std::function<double(std::span<const double>)>;

  static SymNorm lp(double p, std::size_t dim = 0) {
    detail::require(p > 0.0 && std::isfinite(p), "lp norm: p must be positive and finite");
    SymNorm n(NormFamily::lp, dim);
    n.p_ = p;
    return n;
  }
  static SymNorm top_k(std::size_t k, std::size_t dim = 0) {
    SymNorm n(NormFamily::top_k, dim);
    n.set_k(k);
    return n;
  }
  static SymNorm k_support(std::size_t k, std::size_t dim = 0) {
    SymNorm n(NormFamily::k_support, dim);
    n.set_k(k);
    return n;
  }
  /// Box norm over {theta in [a,1]^d : sum theta <= k}; a = 0 gives the k-support norm.
  static SymNorm box(std::size_t k, double a = 0.0, std::size_t dim = 0) {
    detail::require(a >= 0.0 && a < 1.0, "box norm: floor a must lie in [0, 1)");
    SymNorm n(NormFamily::box, dim);
    n.set_k(k);
    n.c_ = a;
    if (dim > 0) detail::require(a * static_cast<double>(dim) <= static_cast<double>(k), "box norm: need a*d <= k");
    return n;
  }
  /// max(||x||_2, c ||x||_1)
  static SymNorm max_mix(double c, std::size_t dim = 0) {
    detail::require(c > 0.0 && std::isfinite(c), "max-mix norm: c must be positive");
    SymNorm n(NormFamily::max_mix, dim);
    n.c_ = c;
    return n;
  }
  /// ||x||_2 + c ||x||_1
  static SymNorm sum_mix(double c, std::size_t dim = 0) {
    detail::require(c > 0.0 && std::isfinite(c), "sum-mix norm: c must be positive");
    SymNorm n(NormFamily::sum_mix, dim);
    n.c_ = c;
    return n;
  }
  static SymNorm orlicz(OrliczGrid grid, std::optional<double> growth = std::nullopt, std::size_t dim = 0) {
    SymNorm n(NormFamily::orlicz, dim);
    if (growth) detail::require(*growth >= 1.0, "orlicz norm: growth constant must be >= 1");
    n.growth_ = growth ? *growth : grid.growth_constant();
    n.user_growth_ = growth.has_value();
    n.grid_ = std::make_shared<const OrliczGrid>(std::move(grid));
    return n;
  }
  /// The evaluator must be a symmetric norm; only sampled axiom checks are possible.
  static SymNorm custom(std::string name, Evaluator fn, std::optional<double> mmc = std::nullopt,
                        std::size_t dim = 0) {
    detail::require(static_cast<bool>(fn), "custom norm: evaluator is empty");
    if (mmc) detail::require(*mmc >= 1.0, "custom norm: mmc must be >= 1");
    SymNorm n(NormFamily::custom, dim);
    n.name_ = std::move(name);
    n.fn_ = std::make_shared<const Evaluator>(std::move(fn));
    n.user_mmc_ = mmc;
    return n;
  }

  NormFamily family() const { return family_; }
  double p() const { return p_; }
  std::size_t k() const { return k_; }
  double c() const { return c_; }
  double box_floor() const { return c_; }
  double orlicz_growth() const { return growth_; }
  const OrliczGrid* orlicz_grid() const { return grid_.get(); }
  std::optional<double> user_mmc() const { return user_mmc_; }
  std::size_t dim_hint() const { return dim_; }

  SymNorm with_dim(std::size_t dim) const {
    SymNorm n = *this;
    n.dim_ = dim;
    if (dim > 0 && (family_ == NormFamily::top_k || family_ == NormFamily::k_support || family_ == NormFamily::box)) {
      detail::require(k_ <= dim, "norm parameter k exceeds dimension");
    }
    if (dim > 0 && family_ == NormFamily::box) {
      detail::require(c_ * static_cast<double>(dim) <= static_cast<double>(k_), "box norm: need a*d <= k");
    }
    return n;
  }

  double operator()(std::span<const double> v) const {
    if (dim_ > 0 && v.size() != dim_) {
      throw std::invalid_argument("norm evaluation: dimension mismatch (expected " + std::to_string(dim_) +
                                  ", got " + std::to_string(v.size()) + ")");
    }
    switch (family_) {
      case NormFamily::lp: return eval_lp(v, p_);
      case NormFamily::top_k: return eval_top_k(v, k_);
      case NormFamily::k_support: return eval_k_support(v, k_);
      case NormFamily::box: return eval_box(v, k_, c_);
      case NormFamily::max_mix: return std::max(eval_lp(v, 2.0), c_ * eval_lp(v, 1.0));
      case NormFamily::sum_mix: return eval_lp(v, 2.0) + c_ * eval_lp(v, 1.0);
      case NormFamily::orlicz: return eval_orlicz(v, *grid_);
      case NormFamily::custom: return (*fn_)(v);
    }
    return 0.0;
  }

  /// Plain-text descriptor accepted by parse_norm.
  std::string descriptor() const {
    switch (family_) {
      case NormFamily::lp: return "lp:" + format_double(p_);
      case NormFamily::top_k: return "topk:" + std::to_string(k_);
      case NormFamily::k_support: return "ksupport:" + std::to_string(k_);
      case NormFamily::box: return "box:" + std::to_string(k_) + ":" + format_double(c_);
      case NormFamily::max_mix: return "maxmix:" + format_double(c_);
      case NormFamily::sum_mix: return "summix:" + format_double(c_);
      case NormFamily::orlicz: {
        std::string s = "orlicz:" + grid_->source();
        if (user_growth_) s += ":" + format_double(growth_);
        return s;
      }
      case NormFamily::custom: return "custom:" + name_;
    }
    return {};
  }

  // Evaluators shared with the run-length layer path.
  static double eval_lp(std::span<const double> v, double p) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    if (m == 0.0) return 0.0;
    if (p == 1.0) {
      double s = 0.0;
      for (double x : v) s += std::abs(x);
      return s;
    }
    double s = 0.0;
    if (p == 2.0) {
      for (double x : v) {
        const double r = x / m;
        s += r * r;
      }
      return m * std::sqrt(s);
    }
    for (double x : v) s += std::pow(std::abs(x) / m, p);
    return m * std::pow(s, 1.0 / p);
  }

  static double eval_top_k(std::span<const double> v, std::size_t k) {
    std::vector<double> a(v.size());
    std::transform(v.begin(), v.end(), a.begin(), [](double x) { return std::abs(x); });
    const std::size_t take = std::min(k, a.size());
    std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(take) - (take > 0 ? 1 : 0), a.end(),
                     std::greater<>());
    if (take == 0) return 0.0;
    std::sort(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(take), std::greater<>());
    double s = 0.0;
    for (std::size_t i = 0; i < take; ++i) s += a[i];
    return s;
  }

  /// Closed form: with z = |x| sorted descending (z_0 = inf), pick r in [0, k)
  /// with z_{k-r-1} > T_r >= z_{k-r}, T_r = (1/(r+1)) sum_{i >= k-r} z_i.
  static double eval_k_support(std::span<const double> v, std::size_t k) {
    std::vector<double> z(std::max(v.size(), k), 0.0);
    std::transform(v.begin(), v.end(), z.begin(), [](double x) { return std::abs(x); });
    std::sort(z.begin(), z.end(), std::greater<>());
    if (z.empty() || z.front() == 0.0) return 0.0;
    const double scale = z.front();
    for (double& x : z) x /= scale;
    const std::size_t n = z.size();
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + z[i];
    // 1-indexed z_i is z[i-1].
    auto zat = [&](std::size_t i) { return i == 0 ? std::numeric_limits<double>::infinity() : z[i - 1]; };
    auto value = [&](std::size_t r) {
      const double t = suffix[k - r - 1] / static_cast<double>(r + 1);
      double head = 0.0;
      for (std::size_t i = 1; i <= k - r - 1; ++i) head += zat(i) * zat(i);
      return std::sqrt(head + static_cast<double>(r + 1) * t * t);
    };
    for (int pass = 0; pass < 2; ++pass) {
      const double slack = pass == 0 ? 0.0 : 1e-12;
      for (std::size_t r = 0; r < k; ++r) {
        const double t = suffix[k - r - 1] / static_cast<double>(r + 1);
        if (zat(k - r - 1) > t * (1.0 - slack) && t >= zat(k - r) * (1.0 - slack)) return scale * value(r);
      }
    }
    double best = 0.0;
    for (std::size_t r = 0; r < k; ++r) best = std::max(best, value(r));
    return scale * best;
  }

  /// sqrt(min_theta sum w_i^2 / theta_i); the optimum is theta_i = clip(|w_i| / lambda, a, 1).
  static double eval_box(std::span<const double> v, std::size_t k, double a) {
    const double cap = static_cast<double>(k);
    const std::size_t n = v.size();
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    if (m == 0.0) return 0.0;
    if (static_cast<double>(n) <= cap) return eval_lp(v, 2.0);
    detail::require(a * static_cast<double>(n) <= cap, "box norm: need a*d <= k");
    std::vector<double> w(n);
    std::transform(v.begin(), v.end(), w.begin(), [m](double x) { return std::abs(x) / m; });
    std::size_t nnz = 0;
    double min_nz = 1.0, sum_w = 0.0;
    for (double x : w) {
      if (x > 0.0) {
        ++nnz;
        min_nz = std::min(min_nz, x);
        sum_w += x;
      }
    }
    if (static_cast<double>(nnz) + a * static_cast<double>(n - nnz) <= cap) return eval_lp(v, 2.0);
    auto mass = [&](double lambda) {
      double s = 0.0;
      for (double x : w) s += std::clamp(x / lambda, a, 1.0);
      return s;
    };
    double lo = min_nz * 0.5;
    double hi = a > 0.0 ? 2.0 / a : 2.0 * sum_w / cap;
    while (mass(hi) > cap) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > hi * 1e-16; ++it) {
      const double mid = std::sqrt(lo * hi);
      if (mass(mid) > cap) lo = mid; else hi = mid;
    }
    // Recover the exact multiplier from the partition found at hi.
    double top_sq = 0.0, mid_sum = 0.0, bottom_sq = 0.0;
    std::size_t top = 0, bottom = 0;
    for (double x : w) {
      if (x >= hi) {
        top_sq += x * x;
        ++top;
      } else if (x <= a * hi) {
        bottom_sq += x * x;
        ++bottom;
      } else {
        mid_sum += x;
      }
    }
    const double denom = cap - static_cast<double>(top) - a * static_cast<double>(bottom);
    double obj = 0.0;
    if (mid_sum > 0.0 && denom > 0.0) {
      const double lambda = mid_sum / denom;
      obj = top_sq + lambda * mid_sum + (a > 0.0 ? bottom_sq / a : 0.0);
    } else {
      for (double x : w) {
        const double th = std::clamp(x / hi, a, 1.0);
        if (x > 0.0) obj += x * x / th;
      }
    }
    return m * std::sqrt(obj);
  }

  /// inf { s > 0 : sum_i G(|v_i| / s) <= 1 }
  static double eval_orlicz(std::span<const double> v, const OrliczGrid& g) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    if (m == 0.0) return 0.0;
    auto load = [&](double s) {
      double t = 0.0;
      for (double x : v) t += g(std::abs(x) / s);
      return t;
    };
    double hi = m, lo = m;
    while (load(hi) > 1.0) hi *= 2.0;
    while (load(lo) <= 1.0) lo *= 0.5;
    for (int it = 0; it < 300 && hi - lo > hi * 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (load(mid) > 1.0) lo = mid; else hi = mid;
    }
    return hi;
  }

 private:
  SymNorm(NormFamily f, std::size_t dim) : family_(f), dim_(dim) {}

  void set_k(std::size_t k) {
    detail::require(k >= 1, "norm parameter k must be >= 1");
    if (dim_ > 0) detail::require(k <= dim_, "norm parameter k exceeds dimension");
    k_ = k;
  }

  NormFamily family_;
  std::size_t dim_ = 0;
  double p_ = 2.0;
  std::size_t k_ = 1;
  double c_ = 0.0;
  double growth_ = 1.0;
  bool user_growth_ = false;
  std::shared_ptr<const OrliczGrid> grid_;
  std::shared_ptr<const Evaluator> fn_;
  std::optional<double> user_mmc_;
  std::string name_;
};

inline double eval_norm(const SymNorm& norm, std::span<const double> v) { return norm(v); }

namespace detail {

inline double parse_number(std::string_view s, const std::string& what) {
  double x = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(x)) {
    throw std::invalid_argument("norm descriptor: bad " + what + " '" + std::string(s) + "'");
  }
  return x;
}

inline std::size_t parse_count(std::string_view s, const std::string& what) {
  std::size_t x = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("norm descriptor: bad " + what + " '" + std::string(s) + "'");
  }
  return x;
}

}  // namespace detail

/// Parses "lp:2", "linf", "topk:16", "ksupport:4", "box:4[:a]", "maxmix:0.5",
/// "summix:0.5" and "orlicz:<grid-file>[:<C_G>]".
inline SymNorm parse_norm(std::string_view spec, std::size_t dim = 0) {
  const auto colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  auto need_arg = [&] {
    if (rest.empty()) throw std::invalid_argument("norm descriptor '" + std::string(spec) + "' needs a parameter");
  };
  if (head == "linf") return SymNorm::top_k(1, dim);
  if (head == "l1") return SymNorm::lp(1.0, dim);
  if (head == "l2") return SymNorm::lp(2.0, dim);
  if (head == "lp") {
    need_arg();
    if (rest == "inf") return SymNorm::top_k(1, dim);
    return SymNorm::lp(detail::parse_number(rest, "p"), dim);
  }
  if (head == "topk") {
    need_arg();
    return SymNorm::top_k(detail::parse_count(rest, "k"), dim);
  }
  if (head == "ksupport") {
    need_arg();
    return SymNorm::k_support(detail::parse_count(rest, "k"), dim);
  }
  if (head == "box") {
    need_arg();
    const auto c2 = rest.find(':');
    const std::size_t k = detail::parse_count(rest.substr(0, c2), "k");
    const double a = c2 == std::string_view::npos ? 0.0 : detail::parse_number(rest.substr(c2 + 1), "a");
    return SymNorm::box(k, a, dim);
  }
  if (head == "maxmix") {
    need_arg();
    return SymNorm::max_mix(detail::parse_number(rest, "c"), dim);
  }
  if (head == "summix") {
    need_arg();
    return SymNorm::sum_mix(detail::parse_number(rest, "c"), dim);
  }
  if (head == "orlicz") {
    need_arg();
    std::string path(rest);
    std::optional<double> growth;
    const auto c2 = rest.rfind(':');
    if (c2 != std::string_view::npos) {
      const std::string_view tail = rest.substr(c2 + 1);
      double g = 0.0;
      auto res = std::from_chars(tail.data(), tail.data() + tail.size(), g);
      if (res.ec == std::errc() && res.ptr == tail.data() + tail.size()) {
        growth = g;
        path = std::string(rest.substr(0, c2));
      }
    }
    return SymNorm::orlicz(load_orlicz_grid(path), growth, dim);
  }
  throw std::invalid_argument("unknown norm descriptor '" + std::string(spec) + "'");
}

// ---------------------------------------------------------------------------
// Layer profiles

/// Exponent i with alpha^(i-1) < magnitude <= alpha^i.
inline int layer_index(double magnitude, double alpha) {
  detail::require(magnitude > 0.0 && std::isfinite(magnitude), "layer_index: magnitude must be positive and finite");
  int i = static_cast<int>(std::ceil(std::log(magnitude) / std::log(alpha)));
  while (std::pow(alpha, i - 1) >= magnitude) --i;
  while (std::pow(alpha, i) < magnitude) ++i;
  return i;
}

inline double layer_value(int exponent, double alpha) { return std::pow(alpha, exponent); }

/// Per-exponent occupancy counts. counts[t] belongs to exponent offset + t.
/// Counts are reals so that estimated (fractional) sizes can be stored unrounded.
struct LayerProfile {
  double alpha = 2.0;
  int offset = 0;
  std::vector<double> counts;
  std::size_t dim = 0;

  bool empty() const { return counts.empty(); }
  std::size_t layers() const { return counts.size(); }
  int top_exponent() const { return offset + static_cast<int>(counts.size()) - 1; }
  double count_at(int exponent) const {
    const long t = static_cast<long>(exponent) - offset;
    if (t < 0 || t >= static_cast<long>(counts.size())) return 0.0;
    return counts[static_cast<std::size_t>(t)];
  }

  /// Builds a profile from (exponent, count) pairs; zero counts are allowed.
  static LayerProfile from_map(double alpha, const std::map<int, double>& by_exponent, std::size_t dim) {
    LayerProfile p;
    p.alpha = alpha;
    p.dim = dim;
    int lo = 0, hi = -1;
    bool any = false;
    for (const auto& [e, c] : by_exponent) {
      if (c <= 0.0) continue;
      if (!any) lo = hi = e;
      lo = std::min(lo, e);
      hi = std::max(hi, e);
      any = true;
    }
    if (!any) return p;
    p.offset = lo;
    p.counts.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (const auto& [e, c] : by_exponent) {
      if (c > 0.0) p.counts[static_cast<std::size_t>(e - lo)] = c;
    }
    return p;
  }
};

namespace detail {
inline void check_alpha(double alpha) {
  require(std::isfinite(alpha) && alpha > 1.0 && alpha <= 2.0, "layer base alpha must lie in (1, 2]");
}
}  // namespace detail

inline LayerProfile layer_profile_exact(std::span<const double> v, double alpha) {
  detail::check_alpha(alpha);
  std::map<int, double> by;
  for (double x : v) {
    if (!std::isfinite(x)) throw DataError("layer profile: non-finite input");
    if (x != 0.0) by[layer_index(std::abs(x), alpha)] += 1.0;
  }
  return LayerProfile::from_map(alpha, by, v.size());
}

/// Rounded layer runs, largest value first, truncated so that at most dim entries remain.
struct LayerRuns {
  std::vector<std::pair<double, std::size_t>> runs;  // (value, multiplicity)
  std::size_t entries = 0;
  bool clamped = false;
};

inline LayerRuns layer_runs(const LayerProfile& profile) {
  LayerRuns out;
  const std::size_t cap = profile.dim;
  for (std::size_t t = profile.counts.size(); t-- > 0;) {
    const double c = profile.counts[t];
    if (!(c > 0.0)) continue;
    std::size_t m = static_cast<std::size_t>(std::llround(c));
    if (m == 0) continue;
    if (cap > 0 && out.entries + m > cap) {
      m = cap - out.entries;
      out.clamped = true;
    }
    if (m == 0) break;
    out.runs.emplace_back(layer_value(profile.offset + static_cast<int>(t), profile.alpha), m);
    out.entries += m;
  }
  return out;
}

/// The layer vector: alpha^i repeated round(b_i) times, sorted descending, zero-padded to dim.
inline DenseVector materialize_layer_vector(const LayerProfile& profile) {
  const LayerRuns lr = layer_runs(profile);
  DenseVector v;
  v.reserve(std::max(profile.dim, lr.entries));
  for (const auto& [value, m] : lr.runs) v.insert(v.end(), m, value);
  if (v.size() < profile.dim) v.resize(profile.dim, 0.0);
  return v;
}

struct LayerNorm {
  double value = 0.0;
  bool clamped = false;  // rounded counts exceeded dim and were truncated
};

inline LayerNorm layer_vector_norm(const SymNorm& norm, const LayerProfile& profile) {
  const LayerRuns lr = layer_runs(profile);
  LayerNorm out;
  out.clamped = lr.clamped;
  if (lr.entries == 0) return out;
  auto lp = [&](double p) {
    const double m = lr.runs.front().first;
    double s = 0.0;
    for (const auto& [v, c] : lr.runs) {
      s += static_cast<double>(c) * (p == 1.0 ? v : std::pow(v / m, p));
    }
    return p == 1.0 ? s : m * std::pow(s, 1.0 / p);
  };
  switch (norm.family()) {
    case NormFamily::lp:
      out.value = lp(norm.p());
      return out;
    case NormFamily::top_k: {
      std::size_t left = norm.k();
      double s = 0.0;
      for (const auto& [v, c] : lr.runs) {
        const std::size_t take = std::min(left, c);
        s += static_cast<double>(take) * v;
        left -= take;
        if (left == 0) break;
      }
      out.value = s;
      return out;
    }
    case NormFamily::max_mix:
      out.value = std::max(lp(2.0), norm.c() * lp(1.0));
      return out;
    case NormFamily::sum_mix:
      out.value = lp(2.0) + norm.c() * lp(1.0);
      return out;
    case NormFamily::k_support:
    case NormFamily::orlicz: {
      // zeros do not change these norms
      DenseVector v;
      v.reserve(lr.entries);
      for (const auto& [value, m] : lr.runs) v.insert(v.end(), m, value);
      out.value = norm.with_dim(0)(v);
      return out;
    }
    case NormFamily::box:
    case NormFamily::custom:
      out.value = norm(materialize_layer_vector(profile));
      return out;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Concentration moduli

enum class MmcProvenance { table_formula, user_supplied, heuristic_estimate };

inline const char* to_string(MmcProvenance p) {
  switch (p) {
    case MmcProvenance::table_formula: return "table_formula";
    case MmcProvenance::user_supplied: return "user_supplied";
    case MmcProvenance::heuristic_estimate: return "heuristic_estimate";
  }
  return "?";
}

struct MmcBound {
  double value = 1.0;
  MmcProvenance provenance = MmcProvenance::table_formula;
};

/// Uniform point on the unit sphere of R^k, zero-padded to `dim` (>= k).
inline DenseVector sphere_sample(std::size_t k, std::size_t dim, std::uint64_t key) {
  DenseVector x(std::max(k, dim), 0.0);
  std::span<double> head(x.data(), k);
  double s = 0.0;
  do {
    detail::gaussian_stream(key, head);
    s = SymNorm::eval_lp(head, 2.0);
    key = detail::mix64(key);
  } while (s == 0.0);
  for (double& g : head) g /= s;
  return x;
}

/// Empirical median of l^(k) over `trials` uniform draws from the sphere S^(k-1).
inline double estimate_median(const SymNorm& norm, std::size_t k, std::size_t trials, std::uint64_t seed) {
  detail::require(k >= 1 && trials >= 1, "estimate_median: need k >= 1 and trials >= 1");
  if (norm.dim_hint() > 0) detail::require(k <= norm.dim_hint(), "estimate_median: k exceeds dimension");
  std::vector<double> vals(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    vals[t] = norm(sphere_sample(k, norm.dim_hint(), detail::hash_key(seed, 0x5e1ULL, t)));
  }
  return detail::median_inplace(vals);
}

/// l(xi^(j)) for the flat unit vector xi^(j) = (1/sqrt j) * 1_j, padded to dim.
inline double flat_vector_norm(const SymNorm& norm, std::size_t j, std::size_t dim) {
  DenseVector x(std::max(j, dim), 0.0);
  std::fill(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(j), 1.0 / std::sqrt(static_cast<double>(j)));
  return norm(x);
}

/// Heuristic mc(l^(k)): largest flat-vector value over j in [k] divided by the empirical median.
inline double estimate_mc(const SymNorm& norm, std::size_t k, std::size_t trials, std::uint64_t seed) {
  const double med = estimate_median(norm, k, trials, seed);
  double top = 0.0;
  for (std::size_t j = 1; j <= k; ++j) top = std::max(top, flat_vector_norm(norm, j, norm.dim_hint()));
  return med > 0.0 ? top / med : std::numeric_limits<double>::infinity();
}

/// Heuristic mmc: max of estimate_mc over k in {1, 2, 4, ..., d}.
inline double estimate_mmc_heuristic(const SymNorm& norm, std::size_t d, std::size_t trials, std::uint64_t seed) {
  const SymNorm n = norm.with_dim(d);
  double best = 1.0;
  std::size_t k = 1;
  while (true) {
    best = std::max(best, estimate_mc(n, std::min(k, d), trials, detail::hash_key(seed, k)));
    if (k >= d) break;
    k *= 2;
  }
  return best;
}

/// Closed-form concentration bounds with leading constant 1 (log factors of top-k dropped).
inline MmcBound mmc_bound(const SymNorm& norm, std::size_t d, bool allow_heuristic = false,
                          std::uint64_t heuristic_seed = 0) {
  detail::require(d >= 1, "mmc_bound: d must be >= 1");
  const double dd = static_cast<double>(d);
  const double logd = std::max(1.0, std::log(dd));
  switch (norm.family()) {
    case NormFamily::lp:
      return {norm.p() <= 2.0 ? 1.0 : std::max(1.0, std::pow(dd, 0.5 - 1.0 / norm.p())), MmcProvenance::table_formula};
    case NormFamily::top_k:
      return {std::max(1.0, std::sqrt(dd / static_cast<double>(std::min(norm.k(), d)))), MmcProvenance::table_formula};
    case NormFamily::k_support:
    case NormFamily::box:
      return {logd, MmcProvenance::table_formula};
    case NormFamily::max_mix:
    case NormFamily::sum_mix:
      return {1.0, MmcProvenance::table_formula};
    case NormFamily::orlicz:
      return {std::max(1.0, std::sqrt(norm.orlicz_growth() * logd)), MmcProvenance::table_formula};
    case NormFamily::custom:
      if (norm.user_mmc()) return {*norm.user_mmc(), MmcProvenance::user_supplied};
      if (allow_heuristic) {
        return {estimate_mmc_heuristic(norm, d, 101, heuristic_seed), MmcProvenance::heuristic_estimate};
      }
      throw std::invalid_argument("custom norm has no mmc value; supply one or enable the heuristic estimate");
  }
  return {};
}

}  // namespace symdist
