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

#pragma once

#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace symdist {

using DenseVector = std::vector<double>;

/// Malformed files, corrupted indices, non-finite data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_key(std::uint64_t seed, std::uint64_t a) {
  return mix64(seed ^ mix64(a + 0x632be59bd9b4e019ULL));
}

template <typename... Rest>
std::uint64_t hash_key(std::uint64_t seed, std::uint64_t a, Rest... rest) {
  return hash_key(hash_key(seed, a), static_cast<std::uint64_t>(rest)...);
}

/// [0, 1) with 53 bits of resolution.
inline double to_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// splitmix64 stream; a UniformRandomBitGenerator keyed by a 64-bit seed.
class KeyedStream {
 public:
  using result_type = std::uint64_t;
  explicit KeyedStream(std::uint64_t key) : state_(key) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Fills `out` with the standard normal stream identified by `key`.
inline void gaussian_stream(std::uint64_t key, std::span<double> out) {
  KeyedStream eng(key);
  boost::random::normal_distribution<double> nd(0.0, 1.0);
  for (double& g : out) g = nd(eng);
}

inline double gaussian_at(std::uint64_t key) {
  KeyedStream eng(key);
  boost::random::normal_distribution<double> nd(0.0, 1.0);
  return nd(eng);
}

/// Median of a scratch buffer (reordered). Even sizes average the two middle values.
inline double median_inplace(std::span<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

/// Median for short buffers: insertion sort below 33 entries, selection above.
inline double small_median(double* v, std::size_t n) {
  if (n > 32) return median_inplace(std::span<double>(v, n));
  if (n == 0) return 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double x = v[i];
    std::size_t j = i;
    for (; j > 0 && v[j - 1] > x; --j) v[j] = v[j - 1];
    v[j] = x;
  }
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::size_t next_pow2(std::size_t x) { return x <= 1 ? 1 : std::bit_ceil(x); }

inline unsigned log2_exact(std::size_t pow2) {
  return static_cast<unsigned>(std::countr_zero(pow2));
}

/// ceil for derived sizes, tolerant of rounding noise such as 8 / (1/7)^2.
inline std::size_t ceil_count(double x) {
  const double c = std::ceil(x - 1e-9 * std::max(1.0, std::abs(x)));
  return c < 1.0 ? 1 : static_cast<std::size_t>(c);
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

inline void require_index(bool ok, const std::string& what) {
  if (!ok) throw std::out_of_range(what);
}

}  // namespace detail

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

/// Median of |N(0,1)|, i.e. the inverse standard-normal CDF at 0.75.
inline constexpr double kAbsGaussianMedian = 0.6744897501960817;

}  // namespace symdist
