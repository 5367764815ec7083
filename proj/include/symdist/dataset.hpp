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

// Point-set files and synthetic generators.
//
// Binary layout: "SNDS", u32 version, u64 n, u64 d, then n*d little-endian
// doubles in row-major order. The text form is one comma-separated point per line.

#pragma once

#include "symdist/common.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <random>
#include <string_view>
#include <type_traits>
#include <sstream>

namespace symdist {

inline constexpr std::uint32_t kDatasetVersion = 1;

namespace detail {

template <typename T>
void put_le(std::ostream& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const char* what) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw DataError(std::string("truncated file while reading ") + what);
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

inline double parse_real(std::string_view tok, std::size_t line) {
  while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r')) tok.remove_suffix(1);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw DataError("line " + std::to_string(line) + ": cannot parse number '" + std::string(tok) + "'");
  }
  if (!std::isfinite(v)) throw DataError("line " + std::to_string(line) + ": non-finite value");
  return v;
}

}  // namespace detail

/// One comma-separated vector, e.g. "1,2.5,-3e-2".
inline DenseVector parse_vector(std::string_view text, std::size_t line = 1) {
  DenseVector v;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    v.push_back(detail::parse_real(text.substr(start, end - start), line));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return v;
}

inline std::vector<DenseVector> read_dataset_text(std::istream& in) {
  std::vector<DenseVector> pts;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    pts.push_back(parse_vector(line, no));
    if (pts.back().size() != pts.front().size()) {
      throw DataError("line " + std::to_string(no) + ": expected " + std::to_string(pts.front().size()) +
                      " values, found " + std::to_string(pts.back().size()));
    }
  }
  return pts;
}

inline std::vector<DenseVector> read_dataset_binary(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "SNDS", 4) != 0) throw DataError("not a dataset file (bad magic)");
  const auto version = detail::get_le<std::uint32_t>(in, "version");
  if (version != kDatasetVersion) throw DataError("unsupported dataset version " + std::to_string(version));
  const auto n = detail::get_le<std::uint64_t>(in, "n");
  const auto d = detail::get_le<std::uint64_t>(in, "d");
  if (n == 0 || d == 0 || n > (1ULL << 32) || d > (1ULL << 32)) throw DataError("implausible dataset shape");
  std::vector<DenseVector> pts(n, DenseVector(d));
  for (auto& x : pts) {
    for (auto& v : x) {
      v = detail::get_le<double>(in, "payload");
      if (!std::isfinite(v)) throw DataError("dataset contains a non-finite value");
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw DataError("dataset payload longer than declared n*d");
  return pts;
}

/// Binary when the file starts with the dataset magic, text otherwise.
inline std::vector<DenseVector> read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset: " + path);
  char magic[4] = {};
  in.read(magic, 4);
  const bool binary = in.gcount() == 4 && std::memcmp(magic, "SNDS", 4) == 0;
  in.clear();
  in.seekg(0);
  auto pts = binary ? read_dataset_binary(in) : read_dataset_text(in);
  if (pts.empty()) throw DataError("dataset is empty: " + path);
  return pts;
}

inline void write_dataset_binary(std::ostream& out, const std::vector<DenseVector>& pts) {
  detail::require(!pts.empty(), "cannot write an empty dataset");
  out.write("SNDS", 4);
  detail::put_le<std::uint32_t>(out, kDatasetVersion);
  detail::put_le<std::uint64_t>(out, pts.size());
  detail::put_le<std::uint64_t>(out, pts.front().size());
  for (const auto& x : pts) {
    detail::require(x.size() == pts.front().size(), "ragged dataset");
    for (double v : x) detail::put_le<double>(out, v);
  }
}

inline void write_dataset_text(std::ostream& out, const std::vector<DenseVector>& pts) {
  for (const auto& x : pts) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j) out << ',';
      out << format_double(x[j]);
    }
    out << '\n';
  }
}

inline void write_dataset(const std::string& path, const std::vector<DenseVector>& pts, bool binary = true) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write dataset: " + path);
  if (binary) write_dataset_binary(out, pts); else write_dataset_text(out, pts);
  if (!out) throw DataError("write failed: " + path);
}

/// A single vector from a file (first point) or from inline comma-separated text.
inline DenseVector read_vector_arg(const std::string& arg) {
  std::ifstream probe(arg);
  if (probe.good()) return read_dataset(arg).front();
  return parse_vector(arg);
}

/// Standard-normal coordinates, each point scaled by exp(U[-spread, spread]).
inline std::vector<DenseVector> gaussian_points(std::size_t n, std::size_t d, std::uint64_t seed,
                                                double spread = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<DenseVector> pts(n, DenseVector(d));
  for (auto& x : pts) {
    const double s = std::exp(u(rng));
    for (auto& v : x) v = s * g(rng);
  }
  return pts;
}

}  // namespace symdist
