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

// Index files.
//
// "SNDO", u32 version, u32 mode, then the norm (descriptor plus any embedded
// Orlicz grid), eps, delta, xi, mmc, every knob, the master seed, n, d and
// the raw points. Materialized files append each cell's counters. A trailing
// FNV-1a 64 checksum covers everything before it.

#pragma once

#include "symdist/dataset.hpp"
#include "symdist/oracle.hpp"

#include <cstdio>
#include <filesystem>
#include <iterator>

namespace symdist {

enum class PersistMode : std::uint32_t { replayable = 0, materialized = 1 };

inline constexpr std::uint32_t kIndexVersion = 1;

namespace detail {

inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline void put_string(std::ostream& out, const std::string& s) {
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& in, const char* what) {
  const auto len = get_le<std::uint32_t>(in, what);
  if (len > (1u << 20)) throw DataError(std::string("implausible length for ") + what);
  std::string s(len, '\0');
  if (!in.read(s.data(), len)) throw DataError(std::string("truncated file while reading ") + what);
  return s;
}

inline std::vector<double*> knob_fields(OracleKnobs& k) {
  return {&k.k_R, &k.k_U, &k.k_beta, &k.k_gamma, &k.k_eps1, &k.k_A, &k.c_T, &k.c_m, &k.c_t, &k.c_cap,
          &k.verify_slack, &k.beta_max};
}

}  // namespace detail

inline std::string serialize_index(const Oracle& o, PersistMode mode) {
  const SymNorm& norm = o.norm();
  if (norm.family() == NormFamily::custom) throw std::invalid_argument("custom norms cannot be persisted");
  std::ostringstream out(std::ios::binary);
  out.write("SNDO", 4);
  detail::put_le<std::uint32_t>(out, kIndexVersion);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(mode));
  detail::put_string(out, norm.descriptor());
  if (const OrliczGrid* g = norm.orlicz_grid()) {
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g->xs().size()));
    for (std::size_t t = 0; t < g->xs().size(); ++t) {
      detail::put_le<double>(out, g->xs()[t]);
      detail::put_le<double>(out, g->gs()[t]);
    }
    detail::put_le<double>(out, norm.orlicz_growth());
  } else {
    detail::put_le<std::uint32_t>(out, 0);
  }
  const OracleParams& p = o.params();
  detail::put_le<double>(out, p.eps);
  detail::put_le<double>(out, p.delta);
  detail::put_le<double>(out, p.xi);
  detail::put_le<double>(out, p.mmc.value);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.mmc.provenance));
  OracleKnobs k = p.knobs;
  const auto fields = detail::knob_fields(k);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(fields.size()));
  for (double* f : fields) detail::put_le<double>(out, *f);
  detail::put_le<std::uint64_t>(out, o.seed());
  detail::put_le<std::uint64_t>(out, p.n);
  detail::put_le<std::uint64_t>(out, p.d);
  for (const auto& x : o.points()) {
    for (double v : x) detail::put_le<double>(out, v);
  }
  if (mode == PersistMode::materialized) {
    for (const auto& cell : o.cells()) {
      const auto& c = cell.bank.counters();
      detail::put_le<std::uint64_t>(out, c.size());
      for (double v : c) detail::put_le<double>(out, v);
    }
  }
  std::string bytes = std::move(out).str();
  const std::uint64_t sum = detail::fnv1a(bytes);
  std::ostringstream tail(std::ios::binary);
  detail::put_le<std::uint64_t>(tail, sum);
  bytes += tail.str();
  return bytes;
}

inline Oracle deserialize_index(const std::string& bytes, PersistMode* mode_out = nullptr) {
  if (bytes.size() < 12 || bytes.compare(0, 4, "SNDO") != 0) throw DataError("not an index file (bad magic)");
  {
    std::istringstream tail(bytes.substr(bytes.size() - 8), std::ios::binary);
    const auto stored = detail::get_le<std::uint64_t>(tail, "checksum");
    if (stored != detail::fnv1a(bytes.substr(0, bytes.size() - 8))) throw DataError("index checksum mismatch (file is corrupted)");
  }
  std::istringstream in(bytes.substr(4, bytes.size() - 12), std::ios::binary);
  const auto version = detail::get_le<std::uint32_t>(in, "version");
  if (version != kIndexVersion) throw DataError("unsupported index version " + std::to_string(version));
  const auto mode_raw = detail::get_le<std::uint32_t>(in, "mode");
  if (mode_raw > 1) throw DataError("unknown persistence mode");
  const auto mode = static_cast<PersistMode>(mode_raw);
  if (mode_out) *mode_out = mode;
  const std::string desc = detail::get_string(in, "norm descriptor");
  const auto grid_len = detail::get_le<std::uint32_t>(in, "grid size");
  std::optional<SymNorm> norm;
  try {
    if (grid_len > 0) {
      std::vector<double> xs(grid_len), gs(grid_len);
      for (std::uint32_t t = 0; t < grid_len; ++t) {
        xs[t] = detail::get_le<double>(in, "grid");
        gs[t] = detail::get_le<double>(in, "grid");
      }
      const double growth = detail::get_le<double>(in, "growth constant");
      std::string source = desc.substr(std::string("orlicz:").size());
      const auto colon = source.rfind(':');
      std::optional<double> user_growth;
      if (colon != std::string::npos && colon + 1 < source.size() &&
          source.find_first_not_of("0123456789.eE+-", colon + 1) == std::string::npos) {
        source.resize(colon);
        user_growth = growth;
      }
      norm = SymNorm::orlicz(OrliczGrid(std::move(xs), std::move(gs), source), user_growth);
    } else {
      norm = parse_norm(desc);
    }
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("index holds an invalid norm: ") + e.what());
  }
  const double eps = detail::get_le<double>(in, "eps");
  const double delta = detail::get_le<double>(in, "delta");
  const double xi = detail::get_le<double>(in, "xi");
  MmcBound mmc;
  mmc.value = detail::get_le<double>(in, "mmc");
  const auto prov = detail::get_le<std::uint32_t>(in, "mmc provenance");
  if (prov > 2) throw DataError("bad mmc provenance");
  mmc.provenance = static_cast<MmcProvenance>(prov);
  OracleKnobs knobs;
  auto fields = detail::knob_fields(knobs);
  const auto nk = detail::get_le<std::uint32_t>(in, "knob count");
  if (nk != fields.size()) throw DataError("knob count mismatch");
  for (double* f : fields) *f = detail::get_le<double>(in, "knob");
  const auto seed = detail::get_le<std::uint64_t>(in, "seed");
  const auto n = detail::get_le<std::uint64_t>(in, "n");
  const auto d = detail::get_le<std::uint64_t>(in, "d");
  if (n == 0 || d == 0 || n > (1ULL << 32) || d > (1ULL << 32) || n * d * 8 > bytes.size()) {
    throw DataError("implausible index shape");
  }
  std::vector<DenseVector> pts(n, DenseVector(d));
  for (auto& x : pts) {
    for (auto& v : x) v = detail::get_le<double>(in, "points");
  }
  OracleParams params;
  try {
    params = OracleParams::derive(eps, delta, n, d, mmc, knobs, xi);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("index holds invalid parameters: ") + e.what());
  }
  Oracle o(params, *norm, seed, std::move(pts), mode == PersistMode::replayable);
  if (mode == PersistMode::materialized) {
    for (auto& cell : o.cells()) {
      auto& c = cell.bank.counters();
      const auto len = detail::get_le<std::uint64_t>(in, "counter block size");
      if (len != c.size()) throw DataError("counter block size mismatch");
      for (auto& v : c) v = detail::get_le<double>(in, "counters");
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw DataError("trailing bytes in index file");
  return o;
}

/// Writes via a temporary file and rename so readers never see a partial index.
inline void save_index(const std::string& path, const Oracle& o, PersistMode mode) {
  const std::string bytes = serialize_index(o, mode);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write index: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed: " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError("cannot move index into place: " + ec.message());
}

inline Oracle load_index(const std::string& path, PersistMode* mode_out = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open index: " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_index(bytes, mode_out);
}

}  // namespace symdist
