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

// sndo: build, query and maintain symmetric-norm distance oracle indexes.

#include "symdist/selftest.hpp"
#include "symdist/symdist.hpp"

#include <CLI11.hpp>
#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <thread>

namespace {

using namespace symdist;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kSelftest = 3 };

using Clock = std::chrono::steady_clock;

// Advisory lock held on a sidecar file, since saves replace the index by rename.
class IndexLock {
 public:
  IndexLock(const std::string& index, bool exclusive) {
    fd_ = ::open((index + ".lock").c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) {
      if (exclusive) throw DataError("cannot open lock file for " + index);
      return;
    }
    if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) throw DataError("cannot lock " + index);
  }
  ~IndexLock() {
    if (fd_ >= 0) ::close(fd_);
  }
  IndexLock(const IndexLock&) = delete;
  IndexLock& operator=(const IndexLock&) = delete;

 private:
  int fd_ = -1;
};

unsigned default_threads() {
  if (const char* env = std::getenv("SNDO_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

std::vector<std::size_t> parse_subset(const std::string& text, std::size_t n) {
  std::vector<std::size_t> out;
  if (text.empty()) {
    out.resize(n);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string tok = text.substr(start, end - start);
    std::size_t v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw std::invalid_argument("malformed subset entry '" + tok + "'");
    }
    if (v >= n) throw std::invalid_argument("subset index " + tok + " out of range");
    out.push_back(v);
    start = end + 1;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double quantile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct Record {
  std::size_t i = 0;
  std::optional<double> dst;
  std::optional<double> exact;
  std::int64_t wall_ns = 0;
};

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

void print_report(std::ostream& out, const std::vector<Record>& recs, double total_s) {
  out << "# i,dst,exact,rel_err,wall_ns\n";
  std::vector<double> lat, err;
  for (const auto& r : recs) {
    std::optional<double> rel;
    if (r.dst && r.exact) {
      rel = *r.exact > 0.0 ? std::abs(*r.dst - *r.exact) / *r.exact : (*r.dst == 0.0 ? 0.0 : INFINITY);
      err.push_back(*rel);
    }
    lat.push_back(static_cast<double>(r.wall_ns));
    out << r.i << ',' << opt(r.dst) << ',' << opt(r.exact) << ',' << opt(rel) << ',' << r.wall_ns << '\n';
  }
  out << "# summary count=" << recs.size() << " p50_ns=" << format_double(quantile(lat, 0.5))
      << " p95_ns=" << format_double(quantile(lat, 0.95)) << " p99_ns=" << format_double(quantile(lat, 0.99));
  if (!err.empty()) {
    out << " rel_err_p50=" << format_double(quantile(err, 0.5)) << " rel_err_p95=" << format_double(quantile(err, 0.95))
        << " rel_err_max=" << format_double(quantile(err, 1.0));
  }
  out << " wall_s=" << format_double(total_s);
  if (total_s > 0.0) out << " throughput_per_s=" << format_double(static_cast<double>(recs.size()) / total_s);
  out << '\n';
}

/// Per-index estimates with per-record timing, fanned out over threads.
std::vector<Record> timed_query(const Oracle& o, const DenseVector& q, const std::vector<std::size_t>& S,
                                unsigned threads) {
  const auto t0 = Clock::now();
  const QuerySketch qs = o.encode_query(q);
  const auto encode_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count() /
      static_cast<std::int64_t>(std::max<std::size_t>(1, S.size()));
  std::vector<Record> recs(S.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    std::vector<double> scratch;
    for (std::size_t t; (t = next.fetch_add(1)) < S.size();) {
      const auto s0 = Clock::now();
      recs[t].i = S[t];
      recs[t].dst = o.estimate_from_query(qs, S[t], scratch).value;
      recs[t].wall_ns = encode_ns + std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - s0).count();
    }
  };
  const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, S.size()))));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return recs;
}

void print_params(std::ostream& out, const OracleParams& p) {
  out << "n=" << p.n << " d=" << p.d << " eps=" << format_double(p.eps) << " delta=" << format_double(p.delta)
      << "\nR=" << p.R << " L=" << p.L << " U=" << p.U << " cells=" << p.cells() << " P=" << p.P
      << "\neps1=" << format_double(p.eps1) << " beta=" << format_double(p.beta) << " eps_hh=" << format_double(p.eps_hh)
      << "\ngamma=" << format_double(p.gamma) << " xi=" << format_double(p.xi) << " alpha=" << format_double(p.alpha)
      << "\nmmc=" << format_double(p.mmc.value) << " (" << to_string(p.mmc.provenance) << ")"
      << " count_threshold=" << format_double(p.count_threshold()) << '\n';
}

struct KnobFlags {
  std::string profile = "desk";
  std::optional<double> k_R, k_U, k_beta, k_gamma, k_eps1;
  std::vector<std::string> extra;

  void add(CLI::App* app) {
    app->add_option("--profile", profile, "parameter profile")->check(CLI::IsMember({"paper", "desk"}));
    app->add_option("--k-R", k_R, "override k_R");
    app->add_option("--k-U", k_U, "override k_U");
    app->add_option("--k-beta", k_beta, "override k_beta");
    app->add_option("--k-gamma", k_gamma, "override k_gamma");
    app->add_option("--k-eps1", k_eps1, "override k_eps1");
    app->add_option("--knob", extra, "other knob as name=value (k_A, c_T, c_m, c_t, c_cap, verify_slack, beta_max)");
  }

  OracleKnobs resolve() const {
    OracleKnobs k = OracleKnobs::by_name(profile);
    if (k_R) k.k_R = *k_R;
    if (k_U) k.k_U = *k_U;
    if (k_beta) k.k_beta = *k_beta;
    if (k_gamma) k.k_gamma = *k_gamma;
    if (k_eps1) k.k_eps1 = *k_eps1;
    const std::map<std::string, double*> named = {
        {"k_A", &k.k_A}, {"c_T", &k.c_T}, {"c_m", &k.c_m}, {"c_t", &k.c_t},
        {"c_cap", &k.c_cap}, {"verify_slack", &k.verify_slack}, {"beta_max", &k.beta_max}};
    for (const auto& kv : extra) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--knob expects name=value, got '" + kv + "'");
      const auto it = named.find(kv.substr(0, eq));
      if (it == named.end()) throw std::invalid_argument("unknown knob '" + kv.substr(0, eq) + "'");
      *it->second = detail::parse_number(kv.substr(eq + 1), "knob value");
    }
    k.validate();
    return k;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"sndo: approximate distance oracle for symmetric norms"};
  app.require_subcommand(1);

  // build
  std::string dataset, out_path, norm_spec = "lp:2";
  double eps = 0.25, delta = 0.1;
  std::uint64_t seed = 1;
  bool materialized = false;
  std::optional<double> mmc_override;
  KnobFlags knobs;
  auto* build = app.add_subcommand("build", "build an index from a dataset");
  build->add_option("dataset", dataset, "dataset file (SNDS binary or text)")->required();
  build->add_option("-o,--out", out_path, "index output path")->required();
  build->add_option("--norm", norm_spec, "norm descriptor");
  build->add_option("--eps", eps, "accuracy parameter in (0,1)");
  build->add_option("--delta", delta, "failure probability in (0,1)");
  build->add_option("--seed", seed, "master seed");
  build->add_option("--mmc", mmc_override, "mmc value for custom norms or to override the table");
  build->add_flag("--materialized", materialized, "store counters instead of replaying them on load");
  knobs.add(build);

  // query
  std::string index, qarg, subset;
  bool exact_compare = false;
  unsigned threads = default_threads();
  auto* query = app.add_subcommand("query", "estimate distances from a query vector");
  query->add_option("index", index)->required();
  query->add_option("vector", qarg, "file or inline comma-separated vector")->required();
  query->add_option("--set", subset, "comma-separated subset of point indices");
  query->add_flag("--exact-compare", exact_compare, "also compute exact distances");
  query->add_option("--threads", threads)->check(CLI::PositiveNumber);

  // update
  std::size_t pi = 0, pj = 0;
  auto* update = app.add_subcommand("update", "replace point i and persist the index");
  update->add_option("index", index)->required();
  update->add_option("i", pi)->required();
  update->add_option("vector", qarg)->required();

  auto* estpair = app.add_subcommand("estpair", "estimate the distance between two stored points");
  estpair->add_option("index", index)->required();
  estpair->add_option("i", pi)->required();
  estpair->add_option("j", pj)->required();

  std::string xarg;
  auto* exact = app.add_subcommand("exact", "exact distance between two vectors");
  exact->add_option("q", qarg)->required();
  exact->add_option("x", xarg, "defaults to the zero vector");
  exact->add_option("--norm", norm_spec);

  std::string scale = "quick";
  auto* selftest = app.add_subcommand("selftest", "run the statistical suites");
  selftest->add_option("--scale", scale)->check(CLI::IsMember({"quick", "full"}));
  selftest->add_option("--seed", seed);

  std::size_t nq = 100;
  bool sweep = false;
  auto* bench = app.add_subcommand("bench", "time random queries against an index");
  bench->add_option("index", index)->required();
  bench->add_option("--queries", nq);
  bench->add_option("--threads", threads)->check(CLI::PositiveNumber);
  bench->add_option("--seed", seed);
  bench->add_flag("--sweep", sweep, "also time synthetic indexes at n and 2n");

  std::size_t gn = 32, gd = 512;
  double spread = 1.0;
  bool text = false;
  auto* gen = app.add_subcommand("gen", "write a synthetic Gaussian dataset");
  gen->add_option("out", out_path)->required();
  gen->add_option("--n", gn)->check(CLI::PositiveNumber);
  gen->add_option("--d", gd)->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed);
  gen->add_option("--spread", spread, "per-point log-scale spread");
  gen->add_flag("--text", text, "write comma-separated text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (*build) {
    const auto points = read_dataset(dataset);
    if (points.empty()) throw DataError("dataset has no points");
    const std::size_t d = points.front().size();
    const SymNorm norm = parse_norm(norm_spec, d);
    std::optional<MmcBound> mmc;
    if (mmc_override) mmc = MmcBound{*mmc_override, MmcProvenance::user_supplied};
    const Oracle o = Oracle::build(points, norm, eps, delta, seed, knobs.resolve(), mmc);
    IndexLock lock(out_path, true);
    save_index(out_path, o, materialized ? PersistMode::materialized : PersistMode::replayable);
    std::cout << "norm=" << norm.descriptor() << " mode=" << (materialized ? "materialized" : "replayable") << '\n';
    print_params(std::cout, o.params());
    return kOk;
  }
  if (*query) {
    IndexLock lock(index, false);
    const Oracle o = load_index(index);
    const DenseVector q = read_vector_arg(qarg);
    if (q.size() != o.d()) throw std::invalid_argument("query dimension does not match the index");
    const auto S = parse_subset(subset, o.n());
    const auto t0 = Clock::now();
    auto recs = timed_query(o, q, S, threads);
    const double secs = detail::seconds_since(t0);
    if (exact_compare) {
      for (auto& r : recs) r.exact = exact_distance(o.norm(), q, o.points()[r.i]);
    }
    print_report(std::cout, recs, secs);
    return kOk;
  }
  if (*update) {
    IndexLock lock(index, true);
    PersistMode mode = PersistMode::replayable;
    Oracle o = load_index(index, &mode);
    const DenseVector z = read_vector_arg(qarg);
    if (pi >= o.n()) throw std::invalid_argument("point index out of range");
    if (z.size() != o.d()) throw std::invalid_argument("vector dimension does not match the index");
    o.update_x(pi, z);
    save_index(index, o, mode);
    return kOk;
  }
  if (*estpair) {
    IndexLock lock(index, false);
    const Oracle o = load_index(index);
    if (pi >= o.n() || pj >= o.n()) throw std::invalid_argument("point index out of range");
    std::cout << format_double(o.est_pair(pi, pj)) << '\n';
    return kOk;
  }
  if (*exact) {
    const DenseVector q = read_vector_arg(qarg);
    const DenseVector x = xarg.empty() ? DenseVector(q.size(), 0.0) : read_vector_arg(xarg);
    std::cout << format_double(exact_distance(parse_norm(norm_spec, q.size()), q, x)) << '\n';
    return kOk;
  }
  if (*selftest) {
    const auto results = run_selftest(scale == "full" ? SelftestScale::full() : SelftestScale::quick(), seed);
    bool ok = true;
    for (const auto& r : results) {
      ok = ok && r.passed;
      std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " coverage=" << format_double(r.coverage)
                << " required=" << format_double(r.required) << " seconds=" << format_double(r.seconds) << " ("
                << r.detail << ")\n";
    }
    return ok ? kOk : kSelftest;
  }
  if (*bench) {
    IndexLock lock(index, false);
    const Oracle o = load_index(index);
    const auto queries = gaussian_points(nq, o.d(), seed);
    std::vector<std::size_t> all(o.n());
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<Record> recs;
    const auto t0 = Clock::now();
    for (std::size_t t = 0; t < nq; ++t) {
      const auto s0 = Clock::now();
      (void)o.query_all(queries[t], threads);
      Record r;
      r.i = t;
      r.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - s0).count();
      recs.push_back(r);
    }
    print_report(std::cout, recs, detail::seconds_since(t0));
    if (sweep) {
      for (std::size_t n : {o.n(), 2 * o.n()}) {
        const auto pts = gaussian_points(n, o.d(), seed + n);
        const Oracle s = Oracle::build(pts, o.norm(), o.params().eps, o.params().delta, seed, o.params().knobs);
        const auto q = gaussian_points(1, o.d(), seed + 7).front();
        const auto s0 = Clock::now();
        (void)s.query_all(q, threads);
        std::cout << "# sweep n=" << n << " d=" << o.d() << " query_s=" << format_double(detail::seconds_since(s0))
                  << '\n';
      }
    }
    return kOk;
  }
  if (*gen) {
    write_dataset(out_path, gaussian_points(gn, gd, seed, spread), !text);
    return kOk;
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const DataError& e) {
    std::cerr << "sndo: data error: " << e.what() << '\n';
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "sndo: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "sndo: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "sndo: " << e.what() << '\n';
    return kData;
  }
}
