// Copyright 2026 The sable-he Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Command implementations behind tools/sable. Argument parsing lives in the
// tool; everything here takes resolved options and writes to the streams it
// is given, so the commands can be driven from tests.

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sable/config.hpp"
#include "sable/encoding.hpp"
#include "sable/error.hpp"
#include "sable/homcircuit.hpp"
#include "sable/matrix.hpp"
#include "sable/oracles.hpp"
#include "sable/protocol.hpp"

namespace sable::cli {

enum ExitCode : int { Ok = 0, Usage = 2, Invariant = 3 };

struct ParamsOptions {
  unsigned N = 1;
  std::size_t min_d = 1;
  std::optional<std::uint64_t> B;
  std::size_t n = 1;
  std::size_t f = 0;
  std::optional<int> delta;
  std::optional<std::uint64_t> range;
  std::optional<std::uint64_t> offset;
  std::uint64_t max_m = 1ULL << 17;
  std::uint64_t max_p = 1ULL << 16;
};

inline void print_encoding(std::ostream& out, const EncodingParams& enc) {
  out << "m=" << enc.ring->m() << "\np=" << enc.p() << "\nN=" << enc.digits() << "\nd=" << enc.ring->d()
      << "\nB=" << enc.base << "\noffset=" << enc.offset << "\n";
}

inline int params(const ParamsOptions& o, std::ostream& out) {
  ParamQuery q;
  q.N = o.N;
  q.min_d = o.min_d;
  q.base = o.B;
  q.n = o.n;
  q.f = o.f;
  q.delta = o.delta;
  q.range = o.range;
  q.offset = o.offset;
  q.max_m = o.max_m;
  q.max_p = o.max_p;
  print_encoding(out, param_search(q));
  return Ok;
}

/// One row per input vector, comma separated integers; blank lines and
/// lines starting with '#' are skipped.
inline IntMatrix read_int_rows(std::istream& in, const std::string& source) {
  IntMatrix x;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<std::int64_t> row;
    for (const auto& tok : split_list(line)) {
      row.push_back(KeyValueConfig::to_int(source + ":" + std::to_string(lineno), tok));
    }
    detail::require(x.rows() == 0 || row.size() == x.cols(),
                    source + ":" + std::to_string(lineno) + ": expected " + std::to_string(x.cols()) + " values");
    x.append_row(row);
  }
  detail::require(x.rows() >= 1, source + ": no input vectors");
  return x;
}

inline IntMatrix read_int_rows(const std::string& path) {
  std::ifstream in(path);
  detail::require(static_cast<bool>(in), "cannot open " + path);
  return read_int_rows(in, path);
}

inline void write_int_row(std::ostream& out, std::span<const std::int64_t> v) {
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  out << "\n";
}

struct AggOptions {
  std::string input;
  std::string op = "hts";  // hts | hmed
  std::optional<std::size_t> f;
  std::uint64_t B = 7;
  unsigned N = 1;
  std::optional<std::uint64_t> p;
  std::optional<std::uint64_t> m;
  std::uint64_t offset = 0;
  bool oracle = false;
  std::string out;  // empty: stdout
  unsigned threads = 1;
};

/// Encodes every row, evaluates the circuit slot-wise and decodes. With
/// `oracle` the result is compared against the plaintext aggregator and a
/// mismatch is reported as an invariant failure.
inline int agg(const AggOptions& o, std::ostream& out, std::ostream& err) {
  const IntMatrix x = read_int_rows(o.input);
  const std::size_t n = x.rows();
  detail::require(o.op == "hts" || o.op == "hmed", "agg: --op must be hts or hmed");
  const bool median = o.op == "hmed";
  detail::require(!median || n % 2 == 1, "agg: hmed needs an odd number of inputs");
  const std::size_t f = median ? n / 2 : o.f.value_or(0);
  detail::require(2 * f < n, "agg: need f < n/2");
  const std::size_t width = n - 2 * f;
  const std::uint64_t range = detail::ipow_sat(o.B, o.N);

  EncodingParams enc;
  if (o.p && o.m) {
    enc = make_encoding(RingParams::make(*o.m, *o.p), o.B, range, o.offset, width, n);
  } else if (o.p) {
    enc = make_encoding(ring_for(*o.p, o.N), o.B, range, o.offset, width, n);
  } else {
    detail::require(!o.m, "agg: --m needs --p");
    ParamQuery q;
    q.base = o.B;
    q.range = range;
    q.offset = o.offset;
    q.N = o.N;
    q.n = n;
    q.f = f;
    q.sum_width = width;
    enc = param_search(q);
  }
  detail::require(enc.digits() == o.N, "agg: ord_m(p) = " + std::to_string(enc.digits()) + " differs from --N");

  std::vector<PackedBatch> ciphers;
  for (std::size_t r = 0; r < n; ++r) ciphers.push_back(pack(x.row(r), enc));
  CostReport cost;
  const auto op = median ? AggregateOp::Median : AggregateOp::TrimmedSum;
  const auto result = unpack_sum(aggregate_batches(ciphers, f, enc, op, o.threads, &cost), enc, width);

  if (o.out.empty()) {
    write_int_row(out, result);
  } else {
    std::ofstream file(o.out);
    detail::require(static_cast<bool>(file), "cannot write " + o.out);
    write_int_row(file, result);
  }
  err << "depth=" << cost.depth << " ct_ct_mults=" << cost.counters.ct_ct_mults << " m=" << enc.ring->m()
      << " p=" << enc.p() << "\n";
  if (o.oracle) {
    const auto expected = median ? cwmed(x) : cwts(x, f);
    if (expected != result) {
      out << "MISMATCH\n";
      return Invariant;
    }
    out << "MATCH\n";
  }
  return Ok;
}

struct BenchOptions {
  std::size_t n = 4;
  std::optional<std::size_t> f;  // default floor((n-1)/2)
  std::uint64_t B = 7;
  unsigned N = 3;
  std::uint64_t p = 131;
  std::optional<std::uint64_t> m;
};

inline int bench(const BenchOptions& o, std::ostream& out) {
  detail::require(o.n >= 1, "bench: n must be >= 1");
  const std::size_t f = o.f.value_or((o.n - 1) / 2);
  detail::require(2 * f < o.n, "bench: need f < n/2");
  const RingPtr ring = o.m ? RingParams::make(*o.m, o.p) : ring_for(o.p, o.N);
  detail::require(ring->N() == o.N, "bench: ord_m(p) differs from --N");
  const auto enc = make_encoding(ring, o.B, detail::ipow_sat(o.B, o.N), 0, o.n - 2 * f, o.n);
  const CostReport c = cost_report(o.n, f, enc);
  out << "depth=" << c.depth << "\nct_ct_mults=" << c.counters.ct_ct_mults << "\nct_pt_mults="
      << c.counters.ct_pt_mults << "\nadds=" << c.counters.adds << "\nextractions=" << c.counters.extractions
      << "\nn=" << c.n << "\nf=" << c.f << "\nB=" << c.B << "\nN=" << c.N << "\np=" << c.p << "\nm=" << ring->m()
      << "\nd=" << ring->d() << "\n";
  return Ok;
}

/// Runs one experiment and writes the metrics CSV. The resolved
/// configuration goes to `err`.
inline int train(const KeyValueConfig& kv, const std::string& out_path, std::ostream& out, std::ostream& err,
                 std::optional<unsigned> threads = std::nullopt) {
  ExperimentConfig cfg = experiment_from_config(kv);
  if (threads) cfg.threads = *threads;
  err << describe(cfg);
  const EncodingParams enc = experiment_encoding(cfg);
  err << "# resolved encoding: m=" << enc.ring->m() << " p=" << enc.p() << " N=" << enc.digits()
      << " d=" << enc.ring->d() << " B=" << enc.base << " offset=" << enc.offset << "\n";
  const TrainingResult r = run_training(cfg);
  if (out_path.empty() || out_path == "-") {
    write_metrics_csv(out, cfg, r);
  } else {
    std::ofstream file(out_path);
    detail::require(static_cast<bool>(file), "cannot write " + out_path);
    write_metrics_csv(file, cfg, r);
  }
  return Ok;
}

inline std::string sanitize_for_filename(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '_';
  return out;
}

/// One training run per value of `key`; files are <key>=<value>.csv.
inline int sweep(const KeyValueConfig& base, const std::string& key, const std::vector<std::string>& values,
                 const std::string& out_dir, std::ostream& out, std::ostream& err,
                 std::optional<unsigned> threads = std::nullopt) {
  detail::require(!values.empty(), "sweep: --values is empty");
  detail::require(known_config_keys().count(key) != 0, "sweep: unknown config key: " + key);
  std::filesystem::create_directories(out_dir);
  for (const auto& v : values) {
    KeyValueConfig kv = base;
    kv.set(key, v);
    const auto path = (std::filesystem::path(out_dir) / (sanitize_for_filename(key) + "=" + sanitize_for_filename(v) +
                                                         ".csv")).string();
    std::ostringstream resolved;
    train(kv, path, out, resolved, threads);
    err << "# " << key << "=" << v << "\n" << resolved.str();
    out << path << "\n";
  }
  return Ok;
}

}  // namespace sable::cli
