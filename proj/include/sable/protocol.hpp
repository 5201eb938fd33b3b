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

// Simulation of robust distributed SGD over quantized, encoded momentums.
//
// One step, in order:
//   1. every participating node draws a batch from its shard (own RNG stream),
//      computes the gradient at the shared model, updates its momentum
//      m_t = beta m_{t-1} + (1 - beta) g_t and quantizes it;
//   2. Byzantine nodes replace their vector by the attack vector;
//   3. the server optionally subsamples 2f+1 nodes (server RNG stream),
//      aggregates the encoded vectors and broadcasts the integer result;
//   4. every honest node divides by |S| - 2f, de-quantizes and applies
//      theta <- theta - gamma * TM on its own copy of the model.
// The server only ever handles PackedBatch encodings.
//
// RNG streams (see make_rng): role 0xC1A55/0x5A3D1E synthetic data,
// 0xD1A1C7 Dirichlet split, 0xBA7C + node index batch sampling, 0x5E4E
// server subsampling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <iterator>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "sable/attacks.hpp"
#include "sable/config.hpp"
#include "sable/datasim.hpp"
#include "sable/encoding.hpp"
#include "sable/error.hpp"
#include "sable/homcircuit.hpp"
#include "sable/matrix.hpp"
#include "sable/oracles.hpp"

namespace sable {

// ---------------------------------------------------------------------------
// Model: multinomial logistic regression, theta = [W (K x D_f) row-major | b (K)].

struct ModelShape {
  std::size_t dims = 0;
  int classes = 0;

  std::size_t size() const { return dims * static_cast<std::size_t>(classes) + static_cast<std::size_t>(classes); }
};

inline void logits(std::span<const double> theta, std::span<const double> x, const ModelShape& shape,
                   std::span<double> out) {
  const auto K = static_cast<std::size_t>(shape.classes);
  for (std::size_t k = 0; k < K; ++k) {
    double z = theta[shape.dims * K + k];
    const double* w = theta.data() + k * shape.dims;
    for (std::size_t j = 0; j < shape.dims; ++j) z += w[j] * x[j];
    out[k] = z;
  }
}

/// Mean negative log-likelihood gradient over the batch, plus l2 * theta.
/// With flip_labels the labels l are replaced by K-1-l.
inline std::vector<double> gradient(std::span<const double> theta, const Dataset& ds,
                                    std::span<const std::size_t> batch, double l2, bool flip_labels = false) {
  detail::require(!batch.empty(), "gradient: empty batch");
  const ModelShape shape{ds.dims(), ds.classes};
  detail::require(theta.size() == shape.size(), "gradient: parameter size mismatch");
  const auto K = static_cast<std::size_t>(ds.classes);
  std::vector<double> g(theta.size(), 0.0);
  std::vector<double> z(K);
  for (std::size_t idx : batch) {
    const auto x = ds.features.row(idx);
    logits(theta, x, shape, z);
    const double zmax = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (auto& v : z) total += (v = std::exp(v - zmax));
    const int y = flip_labels ? labelflip(ds.labels[idx], ds.classes) : ds.labels[idx];
    for (std::size_t k = 0; k < K; ++k) {
      const double r = z[k] / total - (static_cast<int>(k) == y ? 1.0 : 0.0);
      double* gw = g.data() + k * shape.dims;
      for (std::size_t j = 0; j < shape.dims; ++j) gw[j] += r * x[j];
      g[shape.dims * K + k] += r;
    }
  }
  const auto inv = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = g[i] * inv + l2 * theta[i];
  return g;
}

/// Fraction of samples whose argmax logit (lowest class on ties) is the label.
inline double accuracy(std::span<const double> theta, const Dataset& ds) {
  if (ds.size() == 0) return 0.0;
  const ModelShape shape{ds.dims(), ds.classes};
  std::vector<double> z(static_cast<std::size_t>(ds.classes));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    logits(theta, ds.features.row(i), shape, z);
    const auto best = static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
    hits += best == ds.labels[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(ds.size());
}

// ---------------------------------------------------------------------------
// Quantization

/// Q = (2^(delta-1) - 1) / C.
inline double quantization_scale(int delta, double clamp) {
  return static_cast<double>((std::int64_t{1} << (delta - 1)) - 1) / clamp;
}

inline std::int64_t quantization_bound(int delta) { return (std::int64_t{1} << (delta - 1)) - 1; }

struct QuantizedVector {
  std::vector<std::int64_t> values;
  int delta = 2;
  double clamp = 1.0;

  std::int64_t bound() const { return quantization_bound(delta); }
  bool in_range() const {
    return std::all_of(values.begin(), values.end(), [b = bound()](std::int64_t v) { return v >= -b && v <= b; });
  }
};

/// round(clamp(x, -C, C) * Q), rounding half away from zero.
inline QuantizedVector qua(std::span<const double> m, int delta, double clamp) {
  detail::require(delta > 1 && delta < 32, "qua: delta must be in (1, 32)");
  detail::require(clamp > 0.0, "qua: clamp must be positive");
  const double q = quantization_scale(delta, clamp);
  QuantizedVector out{{}, delta, clamp};
  out.values.reserve(m.size());
  for (double x : m) out.values.push_back(static_cast<std::int64_t>(std::round(std::clamp(x, -clamp, clamp) * q)));
  return out;
}

// ---------------------------------------------------------------------------
// Server side

/// 2f+1 distinct node indices, uniform without replacement, sorted.
inline std::vector<std::size_t> subsample(std::size_t n, std::size_t f, std::mt19937_64& rng) {
  detail::require(2 * f + 1 <= n, "subsample: need 2f+1 <= n");
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> out;
  std::sample(all.begin(), all.end(), std::back_inserter(out), 2 * f + 1, rng);
  return out;
}

enum class AggMode { Homomorphic, Oracle, Mean };

inline std::string to_string(AggMode m) {
  switch (m) {
    case AggMode::Homomorphic: return "homomorphic";
    case AggMode::Oracle: return "oracle";
    case AggMode::Mean: return "mean";
  }
  return "?";
}

inline AggMode parse_agg_mode(const std::string& s) {
  if (s == "homomorphic" || s == "hts") return AggMode::Homomorphic;
  if (s == "oracle" || s == "cwts") return AggMode::Oracle;
  if (s == "mean" || s == "average") return AggMode::Mean;
  throw ValidationError("unknown agg_mode '" + s + "' (expected homomorphic|oracle|mean)");
}

/// Number of encodings a mode ever sums: the trimmed window, or all of S.
inline std::size_t summed_inputs(AggMode mode, std::size_t selected, std::size_t f) {
  return mode == AggMode::Mean ? selected : selected - 2 * f;
}

/// Aggregates the encoded vectors of the selected nodes and removes the
/// offset. Homomorphic and oracle modes return the trimmed sum and agree
/// bit-exactly; mean mode returns the plain sum.
inline std::vector<std::int64_t> server_aggregate(const std::vector<PackedBatch>& ciphers, std::size_t f, AggMode mode,
                                                  const EncodingParams& enc, unsigned threads = 1,
                                                  CostReport* report = nullptr) {
  using detail::require;
  const std::size_t s = ciphers.size();
  require(s >= 1, "server_aggregate: no inputs");
  require(mode == AggMode::Mean || s >= 2 * f + 1, "server_aggregate: need |S| >= 2f+1");
  enc.validate();
  require(s <= enc.p(), "server_aggregate: |S| exceeds p");
  const std::size_t width = summed_inputs(mode, s, f);
  require(enc.sum_width >= width, "server_aggregate: encoding sum_width " + std::to_string(enc.sum_width) +
                                      " below the " + std::to_string(width) + " summed inputs");
  switch (mode) {
    case AggMode::Homomorphic: {
      const PackedBatch out = aggregate_batches(ciphers, f, enc, AggregateOp::TrimmedSum, threads, report);
      return unpack_sum(out, enc, width);
    }
    case AggMode::Oracle: {
      IntMatrix x;
      for (const auto& c : ciphers) x.append_row(unpack_sum(c, enc, 0));
      auto out = cwts(x, f);
      const auto correction = static_cast<std::int64_t>(width * enc.offset);
      for (auto& v : out) v -= correction;
      return out;
    }
    case AggMode::Mean: {
      PackedBatch sum = ciphers.front();
      for (std::size_t i = 1; i < s; ++i) {
        for (std::size_t c = 0; c < sum.vectors.size(); ++c) {
          sum.vectors[c] = plain::add(sum.vectors[c], ciphers[i].vectors.at(c));
        }
      }
      return unpack_sum(sum, enc, width);
    }
  }
  throw InvariantError("server_aggregate: unreachable");
}

/// theta - gamma * (aggregate / (|S| - 2f)) / Q.
inline std::vector<double> local_update(std::span<const double> theta, std::span<const std::int64_t> aggregate,
                                        std::size_t selected, std::size_t f, double gamma, int delta, double clamp) {
  detail::require(selected > 2 * f, "local_update: need |S| > 2f");
  detail::require(theta.size() == aggregate.size(), "local_update: dimension mismatch");
  const double denom = static_cast<double>(selected - 2 * f) * quantization_scale(delta, clamp);
  std::vector<double> out(theta.begin(), theta.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= gamma * (static_cast<double>(aggregate[i]) / denom);
  return out;
}

// ---------------------------------------------------------------------------
// Experiment configuration

enum class AttackDomain { Quantized, Raw };

struct DatasetConfig {
  std::string kind = "synthetic";  // synthetic | idx
  SynthSpec synth;
  std::size_t train_size = 3000;
  std::size_t test_size = 1000;
  std::string train_images, train_labels, test_images, test_labels;
};

struct EncodingConfig {
  unsigned N = 1;
  std::uint64_t B = 0;  // 0: smallest base covering the quantized range
  std::uint64_t m = 0;  // m and p both set: use them instead of searching
  std::uint64_t p = 0;
  std::size_t min_d = 1;
  std::uint64_t max_m = 1ULL << 17;
  std::uint64_t max_p = 1ULL << 16;
};

struct ExperimentConfig {
  std::size_t n = 15;
  std::size_t f = 5;
  int delta = 2;
  double clamp = 1e-3;
  double gamma = 0.5;
  double beta = 0.9;
  std::size_t T = 100;
  std::size_t batch = 25;
  double l2 = 1e-4;
  double alpha = 1.0;
  AttackSpec attack;
  AttackDomain attack_domain = AttackDomain::Quantized;
  bool subsample = false;
  AggMode agg_mode = AggMode::Oracle;
  std::uint64_t seed = 1;
  std::size_t eval_every = 10;
  unsigned threads = 1;
  DatasetConfig dataset;
  EncodingConfig encoding;

  void validate() const {
    using detail::require;
    require(n >= 1, "config: n must be >= 1");
    require(2 * f < n, "config: need f < n/2 (n=" + std::to_string(n) + ", f=" + std::to_string(f) + ")");
    require(delta > 1 && delta < 32, "config: delta must be in (1, 32)");
    require(clamp > 0.0, "config: clamp must be positive");
    require(beta > 0.0 && beta < 1.0, "config: beta must be in (0, 1)");
    require(gamma > 0.0, "config: gamma must be positive");
    require(T >= 1, "config: T must be >= 1");
    require(batch >= 1, "config: batch must be >= 1");
    require(l2 >= 0.0, "config: l2 must be non-negative");
    require(alpha > 0.0, "config: alpha must be positive");
    require(eval_every >= 1, "config: eval_every must be >= 1");
    require(!subsample || 2 * f + 1 <= n, "config: subsampling needs 2f+1 <= n");
    attack.validate();
  }

  /// "cwtm" for both trimmed-sum modes, so their metric files are comparable.
  std::string aggregator_label() const {
    if (agg_mode == AggMode::Mean) return subsample ? "mean-sub" : "mean";
    return subsample ? "cwtm-sub" : "cwtm";
  }
};

/// "default" (41 points on [-10, 10]), "lo:hi:count", or a comma list.
inline std::vector<double> parse_tau_grid(const std::string& s) {
  if (s == "default") return default_tau_grid();
  if (s.find(':') != std::string::npos) {
    const auto parts = split_list(s, ':');
    detail::require(parts.size() == 3, "tau_grid: expected lo:hi:count");
    const double lo = KeyValueConfig::to_real("tau_grid", parts[0]);
    const double hi = KeyValueConfig::to_real("tau_grid", parts[1]);
    const auto count = KeyValueConfig::to_int("tau_grid", parts[2]);
    detail::require(count >= 1, "tau_grid: count must be >= 1");
    std::vector<double> g;
    for (std::int64_t k = 0; k < count; ++k) {
      g.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1));
    }
    return g;
  }
  std::vector<double> g;
  for (const auto& t : split_list(s)) g.push_back(KeyValueConfig::to_real("tau_grid", t));
  detail::require(!g.empty(), "tau_grid: empty");
  return g;
}

inline const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys{
      "n", "f", "delta", "clamp", "gamma", "beta", "T", "batch", "l2", "alpha", "attack", "tau_grid", "subsample",
      "agg_mode", "seed", "eval_every", "threads", "attack_domain", "dataset.kind", "dataset.classes", "dataset.dims",
      "dataset.separation", "dataset.scale", "dataset.seed", "dataset.train_size", "dataset.test_size",
      "dataset.train_images", "dataset.train_labels", "dataset.test_images", "dataset.test_labels", "encoding.N",
      "encoding.B", "encoding.m", "encoding.p", "encoding.min_d", "encoding.max_m", "encoding.max_p"};
  return keys;
}

/// Required: n f delta clamp gamma beta T batch l2 alpha attack tau_grid
/// subsample agg_mode seed. Everything else has a default.
inline ExperimentConfig experiment_from_config(const KeyValueConfig& kv) {
  kv.reject_unknown(known_config_keys());
  auto count = [&](const std::string& key) {
    const auto v = kv.integer(key);
    detail::require(v >= 0, "config key " + key + " must be non-negative");
    return static_cast<std::size_t>(v);
  };
  ExperimentConfig c;
  c.n = count("n");
  c.f = count("f");
  c.delta = static_cast<int>(kv.integer("delta"));
  c.clamp = kv.real("clamp");
  c.gamma = kv.real("gamma");
  c.beta = kv.real("beta");
  c.T = count("T");
  c.batch = count("batch");
  c.l2 = kv.real("l2");
  c.alpha = kv.real("alpha");
  c.attack.kind = parse_attack(kv.str("attack"));
  c.attack.tau_grid = parse_tau_grid(kv.str("tau_grid"));
  c.subsample = kv.boolean("subsample");
  c.agg_mode = parse_agg_mode(kv.str("agg_mode"));
  c.seed = static_cast<std::uint64_t>(kv.integer("seed"));
  c.attack.rng_seed = c.seed;
  c.eval_every = static_cast<std::size_t>(kv.integer("eval_every", 10));
  c.threads = static_cast<unsigned>(kv.integer("threads", 1));
  const std::string domain = kv.str("attack_domain", "quantized");
  detail::require(domain == "quantized" || domain == "raw", "attack_domain must be quantized|raw");
  c.attack_domain = domain == "raw" ? AttackDomain::Raw : AttackDomain::Quantized;

  auto& d = c.dataset;
  d.kind = kv.str("dataset.kind", "synthetic");
  detail::require(d.kind == "synthetic" || d.kind == "idx", "dataset.kind must be synthetic|idx");
  d.synth.classes = static_cast<int>(kv.integer("dataset.classes", d.synth.classes));
  d.synth.dims = static_cast<std::size_t>(kv.integer("dataset.dims", static_cast<std::int64_t>(d.synth.dims)));
  d.synth.separation = kv.real("dataset.separation", d.synth.separation);
  d.synth.scale = kv.real("dataset.scale", d.synth.scale);
  d.synth.seed = static_cast<std::uint64_t>(kv.integer("dataset.seed", static_cast<std::int64_t>(c.seed)));
  d.train_size = static_cast<std::size_t>(kv.integer("dataset.train_size", static_cast<std::int64_t>(d.train_size)));
  d.test_size = static_cast<std::size_t>(kv.integer("dataset.test_size", static_cast<std::int64_t>(d.test_size)));
  if (d.kind == "idx") {
    d.train_images = kv.str("dataset.train_images");
    d.train_labels = kv.str("dataset.train_labels");
    d.test_images = kv.str("dataset.test_images");
    d.test_labels = kv.str("dataset.test_labels");
  }

  auto& e = c.encoding;
  e.N = static_cast<unsigned>(kv.integer("encoding.N", e.N));
  e.B = static_cast<std::uint64_t>(kv.integer("encoding.B", 0));
  e.m = static_cast<std::uint64_t>(kv.integer("encoding.m", 0));
  e.p = static_cast<std::uint64_t>(kv.integer("encoding.p", 0));
  e.min_d = static_cast<std::size_t>(kv.integer("encoding.min_d", static_cast<std::int64_t>(e.min_d)));
  e.max_m = static_cast<std::uint64_t>(kv.integer("encoding.max_m", static_cast<std::int64_t>(e.max_m)));
  e.max_p = static_cast<std::uint64_t>(kv.integer("encoding.max_p", static_cast<std::int64_t>(e.max_p)));
  c.validate();
  return c;
}

/// Every resolved setting as key=value lines.
inline std::string describe(const ExperimentConfig& c) {
  std::ostringstream o;
  o << std::setprecision(17);
  o << "n=" << c.n << "\nf=" << c.f << "\ndelta=" << c.delta << "\nclamp=" << c.clamp << "\ngamma=" << c.gamma
    << "\nbeta=" << c.beta << "\nT=" << c.T << "\nbatch=" << c.batch << "\nl2=" << c.l2 << "\nalpha=" << c.alpha
    << "\nattack=" << to_string(c.attack.kind) << "\ntau_grid=";
  for (std::size_t i = 0; i < c.attack.tau_grid.size(); ++i) o << (i ? "," : "") << c.attack.tau_grid[i];
  o << "\nattack_domain=" << (c.attack_domain == AttackDomain::Raw ? "raw" : "quantized")
    << "\nsubsample=" << (c.subsample ? "true" : "false") << "\nagg_mode=" << to_string(c.agg_mode)
    << "\nseed=" << c.seed << "\neval_every=" << c.eval_every << "\nthreads=" << c.threads
    << "\ndataset.kind=" << c.dataset.kind;
  if (c.dataset.kind == "synthetic") {
    o << "\ndataset.classes=" << c.dataset.synth.classes << "\ndataset.dims=" << c.dataset.synth.dims
      << "\ndataset.separation=" << c.dataset.synth.separation << "\ndataset.scale=" << c.dataset.synth.scale
      << "\ndataset.seed=" << c.dataset.synth.seed << "\ndataset.train_size=" << c.dataset.train_size
      << "\ndataset.test_size=" << c.dataset.test_size;
  } else {
    o << "\ndataset.train_images=" << c.dataset.train_images << "\ndataset.train_labels=" << c.dataset.train_labels
      << "\ndataset.test_images=" << c.dataset.test_images << "\ndataset.test_labels=" << c.dataset.test_labels;
  }
  o << "\nencoding.N=" << c.encoding.N << "\nencoding.B=" << c.encoding.B << "\nencoding.m=" << c.encoding.m
    << "\nencoding.p=" << c.encoding.p << "\nencoding.min_d=" << c.encoding.min_d
    << "\nencoding.max_m=" << c.encoding.max_m << "\nencoding.max_p=" << c.encoding.max_p << "\n";
  return o.str();
}

/// Encoding used by a run: explicit (m, p) when both are set, otherwise
/// param_search over the configured bounds.
inline EncodingParams experiment_encoding(const ExperimentConfig& c) {
  const std::size_t selected = c.subsample ? 2 * c.f + 1 : c.n;
  const std::size_t width = summed_inputs(c.agg_mode, selected, c.f);
  const std::uint64_t half = static_cast<std::uint64_t>(quantization_bound(c.delta));
  const std::uint64_t range = 2 * half + 1;
  const std::uint64_t B = c.encoding.B != 0 ? c.encoding.B : minimal_base(range, c.encoding.N);
  if (c.encoding.m != 0 && c.encoding.p != 0) {
    auto ring = RingParams::make(c.encoding.m, c.encoding.p);
    detail::require(ring->N() == c.encoding.N, "encoding: ord_m(p) differs from encoding.N");
    return make_encoding(ring, B, range, half, width, selected);
  }
  ParamQuery q;
  q.range = range;
  q.offset = half;
  q.base = B;
  q.sum_width = width;
  q.n = selected;
  q.f = c.agg_mode == AggMode::Mean ? 0 : c.f;
  q.N = c.encoding.N;
  q.min_d = c.encoding.min_d;
  q.max_m = c.encoding.max_m;
  q.max_p = c.encoding.max_p;
  return param_search(q);
}

// ---------------------------------------------------------------------------
// Training loop

struct MetricRow {
  std::size_t step = 0;
  double train_acc = 0.0;
  double test_acc = 0.0;
};

/// What the server saw and produced in one step.
struct StepRecord {
  std::size_t step = 0;
  const std::vector<std::size_t>& selected;
  const std::vector<QuantizedVector>& sent;  // one per node, Byzantine included
  const std::vector<std::int64_t>& aggregate;
  const EncodingParams& encoding;
};

using StepObserver = std::function<void(const StepRecord&)>;

struct TrainingResult {
  std::vector<MetricRow> metrics;
  std::vector<double> theta;
  OpCounters ops;  // homomorphic mode only
  unsigned depth = 0;
};

struct TrainingData {
  Dataset train;
  Dataset test;
};

inline TrainingData load_training_data(const DatasetConfig& d) {
  if (d.kind == "idx") {
    return {load_idx(d.train_images, d.train_labels, d.synth.classes),
            load_idx(d.test_images, d.test_labels, d.synth.classes)};
  }
  return {synth_dataset(d.synth, d.train_size, 0), synth_dataset(d.synth, d.test_size, 1)};
}

inline TrainingResult run_training(const ExperimentConfig& cfg, const StepObserver& observer = {}) {
  cfg.validate();
  const TrainingData data = load_training_data(cfg.dataset);
  const Dataset& train = data.train;
  const ModelShape shape{train.dims(), train.classes};
  const std::size_t D = shape.size();
  const std::size_t n = cfg.n;
  const std::size_t honest_count = n - cfg.f;
  const EncodingParams enc = experiment_encoding(cfg);
  const auto shards = dirichlet_split(train, n, cfg.alpha, cfg.seed);

  // Nodes 0 .. n-f-1 are honest, the last f Byzantine.
  std::vector<std::vector<double>> theta(honest_count, std::vector<double>(D, 0.0));
  std::vector<std::vector<double>> momentum(n, std::vector<double>(D, 0.0));
  std::vector<std::mt19937_64> node_rng;
  for (std::size_t i = 0; i < n; ++i) node_rng.push_back(make_rng(cfg.seed, 0xBA7C, i));
  auto server_rng = make_rng(cfg.seed, 0x5E4E);
  MimicState mimic_state;

  const std::int64_t bound = quantization_bound(cfg.delta);
  const Projection to_wire = [bound](std::vector<double> v) {
    for (auto& x : v) x = std::clamp(std::round(x), static_cast<double>(-bound), static_cast<double>(bound));
    return v;
  };
  const Aggregator attacked_agg = [&cfg](const RealMatrix& x) {
    return cfg.agg_mode == AggMode::Mean ? column_mean(x) : cwtm(x, cfg.f);
  };
  const bool byz_follow_protocol = cfg.attack.kind == AttackKind::None || cfg.attack.kind == AttackKind::LF;

  TrainingResult result;
  std::vector<QuantizedVector> sent(n);
  std::vector<std::size_t> batch(cfg.batch);

  for (std::size_t t = 1; t <= cfg.T; ++t) {
    const std::vector<double>& model = theta.front();
    for (std::size_t i = 0; i < n; ++i) {
      const bool byz = i >= honest_count;
      if (byz && !byz_follow_protocol) continue;
      const auto& shard = shards[i].indices;
      std::vector<double> g;
      if (shard.empty()) {
        g.assign(D, 0.0);
        for (std::size_t k = 0; k < D; ++k) g[k] = cfg.l2 * model[k];
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, shard.size() - 1);
        for (auto& b : batch) b = shard[pick(node_rng[i])];
        g = gradient(model, train, batch, cfg.l2, byz && cfg.attack.kind == AttackKind::LF);
      }
      auto& m = momentum[i];
      for (std::size_t k = 0; k < D; ++k) m[k] = cfg.beta * m[k] + (1.0 - cfg.beta) * g[k];
      sent[i] = qua(m, cfg.delta, cfg.clamp);
    }

    if (cfg.f > 0 && !byz_follow_protocol) {
      RealMatrix honest;
      std::vector<double> row(D);
      const bool raw = cfg.attack_domain == AttackDomain::Raw;
      for (std::size_t i = 0; i < honest_count; ++i) {
        if (raw) {
          honest.append_row(momentum[i]);
        } else {
          for (std::size_t k = 0; k < D; ++k) row[k] = static_cast<double>(sent[i].values[k]);
          honest.append_row(row);
        }
      }
      std::vector<double> v;
      if (cfg.attack.kind == AttackKind::Mimic) {
        auto [copy, state] = mimic(honest, std::move(mimic_state));
        mimic_state = std::move(state);
        v = std::move(copy);
      } else {
        const Projection project = raw ? Projection{} : to_wire;
        const double tau = optimize_tau(cfg.attack.kind, honest, attacked_agg, cfg.attack.tau_grid, cfg.f, project);
        v = craft(cfg.attack.kind, honest, tau);
      }
      QuantizedVector q;
      if (raw) {
        q = qua(v, cfg.delta, cfg.clamp);
      } else {
        v = to_wire(std::move(v));
        q = QuantizedVector{{}, cfg.delta, cfg.clamp};
        for (double x : v) q.values.push_back(static_cast<std::int64_t>(x));
      }
      for (std::size_t i = honest_count; i < n; ++i) sent[i] = q;
    }

    std::vector<std::size_t> selected;
    if (cfg.subsample && 2 * cfg.f + 1 < n) {
      selected = subsample(n, cfg.f, server_rng);
    } else {
      selected.resize(n);
      std::iota(selected.begin(), selected.end(), std::size_t{0});
    }
    std::vector<PackedBatch> ciphers;
    for (std::size_t i : selected) {
      detail::ensure(sent[i].in_range(), "protocol: vector outside the quantized range");
      ciphers.push_back(pack(sent[i].values, enc));
    }
    CostReport cost;
    const auto aggregate = server_aggregate(ciphers, cfg.f, cfg.agg_mode, enc, cfg.threads, &cost);
    if (cfg.agg_mode == AggMode::Homomorphic) {
      result.ops += cost.counters;
      result.depth = std::max(result.depth, cost.depth);
    }

    const std::size_t f_eff = cfg.agg_mode == AggMode::Mean ? 0 : cfg.f;
    for (auto& th : theta) th = local_update(th, aggregate, selected.size(), f_eff, cfg.gamma, cfg.delta, cfg.clamp);
    for (std::size_t h = 1; h < theta.size(); ++h) {
      detail::ensure(theta[h] == theta.front(), "protocol: honest models diverged");
    }
    if (observer) observer(StepRecord{t, selected, sent, aggregate, enc});

    if (t % cfg.eval_every == 0 || t == cfg.T) {
      result.metrics.push_back({t, accuracy(theta.front(), train), accuracy(theta.front(), data.test)});
    }
  }
  result.theta = theta.front();
  return result;
}

inline void write_metrics_csv(std::ostream& out, const ExperimentConfig& cfg, const TrainingResult& r) {
  out << "step,train_acc,test_acc,attack,aggregator,f,n,seed\n";
  const auto old_flags = out.flags();
  const auto old_prec = out.precision();
  out << std::fixed << std::setprecision(6);
  for (const auto& row : r.metrics) {
    out << row.step << ',' << row.train_acc << ',' << row.test_acc << ',' << to_string(cfg.attack.kind) << ','
        << cfg.aggregator_label() << ',' << cfg.f << ',' << cfg.n << ',' << cfg.seed << '\n';
  }
  out.flags(old_flags);
  out.precision(old_prec);
}

}  // namespace sable
