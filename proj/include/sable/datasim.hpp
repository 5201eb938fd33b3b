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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "sable/error.hpp"
#include "sable/matrix.hpp"

namespace sable {

struct Dataset {
  RealMatrix features;  // one sample per row
  std::vector<int> labels;
  int classes = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t dims() const { return features.cols(); }
};

/// Seeded generator for one role of a run. Roles draw from independent
/// streams derived from the master seed, so adding draws to one role never
/// shifts another.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t role, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32U),
                    static_cast<std::uint32_t>(role), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32U)};
  return std::mt19937_64(seq);
}

/// Gaussian class clusters: class k has mean separation * u_k with u_k a
/// random unit vector fixed by `seed`; samples add N(0, I) noise and the
/// whole feature vector is multiplied by `scale`.
struct SynthSpec {
  int classes = 10;
  std::size_t dims = 20;
  double separation = 3.0;
  double scale = 1.0;
  std::uint64_t seed = 1;
};

/// `stream` selects an independent sample draw over the same class means
/// (e.g. 0 for train, 1 for test).
inline Dataset synth_dataset(const SynthSpec& spec, std::size_t size, std::uint64_t stream = 0) {
  detail::require(spec.classes >= 2, "synth: need at least two classes");
  detail::require(size >= static_cast<std::size_t>(spec.classes), "synth: size must be >= number of classes");
  detail::require(spec.dims >= 1, "synth: dims must be >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto mean_rng = make_rng(spec.seed, 0xC1A55);
  RealMatrix means(static_cast<std::size_t>(spec.classes), spec.dims);
  for (std::size_t k = 0; k < means.rows(); ++k) {
    double norm = 0.0;
    for (auto& x : means.row(k)) {
      x = gauss(mean_rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (auto& x : means.row(k)) x = norm > 0 ? spec.separation * x / norm : 0.0;
  }

  auto rng = make_rng(spec.seed, 0x5A3D1E, stream);
  std::vector<int> labels(size);
  for (std::size_t i = 0; i < size; ++i) labels[i] = static_cast<int>(i % static_cast<std::size_t>(spec.classes));
  std::shuffle(labels.begin(), labels.end(), rng);

  Dataset ds;
  ds.classes = spec.classes;
  ds.features = RealMatrix(size, spec.dims);
  for (std::size_t i = 0; i < size; ++i) {
    const auto mu = means.row(static_cast<std::size_t>(labels[i]));
    auto row = ds.features.row(i);
    for (std::size_t c = 0; c < spec.dims; ++c) row[c] = spec.scale * (mu[c] + gauss(rng));
  }
  ds.labels = std::move(labels);
  return ds;
}

/// Malformed IDX input. The offset is the byte position where parsing failed.
class IdxError : public ValidationError {
 public:
  enum class Code { Io, BadMagic, Truncated, CountMismatch, BadLabel };

  IdxError(Code code, std::size_t offset, const std::string& what)
      : ValidationError(what + " (offset " + std::to_string(offset) + ")"), code_(code), offset_(offset) {}

  Code code() const { return code_; }
  std::size_t offset() const { return offset_; }

 private:
  Code code_;
  std::size_t offset_;
};

namespace detail {

inline std::vector<unsigned char> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(IdxError::Code::Io, 0, "idx: cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::uint32_t read_be32(const std::vector<unsigned char>& b, std::size_t off, const std::string& path) {
  if (off + 4 > b.size()) throw IdxError(IdxError::Code::Truncated, off, "idx: truncated header in " + path);
  return (std::uint32_t{b[off]} << 24U) | (std::uint32_t{b[off + 1]} << 16U) | (std::uint32_t{b[off + 2]} << 8U) |
         std::uint32_t{b[off + 3]};
}

}  // namespace detail

/// Big-endian IDX: images with magic 0x00000803 (u8 pixels scaled to [0, 1]),
/// labels with magic 0x00000801.
inline Dataset load_idx(const std::string& images_path, const std::string& labels_path, int classes = 10) {
  const auto img = detail::read_bytes(images_path);
  const auto lab = detail::read_bytes(labels_path);

  const std::uint32_t img_magic = detail::read_be32(img, 0, images_path);
  if (img_magic != 0x00000803U) throw IdxError(IdxError::Code::BadMagic, 0, "idx: bad image magic in " + images_path);
  const std::uint32_t count = detail::read_be32(img, 4, images_path);
  const std::uint32_t rows = detail::read_be32(img, 8, images_path);
  const std::uint32_t cols = detail::read_be32(img, 12, images_path);
  const std::size_t pixels = std::size_t{rows} * cols;
  if (img.size() < 16 + std::size_t{count} * pixels) {
    throw IdxError(IdxError::Code::Truncated, img.size(), "idx: truncated pixel data in " + images_path);
  }

  const std::uint32_t lab_magic = detail::read_be32(lab, 0, labels_path);
  if (lab_magic != 0x00000801U) throw IdxError(IdxError::Code::BadMagic, 0, "idx: bad label magic in " + labels_path);
  const std::uint32_t lcount = detail::read_be32(lab, 4, labels_path);
  if (lcount != count) {
    throw IdxError(IdxError::Code::CountMismatch, 4,
                   "idx: " + std::to_string(count) + " images but " + std::to_string(lcount) + " labels");
  }
  if (lab.size() < 8 + std::size_t{count}) {
    throw IdxError(IdxError::Code::Truncated, lab.size(), "idx: truncated label data in " + labels_path);
  }

  Dataset ds;
  ds.classes = classes;
  ds.features = RealMatrix(count, pixels);
  ds.labels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t k = 0; k < pixels; ++k) ds.features(i, k) = img[16 + i * pixels + k] / 255.0;
    const int l = lab[8 + i];
    if (l >= classes) throw IdxError(IdxError::Code::BadLabel, 8 + i, "idx: label out of range");
    ds.labels[i] = l;
  }
  return ds;
}

struct Shard {
  std::vector<std::size_t> indices;
};

/// Per class, a Dirichlet(alpha, ..., alpha) draw over nodes fixes the share
/// of that class each node receives; counts are rounded by largest remainder
/// so they sum exactly. Nodes may end up with empty shards for small alpha.
inline std::vector<Shard> dirichlet_split(const Dataset& ds, std::size_t n_nodes, double alpha, std::uint64_t seed) {
  detail::require(ds.size() > 0, "dirichlet_split: empty dataset");
  detail::require(n_nodes >= 1, "dirichlet_split: need at least one node");
  detail::require(alpha > 0.0 && std::isfinite(alpha), "dirichlet_split: alpha must be positive");
  auto rng = make_rng(seed, 0xD1A1C7);
  std::gamma_distribution<double> gamma(alpha, 1.0);

  std::vector<Shard> shards(n_nodes);
  for (int k = 0; k < ds.classes; ++k) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds.labels[i] == k) members.push_back(i);
    }
    std::shuffle(members.begin(), members.end(), rng);

    std::vector<double> share(n_nodes);
    double total = 0.0;
    for (auto& s : share) total += (s = gamma(rng));
    if (!(total > 0.0)) {
      std::fill(share.begin(), share.end(), 0.0);
      share[rng() % n_nodes] = 1.0;
      total = 1.0;
    }

    const std::size_t count = members.size();
    std::vector<std::size_t> take(n_nodes);
    std::vector<std::pair<double, std::size_t>> rema;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < n_nodes; ++i) {
      const double exact = share[i] / total * static_cast<double>(count);
      take[i] = static_cast<std::size_t>(std::floor(exact));
      assigned += take[i];
      rema.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < count; ++r, ++assigned) ++take[rema[r % n_nodes].second];

    std::size_t pos = 0;
    for (std::size_t i = 0; i < n_nodes; ++i) {
      for (std::size_t t = 0; t < take[i]; ++t) shards[i].indices.push_back(members[pos++]);
    }
  }
  for (auto& s : shards) std::sort(s.indices.begin(), s.indices.end());
  return shards;
}

}  // namespace sable
