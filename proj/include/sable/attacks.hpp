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

// Byzantine vector crafting. The adversary is omniscient: it sees every honest
// vector of the current step.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sable/error.hpp"
#include "sable/matrix.hpp"
#include "sable/oracles.hpp"

namespace sable {

enum class AttackKind { None, FOE, ALIE, LF, Mimic };

inline std::string to_string(AttackKind k) {
  switch (k) {
    case AttackKind::None: return "none";
    case AttackKind::FOE: return "foe";
    case AttackKind::ALIE: return "alie";
    case AttackKind::LF: return "lf";
    case AttackKind::Mimic: return "mimic";
  }
  return "?";
}

inline AttackKind parse_attack(const std::string& s) {
  std::string t;
  for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "none") return AttackKind::None;
  if (t == "foe") return AttackKind::FOE;
  if (t == "alie") return AttackKind::ALIE;
  if (t == "lf" || t == "labelflip") return AttackKind::LF;
  if (t == "mimic") return AttackKind::Mimic;
  throw ValidationError("unknown attack '" + s + "' (expected none|foe|alie|lf|mimic)");
}

/// 41 equispaced points on [-10, 10].
inline std::vector<double> default_tau_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 40; ++k) g.push_back(-10.0 + 0.5 * k);
  return g;
}

struct AttackSpec {
  AttackKind kind = AttackKind::None;
  std::vector<double> tau_grid = default_tau_grid();
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (kind == AttackKind::FOE || kind == AttackKind::ALIE) {
      detail::require(!tau_grid.empty(), "attack: tau grid must be non-empty for FOE/ALIE");
    }
  }
};

/// Fall of Empires: (1 - tau) * mean(honest).
inline std::vector<double> foe(const RealMatrix& honest, double tau) {
  detail::require(honest.rows() >= 1, "foe: empty honest set");
  auto v = column_mean(honest);
  for (auto& x : v) x *= (1.0 - tau);
  return v;
}

/// A Little Is Enough: mean + tau * sigma, sigma the coordinate-wise
/// population standard deviation.
inline std::vector<double> alie(const RealMatrix& honest, double tau) {
  detail::require(honest.rows() >= 1, "alie: empty honest set");
  auto mu = column_mean(honest);
  std::vector<double> var(mu.size(), 0.0);
  for (std::size_t r = 0; r < honest.rows(); ++r) {
    for (std::size_t c = 0; c < honest.cols(); ++c) {
      const double dlt = honest(r, c) - mu[c];
      var[c] += dlt * dlt;
    }
  }
  for (std::size_t c = 0; c < mu.size(); ++c) {
    mu[c] += tau * std::sqrt(var[c] / static_cast<double>(honest.rows()));
  }
  return mu;
}

using Aggregator = std::function<std::vector<double>(const RealMatrix&)>;

/// Maps a crafted vector onto what can actually be sent (e.g. rounding and
/// clamping to the quantized domain). Empty means identity.
using Projection = std::function<std::vector<double>(std::vector<double>)>;

inline std::vector<double> craft(AttackKind kind, const RealMatrix& honest, double tau) {
  switch (kind) {
    case AttackKind::FOE: return foe(honest, tau);
    case AttackKind::ALIE: return alie(honest, tau);
    default: throw ValidationError("craft: only FOE and ALIE are parameterised by tau");
  }
}

/// Linear search over the grid for the tau maximising
/// ||mean(honest) - agg(honest + f copies of the attack)||_2. Ties keep the
/// earliest grid entry.
inline double optimize_tau(AttackKind kind, const RealMatrix& honest, const Aggregator& agg,
                           std::span<const double> grid, std::size_t f, const Projection& project = {}) {
  detail::require(!grid.empty(), "optimize_tau: empty grid");
  detail::require(honest.rows() >= 1, "optimize_tau: empty honest set");
  if (grid.size() == 1) return grid.front();
  const auto mu = column_mean(honest);
  double best_tau = grid.front();
  double best = -1.0;
  for (double tau : grid) {
    auto v = craft(kind, honest, tau);
    if (project) v = project(std::move(v));
    RealMatrix all = honest;
    for (std::size_t k = 0; k < f; ++k) all.append_row(v);
    const auto out = agg(all);
    double dist = 0.0;
    for (std::size_t c = 0; c < mu.size(); ++c) dist += (mu[c] - out[c]) * (mu[c] - out[c]);
    if (dist > best) {
      best = dist;
      best_tau = tau;
    }
  }
  return best_tau;
}

/// Label l of K classes becomes K-1-l.
inline int labelflip(int label, int K) {
  detail::require(K >= 1 && label >= 0 && label < K, "labelflip: label out of range");
  return K - 1 - label;
}

struct MimicState {
  std::vector<double> direction;  // unit norm once initialised
  std::size_t steps = 0;
};

/// Mimic: one power-iteration step of the direction on the centered honest
/// vectors, then copy the honest vector with the largest absolute projection
/// on it (lowest index on ties). An empty direction starts from all-ones.
inline std::pair<std::vector<double>, MimicState> mimic(const RealMatrix& honest, MimicState state) {
  detail::require(honest.rows() >= 1, "mimic: empty honest set");
  const std::size_t D = honest.cols();
  const auto mu = column_mean(honest);
  if (state.direction.size() != D) state.direction.assign(D, 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(D, 1))));

  std::vector<double> next(D, 0.0);
  for (std::size_t r = 0; r < honest.rows(); ++r) {
    double proj = 0.0;
    for (std::size_t c = 0; c < D; ++c) proj += (honest(r, c) - mu[c]) * state.direction[c];
    for (std::size_t c = 0; c < D; ++c) next[c] += proj * (honest(r, c) - mu[c]);
  }
  double norm = 0.0;
  for (double x : next) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (auto& x : next) x /= norm;
    state.direction = std::move(next);
  }
  ++state.steps;

  std::size_t best_row = 0;
  double best = -1.0;
  for (std::size_t r = 0; r < honest.rows(); ++r) {
    double proj = 0.0;
    for (std::size_t c = 0; c < D; ++c) proj += (honest(r, c) - mu[c]) * state.direction[c];
    if (std::abs(proj) > best) {
      best = std::abs(proj);
      best_row = r;
    }
  }
  const auto row = honest.row(best_row);
  return {std::vector<double>(row.begin(), row.end()), std::move(state)};
}

}  // namespace sable
