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

// Base-B digit encoding of non-negative integers into slots. The base B is a
// free parameter, subject only to B <= p, so the comparison polynomials can be
// kept small while p is chosen for batching and for the additions a trimmed
// sum needs.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sable/error.hpp"
#include "sable/number_theory.hpp"
#include "sable/slot_algebra.hpp"

namespace sable {

namespace detail {
// Saturating B^N.
inline std::uint64_t ipow_sat(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    r *= base;
  }
  return r;
}
}  // namespace detail

struct EncodingParams {
  RingPtr ring;
  std::uint64_t base = 0;
  /// Added to raw values before encoding, so signed inputs become non-negative.
  std::uint64_t offset = 0;
  /// Largest number of encoded values ever summed coefficient-wise.
  std::size_t sum_width = 1;
  /// Number of aggregated inputs (interpolation points 0..n-1 for Btw).
  std::size_t n_inputs = 1;
  /// Encoded values (raw + offset) lie in [0, range).
  std::uint64_t range = 1;

  unsigned digits() const { return ring->N(); }
  std::uint64_t capacity() const { return detail::ipow_sat(base, digits()); }
  std::uint64_t p() const { return ring->p(); }

  void validate() const {
    using detail::require;
    require(ring != nullptr, "encoding: missing ring");
    const std::uint64_t p = ring->p();
    const std::string where = " (B=" + std::to_string(base) + ", p=" + std::to_string(p) + ")";
    require(base >= 2 && base <= p, "encoding: need 2 <= B <= p" + where);
    require(range >= 1 && range <= capacity(), "encoding: value range exceeds capacity B^N" + where);
    require(offset < range, "encoding: offset must lie inside the value range");
    require(p >= 2 * base - 1, "encoding: need p >= 2B-1 for the digit-difference domain" + where);
    require(sum_width >= 1, "encoding: sum_width must be >= 1");
    require(static_cast<nt::u128>(sum_width) * (base - 1) < p,
            "encoding: p must exceed sum_width*(B-1) so digit sums do not wrap" + where);
    require(n_inputs >= 1 && n_inputs <= p, "encoding: need p >= n for rank interpolation" + where);
  }
};

/// Base-B digits of a, least significant first. Requires 0 <= a < B^N.
inline Slot encode_int(std::uint64_t a, const EncodingParams& enc) {
  detail::require(a < enc.capacity(), "encode_int: value " + std::to_string(a) + " exceeds capacity");
  Slot s;
  s.coeffs.resize(enc.digits());
  for (auto& c : s.coeffs) {
    c = static_cast<Residue>(a % enc.base);
    a /= enc.base;
  }
  return s;
}

/// sum(c_i B^i) with coefficients lifted to [0, p). For a coefficient-wise sum
/// of at most sum_width encodings this is the integer sum of their values.
inline std::uint64_t decode_slot(std::span<const Residue> coeffs, const EncodingParams& enc) {
  std::uint64_t v = 0;
  for (std::size_t i = coeffs.size(); i > 0; --i) v = v * enc.base + coeffs[i - 1];
  return v;
}

inline std::uint64_t decode_slot(const Slot& s, const EncodingParams& enc) {
  return decode_slot(std::span<const Residue>(s.coeffs), enc);
}

/// A length-D integer vector spread over ceil(D/d) SlotVectors.
struct PackedBatch {
  std::vector<SlotVector> vectors;
  std::size_t dim = 0;
  std::int64_t pad = 0;  // raw value held by unused trailing slots
};

inline std::uint64_t encodable(std::int64_t raw, const EncodingParams& enc) {
  const std::int64_t shifted = raw + static_cast<std::int64_t>(enc.offset);
  detail::require(shifted >= 0 && static_cast<std::uint64_t>(shifted) < enc.range,
                  "pack: value " + std::to_string(raw) + " outside the encodable range");
  return static_cast<std::uint64_t>(shifted);
}

/// Value j goes to SlotVector j / d, slot j % d. Trailing slots encode raw 0.
inline PackedBatch pack(std::span<const std::int64_t> values, const EncodingParams& enc) {
  const std::size_t d = enc.ring->d();
  PackedBatch batch;
  batch.dim = values.size();
  const std::size_t chunks = (values.size() + d - 1) / d;
  const Slot pad = encode_int(encodable(0, enc), enc);
  for (std::size_t c = 0; c < chunks; ++c) {
    SlotVector v = SlotVector::zeros(enc.ring);
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t idx = c * d + j;
      if (idx < values.size()) {
        v.set_slot(j, encode_int(encodable(values[idx], enc), enc).coeffs);
      } else {
        v.set_slot(j, pad.coeffs);
      }
    }
    batch.vectors.push_back(std::move(v));
  }
  return batch;
}

/// Decodes a batch that holds the coefficient-wise sum of `summands`
/// encodings, removing summands * offset.
inline std::vector<std::int64_t> unpack_sum(const PackedBatch& batch, const EncodingParams& enc,
                                            std::size_t summands) {
  std::vector<std::int64_t> out;
  out.reserve(batch.dim);
  const std::size_t d = enc.ring->d();
  const auto correction = static_cast<std::int64_t>(summands * enc.offset);
  for (std::size_t idx = 0; idx < batch.dim; ++idx) {
    const auto& v = batch.vectors.at(idx / d);
    out.push_back(static_cast<std::int64_t>(decode_slot(v.slot(idx % d), enc)) - correction);
  }
  return out;
}

inline std::vector<std::int64_t> unpack(const PackedBatch& batch, const EncodingParams& enc) {
  return unpack_sum(batch, enc, 1);
}

/// Request for a parameter search. Exactly one of delta / range selects the
/// value domain unless base is given, in which case range defaults to B^N.
struct ParamQuery {
  std::optional<int> delta;              // signed delta-bit values, offset 2^(delta-1)-1
  std::optional<std::uint64_t> range;    // values in [0, range)
  std::optional<std::uint64_t> base;     // fixed B
  std::optional<std::uint64_t> offset;   // override of the default offset
  std::optional<std::size_t> sum_width;  // default n - 2f
  std::size_t n = 1;
  std::size_t f = 0;
  unsigned N = 1;
  std::size_t min_d = 1;
  std::uint64_t max_m = 1ULL << 17;
  std::uint64_t max_p = 1ULL << 16;
};

/// Smallest B with B^N >= M.
inline std::uint64_t minimal_base(std::uint64_t M, unsigned N) {
  std::uint64_t B = 2;
  while (detail::ipow_sat(B, N) < M) ++B;
  return B;
}

/// Builds and validates an EncodingParams for a known (m, p).
inline EncodingParams make_encoding(RingPtr ring, std::uint64_t base, std::uint64_t range,
                                    std::uint64_t offset, std::size_t sum_width,
                                    std::size_t n_inputs) {
  EncodingParams enc{std::move(ring), base, offset, sum_width, n_inputs, range};
  enc.validate();
  return enc;
}

/// Deterministic search for (m, p): primes p ascending from the smallest value
/// the encoding invariants allow, and for each p the primes m ascending with
/// ord_m(p) = N and (m-1)/N >= min_d. The first hit wins.
inline EncodingParams param_search(const ParamQuery& q) {
  using detail::require;
  require(q.N >= 1, "params: N must be >= 1");
  require(q.n >= 1, "params: n must be >= 1");
  require(2 * q.f < q.n, "params: need f < n/2");
  require(q.min_d >= 1, "params: min_d must be >= 1");

  std::uint64_t range = 0;
  std::uint64_t offset = 0;
  if (q.delta) {
    require(*q.delta > 1 && *q.delta < 40, "params: delta must be in (1, 40)");
    const std::uint64_t half = (1ULL << (*q.delta - 1)) - 1;
    range = 2 * half + 1;
    offset = half;
  } else if (q.range) {
    range = *q.range;
  } else if (q.base) {
    range = detail::ipow_sat(*q.base, q.N);
  } else {
    throw ValidationError("params: one of delta, range or base is required");
  }
  require(range >= 1, "params: value range must be >= 1");
  if (q.offset) offset = *q.offset;
  require(offset < range, "params: offset must lie inside the value range");

  const std::uint64_t B = q.base ? *q.base : minimal_base(range, q.N);
  require(B >= 2, "params: base must be >= 2");
  require(detail::ipow_sat(B, q.N) >= range, "params: B^N below the value range");
  const std::size_t sum_width = q.sum_width ? *q.sum_width : q.n - 2 * q.f;

  std::uint64_t p_min = std::max<std::uint64_t>({B, 2 * B - 1, q.n, 2});
  const auto need = static_cast<nt::u128>(sum_width) * (B - 1) + 1;
  require(need < (static_cast<nt::u128>(1) << 31), "params: digit sums too large for p < 2^31");
  p_min = std::max<std::uint64_t>(p_min, static_cast<std::uint64_t>(need));

  const std::uint64_t m_min = std::max<std::uint64_t>(3, static_cast<std::uint64_t>(q.N) * q.min_d + 1);
  require(m_min <= q.max_m, "params: min_d incompatible with max_m");
  require(p_min <= q.max_p, "params: smallest admissible p exceeds max_p");

  std::vector<std::uint64_t> m_candidates;
  for (std::uint64_t m = nt::next_prime(m_min); m <= q.max_m; m = nt::next_prime(m + 1)) {
    if ((m - 1) % q.N == 0) m_candidates.push_back(m);
  }

  for (std::uint64_t p = nt::next_prime(p_min); p <= q.max_p; p = nt::next_prime(p + 1)) {
    for (std::uint64_t m : m_candidates) {
      if (m == p || !nt::has_order(p % m, m, q.N)) continue;
      return make_encoding(RingParams::make(m, p), B, range, offset, sum_width, q.n);
    }
  }
  throw ValidationError("params: search space exhausted (max_m=" + std::to_string(q.max_m) +
                        ", max_p=" + std::to_string(q.max_p) + ")");
}

/// Smallest prime m with ord_m(p) = N and at least min_d slots.
inline RingPtr ring_for(std::uint64_t p, unsigned N, std::size_t min_d = 1,
                        std::uint64_t max_m = 1ULL << 22) {
  detail::require(nt::is_prime(p), "ring_for: p must be prime");
  const std::uint64_t m_min = std::max<std::uint64_t>(3, static_cast<std::uint64_t>(N) * min_d + 1);
  for (std::uint64_t m = nt::next_prime(m_min); m <= max_m; m = nt::next_prime(m + 1)) {
    if (m != p && (m - 1) % N == 0 && nt::has_order(p % m, m, N)) return RingParams::make(m, p);
  }
  throw ValidationError("ring_for: no prime m <= " + std::to_string(max_m) + " with ord_m(" +
                        std::to_string(p) + ") = " + std::to_string(N));
}

}  // namespace sable
