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

// Plaintext-faithful model of BGV packed slots. A SlotVector is the payload of
// one ciphertext after batching: d slots, each an element of GF(p^N) stored as
// N coefficients over Z_p. TrackedVector adds the homomorphic cost accounting
// (multiplicative depth plus operation counters) every circuit is charged with.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sable/error.hpp"
#include "sable/number_theory.hpp"
#include "sable/zp_poly.hpp"

namespace sable {

/// Lowest monic irreducible polynomial of degree N over Z_p. Candidates are
/// enumerated by the integer sum(c_i p^i) of their lower coefficients, so the
/// search order is lexicographic from the X^(N-1) coefficient down.
inline ZpPoly find_irreducible(std::uint64_t p, unsigned N) {
  detail::require(nt::is_prime(p), "find_irreducible: p must be prime");
  detail::require(N >= 1, "find_irreducible: degree must be >= 1");
  ZpPoly f(N + 1, 0);
  f[N] = 1;
  for (;;) {
    if (zp::is_irreducible(f, p)) return f;
    // increment the lower coefficients as a base-p counter
    std::size_t i = 0;
    while (i < N && f[i] == p - 1) f[i++] = 0;
    detail::ensure(i < N, "find_irreducible: enumeration exhausted");
    ++f[i];
  }
}

/// Cyclotomic index m, plaintext modulus p and the slot structure they induce.
class RingParams {
 public:
  /// Validates m and p and derives N = ord_m(p), d = (m-1)/N and the slot
  /// modulus F.
  static std::shared_ptr<const RingParams> make(std::uint64_t m, std::uint64_t p) {
    detail::require(nt::is_prime(m), "ring: m=" + std::to_string(m) + " is not prime");
    detail::require(nt::is_prime(p), "ring: p=" + std::to_string(p) + " is not prime");
    detail::require(m % p != 0, "ring: p divides m");
    detail::require(p < (1ULL << 31), "ring: p must be below 2^31");
    const std::uint64_t order = nt::multiplicative_order(p % m, m);
    auto ring = std::shared_ptr<RingParams>(new RingParams());
    ring->m_ = m;
    ring->p_ = p;
    ring->N_ = static_cast<unsigned>(order);
    ring->d_ = static_cast<std::size_t>((m - 1) / order);
    ring->F_ = find_irreducible(p, ring->N_);
    return ring;
  }

  std::uint64_t m() const { return m_; }
  std::uint64_t p() const { return p_; }
  unsigned N() const { return N_; }
  std::size_t d() const { return d_; }
  const ZpPoly& F() const { return F_; }

  bool operator==(const RingParams& o) const { return m_ == o.m_ && p_ == o.p_; }

 private:
  RingParams() = default;

  std::uint64_t m_ = 0;
  std::uint64_t p_ = 0;
  unsigned N_ = 0;
  std::size_t d_ = 0;
  ZpPoly F_;
};

using RingPtr = std::shared_ptr<const RingParams>;

/// One slot: N residues, coefficient i of the slot polynomial at index i.
struct Slot {
  std::vector<Residue> coeffs;

  bool operator==(const Slot&) const = default;
};

/// d slots of N coefficients, stored flat (slot-major).
class SlotVector {
 public:
  SlotVector() = default;

  static SlotVector zeros(RingPtr ring) {
    SlotVector v;
    v.data_.assign(ring->d() * ring->N(), 0);
    v.ring_ = std::move(ring);
    return v;
  }

  /// Every slot equal to the constant c.
  static SlotVector constant(RingPtr ring, Residue c) {
    SlotVector v = zeros(std::move(ring));
    c = static_cast<Residue>(c % v.ring_->p());
    for (std::size_t j = 0; j < v.slot_count(); ++j) v.data_[j * v.ring_->N()] = c;
    return v;
  }

  /// Constant slots holding the given residues (one per slot).
  static SlotVector from_constants(RingPtr ring, std::span<const Residue> values) {
    detail::require(values.size() == ring->d(), "SlotVector: expected one value per slot");
    SlotVector v = zeros(std::move(ring));
    for (std::size_t j = 0; j < values.size(); ++j) {
      v.data_[j * v.ring_->N()] = static_cast<Residue>(values[j] % v.ring_->p());
    }
    return v;
  }

  const RingPtr& ring() const { return ring_; }
  std::size_t slot_count() const { return ring_ ? ring_->d() : 0; }

  std::span<const Residue> slot(std::size_t j) const {
    return {data_.data() + j * ring_->N(), ring_->N()};
  }

  void set_slot(std::size_t j, std::span<const Residue> coeffs) {
    detail::require(j < slot_count(), "SlotVector: slot index out of range");
    detail::require(coeffs.size() == ring_->N(), "SlotVector: slot must have N coefficients");
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      detail::require(coeffs[i] < ring_->p(), "SlotVector: coefficient not reduced mod p");
      data_[j * ring_->N() + i] = coeffs[i];
    }
  }

  std::span<const Residue> raw() const { return data_; }
  std::span<Residue> raw_mut() { return data_; }

  bool same_ring(const SlotVector& o) const {
    return ring_ && o.ring_ && (ring_ == o.ring_ || *ring_ == *o.ring_);
  }

  bool operator==(const SlotVector& o) const { return same_ring(o) && data_ == o.data_; }

 private:
  RingPtr ring_;
  std::vector<Residue> data_;
};

namespace plain {

inline void check_ring(const SlotVector& a, const SlotVector& b) {
  detail::require(a.same_ring(b), "slot algebra: ring mismatch");
}

inline SlotVector add(const SlotVector& a, const SlotVector& b) {
  check_ring(a, b);
  const std::uint64_t p = a.ring()->p();
  SlotVector out = a;
  auto o = out.raw_mut();
  auto y = b.raw();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = static_cast<Residue>((o[k] + y[k]) % p);
  return out;
}

inline SlotVector sub(const SlotVector& a, const SlotVector& b) {
  check_ring(a, b);
  const std::uint64_t p = a.ring()->p();
  SlotVector out = a;
  auto o = out.raw_mut();
  auto y = b.raw();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = static_cast<Residue>((o[k] + p - y[k]) % p);
  return out;
}

inline SlotVector scale(const SlotVector& a, Residue c) {
  const std::uint64_t p = a.ring()->p();
  const std::uint64_t cc = c % p;
  SlotVector out = a;
  for (auto& x : out.raw_mut()) x = static_cast<Residue>(x * cc % p);
  return out;
}

// Products in GF(p^N) = Z_p[X]/(F). Constant slots take a scalar fast path;
// the result is identical to the general product.
inline SlotVector mul(const SlotVector& a, const SlotVector& b) {
  check_ring(a, b);
  const RingParams& ring = *a.ring();
  const std::uint64_t p = ring.p();
  const std::size_t N = ring.N();
  const ZpPoly& F = ring.F();
  SlotVector out = SlotVector::zeros(a.ring());
  auto o = out.raw_mut();
  auto x = a.raw();
  auto y = b.raw();
  std::vector<std::uint64_t> prod(2 * N - 1);
  for (std::size_t j = 0; j < ring.d(); ++j) {
    const Residue* s = x.data() + j * N;
    const Residue* t = y.data() + j * N;
    Residue* r = o.data() + j * N;
    const bool s_const = std::all_of(s + 1, s + N, [](Residue c) { return c == 0; });
    const bool t_const = std::all_of(t + 1, t + N, [](Residue c) { return c == 0; });
    if (s_const || t_const) {
      const std::uint64_t c = s_const ? s[0] : t[0];
      const Residue* other = s_const ? t : s;
      for (std::size_t i = 0; i < N; ++i) r[i] = static_cast<Residue>(c * other[i] % p);
      continue;
    }
    std::fill(prod.begin(), prod.end(), 0);
    for (std::size_t u = 0; u < N; ++u) {
      for (std::size_t v = 0; v < N; ++v) prod[u + v] = (prod[u + v] + static_cast<std::uint64_t>(s[u]) * t[v]) % p;
    }
    // X^N = -(F_0 + ... + F_{N-1} X^{N-1})  (F monic)
    for (std::size_t k = 2 * N - 2; k >= N; --k) {
      const std::uint64_t c = prod[k];
      if (c != 0) {
        for (std::size_t i = 0; i < N; ++i) {
          prod[k - N + i] = (prod[k - N + i] + p - c * F[i] % p) % p;
        }
      }
      prod[k] = 0;
    }
    for (std::size_t i = 0; i < N; ++i) r[i] = static_cast<Residue>(prod[i]);
  }
  return out;
}

inline SlotVector ext(const SlotVector& a, std::size_t i) {
  const std::size_t N = a.ring()->N();
  detail::require(i < N, "ext: coefficient index out of range");
  SlotVector out = SlotVector::zeros(a.ring());
  auto o = out.raw_mut();
  auto x = a.raw();
  for (std::size_t j = 0; j < a.slot_count(); ++j) o[j * N] = x[j * N + i];
  return out;
}

}  // namespace plain

/// Counts of homomorphic operations charged to one circuit.
struct OpCounters {
  std::uint64_t ct_ct_mults = 0;
  std::uint64_t ct_pt_mults = 0;
  std::uint64_t adds = 0;
  std::uint64_t extractions = 0;

  OpCounters& operator+=(const OpCounters& o) {
    ct_ct_mults += o.ct_ct_mults;
    ct_pt_mults += o.ct_pt_mults;
    adds += o.adds;
    extractions += o.extractions;
    return *this;
  }
  bool operator==(const OpCounters&) const = default;
};

/// A SlotVector standing in for a ciphertext. Operand values are immutable;
/// the counters live in a ledger shared by every vector of one circuit, so a
/// subexpression reused many times is charged once. A circuit (one ledger) is
/// meant to be evaluated by a single thread; independent circuits can run
/// concurrently.
class TrackedVector {
 public:
  TrackedVector() = default;

  /// Wrap a fresh input into a new circuit.
  static TrackedVector input(SlotVector v) {
    return TrackedVector(std::move(v), 0, std::make_shared<OpCounters>());
  }

  /// Wrap a fresh input into an existing circuit.
  static TrackedVector input(SlotVector v, std::shared_ptr<OpCounters> ledger) {
    detail::require(ledger != nullptr, "TrackedVector: null ledger");
    return TrackedVector(std::move(v), 0, std::move(ledger));
  }

  /// Depth-0 constant slots (a trivial encryption) in the circuit of ref.
  static TrackedVector constant_like(const TrackedVector& ref, Residue c) {
    return TrackedVector(SlotVector::constant(ref.value_.ring(), c), 0, ref.ledger_);
  }

  const SlotVector& value() const { return value_; }
  unsigned depth() const { return depth_; }
  OpCounters counters() const { return ledger_ ? *ledger_ : OpCounters{}; }
  const std::shared_ptr<OpCounters>& ledger() const { return ledger_; }
  const RingPtr& ring() const { return value_.ring(); }

 private:
  TrackedVector(SlotVector v, unsigned depth, std::shared_ptr<OpCounters> ledger)
      : value_(std::move(v)), depth_(depth), ledger_(std::move(ledger)) {}

  friend TrackedVector add(const TrackedVector&, const TrackedVector&);
  friend TrackedVector sub(const TrackedVector&, const TrackedVector&);
  friend TrackedVector mul(const TrackedVector&, const TrackedVector&);
  friend TrackedVector mul_plain(const TrackedVector&, Residue);
  friend TrackedVector mul_plain(const TrackedVector&, const SlotVector&);
  friend TrackedVector add_plain(const TrackedVector&, Residue);
  friend TrackedVector ext(const TrackedVector&, std::size_t);

  SlotVector value_;
  unsigned depth_ = 0;
  std::shared_ptr<OpCounters> ledger_;
};

namespace detail {
inline void check_circuit(const TrackedVector& a, const TrackedVector& b) {
  require(a.value().same_ring(b.value()), "slot algebra: ring mismatch");
  require(a.ledger() == b.ledger(), "slot algebra: operands belong to different circuits");
}
}  // namespace detail

inline TrackedVector add(const TrackedVector& a, const TrackedVector& b) {
  detail::check_circuit(a, b);
  ++a.ledger_->adds;
  return {plain::add(a.value_, b.value_), std::max(a.depth_, b.depth_), a.ledger_};
}

inline TrackedVector sub(const TrackedVector& a, const TrackedVector& b) {
  detail::check_circuit(a, b);
  ++a.ledger_->adds;
  return {plain::sub(a.value_, b.value_), std::max(a.depth_, b.depth_), a.ledger_};
}

inline TrackedVector mul(const TrackedVector& a, const TrackedVector& b) {
  detail::check_circuit(a, b);
  ++a.ledger_->ct_ct_mults;
  return {plain::mul(a.value_, b.value_), std::max(a.depth_, b.depth_) + 1, a.ledger_};
}

inline TrackedVector mul_plain(const TrackedVector& a, Residue c) {
  ++a.ledger_->ct_pt_mults;
  return {plain::scale(a.value_, c), a.depth_, a.ledger_};
}

inline TrackedVector mul_plain(const TrackedVector& a, const SlotVector& c) {
  plain::check_ring(a.value_, c);
  ++a.ledger_->ct_pt_mults;
  return {plain::mul(a.value_, c), a.depth_, a.ledger_};
}

/// Adds the constant c to every slot. Counted as an addition.
inline TrackedVector add_plain(const TrackedVector& a, Residue c) {
  ++a.ledger_->adds;
  return {plain::add(a.value_, SlotVector::constant(a.value_.ring(), c)), a.depth_, a.ledger_};
}

/// Coefficient extraction: slot j of the result is the constant slot holding
/// coefficient i of slot j of a. Modeled as a linear map, so depth is unchanged.
inline TrackedVector ext(const TrackedVector& a, std::size_t i) {
  auto out = plain::ext(a.value_, i);
  ++a.ledger_->extractions;
  return {std::move(out), a.depth_, a.ledger_};
}

}  // namespace sable
