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

// Slot-wise comparison, ranking and trimmed-sum circuits, written only in
// terms of the slot algebra (add, sub, mul, plaintext mul, ext).
//
// Rank convention. rk_i = sum_j Comp(v_i, v_j; i, j) with
//   Comp = LT(v_i, v_j)        if i >= j
//          1 - LT(v_j, v_i)    if i <  j
// evaluates to #{j : v_j > v_i} + #{j > i : v_j == v_i}, i.e. rank 0 is the
// largest value and ties rank the earlier index higher. The trim window
// {f, ..., n-f-1} is symmetric, so the selected multiset is the same as with
// ascending ranks.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <exception>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "sable/encoding.hpp"
#include "sable/error.hpp"
#include "sable/slot_algebra.hpp"
#include "sable/zp_poly.hpp"

namespace sable {

/// Unique polynomial of degree < points.size() through (points[k], values[k]).
inline ZpPoly lagrange_interpolate(std::span<const Residue> points, std::span<const Residue> values,
                                   std::uint64_t p) {
  using detail::require;
  require(points.size() == values.size(), "lagrange: points and values differ in length");
  require(points.size() <= p, "lagrange: more points than field elements");
  const std::size_t n = points.size();
  std::vector<Residue> xs(n);
  for (std::size_t k = 0; k < n; ++k) xs[k] = static_cast<Residue>(points[k] % p);
  {
    auto sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            "lagrange: interpolation points must be distinct mod p");
  }

  // master = prod_k (X - x_k)
  ZpPoly master{1};
  for (Residue x : xs) master = zp::mul(master, ZpPoly{static_cast<Residue>((p - x) % p), 1}, p);

  ZpPoly result(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (values[k] % p == 0) continue;
    // basis = master / (X - x_k) by synthetic division
    ZpPoly basis(n, 0);
    std::uint64_t carry = 0;
    for (std::size_t i = n; i > 0; --i) {
      carry = (master[i] + carry * xs[k]) % p;
      basis[i - 1] = static_cast<Residue>(carry);
    }
    const std::uint64_t denom = zp::eval(basis, xs[k], p);
    const std::uint64_t scale = (values[k] % p) * nt::inv_mod(denom, p) % p;
    for (std::size_t i = 0; i < n; ++i) {
      result[i] = static_cast<Residue>((result[i] + scale * basis[i]) % p);
    }
  }
  zp::trim(result);
  return result;
}

/// An indicator function realised as an interpolating polynomial.
struct IndicatorPoly {
  enum class Kind { Zero, Neg, Between };

  Kind kind = Kind::Zero;
  ZpPoly coeffs;
  std::vector<std::int64_t> domain;  // integer inputs on which it is exact
  std::uint64_t p = 0;
  std::int64_t lo = 0;  // Between window, inclusive
  std::int64_t hi = 0;

  bool truth(std::int64_t x) const {
    switch (kind) {
      case Kind::Zero: return x == 0;
      case Kind::Neg: return x < 0;
      case Kind::Between: return x >= lo && x <= hi;
    }
    return false;
  }

  Residue at(std::int64_t x) const { return zp::eval(coeffs, zp::reduce(x, p), p); }
  int degree() const { return zp::degree(coeffs); }
};

namespace detail {

inline IndicatorPoly build_indicator(IndicatorPoly ind) {
  std::vector<Residue> pts;
  std::vector<Residue> vals;
  for (std::int64_t x : ind.domain) {
    pts.push_back(zp::reduce(x, ind.p));
    vals.push_back(ind.truth(x) ? 1 : 0);
  }
  ind.coeffs = lagrange_interpolate(pts, vals, ind.p);
  return ind;
}

inline IndicatorPoly signed_digit_indicator(IndicatorPoly::Kind kind, std::uint64_t B, std::uint64_t p) {
  require(B >= 2, "indicator: B must be >= 2");
  require(p >= 2 * B - 1, "indicator: need p >= 2B-1 (B=" + std::to_string(B) +
                              ", p=" + std::to_string(p) + ")");
  IndicatorPoly ind;
  ind.kind = kind;
  ind.p = p;
  const auto b = static_cast<std::int64_t>(B);
  for (std::int64_t x = -(b - 1); x <= b - 1; ++x) ind.domain.push_back(x);
  return build_indicator(std::move(ind));
}

}  // namespace detail

/// Zero(c) = 1(c == 0) on [-(B-1), B-1].
inline IndicatorPoly zero_indicator(std::uint64_t B, std::uint64_t p) {
  return detail::signed_digit_indicator(IndicatorPoly::Kind::Zero, B, p);
}

/// Neg(c) = 1(c < 0) on [-(B-1), B-1].
inline IndicatorPoly neg_indicator(std::uint64_t B, std::uint64_t p) {
  return detail::signed_digit_indicator(IndicatorPoly::Kind::Neg, B, p);
}

/// Btw(rk; lo, hi) = 1(lo <= rk <= hi) on {0, ..., n-1}.
inline IndicatorPoly between_indicator(std::size_t n, std::size_t lo, std::size_t hi, std::uint64_t p) {
  detail::require(n >= 1 && n <= p, "between: need 1 <= n <= p");
  IndicatorPoly ind;
  ind.kind = IndicatorPoly::Kind::Between;
  ind.p = p;
  ind.lo = static_cast<std::int64_t>(lo);
  ind.hi = static_cast<std::int64_t>(hi);
  for (std::size_t x = 0; x < n; ++x) ind.domain.push_back(static_cast<std::int64_t>(x));
  return detail::build_indicator(std::move(ind));
}

/// x^1 .. x^degree, with x^k = x^(2^floor(log2 k)) * x^(k - 2^floor(log2 k)).
/// Each power sits at depth(x) + ceil(log2 k). Index 0 is left empty.
inline std::vector<TrackedVector> power_table(const TrackedVector& x, std::size_t degree) {
  std::vector<TrackedVector> pw(degree + 1);
  if (degree == 0) return pw;
  pw[1] = x;
  for (std::size_t k = 2; k <= degree; ++k) {
    const std::size_t hi = std::bit_floor(k);
    pw[k] = (hi == k) ? mul(pw[k / 2], pw[k / 2]) : mul(pw[hi], pw[k - hi]);
  }
  return pw;
}

/// sum_k c_k x^k from a power table; plaintext coefficients add no depth.
/// A constant polynomial comes back as a depth-0 constant in the circuit of x.
inline TrackedVector evaluate(const ZpPoly& poly, const std::vector<TrackedVector>& powers,
                              const TrackedVector& x) {
  const int deg = zp::degree(poly);
  detail::require(deg < 0 || static_cast<std::size_t>(deg) < powers.size(),
                  "evaluate: power table too short");
  if (deg <= 0) return TrackedVector::constant_like(x, poly.empty() ? 0 : poly[0]);
  TrackedVector acc;
  bool started = false;
  for (std::size_t k = 1; k <= static_cast<std::size_t>(deg); ++k) {
    if (poly[k] == 0) continue;
    TrackedVector term = poly[k] == 1 ? powers[k] : mul_plain(powers[k], poly[k]);
    acc = started ? add(acc, term) : term;
    started = true;
  }
  if (poly[0] != 0) acc = add_plain(acc, poly[0]);
  return acc;
}

inline TrackedVector evaluate(const IndicatorPoly& ind, const TrackedVector& x) {
  const int deg = std::max(ind.degree(), 0);
  return evaluate(ind.coeffs, power_table(x, static_cast<std::size_t>(deg)), x);
}

/// Slot-wise Zero on constant slots holding values in [-(B-1), B-1] mod p.
inline TrackedVector zero_op(const TrackedVector& x, std::uint64_t B) {
  return evaluate(zero_indicator(B, x.ring()->p()), x);
}

/// Slot-wise Neg on constant slots holding values in [-(B-1), B-1] mod p.
inline TrackedVector neg_op(const TrackedVector& x, std::uint64_t B) {
  return evaluate(neg_indicator(B, x.ring()->p()), x);
}

/// Holds the Zero/Neg polynomials of one encoding and evaluates LT on
/// pre-extracted digits, so digit extraction and the Zero/Neg power tables
/// of each digit difference are shared.
class Comparator {
 public:
  explicit Comparator(const EncodingParams& enc)
      : enc_(enc), zero_(zero_indicator(enc.base, enc.p())), neg_(neg_indicator(enc.base, enc.p())) {
    enc_.validate();
  }

  const EncodingParams& encoding() const { return enc_; }
  const IndicatorPoly& zero_poly() const { return zero_; }
  const IndicatorPoly& neg_poly() const { return neg_; }

  std::vector<TrackedVector> digits(const TrackedVector& v) const {
    detail::require(v.ring() && *v.ring() == *enc_.ring, "comparator: encoding mismatch");
    std::vector<TrackedVector> out;
    for (std::size_t i = 0; i < enc_.digits(); ++i) out.push_back(ext(v, i));
    return out;
  }

  /// LT = sum_i Neg(a_i - b_i) * prod_{j>i} Zero(a_j - b_j). The suffix
  /// products of Zero terms are built once, from the top digit down.
  TrackedVector lt_digits(const std::vector<TrackedVector>& a, const std::vector<TrackedVector>& b) const {
    const std::size_t N = enc_.digits();
    detail::require(a.size() == N && b.size() == N, "comparator: digit count mismatch");
    const int top = N > 1 ? std::max(zero_.degree(), neg_.degree()) : neg_.degree();
    const auto deg = static_cast<std::size_t>(std::max(top, 1));
    TrackedVector result;
    TrackedVector suffix;  // prod_{j > i} Zero(diff_j)
    for (std::size_t ii = N; ii > 0; --ii) {
      const std::size_t i = ii - 1;
      const TrackedVector diff = sub(a[i], b[i]);
      const auto pw = power_table(diff, deg);
      const TrackedVector neg = evaluate(neg_.coeffs, pw, diff);
      if (i == N - 1) {
        result = neg;
      } else {
        result = add(result, mul(neg, suffix));
      }
      if (i > 0) {
        const TrackedVector zero = evaluate(zero_.coeffs, pw, diff);
        suffix = (i == N - 1) ? zero : mul(zero, suffix);
      }
    }
    return result;
  }

  TrackedVector lt(const TrackedVector& v, const TrackedVector& w) const {
    detail::check_circuit(v, w);
    return lt_digits(digits(v), digits(w));
  }

 private:
  EncodingParams enc_;
  IndicatorPoly zero_;
  IndicatorPoly neg_;
};

/// Slot-wise 1(decode(v_j) < decode(w_j)).
inline TrackedVector lt(const TrackedVector& v, const TrackedVector& w, const EncodingParams& enc) {
  return Comparator(enc).lt(v, w);
}

/// LT(v, w) if i >= j, else 1 - LT(w, v).
inline TrackedVector comp(const TrackedVector& v, const TrackedVector& w, std::size_t i, std::size_t j,
                          const EncodingParams& enc) {
  Comparator cmp(enc);
  if (i >= j) return cmp.lt(v, w);
  const TrackedVector l = cmp.lt(w, v);
  return sub(TrackedVector::constant_like(l, 1), l);
}

namespace detail {

inline void check_inputs(const std::vector<TrackedVector>& inputs, const EncodingParams& enc) {
  require(!inputs.empty(), "circuit: need at least one input");
  require(inputs.size() <= enc.p(), "circuit: need p >= n for rank interpolation (n=" +
                                        std::to_string(inputs.size()) + ", p=" + std::to_string(enc.p()) + ")");
  for (const auto& v : inputs) check_circuit(inputs.front(), v);
  require(*inputs.front().ring() == *enc.ring, "circuit: inputs do not use the encoding's ring");
}

// Evaluates the comparisons of each unordered pair once: for i < j,
// Comp(v_j, v_i; j, i) = LT(v_j, v_i) and Comp(v_i, v_j; i, j) = 1 - LT(v_j, v_i).
inline std::vector<TrackedVector> ranks_with(const Comparator& cmp, const std::vector<TrackedVector>& inputs) {
  const std::size_t n = inputs.size();
  std::vector<std::vector<TrackedVector>> dig;
  for (const auto& v : inputs) dig.push_back(cmp.digits(v));
  std::vector<TrackedVector> plus(n);   // sum of LT(v_i, v_j), j < i
  std::vector<TrackedVector> minus(n);  // sum of LT(v_j, v_i), j > i
  std::vector<bool> has_plus(n, false);
  std::vector<bool> has_minus(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const TrackedVector l = cmp.lt_digits(dig[j], dig[i]);
      plus[j] = has_plus[j] ? add(plus[j], l) : l;
      has_plus[j] = true;
      minus[i] = has_minus[i] ? add(minus[i], l) : l;
      has_minus[i] = true;
    }
  }
  // rk_i = (n-1-i) + plus_i - minus_i
  std::vector<TrackedVector> rk;
  const std::uint64_t p = cmp.encoding().p();
  for (std::size_t i = 0; i < n; ++i) {
    const auto later = static_cast<Residue>((n - 1 - i) % p);
    TrackedVector r;
    if (has_plus[i] && has_minus[i]) {
      r = sub(plus[i], minus[i]);
    } else if (has_plus[i]) {
      r = plus[i];
    } else if (has_minus[i]) {
      r = sub(TrackedVector::constant_like(minus[i], 0), minus[i]);
    } else {
      r = TrackedVector::constant_like(inputs[i], 0);
    }
    if (later != 0) r = add_plain(r, later);
    rk.push_back(std::move(r));
  }
  return rk;
}

}  // namespace detail

/// Slot-wise ranks; in every slot the n values are a permutation of 0..n-1.
inline std::vector<TrackedVector> ranks(const std::vector<TrackedVector>& inputs, const EncodingParams& enc) {
  detail::check_inputs(inputs, enc);
  return detail::ranks_with(Comparator(enc), inputs);
}

/// Homomorphic trimmed sum: sum_i Btw(rk_i; f, n-f-1) * v_i.
inline TrackedVector hts(const std::vector<TrackedVector>& inputs, std::size_t f, const EncodingParams& enc) {
  detail::check_inputs(inputs, enc);
  const std::size_t n = inputs.size();
  detail::require(2 * f < n, "hts: need f < n/2 (n=" + std::to_string(n) + ", f=" + std::to_string(f) + ")");
  detail::require(enc.sum_width >= n - 2 * f, "hts: encoding sum_width below n-2f");
  Comparator cmp(enc);
  const auto rk = detail::ranks_with(cmp, inputs);
  const IndicatorPoly btw = between_indicator(n, f, n - f - 1, enc.p());
  const int deg = btw.degree();

  TrackedVector acc;
  for (std::size_t i = 0; i < n; ++i) {
    TrackedVector term;
    if (deg <= 0) {
      term = mul_plain(inputs[i], btw.coeffs.empty() ? 0 : btw.coeffs[0]);
    } else {
      const auto pw = power_table(rk[i], static_cast<std::size_t>(deg));
      term = mul(evaluate(btw.coeffs, pw, rk[i]), inputs[i]);
    }
    acc = i == 0 ? term : add(acc, term);
  }
  return acc;
}

/// Coordinate-wise median for odd n: hts with f = floor(n/2).
inline TrackedVector hmed(const std::vector<TrackedVector>& inputs, const EncodingParams& enc) {
  detail::require(inputs.size() % 2 == 1, "hmed: n must be odd (got " + std::to_string(inputs.size()) + ")");
  return hts(inputs, inputs.size() / 2, enc);
}

struct CostReport {
  unsigned depth = 0;
  OpCounters counters;
  std::size_t n = 0;
  std::size_t f = 0;
  std::uint64_t B = 0;
  unsigned N = 0;
  std::uint64_t p = 0;

  CostReport& merge(const CostReport& o) {
    depth = std::max(depth, o.depth);
    counters += o.counters;
    return *this;
  }
};

/// Measured depth and operation counts of one hts evaluation.
inline CostReport cost_report(std::size_t n, std::size_t f, const EncodingParams& enc) {
  detail::require(n >= 1, "cost_report: n must be >= 1");
  auto ledger = std::make_shared<OpCounters>();
  std::vector<TrackedVector> inputs;
  for (std::size_t i = 0; i < n; ++i) inputs.push_back(TrackedVector::input(SlotVector::zeros(enc.ring), ledger));
  const TrackedVector out = hts(inputs, f, enc);
  return CostReport{out.depth(), out.counters(), n, f, enc.base, enc.digits(), enc.p()};
}

enum class AggregateOp { TrimmedSum, Median };

/// Runs hts (or hmed) chunk by chunk over packed inputs. Each chunk is an
/// independent circuit; chunks may be spread over `threads` workers.
inline PackedBatch aggregate_batches(const std::vector<PackedBatch>& inputs, std::size_t f,
                                     const EncodingParams& enc, AggregateOp op, unsigned threads = 1,
                                     CostReport* report = nullptr) {
  detail::require(!inputs.empty(), "aggregate: no inputs");
  const std::size_t chunks = inputs.front().vectors.size();
  for (const auto& b : inputs) {
    detail::require(b.vectors.size() == chunks && b.dim == inputs.front().dim, "aggregate: batch shape mismatch");
  }
  PackedBatch out;
  out.dim = inputs.front().dim;
  out.vectors.resize(chunks);
  std::vector<CostReport> costs(chunks);

  auto run_chunk = [&](std::size_t c) {
    auto ledger = std::make_shared<OpCounters>();
    std::vector<TrackedVector> tv;
    for (const auto& b : inputs) tv.push_back(TrackedVector::input(b.vectors[c], ledger));
    const TrackedVector r = op == AggregateOp::Median ? hmed(tv, enc) : hts(tv, f, enc);
    out.vectors[c] = r.value();
    costs[c] = CostReport{r.depth(), r.counters(), tv.size(), op == AggregateOp::Median ? tv.size() / 2 : f,
                          enc.base, enc.digits(), enc.p()};
  };

  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
  if (threads == 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t c = t; c < chunks; c += threads) run_chunk(c);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  if (report != nullptr) {
    *report = costs.front();
    for (std::size_t c = 1; c < chunks; ++c) report->merge(costs[c]);
  }
  return out;
}

}  // namespace sable
