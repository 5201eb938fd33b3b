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
#include <cstdint>
#include <vector>

#include "sable/number_theory.hpp"

namespace sable {

using Residue = std::uint32_t;

// Dense polynomial over Z_p, coefficient i multiplies X^i.
using ZpPoly = std::vector<Residue>;

namespace zp {

inline void trim(ZpPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Degree of a trimmed or untrimmed polynomial; -1 for the zero polynomial.
inline int degree(const ZpPoly& a) {
  for (std::size_t i = a.size(); i > 0; --i) {
    if (a[i - 1] != 0) return static_cast<int>(i) - 1;
  }
  return -1;
}

inline Residue reduce(std::int64_t v, std::uint64_t p) {
  const auto pm = static_cast<std::int64_t>(p);
  std::int64_t r = v % pm;
  if (r < 0) r += pm;
  return static_cast<Residue>(r);
}

inline ZpPoly sub(const ZpPoly& a, const ZpPoly& b, std::uint64_t p) {
  ZpPoly out(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint64_t x = i < a.size() ? a[i] : 0;
    const std::uint64_t y = i < b.size() ? b[i] : 0;
    out[i] = static_cast<Residue>((x + p - y) % p);
  }
  trim(out);
  return out;
}

inline ZpPoly mul(const ZpPoly& a, const ZpPoly& b, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  ZpPoly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[i + j] = static_cast<Residue>((out[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p);
    }
  }
  trim(out);
  return out;
}

// Remainder of a modulo a non-zero divisor.
inline ZpPoly mod(ZpPoly a, const ZpPoly& divisor, std::uint64_t p) {
  trim(a);
  const int dd = degree(divisor);
  detail::require(dd >= 0, "zp::mod: division by zero polynomial");
  const std::uint64_t lead_inv = nt::inv_mod(divisor[static_cast<std::size_t>(dd)], p);
  while (degree(a) >= dd) {
    const auto da = static_cast<std::size_t>(degree(a));
    const std::uint64_t q = static_cast<std::uint64_t>(a[da]) * lead_inv % p;
    const std::size_t shift = da - static_cast<std::size_t>(dd);
    for (std::size_t i = 0; i <= static_cast<std::size_t>(dd); ++i) {
      const std::uint64_t t = q * divisor[i] % p;
      a[shift + i] = static_cast<Residue>((a[shift + i] + p - t) % p);
    }
    trim(a);
  }
  return a;
}

inline ZpPoly gcd(ZpPoly a, ZpPoly b, std::uint64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    ZpPoly r = mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    const std::uint64_t inv = nt::inv_mod(a.back(), p);
    for (auto& c : a) c = static_cast<Residue>(c * inv % p);
  }
  return a;
}

inline ZpPoly mul_mod(const ZpPoly& a, const ZpPoly& b, const ZpPoly& modulus, std::uint64_t p) {
  return mod(mul(a, b, p), modulus, p);
}

inline ZpPoly pow_mod(ZpPoly base, std::uint64_t e, const ZpPoly& modulus, std::uint64_t p) {
  ZpPoly result{1};
  base = mod(std::move(base), modulus, p);
  while (e > 0) {
    if (e & 1U) result = mul_mod(result, base, modulus, p);
    base = mul_mod(base, base, modulus, p);
    e >>= 1U;
  }
  return result;
}

// Horner evaluation at a residue.
inline Residue eval(const ZpPoly& a, std::uint64_t x, std::uint64_t p) {
  std::uint64_t acc = 0;
  x %= p;
  for (std::size_t i = a.size(); i > 0; --i) acc = (acc * x + a[i - 1]) % p;
  return static_cast<Residue>(acc);
}

// Rabin's test: f of degree N is irreducible iff X^(p^N) = X mod f and
// gcd(X^(p^(N/q)) - X, f) = 1 for every prime q dividing N.
inline bool is_irreducible(const ZpPoly& f, std::uint64_t p) {
  const int deg = degree(f);
  if (deg < 1) return false;
  if (deg == 1) return true;
  const auto n = static_cast<std::uint64_t>(deg);
  const ZpPoly x{0, 1};

  // frob[k] = X^(p^k) mod f
  std::vector<ZpPoly> frob{mod(x, f, p)};
  for (std::uint64_t k = 1; k <= n; ++k) frob.push_back(pow_mod(frob.back(), p, f, p));

  if (sub(frob[n], mod(x, f, p), p) != ZpPoly{}) return false;
  for (std::uint64_t q : nt::prime_factors(n)) {
    const ZpPoly g = gcd(sub(frob[n / q], x, p), f, p);
    if (degree(g) != 0) return false;
  }
  return true;
}

}  // namespace zp
}  // namespace sable
