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

#include <cstdint>
#include <vector>

#include "sable/error.hpp"

namespace sable::nt {

using u64 = std::uint64_t;
__extension__ typedef unsigned __int128 u128;

inline u64 mul_mod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

inline u64 pow_mod(u64 base, u64 exp, u64 m) {
  if (m == 1) return 0;
  u64 result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

// Deterministic Miller-Rabin; the witness set is exact for all 64-bit inputs.
inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  unsigned s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

inline u64 next_prime(u64 n) {
  if (n <= 2) return 2;
  u64 c = n | 1U;
  while (!is_prime(c)) c += 2;
  return c;
}

inline std::vector<u64> prime_factors(u64 n) {
  std::vector<u64> out;
  for (u64 q = 2; q * q <= n; ++q) {
    if (n % q == 0) {
      out.push_back(q);
      while (n % q == 0) n /= q;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

// Multiplicative order of a modulo a prime m (a coprime to m).
inline u64 multiplicative_order(u64 a, u64 m) {
  detail::require(is_prime(m), "multiplicative_order: modulus must be prime");
  detail::require(a % m != 0, "multiplicative_order: base divisible by modulus");
  u64 order = m - 1;
  for (u64 q : prime_factors(m - 1)) {
    while (order % q == 0 && pow_mod(a, order / q, m) == 1) order /= q;
  }
  return order;
}

// ord_m(a) == n, without computing the full order.
inline bool has_order(u64 a, u64 m, u64 n) {
  if (a % m == 0 || pow_mod(a, n, m) != 1) return false;
  for (u64 q : prime_factors(n)) {
    if (pow_mod(a, n / q, m) == 1) return false;
  }
  return true;
}

inline u64 inv_mod(u64 a, u64 p) {
  detail::require(a % p != 0, "inv_mod: zero has no inverse");
  return pow_mod(a, p - 2, p);
}

}  // namespace sable::nt
