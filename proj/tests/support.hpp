#pragma once

// Plaintext reference implementations shared by the unit and acceptance
// tests. None of them call into the circuit code.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <vector>

#include "sable/encoding.hpp"
#include "sable/slot_algebra.hpp"

namespace sable::testing {

/// Sort positions by (value descending, index descending); the rank of i is
/// its position in that order.
inline std::vector<std::size_t> descending_ranks(const std::vector<std::int64_t>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return v[a] != v[b] ? v[a] > v[b] : a > b;
  });
  std::vector<std::size_t> rank(v.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) rank[order[pos]] = pos;
  return rank;
}

/// Sum of the values left after dropping the f largest and f smallest.
inline std::int64_t trimmed_sum(std::vector<std::int64_t> v, std::size_t f) {
  std::sort(v.begin(), v.end());
  std::int64_t s = 0;
  for (std::size_t k = f; k + f < v.size(); ++k) s += v[k];
  return s;
}

inline std::int64_t median(std::vector<std::int64_t> v) {
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
  return v[v.size() / 2];
}

/// values[i][j] is input i in slot j (missing slots hold 0). All inputs share
/// one circuit ledger.
inline std::vector<TrackedVector> slotwise_inputs(const std::vector<std::vector<std::uint64_t>>& values,
                                                  const EncodingParams& enc) {
  auto ledger = std::make_shared<OpCounters>();
  std::vector<TrackedVector> out;
  for (const auto& row : values) {
    SlotVector v = SlotVector::zeros(enc.ring);
    for (std::size_t j = 0; j < row.size(); ++j) v.set_slot(j, encode_int(row[j], enc).coeffs);
    out.push_back(TrackedVector::input(std::move(v), ledger));
  }
  return out;
}

inline std::uint64_t decode_at(const TrackedVector& v, std::size_t j, const EncodingParams& enc) {
  return decode_slot(v.value().slot(j), enc);
}

/// n values per slot drawn from [0, range); with `ties` from a handful of
/// levels so equal values are common.
inline std::vector<std::vector<std::uint64_t>> random_columns(std::size_t n, std::size_t slots, std::uint64_t range,
                                                              bool ties, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> val(0, range - 1);
  std::uniform_int_distribution<std::uint64_t> level(0, 3);
  std::vector<std::vector<std::uint64_t>> out(n, std::vector<std::uint64_t>(slots));
  for (auto& row : out) {
    for (auto& x : row) x = ties ? level(rng) * ((range - 1) / 3) : val(rng);
  }
  return out;
}

}  // namespace sable::testing
