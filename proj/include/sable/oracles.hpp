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

// Cleartext coordinate-wise aggregators: trimmed sum, trimmed mean, median.

#include <algorithm>
#include <string>
#include <vector>

#include "sable/error.hpp"
#include "sable/matrix.hpp"

namespace sable {

namespace detail {

template <typename T, typename Fn>
void for_each_sorted_column(const Matrix<T>& x, Fn&& fn) {
  std::vector<T> col(x.rows());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    for (std::size_t r = 0; r < x.rows(); ++r) col[r] = x(r, c);
    std::stable_sort(col.begin(), col.end());
    fn(c, col);
  }
}

inline void check_trim(std::size_t n, std::size_t f) {
  require(2 * f < n, "trimmed aggregator: need f < n/2 (n=" + std::to_string(n) + ", f=" + std::to_string(f) + ")");
}

}  // namespace detail

/// Per column: sum of the order statistics f .. n-f-1.
template <typename T>
std::vector<T> cwts(const Matrix<T>& x, std::size_t f) {
  detail::check_trim(x.rows(), f);
  std::vector<T> out(x.cols(), T{});
  detail::for_each_sorted_column(x, [&](std::size_t c, const std::vector<T>& col) {
    T s{};
    for (std::size_t k = f; k + f < col.size(); ++k) s += col[k];
    out[c] = s;
  });
  return out;
}

template <typename T>
std::vector<double> cwtm(const Matrix<T>& x, std::size_t f) {
  const auto sums = cwts(x, f);
  const auto width = static_cast<double>(x.rows() - 2 * f);
  std::vector<double> out;
  out.reserve(sums.size());
  for (const T& s : sums) out.push_back(static_cast<double>(s) / width);
  return out;
}

/// Per column: the order statistic at index floor(n/2).
template <typename T>
std::vector<T> cwmed(const Matrix<T>& x) {
  detail::require(x.rows() >= 1, "cwmed: need at least one row");
  std::vector<T> out(x.cols(), T{});
  detail::for_each_sorted_column(x, [&](std::size_t c, const std::vector<T>& col) { out[c] = col[col.size() / 2]; });
  return out;
}

template <typename T>
std::vector<double> column_mean(const Matrix<T>& x) {
  detail::require(x.rows() >= 1, "mean: need at least one row");
  std::vector<double> out(x.cols(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out[c] += static_cast<double>(x(r, c));
  }
  for (auto& v : out) v /= static_cast<double>(x.rows());
  return out;
}

}  // namespace sable
