// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DIVMAX_COMMON_HPP_
#define DIVMAX_COMMON_HPP_

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace divmax {

// Ground-set elements are 0-based indices.
using Index = std::size_t;

// A subset of the ground set, kept sorted ascending without duplicates.
using Subset = std::vector<Index>;

// Numeric tolerances shared by all modules.
namespace tol {
inline constexpr double kNumeric = 1e-9;   // relative, for identities
inline constexpr double kMetric = 1e-9;    // triangle inequality check
inline constexpr double kTight = 1e-7;     // absolute, tight-set detection
inline constexpr double kPsdScale = 1e-8;  // times (1 + ||Q||_inf)
}  // namespace tol

// Bad user input: malformed data, violated preconditions. CLI exit code 2.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A distance matrix failed negative-type certification. CLI exit code 3.
class NotNegativeType : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An algorithm invariant broke. CLI exit code 4.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void Require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

inline void Ensure(bool condition, const std::string& message) {
  if (!condition) throw InternalError(message);
}

inline Subset Normalize(Subset s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline bool Contains(std::span<const Index> sorted, Index e) {
  return std::binary_search(sorted.begin(), sorted.end(), e);
}

inline Subset Union(std::span<const Index> a, std::span<const Index> b) {
  Subset out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

inline Subset Difference(std::span<const Index> a, std::span<const Index> b) {
  Subset out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

// Characteristic vector of `s` in R^n.
inline std::vector<double> Indicator(std::span<const Index> s, std::size_t n) {
  std::vector<double> x(n, 0.0);
  for (Index e : s) x.at(e) = 1.0;
  return x;
}

inline double Mass(std::span<const double> x) {
  double total = 0.0;
  for (double v : x) total += v;
  return total;
}

inline double Mass(std::span<const double> x, std::span<const Index> s) {
  double total = 0.0;
  for (Index e : s) total += x[e];
  return total;
}

}  // namespace divmax

#endif  // DIVMAX_COMMON_HPP_
