//
// Copyright 2026 The dsigma Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Mallows model over permutations: normalizer, log-probability, and the
// Repeated Insertion Model (RIM) sampler for Kendall's tau.
//
// RIM builds an ordering by inserting the reference items sigma0(1),
// sigma0(2), ... one at a time. Item i goes to position j in {1..i} with
// probability proportional to exp(-theta (i - j)); that insertion puts item i
// ahead of exactly i - j earlier items, so the total displacement equals the
// Kendall distance to sigma0 and the draw has the exact Mallows law.

#ifndef DSIGMA_MALLOWS_HPP_
#define DSIGMA_MALLOWS_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dsigma/errors.hpp"
#include "dsigma/permutation.hpp"
#include "dsigma/seeding.hpp"

namespace dsigma {

struct MallowsParams {
  double theta = 0.0;  // dispersion; +inf puts all mass on sigma0
  Permutation sigma0;
  RankDistance rank_distance = RankDistance::kKendallTau;
};

inline void validate(const MallowsParams& p) {
  if (std::isnan(p.theta) || p.theta < 0) throw InvalidArgument("theta must be >= 0");
  if (p.sigma0.size() == 0) throw InvalidArgument("empty reference permutation");
}

inline constexpr std::size_t kMaxHammingMallowsN = 8;

inline std::uint64_t derangements_u64(std::size_t p) {
  if (p > 20) throw ScaleError("derangement count overflows 64 bits for p > 20");
  std::uint64_t a = 1, b = 0;  // !0, !1
  if (p == 0) return a;
  for (std::size_t k = 2; k <= p; ++k) {
    const std::uint64_t c = (k - 1) * (a + b);
    a = b;
    b = c;
  }
  return b;
}

inline std::uint64_t binomial_u64(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<std::uint64_t>(r);
}

// log psi(theta) for Kendall's tau:
//   psi = prod_{i=1..n} (1 - e^{-i theta}) / (1 - e^{-theta}).
inline double log_normalizer_kendall(double theta, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (theta == 0.0) {
      s += std::log(static_cast<double>(i));
    } else if (std::isinf(theta)) {
      // each factor -> 1
    } else {
      s += std::log(-std::expm1(-static_cast<double>(i) * theta)) -
           std::log(-std::expm1(-theta));
    }
  }
  return s;
}

// log psi(theta) for Hamming distance: sum_h C(n,h) !h e^{-theta h}, where
// C(n,h) !h counts permutations at Hamming distance h from any reference.
inline double log_normalizer_hamming(double theta, std::size_t n) {
  if (n > 20) throw ScaleError("Hamming normalizer supports n <= 20");
  if (std::isinf(theta)) return 0.0;
  long double s = 0.0L;
  for (std::size_t h = 0; h <= n; ++h) {
    const long double count = static_cast<long double>(binomial_u64(n, h)) *
                              static_cast<long double>(derangements_u64(h));
    s += count * std::exp(-static_cast<long double>(theta) * h);
  }
  return static_cast<double>(std::log(s));
}

inline double log_normalizer(const MallowsParams& p) {
  const std::size_t n = p.sigma0.size();
  if (p.rank_distance == RankDistance::kKendallTau) return log_normalizer_kendall(p.theta, n);
  if (n > kMaxHammingMallowsN) {
    throw ScaleError("Hamming Mallows normalizer limited to n <= " +
                     std::to_string(kMaxHammingMallowsN));
  }
  return log_normalizer_hamming(p.theta, n);
}

inline double log_prob(const MallowsParams& p, const Permutation& sigma) {
  validate(p);
  require_same_size(p.sigma0.size(), sigma.size(), "log_prob");
  const auto d = static_cast<double>(rank_distance(p.rank_distance, sigma, p.sigma0));
  if (std::isinf(p.theta)) return d == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return -p.theta * d - log_normalizer(p);
}

// Row i-1 holds the insertion distribution for item i over positions
// 1..i: weight exp(-theta (i - j)), normalized. O(n^2) memory.
inline std::vector<std::vector<double>> insertion_probabilities(double theta, std::size_t n) {
  if (std::isnan(theta) || theta < 0) throw InvalidArgument("theta must be >= 0");
  std::vector<std::vector<double>> table(n);
  for (std::size_t i = 1; i <= n; ++i) {
    auto& row = table[i - 1];
    row.resize(i);
    if (std::isinf(theta)) {
      row.assign(i, 0.0);
      row[i - 1] = 1.0;
      continue;
    }
    double total = 0.0;
    for (std::size_t j = 1; j <= i; ++j) {
      row[j - 1] = std::exp(-theta * static_cast<double>(i - j));
      total += row[j - 1];
    }
    for (double& w : row) w /= total;
  }
  return table;
}

namespace detail {

// Turns insertion positions into the final ordering of reference ranks.
// positions[i] is the 0-based slot chosen for item i among i + 1 slots.
// Processed from the last item backwards: each item takes the
// positions[i]-th free slot. O(n log n).
inline std::vector<Index> place_insertions(const std::vector<std::size_t>& positions) {
  const std::size_t n = positions.size();
  Fenwick free_slots(n);
  for (std::size_t s = 0; s < n; ++s) free_slots.add(s, 1);
  std::vector<Index> order(n);
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t slot =
        free_slots.find_kth(static_cast<std::int64_t>(positions[i]) + 1);
    order[slot] = static_cast<Index>(i);
    free_slots.add(slot, -1);
  }
  return order;
}

// Maps an ordering of reference ranks u onto the reference: sigma(k) = sigma0(u(k)).
inline Permutation relabel_by_reference(const std::vector<Index>& ranks,
                                        const Permutation& sigma0) {
  std::vector<Index> out(ranks.size());
  for (std::size_t k = 0; k < ranks.size(); ++k) out[k] = sigma0[ranks[k]];
  return Permutation(std::move(out));
}

// Displacement d = i - j in [0, i - 1] (i items after insertion) with
// P(d) proportional to exp(-theta d); inverse-CDF of a truncated geometric.
inline std::size_t sample_displacement(double theta, std::size_t i, Rng& rng) {
  if (theta == 0.0) return static_cast<std::size_t>(uniform_below(rng, i));
  if (std::isinf(theta)) return 0;
  const double u = uniform01(rng);
  const double mass = -std::expm1(-theta * static_cast<double>(i));  // 1 - q^i
  const double d = std::floor(std::log1p(-u * mass) / -theta);
  if (!(d >= 0)) return 0;
  return std::min(static_cast<std::size_t>(d), i - 1);
}

}  // namespace detail

// Exact Kendall's-tau Mallows draw via RIM. O(n log n) per draw.
inline Permutation sample(const MallowsParams& p, Rng& rng) {
  validate(p);
  if (p.rank_distance != RankDistance::kKendallTau)
    throw Unsupported("Mallows sampling is only implemented for Kendall's tau");
  const std::size_t n = p.sigma0.size();
  std::vector<std::size_t> positions(n);
  for (std::size_t i = 1; i <= n; ++i)
    positions[i - 1] = (i - 1) - detail::sample_displacement(p.theta, i, rng);
  return detail::relabel_by_reference(detail::place_insertions(positions), p.sigma0);
}

// Same law as sample(), drawing each insertion from a precomputed table.
inline Permutation sample_with_table(const std::vector<std::vector<double>>& table,
                                     const Permutation& sigma0, Rng& rng) {
  require_same_size(table.size(), sigma0.size(), "sample_with_table");
  const std::size_t n = sigma0.size();
  std::vector<std::size_t> positions(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table[i];
    double u = uniform01(rng);
    std::size_t j = 0;
    for (; j + 1 < row.size(); ++j) {
      if (u < row[j]) break;
      u -= row[j];
    }
    positions[i] = j;
  }
  return detail::relabel_by_reference(detail::place_insertions(positions), sigma0);
}

// Full pmf over S_n indexed by rank_permutation (n <= 8). Used by the
// exhaustive audits and as a test oracle.
inline std::vector<double> exact_pmf(const MallowsParams& p) {
  validate(p);
  const std::size_t n = p.sigma0.size();
  if (n > 8) throw ScaleError("exact_pmf supports n <= 8");
  std::vector<double> pmf(factorial(n));
  const double log_z = std::isinf(p.theta) ? 0.0 : log_normalizer(p);
  for_each_permutation(n, [&](const Permutation& s) {
    const auto d = static_cast<double>(rank_distance(p.rank_distance, s, p.sigma0));
    double v;
    if (std::isinf(p.theta))
      v = d == 0 ? 1.0 : 0.0;
    else
      v = std::exp(-p.theta * d - log_z);
    pmf[rank_permutation(s)] = v;
  });
  return pmf;
}

}  // namespace dsigma

#endif  // DSIGMA_MALLOWS_HPP_
