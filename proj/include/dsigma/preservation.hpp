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

// (eta, delta)-preservation: how much of a subset of positions is still fed
// from inside the subset after shuffling. Monte Carlo for any plan, plus an
// exact count for the Hamming-distance Mallows law.

#ifndef DSIGMA_PRESERVATION_HPP_
#define DSIGMA_PRESERVATION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "dsigma/errors.hpp"
#include "dsigma/groups.hpp"
#include "dsigma/mallows.hpp"
#include "dsigma/mechanism.hpp"
#include "dsigma/permutation.hpp"
#include "dsigma/seeding.hpp"

namespace dsigma {

using Wide = unsigned __int128;

inline constexpr std::size_t kMaxExactPreservationN = 20;
inline constexpr double kOverlapTolerance = 1e-9;

enum class PreservationMethod { kMonteCarlo, kExactHamming, kBruteForce };

inline std::string_view to_string(PreservationMethod m) {
  switch (m) {
    case PreservationMethod::kMonteCarlo: return "monte_carlo";
    case PreservationMethod::kExactHamming: return "exact_hamming";
    case PreservationMethod::kBruteForce: return "brute_force";
  }
  return "?";
}

struct PreservationReport {
  std::vector<Index> subset;
  double eta = 0.0;
  double delta = 0.0;
  PreservationMethod method = PreservationMethod::kMonteCarlo;
  std::uint64_t samples = 0;  // trials, or permutations enumerated
  double mean_overlap = std::numeric_limits<double>::quiet_NaN();
};

inline void validate_subset(std::span<const Index> subset, std::size_t n) {
  if (subset.empty()) throw InvalidArgument("subset must be non-empty");
  std::vector<bool> seen(n, false);
  for (Index i : subset) {
    if (i >= n) throw InvalidArgument("subset index " + std::to_string(i) + " out of range");
    if (seen[i]) throw InvalidArgument("subset index " + std::to_string(i) + " repeated");
    seen[i] = true;
  }
}

inline void validate_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("eta must lie in [0, 1]");
}

// |{sigma(i) : i in S} intersect S|
inline std::size_t overlap_count(const Permutation& sigma, std::span<const Index> subset) {
  validate_subset(subset, sigma.size());
  std::vector<bool> in(sigma.size(), false);
  for (Index i : subset) in[i] = true;
  std::size_t c = 0;
  for (Index i : subset) c += in[sigma[i]] ? 1 : 0;
  return c;
}

inline double overlap_fraction(const Permutation& sigma, std::span<const Index> subset) {
  return static_cast<double>(overlap_count(sigma, subset)) / static_cast<double>(subset.size());
}

// Failure means fewer than eta * |S| members stay.
inline bool preservation_fails(std::size_t kept, std::size_t subset_size, double eta) {
  return static_cast<double>(kept) + kOverlapTolerance < eta * static_cast<double>(subset_size);
}

// Overlap fractions of `trials` independent draws of sigma*. Trial t uses
// seed derive_seed(seed, "preservation", t); workers take interleaved trials
// and write into fixed slots, so the thread count never changes the output.
inline std::vector<double> sample_overlaps(const ShufflePlan& plan, std::span<const Index> subset,
                                           std::size_t trials, std::uint64_t seed,
                                           unsigned threads = 1) {
  if (trials == 0) throw InvalidArgument("trials must be >= 1");
  validate_subset(subset, plan.size());
  std::vector<double> out(trials);
  auto work = [&](unsigned w, unsigned stride) {
    for (std::size_t t = w; t < trials; t += stride) {
      const Permutation s = draw_sigma_star(plan, derive_seed(seed, "preservation", t));
      out[t] = overlap_fraction(s, subset);
    }
  };
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(trials)));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w, threads);
    for (auto& th : pool) th.join();
  }
  return out;
}

// Largest eta met by at least a (1 - delta) fraction of the samples.
inline double eta_at_delta(std::vector<double> overlaps, double delta) {
  if (overlaps.empty()) throw InvalidArgument("eta_at_delta: no samples");
  if (!(delta >= 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in [0, 1)");
  std::sort(overlaps.begin(), overlaps.end());
  const auto m = static_cast<std::size_t>(
      std::floor(delta * static_cast<double>(overlaps.size()) + 1e-12));
  return overlaps[std::min(m, overlaps.size() - 1)];
}

inline PreservationReport estimate_preservation(const ShufflePlan& plan,
                                                std::span<const Index> subset, double eta,
                                                std::size_t trials, std::uint64_t seed,
                                                unsigned threads = 1) {
  validate_eta(eta);
  const auto ov = sample_overlaps(plan, subset, trials, seed, threads);
  PreservationReport rep;
  rep.subset.assign(subset.begin(), subset.end());
  rep.eta = eta;
  rep.method = PreservationMethod::kMonteCarlo;
  rep.samples = trials;
  std::size_t fails = 0;
  double sum = 0.0;
  for (double o : ov) {
    sum += o;
    const auto kept = static_cast<std::size_t>(std::lround(o * subset.size()));
    if (preservation_fails(kept, subset.size(), eta)) ++fails;
  }
  rep.delta = static_cast<double>(fails) / static_cast<double>(trials);
  rep.mean_overlap = sum / static_cast<double>(trials);
  return rep;
}

// ---- Exact counts for the Hamming-distance law ----

inline Wide derangements(std::size_t p) {
  if (p > kMaxExactPreservationN) throw ScaleError("derangements supports p <= 20");
  Wide prev2 = 1, prev1 = 0;  // !0, !1
  if (p == 0) return prev2;
  for (std::size_t i = 2; i <= p; ++i) {
    const Wide cur = static_cast<Wide>(i - 1) * (prev1 + prev2);
    prev2 = prev1;
    prev1 = cur;
  }
  return prev1;
}

inline Wide binomial_wide(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  Wide r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline Wide factorial_wide(std::size_t n) {
  Wide f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

// f(p, m): arrangements of p "stay-type" and m "incoming" objects in p + m
// slots with no stay-type object in its own slot.
//   f(p, 0) = !p,  f(0, m) = m!,
//   f(p, m) = sum_q C(p, q) C(m, m - q) m! f(p - q, q).
class FTable {
 public:
  explicit FTable(std::size_t max_total) : max_(max_total) {
    if (max_total > kMaxExactPreservationN) throw ScaleError("f table supports p + m <= 20");
    table_.assign(max_ + 1, std::vector<Wide>(max_ + 1, 0));
    done_.assign(max_ + 1, std::vector<bool>(max_ + 1, false));
  }

  Wide operator()(std::size_t p, std::size_t m) {
    if (p + m > max_) throw ScaleError("f table: p + m exceeds table size");
    if (done_[p][m]) return table_[p][m];
    Wide v;
    if (m == 0) {
      v = derangements(p);
    } else if (p == 0) {
      v = factorial_wide(m);
    } else {
      v = 0;
      const Wide mf = factorial_wide(m);
      for (std::size_t q = 0; q <= std::min(p, m); ++q)
        v += binomial_wide(p, q) * binomial_wide(m, m - q) * mf * (*this)(p - q, q);
    }
    done_[p][m] = true;
    table_[p][m] = v;
    return v;
  }

  std::size_t max_total() const { return max_; }

 private:
  std::size_t max_;
  std::vector<std::vector<Wide>> table_;
  std::vector<std::vector<bool>> done_;
};

// Largest number of subset members that may leave without failing:
// k = floor((1 - eta) * l), computed with the same tolerance as the
// failure test. Returns l when nothing can fail.
inline std::size_t allowed_departures(std::size_t l, double eta) {
  validate_eta(eta);
  std::size_t k = 0;
  while (k < l && !preservation_fails(l - (k + 1), l, eta)) ++k;
  return k;
}

// c[h] = number of permutations at Hamming distance h from the reference
// that keep fewer than eta * l subset members inside the subset, for
// h = 0..n. Only depends on (n, l, eta).
//   c_h = sum_{j > k} C(l, j) C(n-l, j)
//         sum_i C(l-j, i) f(i, j) C(n-l-j, h-2j-i) f(h-2j-i, j)
// with j bounded by min(l, n-l, h/2) and i by min(l-j, h-2j).
inline std::vector<Wide> hamming_failure_counts(std::size_t n, std::size_t l, double eta) {
  if (n == 0 || n > kMaxExactPreservationN)
    throw ScaleError("exact preservation supports 1 <= n <= 20");
  if (l == 0 || l > n) throw InvalidArgument("subset size must lie in [1, n]");
  const std::size_t k = allowed_departures(l, eta);
  FTable f(n);
  std::vector<Wide> c(n + 1, 0);
  for (std::size_t h = 0; h <= n; ++h) {
    const std::size_t j_hi = std::min({l, n - l, h / 2});
    for (std::size_t j = k + 1; j <= j_hi; ++j) {
      Wide inner = 0;
      const std::size_t rest = h - 2 * j;
      for (std::size_t i = 0; i <= std::min(l - j, rest); ++i) {
        if (rest - i > n - l - j) continue;
        inner += binomial_wide(l - j, i) * f(i, j) * binomial_wide(n - l - j, rest - i) *
                 f(rest - i, j);
      }
      c[h] += binomial_wide(l, j) * binomial_wide(n - l, j) * inner;
    }
  }
  return c;
}

// Permutations at Hamming distance h from a fixed one: C(n, h) * !h.
inline std::vector<Wide> hamming_distance_counts(std::size_t n) {
  if (n == 0 || n > kMaxExactPreservationN)
    throw ScaleError("exact preservation supports 1 <= n <= 20");
  std::vector<Wide> c(n + 1);
  for (std::size_t h = 0; h <= n; ++h) c[h] = binomial_wide(n, h) * derangements(h);
  return c;
}

// sum_h C(n, h) !h e^{-theta h}
inline long double hamming_normalizer(double theta, std::size_t n) {
  const auto counts = hamming_distance_counts(n);
  long double z = 0;
  for (std::size_t h = 0; h <= n; ++h)
    z += static_cast<long double>(counts[h]) * std::exp(-static_cast<long double>(theta) * h);
  return z;
}

// P(fewer than eta * |S| subset members stay) under the Hamming Mallows
// law. Independent of the reference permutation and of which subset of
// size l is chosen.
inline double exact_delta_hamming(double theta, std::size_t n, std::size_t l, double eta) {
  if (std::isnan(theta) || theta < 0) throw InvalidArgument("theta must be >= 0");
  const auto c = hamming_failure_counts(n, l, eta);
  if (std::isinf(theta)) return 0.0;  // all mass on h = 0, which never fails
  long double num = 0;
  for (std::size_t h = 0; h <= n; ++h)
    num += static_cast<long double>(c[h]) * std::exp(-static_cast<long double>(theta) * h);
  return static_cast<double>(num / hamming_normalizer(theta, n));
}

inline double exact_delta_hamming(double theta, std::size_t n, std::span<const Index> subset,
                                  double eta) {
  validate_subset(subset, n);
  return exact_delta_hamming(theta, n, subset.size(), eta);
}

// Enumerates all n! permutations (n <= 10).
inline double brute_force_delta_hamming(double theta, std::size_t n,
                                        std::span<const Index> subset, double eta) {
  validate_subset(subset, n);
  validate_eta(eta);
  if (std::isnan(theta) || theta < 0) throw InvalidArgument("theta must be >= 0");
  const Permutation id = Permutation::identity(n);
  long double num = 0, den = 0;
  for_each_permutation(n, [&](const Permutation& s) {
    const long double w =
        std::isinf(theta) ? (s.is_identity() ? 1.0L : 0.0L)
                          : std::exp(-static_cast<long double>(theta) *
                                     static_cast<long double>(hamming(s, id)));
    den += w;
    if (preservation_fails(overlap_count(s, subset), subset.size(), eta)) num += w;
  });
  return static_cast<double>(num / den);
}

inline PreservationReport exact_preservation(double theta, std::size_t n,
                                             std::span<const Index> subset, double eta,
                                             PreservationMethod method) {
  PreservationReport rep;
  rep.subset.assign(subset.begin(), subset.end());
  rep.eta = eta;
  rep.method = method;
  if (method == PreservationMethod::kExactHamming) {
    rep.delta = exact_delta_hamming(theta, n, subset, eta);
    rep.samples = 0;
  } else if (method == PreservationMethod::kBruteForce) {
    rep.delta = brute_force_delta_hamming(theta, n, subset, eta);
    rep.samples = factorial(n);
  } else {
    throw InvalidArgument("exact_preservation: use estimate_preservation for Monte Carlo");
  }
  return rep;
}

inline std::string to_string(Wide v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return {s.rbegin(), s.rend()};
}

}  // namespace dsigma

#endif  // DSIGMA_PRESERVATION_HPP_
