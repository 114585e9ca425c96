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

#include "dsigma/preservation.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "gtest/gtest.h"

namespace dsigma {
namespace {

std::vector<Index> Prefix(std::size_t l) {
  std::vector<Index> s(l);
  std::iota(s.begin(), s.end(), Index{0});
  return s;
}

// Arrangements of p fixed-origin objects (slots 0..p-1) and m free objects
// in p + m slots with no fixed-origin object in its own slot, by listing.
std::uint64_t CountArrangements(std::size_t p, std::size_t m) {
  if (p + m == 0) return 1;
  std::uint64_t c = 0;
  for_each_permutation(p + m, [&](const Permutation& s) {
    for (std::size_t k = 0; k < p; ++k)
      if (s[k] == k) return;
    ++c;
  });
  return c;
}

std::uint64_t InclusionExclusion(std::size_t p, std::size_t m) {
  long long total = 0;
  for (std::size_t t = 0; t <= p; ++t) {
    const long long term = static_cast<long long>(binomial_u64(p, t) * factorial(p + m - t));
    total += (t % 2 ? -term : term);
  }
  return static_cast<std::uint64_t>(total);
}

GroupAssignment LineWindows(std::size_t n, double r) {
  PointAux p;
  for (std::size_t i = 0; i < n; ++i) p.points.push_back({static_cast<double>(i)});
  return compute_groups(AuxInfo{p}, r, Metric::kEuclidean);
}

TEST(OverlapTest, Golden) {
  const auto sigma = Permutation::from_one_based({5, 3, 2, 6, 7, 9, 8, 1, 4, 10});
  const std::vector<Index> s{0, 3, 4, 6, 7};  // {1,4,5,7,8}
  EXPECT_EQ(overlap_count(sigma, s), 4u);
  EXPECT_DOUBLE_EQ(overlap_fraction(sigma, s), 0.8);
}

TEST(OverlapTest, Trivial) {
  const auto sigma = Permutation::from_one_based({5, 3, 2, 6, 7, 9, 8, 1, 4, 10});
  EXPECT_DOUBLE_EQ(overlap_fraction(Permutation::identity(10), Prefix(4)), 1.0);
  EXPECT_DOUBLE_EQ(overlap_fraction(sigma, Prefix(10)), 1.0);
  EXPECT_THROW(overlap_fraction(sigma, {}), InvalidArgument);
  EXPECT_THROW(overlap_fraction(sigma, std::vector<Index>{1, 1}), InvalidArgument);
  EXPECT_THROW(overlap_fraction(sigma, std::vector<Index>{10}), InvalidArgument);
}

TEST(DerangementTest, SmallValues) {
  EXPECT_EQ(to_string(derangements(0)), "1");
  EXPECT_EQ(to_string(derangements(1)), "0");
  EXPECT_EQ(to_string(derangements(3)), "2");
  EXPECT_EQ(to_string(derangements(4)), "9");
  for (std::size_t p = 1; p <= 7; ++p) EXPECT_EQ(derangements(p), CountArrangements(p, 0));
  EXPECT_EQ(to_string(derangements(20)), "895014631192902121");
  EXPECT_THROW(derangements(21), ScaleError);
}

TEST(FTableTest, BoundaryCases) {
  FTable f(12);
  for (std::size_t p = 0; p <= 6; ++p) EXPECT_EQ(f(p, 0), derangements(p));
  for (std::size_t m = 0; m <= 6; ++m) EXPECT_EQ(f(0, m), factorial_wide(m));
}

TEST(FTableTest, MatchesListingAndInclusionExclusion) {
  FTable f(12);
  EXPECT_EQ(f(2, 1), Wide{3});
  for (std::size_t p = 0; p <= 7; ++p) {
    for (std::size_t m = 0; p + m <= 7; ++m) {
      EXPECT_EQ(f(p, m), CountArrangements(p, m)) << p << "," << m;
    }
  }
  for (std::size_t p = 0; p <= 12; ++p)
    for (std::size_t m = 0; p + m <= 12; ++m) EXPECT_EQ(f(p, m), InclusionExclusion(p, m));
  EXPECT_THROW(f(10, 3), ScaleError);
}

TEST(ExactDeltaTest, EtaZeroNeverFails) {
  for (double theta : {0.0, 1.0}) EXPECT_EQ(exact_delta_hamming(theta, 7, Prefix(3), 0.0), 0.0);
}

TEST(ExactDeltaTest, UniformFullPreservationByCounting) {
  // Permutations of 6 moving at least one of {0,1,2} outside the set.
  std::size_t bad = 0;
  for_each_permutation(6, [&](const Permutation& s) {
    if (overlap_count(s, Prefix(3)) < 3) ++bad;
  });
  EXPECT_NEAR(exact_delta_hamming(0.0, 6, Prefix(3), 1.0), bad / 720.0, 1e-15);
  EXPECT_EQ(bad, 720u - 36u);
}

TEST(ExactDeltaTest, MatchesBruteForceAtEight) {
  const std::vector<Index> s{1, 3, 4, 6};
  EXPECT_NEAR(exact_delta_hamming(0.5, 8, s, 0.75), brute_force_delta_hamming(0.5, 8, s, 0.75),
              1e-12);
}

TEST(ExactDeltaTest, MatchesBruteForceOnGrid) {
  for (std::size_t n : {4, 5, 6, 7}) {
    for (double theta : {0.0, 0.25, 2.0}) {
      for (std::size_t l = 1; l <= n; ++l) {
        for (double eta : {0.0, 0.3, 0.5, 2.0 / 3.0, 0.9, 1.0}) {
          EXPECT_NEAR(exact_delta_hamming(theta, n, Prefix(l), eta),
                      brute_force_delta_hamming(theta, n, Prefix(l), eta), 1e-12)
              << n << " " << theta << " " << l << " " << eta;
        }
      }
    }
  }
}

TEST(ExactDeltaTest, IndependentOfWhichSubset) {
  const std::vector<Index> a{0, 1, 2}, b{1, 4, 6};
  EXPECT_NEAR(brute_force_delta_hamming(0.7, 7, a, 0.6), brute_force_delta_hamming(0.7, 7, b, 0.6),
              1e-14);
}

TEST(FailureCountsTest, StructuralZeros) {
  for (std::size_t n : {6, 9, 14, 20}) {
    for (std::size_t l = 1; l < n; ++l) {
      for (double eta : {0.25, 0.5, 0.75, 1.0}) {
        const auto c = hamming_failure_counts(n, l, eta);
        const std::size_t k = allowed_departures(l, eta);
        for (std::size_t h = 0; h <= std::min(n, 2 * k + 1); ++h) EXPECT_EQ(c[h], Wide{0});
        EXPECT_EQ(c[1], Wide{0});
        const auto all = hamming_distance_counts(n);
        for (std::size_t h = 0; h <= n; ++h) EXPECT_LE(c[h], all[h]);
      }
    }
  }
}

TEST(FailureCountsTest, AllowedDepartures) {
  EXPECT_EQ(allowed_departures(4, 0.75), 1u);
  EXPECT_EQ(allowed_departures(4, 1.0), 0u);
  EXPECT_EQ(allowed_departures(5, 0.5), 2u);
  EXPECT_EQ(allowed_departures(3, 0.0), 3u);
}

TEST(FailureCountsTest, DistanceCountsNormalize) {
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto counts = hamming_distance_counts(n);
    Wide total = 0;
    for (auto c : counts) total += c;
    EXPECT_EQ(total, factorial_wide(n));
    for (double theta : {0.0, 0.8}) {
      double z = 0;
      const auto id = Permutation::identity(n);
      for_each_permutation(n, [&](const Permutation& s) {
        z += std::exp(-theta * static_cast<double>(hamming(s, id)));
      });
      EXPECT_NEAR(static_cast<double>(hamming_normalizer(theta, n)), z, 1e-9 * z);
    }
  }
}

TEST(ExactDeltaTest, Monotonicity) {
  const std::size_t n = 12, l = 5;
  double prev = 2.0;
  for (double theta : {0.0, 0.2, 0.5, 1.0, 2.0, 4.0}) {
    const double d = exact_delta_hamming(theta, n, l, 0.6);
    EXPECT_LE(d, prev + 1e-15);
    prev = d;
  }
  prev = -1.0;
  for (double eta : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
    const double d = exact_delta_hamming(0.5, n, l, eta);
    EXPECT_GE(d, prev - 1e-15);
    prev = d;
  }
}

TEST(MonteCarloTest, UniformShuffleHalfSubset) {
  const std::size_t n = 1000;
  const auto plan = make_plan(LineWindows(n, std::numeric_limits<double>::infinity()), 0.0);
  const auto ov = sample_overlaps(plan, Prefix(n / 2), 400, 3);
  EXPECT_NEAR(eta_at_delta(ov, 0.01), 0.5, 0.05);
}

TEST(MonteCarloTest, SharpPlanKeepsEverything) {
  auto plan = make_plan(LineWindows(50, 2.0), 1.0);
  plan.theta = 1e6;
  const auto rep = estimate_preservation(plan, Prefix(10), 1.0, 50, 4);
  EXPECT_EQ(rep.delta, 0.0);
  EXPECT_DOUBLE_EQ(eta_at_delta(sample_overlaps(plan, Prefix(10), 50, 4), 0.0), 1.0);
}

TEST(MonteCarloTest, PreservationDeclinesWithWidth) {
  const std::size_t n = 200;
  double prev = 2.0;
  for (double r : {1.0, 3.0, 6.0}) {
    const auto g = LineWindows(n, r);
    const auto plan = make_plan(g, 1.0);
    const auto& s = g.groups[n / 2];
    const double eta = eta_at_delta(sample_overlaps(plan, s, 300, 5), 0.1);
    EXPECT_LE(eta, prev + 1e-12) << "r=" << r << " width=" << plan.width;
    prev = eta;
  }
}

TEST(MonteCarloTest, ThreadCountDoesNotChangeSamples) {
  const auto plan = make_plan(LineWindows(300, 4.0), 1.0);
  EXPECT_EQ(sample_overlaps(plan, Prefix(30), 40, 9, 1), sample_overlaps(plan, Prefix(30), 40, 9, 4));
}

TEST(MonteCarloTest, DeltaCountsFailures) {
  const auto plan = make_plan(LineWindows(100, std::numeric_limits<double>::infinity()), 0.0);
  const auto ov = sample_overlaps(plan, Prefix(20), 200, 6);
  const auto rep = estimate_preservation(plan, Prefix(20), 0.3, 200, 6);
  std::size_t fails = 0;
  for (double o : ov) fails += o < 0.3 - 1e-12;
  EXPECT_DOUBLE_EQ(rep.delta, fails / 200.0);
  EXPECT_THROW(estimate_preservation(plan, Prefix(20), 1.5, 10, 1), InvalidArgument);
  EXPECT_THROW(sample_overlaps(plan, Prefix(20), 0, 1), InvalidArgument);
}

}  // namespace
}  // namespace dsigma
