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

#include "dsigma/groups.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <deque>
#include <numeric>
#include <random>

#include "gtest/gtest.h"

namespace dsigma {
namespace {

using Edges = std::vector<std::pair<Index, Index>>;

AuxInfo Points1d(const std::vector<double>& xs) {
  PointAux p;
  for (double x : xs) p.points.push_back({x});
  return AuxInfo{p};
}

GroupAssignment GroupsFromEdges(std::size_t n, const Edges& edges) {
  return compute_groups(AuxInfo{graph_from_edges(n, edges)}, 1.0, Metric::kHopCount);
}

// The eight-owner example graph, written 1-based.
GroupAssignment ExampleGroups() {
  Edges e{{5, 2}, {5, 3}, {5, 4}, {5, 8}, {3, 8}, {4, 7}, {2, 1}, {2, 6}};
  for (auto& [a, b] : e) {
    --a;
    --b;
  }
  return GroupsFromEdges(8, e);
}

// BFS that visits neighbours in the caller's order; used to confirm that
// an ordering is some valid BFS traversal.
std::vector<Index> BfsWithOrder(const std::vector<std::vector<Index>>& nbrs, Index root) {
  std::vector<bool> seen(nbrs.size(), false);
  std::vector<Index> order;
  std::deque<Index> q{root};
  seen[root] = true;
  while (!q.empty()) {
    Index u = q.front();
    q.pop_front();
    order.push_back(u);
    for (Index v : nbrs[u])
      if (!seen[v]) {
        seen[v] = true;
        q.push_back(v);
      }
  }
  return order;
}

GroupAssignment RandomGrouping(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  Edges e;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (coin(rng)) e.emplace_back(i, j);
  return GroupsFromEdges(n, e);
}

// Max over neighbouring (s, s') of |d(sigma0 s, sigma0) - d(sigma0 s', sigma0)|,
// by direct enumeration of all pairs.
double SensitivityByPairs(const Permutation& sigma0, const GroupAssignment& g, RankDistance rd) {
  const std::size_t n = g.size();
  const auto perms = enumerate_permutations(n);
  double best = 0;
  for (const auto& s : perms) {
    for (const auto& s2 : perms) {
      bool neighbors = false;
      for (const auto& grp : g.groups) {
        bool same_outside = true;
        for (std::size_t j = 0; j < n && same_outside; ++j)
          if (!std::binary_search(grp.begin(), grp.end(), static_cast<Index>(j)) && s[j] != s2[j])
            same_outside = false;
        if (same_outside) {
          neighbors = true;
          break;
        }
      }
      if (!neighbors) continue;
      const double a = static_cast<double>(rank_distance(rd, compose(sigma0, s), sigma0));
      const double b = static_cast<double>(rank_distance(rd, compose(sigma0, s2), sigma0));
      best = std::max(best, std::abs(a - b));
    }
  }
  return best;
}

TEST(GroupsTest, EuclideanBalls) {
  const auto g = compute_groups(Points1d({0, 1, 2, 5}), 1.0, Metric::kEuclidean);
  EXPECT_EQ(g.groups[0], (std::vector<Index>{0, 1}));
  EXPECT_EQ(g.groups[1], (std::vector<Index>{0, 1, 2}));
  EXPECT_EQ(g.groups[2], (std::vector<Index>{1, 2}));
  EXPECT_EQ(g.groups[3], (std::vector<Index>{3}));
}

TEST(GroupsTest, ManhattanDiffersFromEuclidean) {
  PointAux p{{{0, 0}, {0.6, 0.6}}};
  EXPECT_EQ(compute_groups(AuxInfo{p}, 1.0, Metric::kEuclidean).groups[0].size(), 2u);
  EXPECT_EQ(compute_groups(AuxInfo{p}, 1.0, Metric::kManhattan).groups[0].size(), 1u);
}

TEST(GroupsTest, RadiusEndpoints) {
  const auto aux = Points1d({0, 0.5, 3, 7});
  EXPECT_TRUE(compute_groups(aux, 0.0, Metric::kEuclidean).all_singletons());
  const auto full = compute_groups(aux, std::numeric_limits<double>::infinity(), Metric::kEuclidean);
  for (const auto& grp : full.groups) EXPECT_EQ(grp.size(), 4u);
}

TEST(GroupsTest, HopBalls) {
  const AuxInfo path{graph_from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}})};
  const auto g1 = compute_groups(path, 1, Metric::kHopCount);
  EXPECT_EQ(g1.groups[2], (std::vector<Index>{1, 2, 3}));
  const auto g2 = compute_groups(path, 2, Metric::kHopCount);
  EXPECT_EQ(g2.groups[0], (std::vector<Index>{0, 1, 2}));
  EXPECT_EQ(compute_groups(path, 0, Metric::kHopCount).all_singletons(), true);
}

TEST(GroupsTest, InvalidInputs) {
  const auto aux = Points1d({0, 1});
  EXPECT_THROW(compute_groups(aux, -1.0, Metric::kEuclidean), InvalidArgument);
  EXPECT_THROW(compute_groups(aux, NAN, Metric::kEuclidean), InvalidArgument);
  EXPECT_THROW(compute_groups(aux, 1.0, Metric::kHopCount), InvalidArgument);
  const AuxInfo graph{graph_from_edges(2, {{0, 1}})};
  EXPECT_THROW(compute_groups(graph, 1.0, Metric::kEuclidean), InvalidArgument);
  EXPECT_THROW(graph_from_edges(2, {{0, 0}}), InvalidArgument);
  EXPECT_THROW(graph_from_edges(2, {{0, 2}}), InvalidArgument);
  EXPECT_THROW(compute_groups(AuxInfo{PointAux{}}, 1.0, Metric::kEuclidean), InvalidArgument);
}

TEST(GroupsTest, GroupsAreReflexiveAndSymmetric) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 10);
  PointAux p;
  for (int i = 0; i < 60; ++i) p.points.push_back({u(rng), u(rng)});
  for (unsigned threads : {1u, 3u}) {
    const auto g = compute_groups(AuxInfo{p}, 1.5, Metric::kEuclidean, threads);
    EXPECT_NO_THROW(validate(g));
    EXPECT_EQ(g.groups, compute_groups(AuxInfo{p}, 1.5, Metric::kEuclidean, 1).groups);
  }
}

TEST(GroupsTest, GroupsFromListsValidates) {
  EXPECT_NO_THROW(groups_from_lists({{1}, {0}, {}}));
  EXPECT_THROW(groups_from_lists({{1}, {}}), InvalidArgument);  // not symmetric
}

TEST(GroupsTest, BfsCompleteGraphAscending) {
  Edges e;
  for (Index i = 0; i < 6; ++i)
    for (Index j = i + 1; j < 6; ++j) e.emplace_back(i, j);
  const auto sigma0 = bfs_reference(graph_from_edges(6, e).adjacency, 2);
  EXPECT_EQ(sigma0.mapping(), (std::vector<Index>{2, 0, 1, 3, 4, 5}));
}

TEST(GroupsTest, BfsAppendsComponentsBySmallestNode) {
  const auto adj = graph_from_edges(6, {{4, 5}, {1, 3}}).adjacency;
  EXPECT_EQ(bfs_reference(adj, 4).mapping(), (std::vector<Index>{4, 5, 0, 1, 3, 2}));
}

TEST(GroupsTest, ExampleGraphReferenceAndSensitivity) {
  const auto g = ExampleGroups();
  EXPECT_EQ(g.groups[4], (std::vector<Index>{1, 2, 3, 4, 7}));  // {5,2,3,8,4}
  EXPECT_EQ(g.groups[7], (std::vector<Index>{2, 4, 7}));        // {8,3,5}
  EXPECT_EQ(g.groups[3], (std::vector<Index>{3, 4, 6}));        // {4,5,7}
  EXPECT_EQ(select_root(g), 4u);

  const auto plan = make_plan(g, 1.0);
  EXPECT_EQ(plan.sigma0, Permutation::from_one_based({5, 2, 3, 4, 8, 1, 6, 7}));
  const Permutation pos = inverse(plan.sigma0);
  EXPECT_EQ(group_width(pos, g.groups[4]), 4u);
  EXPECT_EQ(group_width(pos, g.groups[3]), 7u);
  EXPECT_EQ(plan.width, 7u);
  EXPECT_DOUBLE_EQ(plan.sensitivity, 28.0);
  EXPECT_DOUBLE_EQ(plan.theta, 1.0 / 28.0);

  // The ordering with 8 visited before 4 is also a BFS from 5 and gives the
  // same widths.
  auto nbrs = build_group_graph(g).adjacency;
  nbrs[4] = {1, 2, 7, 3};
  const Permutation alt(BfsWithOrder(nbrs, 4));
  EXPECT_EQ(alt, Permutation::from_one_based({5, 2, 3, 8, 4, 1, 6, 7}));
  const Permutation alt_pos = inverse(alt);
  EXPECT_EQ(group_width(alt_pos, g.groups[4]), 4u);
  EXPECT_EQ(group_width(alt_pos, g.groups[3]), 7u);
  EXPECT_DOUBLE_EQ(plan_with_reference(g, alt, 2.0).theta, 2.0 / 28.0);
}

TEST(GroupsTest, WidthGolden) {
  const auto sigma = Permutation::from_one_based({1, 3, 7, 8, 6, 4, 5, 2, 9, 10});
  const std::vector<Index> g1{0, 1, 4, 5, 6, 7};  // {1,7,8,2,5,6}
  EXPECT_EQ(group_width(inverse(sigma), g1), 7u);
}

TEST(GroupsTest, ExhaustiveSensitivityMatchesPairEnumeration) {
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 15; ++rep) {
    const std::size_t n = 3 + rep % 3;
    const auto g = RandomGrouping(n, 0.4, rng);
    const auto sigma0 = bfs_reference(g.groups, select_root(g));
    for (RankDistance rd : {RankDistance::kKendallTau, RankDistance::kHamming}) {
      EXPECT_DOUBLE_EQ(exhaustive_sensitivity(sigma0, g, rd), SensitivityByPairs(sigma0, g, rd))
          << "rep " << rep;
    }
  }
}

TEST(GroupsTest, KendallClosedFormBoundsExhaustive) {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 2 + rep % 5;
    const auto g = RandomGrouping(n, 0.35, rng);
    const auto sigma0 = bfs_reference(g.groups, select_root(g));
    EXPECT_LE(exhaustive_sensitivity(sigma0, g, RankDistance::kKendallTau),
              sensitivity(sigma0, g, RankDistance::kKendallTau) + 1e-12);
  }
}

TEST(GroupsTest, ContiguousGroupAttainsClosedForm) {
  // One group occupying consecutive reference slots: the reversal of the
  // block attains omega (omega + 1) / 2.
  const auto g = groups_from_lists({{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}, {}});
  const auto sigma0 = Permutation::identity(5);
  EXPECT_DOUBLE_EQ(exhaustive_sensitivity(sigma0, g, RankDistance::kKendallTau), 6.0);
  EXPECT_DOUBLE_EQ(sensitivity(sigma0, g, RankDistance::kKendallTau), 6.0);
}

TEST(GroupsTest, HammingSensitivityIsLargestGroup) {
  std::mt19937_64 rng(24);
  for (int rep = 0; rep < 20; ++rep) {
    const auto g = RandomGrouping(6, 0.3, rng);
    std::size_t largest = 0;
    for (const auto& grp : g.groups) largest = std::max(largest, grp.size());
    const auto sigma0 = bfs_reference(g.groups, select_root(g));
    EXPECT_DOUBLE_EQ(sensitivity(sigma0, g, RankDistance::kHamming),
                     largest >= 2 ? static_cast<double>(largest) : 0.0);
  }
}

TEST(GroupsTest, SingletonPlanIsIdentity) {
  const auto g = compute_groups(Points1d({0, 1, 2}), 0.1, Metric::kEuclidean);
  const auto plan = make_plan(g, 1.0);
  EXPECT_EQ(plan.sensitivity, 0.0);
  EXPECT_TRUE(std::isinf(plan.theta));
  EXPECT_TRUE(plan.identity_shuffle());
}

TEST(GroupsTest, ThetaScalesWithAlpha) {
  const auto g = ExampleGroups();
  for (double a : {0.0, 0.5, 4.0}) EXPECT_DOUBLE_EQ(make_plan(g, a).theta, a / 28.0);
  EXPECT_THROW(make_plan(g, -1.0), InvalidArgument);
}

TEST(GroupsTest, TransferredAlphaScalesBySensitivity) {
  const auto plan = make_plan(ExampleGroups(), 2.0);
  const auto g2 = groups_from_lists({{1}, {0}, {}, {}, {}, {}, {}, {}});
  const double d2 = sensitivity(plan.sigma0, g2, RankDistance::kKendallTau);
  EXPECT_DOUBLE_EQ(transferred_alpha(plan, g2), 2.0 * d2 / 28.0);
}

TEST(GroupsTest, BfsWidthUsuallyBeatsRandomLabels) {
  std::mt19937_64 rng(25);
  int wins = 0;
  const int kGraphs = 200;
  for (int rep = 0; rep < kGraphs; ++rep) {
    // Random geometric graph on a line keeps the graph connected and local.
    std::vector<double> xs(30);
    for (auto& x : xs) x = std::uniform_real_distribution<double>(0, 10)(rng);
    std::sort(xs.begin(), xs.end());
    std::vector<Index> relabel(30);
    std::iota(relabel.begin(), relabel.end(), Index{0});
    std::shuffle(relabel.begin(), relabel.end(), rng);
    PointAux p;
    p.points.resize(30);
    for (Index i = 0; i < 30; ++i) p.points[relabel[i]] = {xs[i]};
    const auto g = compute_groups(AuxInfo{p}, 1.0, Metric::kEuclidean);
    const auto sigma0 = bfs_reference(g.groups, select_root(g));
    if (width(sigma0, g) <= width(Permutation::identity(30), g)) ++wins;
  }
  EXPECT_GE(wins, kGraphs / 2);
}

}  // namespace
}  // namespace dsigma
