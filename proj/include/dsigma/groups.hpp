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

// Group assignment from public auxiliary information, the group graph, the
// BFS reference permutation, width, sensitivity, and the data-independent
// ShufflePlan that ties them together.

#ifndef DSIGMA_GROUPS_HPP_
#define DSIGMA_GROUPS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "dsigma/errors.hpp"
#include "dsigma/permutation.hpp"

namespace dsigma {

using Adjacency = std::vector<std::vector<Index>>;

// n points in R^d (row-major: points[i] has d coordinates).
struct PointAux {
  std::vector<std::vector<double>> points;
};

// Undirected graph over n nodes; adjacency lists hold no self-loops.
struct GraphAux {
  Adjacency adjacency;
};

struct AuxInfo {
  std::variant<PointAux, GraphAux> data;

  std::size_t size() const {
    return std::visit(
        [](const auto& d) -> std::size_t {
          if constexpr (std::is_same_v<std::decay_t<decltype(d)>, PointAux>)
            return d.points.size();
          else
            return d.adjacency.size();
        },
        data);
  }
  bool is_graph() const { return std::holds_alternative<GraphAux>(data); }
  const PointAux& points() const { return std::get<PointAux>(data); }
  const GraphAux& graph() const { return std::get<GraphAux>(data); }
};

// Builds a symmetric, de-duplicated adjacency from an edge list.
inline GraphAux graph_from_edges(std::size_t n,
                                 const std::vector<std::pair<Index, Index>>& edges) {
  std::vector<std::set<Index>> adj(n);
  for (auto [a, b] : edges) {
    if (a >= n || b >= n) {
      throw InvalidArgument("edge (" + std::to_string(a) + "," + std::to_string(b) +
                            ") out of range for n=" + std::to_string(n));
    }
    if (a == b) throw InvalidArgument("self-loop on node " + std::to_string(a));
    adj[a].insert(b);
    adj[b].insert(a);
  }
  GraphAux g;
  g.adjacency.reserve(n);
  for (auto& s : adj) g.adjacency.emplace_back(s.begin(), s.end());
  return g;
}

inline void validate(const GraphAux& g) {
  const std::size_t n = g.adjacency.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (Index j : g.adjacency[i]) {
      if (j >= n) throw InvalidArgument("graph node id out of range");
      if (j == i) throw InvalidArgument("graph has a self-loop");
    }
  }
}

enum class Metric { kEuclidean, kManhattan, kHopCount };

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::kEuclidean: return "euclidean";
    case Metric::kManhattan: return "manhattan";
    case Metric::kHopCount: return "hops";
  }
  return "?";
}

inline Metric parse_metric(std::string_view s) {
  if (s == "euclidean") return Metric::kEuclidean;
  if (s == "manhattan") return Metric::kManhattan;
  if (s == "hops" || s == "hop" || s == "path") return Metric::kHopCount;
  throw InvalidArgument("unknown metric: " + std::string(s));
}

struct GroupAssignment {
  std::vector<std::vector<Index>> groups;  // groups[i] sorted, contains i
  double threshold_r = 0.0;
  Metric metric = Metric::kEuclidean;

  std::size_t size() const { return groups.size(); }
  bool all_singletons() const {
    return std::all_of(groups.begin(), groups.end(),
                       [](const auto& g) { return g.size() == 1; });
  }
};

// Checks reflexivity (i in G_i), sortedness and symmetric membership.
inline void validate(const GroupAssignment& g) {
  const std::size_t n = g.size();
  if (n == 0) throw InvalidArgument("group assignment is empty");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& gi = g.groups[i];
    if (!std::is_sorted(gi.begin(), gi.end()) ||
        std::adjacent_find(gi.begin(), gi.end()) != gi.end()) {
      throw InvalidArgument("group " + std::to_string(i) + " is not a sorted set");
    }
    if (!std::binary_search(gi.begin(), gi.end(), static_cast<Index>(i)))
      throw InvalidArgument("group " + std::to_string(i) + " does not contain its owner");
    for (Index j : gi) {
      if (j >= n) throw InvalidArgument("group member out of range");
      const auto& gj = g.groups[j];
      if (!std::binary_search(gj.begin(), gj.end(), static_cast<Index>(i)))
        throw InvalidArgument("group membership is not symmetric at (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
}

// Groups given explicitly (e.g. from a file). Members are sorted and
// validated; the owner is added when missing.
inline GroupAssignment groups_from_lists(std::vector<std::vector<Index>> lists,
                                         double r = std::numeric_limits<double>::quiet_NaN(),
                                         Metric metric = Metric::kHopCount) {
  for (std::size_t i = 0; i < lists.size(); ++i) {
    auto& g = lists[i];
    g.push_back(static_cast<Index>(i));
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
  }
  GroupAssignment out{std::move(lists), r, metric};
  validate(out);
  return out;
}

namespace detail {

inline double point_distance(const std::vector<double>& a, const std::vector<double>& b,
                             Metric metric) {
  double s = 0.0;
  if (metric == Metric::kManhattan) {
    for (std::size_t c = 0; c < a.size(); ++c) s += std::abs(a[c] - b[c]);
    return s;
  }
  for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
  return std::sqrt(s);
}

// Nodes within `max_hops` of `src`, sorted.
inline std::vector<Index> hop_ball(const Adjacency& adj, Index src, double max_hops) {
  std::vector<std::int64_t> dist(adj.size(), -1);
  std::vector<Index> out{src};
  std::deque<Index> queue{src};
  dist[src] = 0;
  while (!queue.empty()) {
    const Index u = queue.front();
    queue.pop_front();
    if (static_cast<double>(dist[u] + 1) > max_hops) continue;
    for (Index v : adj[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        out.push_back(v);
        queue.push_back(v);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// G_i = { j : d(t_i, t_j) <= r }. Point rows are split across `threads`
// workers; each worker writes a disjoint range of groups.
inline GroupAssignment compute_groups(const AuxInfo& aux, double r, Metric metric,
                                      unsigned threads = 1) {
  const std::size_t n = aux.size();
  if (n == 0) throw InvalidArgument("compute_groups: empty dataset");
  if (std::isnan(r) || r < 0) throw InvalidArgument("compute_groups: r must be >= 0");

  GroupAssignment out;
  out.threshold_r = r;
  out.metric = metric;
  out.groups.resize(n);

  if (aux.is_graph()) {
    if (metric != Metric::kHopCount)
      throw InvalidArgument("graph auxiliary information requires the hop-count metric");
    const auto& adj = aux.graph().adjacency;
    validate(aux.graph());
    for (std::size_t i = 0; i < n; ++i)
      out.groups[i] = detail::hop_ball(adj, static_cast<Index>(i), r);
    return out;
  }

  if (metric == Metric::kHopCount)
    throw InvalidArgument("point auxiliary information requires euclidean or manhattan");
  const auto& pts = aux.points().points;
  const std::size_t dim = pts.front().size();
  for (const auto& p : pts)
    if (p.size() != dim) throw DimensionError("points have inconsistent dimension");

  auto worker = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      auto& g = out.groups[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || detail::point_distance(pts[i], pts[j], metric) <= r)
          g.push_back(static_cast<Index>(j));
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    worker(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
      if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

// Edge (i, j) iff j in G_i and i != j.
struct UndirectedGraph {
  Adjacency adjacency;

  std::size_t num_vertices() const { return adjacency.size(); }
  std::size_t num_edges() const {
    std::size_t deg = 0;
    for (const auto& a : adjacency) deg += a.size();
    return deg / 2;
  }
  std::size_t degree(Index v) const { return adjacency[v].size(); }
};

inline UndirectedGraph build_group_graph(const GroupAssignment& g) {
  UndirectedGraph graph;
  graph.adjacency.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (Index j : g.groups[i])
      if (j != i) graph.adjacency[i].push_back(j);
  }
  return graph;
}

// Index of the largest group; ties go to the lowest index.
inline Index select_root(const GroupAssignment& g) {
  if (g.size() == 0) throw InvalidArgument("select_root: empty assignment");
  Index best = 0;
  for (std::size_t i = 1; i < g.size(); ++i)
    if (g.groups[i].size() > g.groups[best].size()) best = static_cast<Index>(i);
  return best;
}

// sigma0(k) is the k-th node visited. Unvisited neighbours are enqueued in
// ascending index order; remaining components are traversed afterwards,
// each starting from its smallest node. Self-loops in `adj` are ignored, so
// a GroupAssignment's member lists can be passed directly.
inline Permutation bfs_reference(const Adjacency& adj, Index root) {
  const std::size_t n = adj.size();
  if (root >= n) throw InvalidArgument("bfs_reference: root out of range");
  std::vector<bool> seen(n, false);
  std::vector<Index> order;
  order.reserve(n);
  std::vector<Index> scratch;
  auto traverse = [&](Index start) {
    std::deque<Index> queue{start};
    seen[start] = true;
    while (!queue.empty()) {
      const Index u = queue.front();
      queue.pop_front();
      order.push_back(u);
      scratch.assign(adj[u].begin(), adj[u].end());
      std::sort(scratch.begin(), scratch.end());
      for (Index v : scratch) {
        if (!seen[v]) {
          seen[v] = true;
          queue.push_back(v);
        }
      }
    }
  };
  traverse(root);
  for (std::size_t s = 0; s < n; ++s)
    if (!seen[s]) traverse(static_cast<Index>(s));
  return Permutation(std::move(order));
}

inline Permutation bfs_reference(const UndirectedGraph& graph, Index root) {
  return bfs_reference(graph.adjacency, root);
}

// Spread of one group's members in sigma: max |sigma^{-1}(j) - sigma^{-1}(k)|.
inline std::size_t group_width(const Permutation& position_of, std::span<const Index> group) {
  Index lo = std::numeric_limits<Index>::max(), hi = 0;
  for (Index j : group) {
    lo = std::min(lo, position_of[j]);
    hi = std::max(hi, position_of[j]);
  }
  return group.empty() ? 0 : hi - lo;
}

// Width of the whole assignment: the largest group spread in sigma.
inline std::size_t width(const Permutation& sigma, const GroupAssignment& g) {
  require_same_size(sigma.size(), g.size(), "width");
  const Permutation pos = inverse(sigma);
  std::size_t w = 0;
  for (const auto& grp : g.groups) w = std::max(w, group_width(pos, grp));
  return w;
}

inline constexpr std::size_t kMaxExhaustiveSensitivityN = 8;

// Exact sensitivity by enumeration: the largest change
// |d(s, sigma0) - d(s, nu o sigma0)| over all s and all relabelings nu of a
// group's members. By the triangle inequality this is attained at
// s = sigma0, so only the |G|! relabelings of each distinct group are
// enumerated.
inline double exhaustive_sensitivity(const Permutation& sigma0, const GroupAssignment& g,
                                     RankDistance rd) {
  require_same_size(sigma0.size(), g.size(), "sensitivity");
  const std::size_t n = g.size();
  if (n > kMaxExhaustiveSensitivityN) {
    throw ScaleError("exhaustive sensitivity supports n <= " +
                     std::to_string(kMaxExhaustiveSensitivityN) + ", got n=" +
                     std::to_string(n));
  }
  std::set<std::vector<Index>> distinct(g.groups.begin(), g.groups.end());
  std::uint64_t best = 0;
  for (const auto& grp : distinct) {
    if (grp.size() < 2) continue;
    std::vector<Index> image = grp;
    do {
      std::vector<Index> relabel(n);
      std::iota(relabel.begin(), relabel.end(), Index{0});
      for (std::size_t m = 0; m < grp.size(); ++m) relabel[grp[m]] = image[m];
      std::vector<Index> moved(n);
      for (std::size_t k = 0; k < n; ++k) moved[k] = relabel[sigma0[k]];
      best = std::max(best, rank_distance(rd, Permutation(std::move(moved)), sigma0));
    } while (std::next_permutation(image.begin(), image.end()));
  }
  return static_cast<double>(best);
}

// Kendall's tau: omega (omega + 1) / 2 with omega = width(sigma0, g).
// Hamming: exhaustive enumeration, n <= 8.
inline double sensitivity(const Permutation& sigma0, const GroupAssignment& g,
                          RankDistance rd) {
  if (rd == RankDistance::kKendallTau) {
    const double w = static_cast<double>(width(sigma0, g));
    return w * (w + 1.0) / 2.0;
  }
  return exhaustive_sensitivity(sigma0, g, rd);
}

// Precomputed, data-independent state of the shuffling mechanism.
struct ShufflePlan {
  GroupAssignment assignment;
  Permutation sigma0;
  std::size_t width = 0;
  double sensitivity = 0.0;
  double theta = 0.0;  // +inf when sensitivity == 0
  double alpha = 0.0;
  RankDistance rank_distance = RankDistance::kKendallTau;

  std::size_t size() const { return sigma0.size(); }
  // Delta == 0: every group is a singleton and the shuffle is the identity.
  bool identity_shuffle() const { return sensitivity == 0.0 || std::isinf(theta); }
};

// Plan over a caller-chosen reference permutation; theta = alpha / Delta.
inline ShufflePlan plan_with_reference(GroupAssignment g, Permutation sigma0, double alpha,
                                       RankDistance rd = RankDistance::kKendallTau) {
  if (std::isnan(alpha) || alpha < 0) throw InvalidArgument("alpha must be >= 0");
  require_same_size(sigma0.size(), g.size(), "plan");
  ShufflePlan plan;
  plan.width = width(sigma0, g);
  plan.sensitivity = sensitivity(sigma0, g, rd);
  plan.theta = plan.sensitivity > 0 ? alpha / plan.sensitivity
                                    : std::numeric_limits<double>::infinity();
  plan.alpha = alpha;
  plan.rank_distance = rd;
  plan.assignment = std::move(g);
  plan.sigma0 = std::move(sigma0);
  return plan;
}

// Steps 2-6 of the mechanism for an existing assignment.
inline ShufflePlan make_plan(GroupAssignment g, double alpha,
                             RankDistance rd = RankDistance::kKendallTau) {
  validate(g);
  Permutation sigma0 = bfs_reference(g.groups, select_root(g));
  return plan_with_reference(std::move(g), std::move(sigma0), alpha, rd);
}

inline ShufflePlan make_plan(const AuxInfo& aux, double r, double alpha, Metric metric,
                             RankDistance rd = RankDistance::kKendallTau,
                             unsigned threads = 1) {
  if (std::isnan(alpha) || alpha < 0) throw InvalidArgument("alpha must be >= 0");
  return make_plan(compute_groups(aux, r, metric, threads), alpha, rd);
}

// alpha' = alpha * Delta(sigma0, g2) / Delta(sigma0, plan groups).
inline double transferred_alpha(const ShufflePlan& plan, const GroupAssignment& g2) {
  if (plan.sensitivity <= 0)
    throw InvalidArgument("transferred_alpha: base sensitivity is zero");
  return plan.alpha * sensitivity(plan.sigma0, g2, plan.rank_distance) / plan.sensitivity;
}

}  // namespace dsigma

#endif  // DSIGMA_GROUPS_HPP_
