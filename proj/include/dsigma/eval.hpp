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

// Evaluation harness: the majority-vote inference attack (fraction of
// vulnerable records rho) and local distribution learnability (lambda).

#ifndef DSIGMA_EVAL_HPP_
#define DSIGMA_EVAL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "dsigma/dataset.hpp"
#include "dsigma/errors.hpp"
#include "dsigma/groups.hpp"
#include "dsigma/ldp.hpp"
#include "dsigma/mechanism.hpp"
#include "dsigma/seeding.hpp"

namespace dsigma {

struct AttackConfig {
  std::size_t k_neighbors = 25;
  std::size_t trials = 50;
  double success_threshold = 0.9;
  double epsilon = 2.5;
  double r_star = 0.1;
  Metric metric = Metric::kEuclidean;
  bool use_privileged = true;  // rank candidates by |t_p difference| when present
  unsigned threads = 1;
};

inline void validate(const AttackConfig& c) {
  if (c.k_neighbors < 1) throw InvalidArgument("k_neighbors must be >= 1");
  if (c.trials < 1) throw InvalidArgument("trials must be >= 1");
  if (!(c.success_threshold > 0 && c.success_threshold <= 1))
    throw InvalidArgument("success threshold must lie in (0, 1]");
  if (std::isnan(c.r_star) || c.r_star < 0) throw InvalidArgument("r* must be >= 0");
  validate(RandomizerConfig{c.epsilon, 2});
}

struct AttackReport {
  double rho = 0.0;
  std::vector<double> per_record_success;
  AttackConfig config;
  std::uint64_t seed = 0;
  double tie_rate = 0.0;               // share of votes decided by the tie rule
  std::size_t short_neighborhoods = 0;  // records with fewer than k candidates
  bool degenerate = false;             // every record has the same x
  std::string plan_digest;
};

struct LearnabilityReport {
  double lambda = 0.0;
  std::vector<double> per_point_tv;
  double mean_tv = 0.0;
  double baseline_tv = 0.0;  // mean TV of the uniform guess
  std::size_t skipped = 0;   // points with an empty r*-ball
  std::uint64_t seed = 0;
};

// The r*-ball of each record in the public metric, self included.
inline std::vector<std::vector<Index>> attack_balls(const Dataset& d, double r_star,
                                                    Metric metric, unsigned threads = 1) {
  return compute_groups(d.aux, r_star, metric, threads).groups;
}

namespace detail {

// Runs fn(i) for i in [0, n) on contiguous chunks. The first exception
// raised by any worker is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo < hi)
      pool.emplace_back([&fn, &errors, t, lo, hi] {
        try {
          for (std::size_t i = lo; i < hi; ++i) fn(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline double total_variation(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += std::abs(a[c] - b[c]);
  return 0.5 * s;
}

}  // namespace detail

// The attacker's k voters for each record: r*-ball members other than the
// record itself, closest in t_p first (ties by index), or a seeded random
// subset when t_p is absent or disabled.
inline std::vector<std::vector<Index>> select_voters(const Dataset& d,
                                                     const std::vector<std::vector<Index>>& balls,
                                                     const AttackConfig& cfg, std::uint64_t seed) {
  std::vector<std::vector<Index>> voters(d.size());
  const bool ranked = cfg.use_privileged && d.privileged.has_value();
  detail::parallel_for(d.size(), cfg.threads, [&](std::size_t i) {
    std::vector<Index> cand;
    for (Index j : balls[i])
      if (j != i) cand.push_back(j);
    if (ranked) {
      const auto& tp = *d.privileged;
      std::stable_sort(cand.begin(), cand.end(), [&](Index a, Index b) {
        return std::abs(tp[a] - tp[i]) < std::abs(tp[b] - tp[i]);
      });
    } else {
      Rng rng = make_rng(seed, "attack-voters", i);
      for (std::size_t m = cand.size(); m > 1; --m)
        std::swap(cand[m - 1], cand[uniform_below(rng, m)]);
    }
    if (cand.size() > cfg.k_neighbors) cand.resize(cfg.k_neighbors);
    voters[i] = std::move(cand);
  });
  return voters;
}

// One sigma* per experiment, drawn from (plan, seed) and reused across all
// randomized-response trials. Each trial re-randomizes x, shuffles, and
// predicts every x_i by plurality over its voters' released values; ties go
// to the smaller category. The target's own x is never read when voting.
inline AttackReport run_attack(const Dataset& d, const ShufflePlan& plan, const AttackConfig& cfg,
                               std::uint64_t seed) {
  validate(d);
  validate(cfg);
  require_same_size(d.size(), plan.size(), "run_attack");
  const std::size_t n = d.size();
  const RandomizerConfig rr{cfg.epsilon, d.label_arity};
  const auto balls = attack_balls(d, cfg.r_star, cfg.metric, cfg.threads);
  const auto voters = select_voters(d, balls, cfg, seed);
  const Permutation sigma_star = draw_sigma_star(plan, derive_seed(seed, "attack-shuffle"));

  AttackReport rep;
  rep.config = cfg;
  rep.seed = seed;
  rep.plan_digest = plan_digest(plan);
  rep.degenerate = std::all_of(d.x.begin(), d.x.end(), [&](Category c) { return c == d.x[0]; });
  for (const auto& v : voters)
    if (v.size() < cfg.k_neighbors) ++rep.short_neighborhoods;

  std::vector<std::size_t> hits(n, 0), ties(n, 0);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const auto y = randomize_all(rr, d.x, derive_seed(seed, "attack-ldp", t));
    const auto z = dsigma::apply(sigma_star, y);
    detail::parallel_for(n, cfg.threads, [&](std::size_t i) {
      std::vector<std::uint32_t> votes(rr.domain_size, 0);
      for (Index j : voters[i]) ++votes[z[j]];
      const auto best = std::max_element(votes.begin(), votes.end());
      if (std::count(votes.begin(), votes.end(), *best) > 1) ++ties[i];
      const auto guess = static_cast<Category>(best - votes.begin());
      if (!voters[i].empty() && guess == d.x[i]) ++hits[i];
    });
  }
  rep.per_record_success.resize(n);
  std::size_t vulnerable = 0, tie_total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    rep.per_record_success[i] = static_cast<double>(hits[i]) / static_cast<double>(cfg.trials);
    if (rep.per_record_success[i] >= cfg.success_threshold) ++vulnerable;
    tie_total += ties[i];
  }
  rep.rho = static_cast<double>(vulnerable) / static_cast<double>(n);
  rep.tie_rate = static_cast<double>(tie_total) / static_cast<double>(n * cfg.trials);
  return rep;
}

// ---- Learnability ----

struct EstimatorContext {
  std::span<const Category> z;                    // released sequence
  const std::vector<std::vector<Index>>& balls;   // r*-balls in public space
  RandomizerConfig randomizer;
};

// Predicts the distribution of x around record i's public position from
// the released (t_j, z_j) pairs.
using LocalEstimator = std::function<std::vector<double>(const EstimatorContext&, std::size_t)>;

// Histogram of z over the r*-ball, inverted through the randomizer.
inline LocalEstimator ball_debiased_histogram() {
  return [](const EstimatorContext& ctx, std::size_t i) {
    std::vector<double> h(ctx.randomizer.domain_size, 0.0);
    for (Index j : ctx.balls[i]) h[ctx.z[j]] += 1.0;
    return debias_frequencies(h, ctx.randomizer);
  };
}

// Ignores position: the debiased histogram of the whole release.
inline LocalEstimator global_histogram() {
  return [](const EstimatorContext& ctx, std::size_t) {
    std::vector<double> h(ctx.randomizer.domain_size, 0.0);
    for (Category c : ctx.z) h[c] += 1.0;
    return debias_frequencies(h, ctx.randomizer);
  };
}

// lambda = mean TV(estimate, truth) / mean TV(uniform, truth), where truth
// at t_i is the empirical x distribution of the r*-ball around t_i.
inline LearnabilityReport run_learnability(const Dataset& d, const ShufflePlan& plan, double r_star,
                                           const LocalEstimator& estimator, double epsilon,
                                           std::uint64_t seed, Metric metric = Metric::kEuclidean,
                                           unsigned threads = 1) {
  validate(d);
  require_same_size(d.size(), plan.size(), "run_learnability");
  const std::size_t n = d.size();
  const RandomizerConfig rr{epsilon, d.label_arity};
  validate(rr);
  const auto balls = attack_balls(d, r_star, metric, threads);
  const auto y = randomize_all(rr, d.x, derive_seed(seed, "learn-ldp"));
  const auto z = dsigma::apply(draw_sigma_star(plan, derive_seed(seed, "learn-shuffle")), y);
  const EstimatorContext ctx{z, balls, rr};
  const std::vector<double> uniform(rr.domain_size, 1.0 / rr.domain_size);

  LearnabilityReport rep;
  rep.seed = seed;
  rep.per_point_tv.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> base(n, std::numeric_limits<double>::quiet_NaN());
  detail::parallel_for(n, threads, [&](std::size_t i) {
    if (balls[i].empty()) return;
    std::vector<double> truth(rr.domain_size, 0.0);
    for (Index j : balls[i]) truth[d.x[j]] += 1.0 / static_cast<double>(balls[i].size());
    const auto pred = estimator(ctx, i);
    if (pred.size() != rr.domain_size) throw DimensionError("estimator returned wrong arity");
    rep.per_point_tv[i] = detail::total_variation(pred, truth);
    base[i] = detail::total_variation(uniform, truth);
  });
  double sum = 0.0, sum_base = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(rep.per_point_tv[i])) {
      ++rep.skipped;
      continue;
    }
    sum += rep.per_point_tv[i];
    sum_base += base[i];
    ++used;
  }
  if (used == 0) throw InvalidArgument("run_learnability: every r*-ball is empty");
  rep.mean_tv = sum / static_cast<double>(used);
  rep.baseline_tv = sum_base / static_cast<double>(used);
  rep.lambda = rep.baseline_tv > 0 ? rep.mean_tv / rep.baseline_tv
                                   : std::numeric_limits<double>::infinity();
  return rep;
}

// ---- Sweep ----

struct SweepRow {
  double r = 0.0;
  double alpha = 0.0;
  double rho = 0.0;
  double lambda = 0.0;
  std::size_t omega = 0;
  double delta_sensitivity = 0.0;
  std::uint64_t seed = 0;
};

// One row per (r, alpha). Every cell uses the same seed, so cells differ
// only through the plan.
inline std::vector<SweepRow> sweep(const Dataset& d, const std::vector<double>& alphas,
                                   const std::vector<double>& radii, const AttackConfig& cfg,
                                   std::uint64_t seed, Metric group_metric = Metric::kEuclidean,
                                   const LocalEstimator& estimator = ball_debiased_histogram()) {
  if (alphas.empty() || radii.empty()) throw InvalidArgument("sweep grids must be non-empty");
  std::vector<SweepRow> rows;
  for (double r : radii) {
    GroupAssignment g = compute_groups(d.aux, r, group_metric, cfg.threads);
    for (double a : alphas) {
      const ShufflePlan plan = make_plan(g, a);
      SweepRow row;
      row.r = r;
      row.alpha = a;
      row.omega = plan.width;
      row.delta_sensitivity = plan.sensitivity;
      row.seed = seed;
      row.rho = run_attack(d, plan, cfg, seed).rho;
      row.lambda = run_learnability(d, plan, cfg.r_star, estimator, cfg.epsilon, seed, cfg.metric,
                                    cfg.threads)
                       .lambda;
      rows.push_back(row);
    }
  }
  return rows;
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "r,alpha,rho,lambda,omega,delta_sensitivity,seed\n";
  for (const auto& row : rows) {
    out << format_double(row.r) << ',' << format_double(row.alpha) << ','
        << format_double(row.rho) << ',' << format_double(row.lambda) << ',' << row.omega << ','
        << format_double(row.delta_sensitivity) << ',' << row.seed << '\n';
  }
}

}  // namespace dsigma

#endif  // DSIGMA_EVAL_HPP_
