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

// Exhaustive small-n audits: the d_sigma ratio over neighboring
// permutations, the informed-adversary likelihood gap, sequential
// composition, and the unshuffled randomized-response channel.

#ifndef DSIGMA_AUDIT_HPP_
#define DSIGMA_AUDIT_HPP_

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dsigma/errors.hpp"
#include "dsigma/groups.hpp"
#include "dsigma/ldp.hpp"
#include "dsigma/mallows.hpp"
#include "dsigma/mechanism.hpp"
#include "dsigma/permutation.hpp"

namespace dsigma {

inline constexpr std::size_t kMaxAuditN = 6;
inline constexpr std::size_t kMaxSemanticAuditN = 5;
inline constexpr double kAuditTolerance = 1e-9;

struct AuditReport {
  std::size_t n = 0;
  double alpha_claimed = 0.0;
  double max_log_ratio_observed = 0.0;
  // (sigma, sigma', z): the two neighboring input orderings and the output
  // ordering attaining the maximum.
  Permutation witness_sigma;
  Permutation witness_sigma_prime;
  Permutation witness_z;
  std::uint64_t neighbor_pairs_checked = 0;
  bool pass = false;
};

namespace detail {

inline void audit_scale_guard(std::size_t n, std::size_t limit, const char* what) {
  if (n == 0) throw InvalidArgument(std::string(what) + ": n must be positive");
  if (n > limit) {
    throw ScaleError(std::string(what) + " supports n <= " + std::to_string(limit) +
                     ", got n=" + std::to_string(n));
  }
}

// log a - log b with the conventions needed for distributions with
// unreachable outcomes. Both unreachable: nullopt (no constraint).
inline std::optional<double> log_ratio(double la, double lb) {
  const double ninf = -std::numeric_limits<double>::infinity();
  if (la == ninf && lb == ninf) return std::nullopt;
  if (lb == ninf) return std::numeric_limits<double>::infinity();
  if (la == ninf) return -std::numeric_limits<double>::infinity();
  return la - lb;
}

inline double log_sum_exp(const std::vector<double>& xs) {
  const double ninf = -std::numeric_limits<double>::infinity();
  double m = ninf;
  for (double x : xs) m = std::max(m, x);
  if (m == ninf) return ninf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// Distinct multi-member groups, each as a sorted position list.
inline std::vector<std::vector<Index>> distinct_groups(const GroupAssignment& g) {
  std::set<std::vector<Index>> s;
  for (const auto& grp : g.groups)
    if (grp.size() > 1) s.insert(grp);
  return {s.begin(), s.end()};
}

// Ranks of all sigma' neighboring sigma (including sigma itself).
inline std::vector<std::uint64_t> neighbor_ranks(const Permutation& sigma,
                                                 const std::vector<std::vector<Index>>& groups) {
  std::set<std::uint64_t> out{rank_permutation(sigma)};
  const std::size_t n = sigma.size();
  for (const auto& grp : groups) {
    std::vector<Index> image = grp;
    do {
      std::vector<Index> moved(n);
      for (std::size_t k = 0; k < n; ++k) moved[k] = sigma[k];
      for (std::size_t m = 0; m < grp.size(); ++m) moved[grp[m]] = sigma[image[m]];
      out.insert(rank_permutation(Permutation(std::move(moved))));
    } while (std::next_permutation(image.begin(), image.end()));
  }
  return {out.begin(), out.end()};
}

}  // namespace detail

// Calls fn(sigma, sigma') for every ordered pair that agrees at all
// positions outside some group, each pair exactly once. Includes (s, s).
inline void for_each_neighbor_pair(
    const GroupAssignment& g,
    const std::function<void(const Permutation&, const Permutation&)>& fn) {
  validate(g);
  const std::size_t n = g.size();
  detail::audit_scale_guard(n, kMaxAuditN, "neighboring_pairs");
  const auto groups = detail::distinct_groups(g);
  const auto perms = enumerate_permutations(n);
  for (const auto& sigma : perms)
    for (std::uint64_t r : detail::neighbor_ranks(sigma, groups)) fn(sigma, perms[r]);
}

inline std::vector<std::pair<Permutation, Permutation>> neighboring_pairs(
    const GroupAssignment& g) {
  std::vector<std::pair<Permutation, Permutation>> out;
  for_each_neighbor_pair(g, [&](const Permutation& a, const Permutation& b) {
    out.emplace_back(a, b);
  });
  return out;
}

// log P(sigma* = s) for every s, indexed by rank_permutation.
inline std::vector<double> sigma_star_log_pmf(const ShufflePlan& plan) {
  const std::size_t n = plan.size();
  detail::audit_scale_guard(n, 8, "sigma_star_log_pmf");
  std::vector<double> out(factorial(n), -std::numeric_limits<double>::infinity());
  if (plan.identity_shuffle()) {
    out[rank_permutation(Permutation::identity(n))] = 0.0;
    return out;
  }
  const MallowsParams params = mallows_params(plan);
  for_each_permutation(n, [&](const Permutation& s) {
    out[rank_permutation(s)] = log_prob(params, compose(plan.sigma0, s));
  });
  return out;
}

// Exact output law for input ordering pi (y carries distinct sentinel
// values, so outputs correspond one-to-one with tau = sigma* o pi).
// Indexed by rank of tau.
inline std::vector<double> mechanism_output_dist(const ShufflePlan& plan,
                                                 const Permutation& input_perm) {
  const std::size_t n = plan.size();
  detail::audit_scale_guard(n, kMaxAuditN, "mechanism_output_dist");
  require_same_size(n, input_perm.size(), "mechanism_output_dist");
  const auto logp = sigma_star_log_pmf(plan);
  std::vector<double> pmf(logp.size(), 0.0);
  for (std::uint64_t r = 0; r < logp.size(); ++r) {
    const Permutation s = unrank_permutation(n, r);
    pmf[rank_permutation(compose(s, input_perm))] += std::exp(logp[r]);
  }
  return pmf;
}

namespace detail {

struct RatioScan {
  double value = -std::numeric_limits<double>::infinity();
  std::uint64_t s_rank = 0;
};

// Over outputs tau, log P(tau | pi) - log P(tau | pi') only depends on
// rho = pi o pi'^{-1}: writing tau = s o pi, the ratio is
// logp[s] - logp[s o rho]. Returns the max over s.
inline RatioScan scan_ratio(const std::vector<double>& logp, const std::vector<Permutation>& perms,
                            const Permutation& rho) {
  RatioScan best;
  for (std::uint64_t r = 0; r < perms.size(); ++r) {
    const auto v = log_ratio(logp[r], logp[rank_permutation(compose(perms[r], rho))]);
    if (v && *v > best.value) {
      best.value = *v;
      best.s_rank = r;
    }
  }
  return best;
}

}  // namespace detail

inline ShufflePlan with_theta(ShufflePlan plan, double theta) {
  if (std::isnan(theta) || theta < 0) throw InvalidArgument("theta must be >= 0");
  plan.theta = theta;
  return plan;
}

// Max over neighboring (sigma, sigma') and single outputs z of
// log P[A(sigma(y)) = z] / P[A(sigma'(y)) = z]. Passes iff the max is at
// most alpha_claimed + 1e-9 (alpha_claimed defaults to plan.alpha).
inline AuditReport audit_dsigma(const ShufflePlan& plan,
                                std::optional<double> alpha_claimed = std::nullopt) {
  const std::size_t n = plan.size();
  detail::audit_scale_guard(n, kMaxAuditN, "audit_dsigma");
  const auto logp = sigma_star_log_pmf(plan);
  const auto perms = enumerate_permutations(n);
  std::map<std::uint64_t, detail::RatioScan> cache;

  AuditReport rep;
  rep.n = n;
  rep.alpha_claimed = alpha_claimed.value_or(plan.alpha);
  rep.max_log_ratio_observed = 0.0;
  rep.witness_sigma = rep.witness_sigma_prime = rep.witness_z = Permutation::identity(n);
  for_each_neighbor_pair(plan.assignment, [&](const Permutation& a, const Permutation& b) {
    ++rep.neighbor_pairs_checked;
    const Permutation rho = compose(a, inverse(b));
    const std::uint64_t key = rank_permutation(rho);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, detail::scan_ratio(logp, perms, rho)).first;
    if (it->second.value > rep.max_log_ratio_observed) {
      rep.max_log_ratio_observed = it->second.value;
      rep.witness_sigma = a;
      rep.witness_sigma_prime = b;
      rep.witness_z = compose(perms[it->second.s_rank], a);
    }
  });
  rep.pass = rep.max_log_ratio_observed <= rep.alpha_claimed + kAuditTolerance;
  return rep;
}

// Same audit after a fixed post-processing map of the released sequence.
// `post` receives the output ordering tau (z = apply(tau, sentinels)) and
// returns an event key; outputs sharing a key are merged.
inline AuditReport audit_postprocessed(
    const ShufflePlan& plan, const std::function<std::vector<long long>(const Permutation&)>& post,
    std::optional<double> alpha_claimed = std::nullopt) {
  const std::size_t n = plan.size();
  detail::audit_scale_guard(n, kMaxAuditN, "audit_postprocessed");
  const auto logp = sigma_star_log_pmf(plan);
  const auto perms = enumerate_permutations(n);

  std::map<std::vector<long long>, std::size_t> key_ids;
  std::vector<std::size_t> key_of(perms.size());
  std::vector<std::uint64_t> representative;
  for (std::size_t r = 0; r < perms.size(); ++r) {
    auto [it, inserted] = key_ids.emplace(post(perms[r]), key_ids.size());
    if (inserted) representative.push_back(r);
    key_of[r] = it->second;
  }
  // Log-probability of every key for every input ordering.
  std::vector<std::vector<double>> law(perms.size());
  for (std::size_t pi = 0; pi < perms.size(); ++pi) {
    std::vector<std::vector<double>> parts(key_ids.size());
    for (std::size_t s = 0; s < perms.size(); ++s)
      parts[key_of[rank_permutation(compose(perms[s], perms[pi]))]].push_back(logp[s]);
    law[pi].resize(key_ids.size());
    for (std::size_t k = 0; k < parts.size(); ++k) law[pi][k] = detail::log_sum_exp(parts[k]);
  }

  AuditReport rep;
  rep.n = n;
  rep.alpha_claimed = alpha_claimed.value_or(plan.alpha);
  rep.witness_sigma = rep.witness_sigma_prime = rep.witness_z = Permutation::identity(n);
  for_each_neighbor_pair(plan.assignment, [&](const Permutation& a, const Permutation& b) {
    ++rep.neighbor_pairs_checked;
    const auto& la = law[rank_permutation(a)];
    const auto& lb = law[rank_permutation(b)];
    for (std::size_t k = 0; k < la.size(); ++k) {
      const auto v = detail::log_ratio(la[k], lb[k]);
      if (v && *v > rep.max_log_ratio_observed) {
        rep.max_log_ratio_observed = *v;
        rep.witness_sigma = a;
        rep.witness_sigma_prime = b;
        rep.witness_z = perms[representative[k]];
      }
    }
  });
  rep.pass = rep.max_log_ratio_observed <= rep.alpha_claimed + kAuditTolerance;
  return rep;
}

// Joint release (A_a(y), A_b(y)) with independent draws. Both plans must
// share one grouping; composing across groupings has no stated bound and is
// refused. The claim is alpha_a + alpha_b.
inline AuditReport audit_composition(const ShufflePlan& plan_a, const ShufflePlan& plan_b) {
  const std::size_t n = plan_a.size();
  detail::audit_scale_guard(n, kMaxSemanticAuditN, "audit_composition");
  require_same_size(n, plan_b.size(), "audit_composition");
  if (plan_a.assignment.groups != plan_b.assignment.groups)
    throw Unsupported("audit_composition requires both plans to use the same grouping");
  const auto la = sigma_star_log_pmf(plan_a);
  const auto lb = sigma_star_log_pmf(plan_b);
  const auto perms = enumerate_permutations(n);
  std::map<std::uint64_t, std::pair<detail::RatioScan, detail::RatioScan>> cache;

  AuditReport rep;
  rep.n = n;
  rep.alpha_claimed = plan_a.alpha + plan_b.alpha;
  rep.witness_sigma = rep.witness_sigma_prime = rep.witness_z = Permutation::identity(n);
  for_each_neighbor_pair(plan_a.assignment, [&](const Permutation& a, const Permutation& b) {
    ++rep.neighbor_pairs_checked;
    const Permutation rho = compose(a, inverse(b));
    const std::uint64_t key = rank_permutation(rho);
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache
               .emplace(key, std::make_pair(detail::scan_ratio(la, perms, rho),
                                            detail::scan_ratio(lb, perms, rho)))
               .first;
    }
    // The product law factorizes, so the joint max is the sum of the
    // per-release maxima for this pair.
    const double joint = it->second.first.value + it->second.second.value;
    if (joint > rep.max_log_ratio_observed) {
      rep.max_log_ratio_observed = joint;
      rep.witness_sigma = a;
      rep.witness_sigma_prime = b;
      rep.witness_z = compose(perms[it->second.first.s_rank], a);
    }
  });
  rep.pass = rep.max_log_ratio_observed <= rep.alpha_claimed + kAuditTolerance;
  return rep;
}

// Brute-force joint audit over output pairs (z_a, z_b); slow, used to check
// the factorized computation above at n <= 4.
inline double composition_joint_max_bruteforce(const ShufflePlan& plan_a,
                                               const ShufflePlan& plan_b) {
  const std::size_t n = plan_a.size();
  detail::audit_scale_guard(n, 4, "composition_joint_max_bruteforce");
  const auto la = sigma_star_log_pmf(plan_a);
  const auto lb = sigma_star_log_pmf(plan_b);
  const auto perms = enumerate_permutations(n);
  double best = 0.0;
  for_each_neighbor_pair(plan_a.assignment, [&](const Permutation& a, const Permutation& b) {
    const Permutation ia = inverse(a), ib = inverse(b);
    for (const auto& ta : perms) {
      for (const auto& tb : perms) {
        const double num = la[rank_permutation(compose(ta, ia))] +
                           lb[rank_permutation(compose(tb, ia))];
        const double den = la[rank_permutation(compose(ta, ib))] +
                           lb[rank_permutation(compose(tb, ib))];
        const auto v = detail::log_ratio(num, den);
        if (v) best = std::max(best, *v);
      }
    }
  });
  return best;
}

// ---- Informed-adversary audit (binary values) ----

// Prior over x in {0,1}^n: entry m is P(x) with x_j = bit j of m.
struct BinaryPrior {
  std::size_t n = 0;
  std::vector<double> pmf;
};

inline void validate(const BinaryPrior& p) {
  if (p.n == 0 || p.n > kMaxSemanticAuditN)
    throw ScaleError("binary prior supports 1 <= n <= " + std::to_string(kMaxSemanticAuditN));
  if (p.pmf.size() != (std::size_t{1} << p.n))
    throw DimensionError("binary prior must have 2^n entries");
  double total = 0.0;
  for (double v : p.pmf) {
    if (!(v >= 0) || !std::isfinite(v)) throw InvalidArgument("prior entries must be >= 0");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw InvalidArgument("prior is not normalized (sum=" + std::to_string(total) + ")");
}

// Independent bits with P(x_j = 1) = p_one[j].
inline BinaryPrior product_prior(const std::vector<double>& p_one) {
  BinaryPrior prior{p_one.size(), std::vector<double>(std::size_t{1} << p_one.size(), 1.0)};
  for (std::size_t m = 0; m < prior.pmf.size(); ++m)
    for (std::size_t j = 0; j < p_one.size(); ++j)
      prior.pmf[m] *= ((m >> j) & 1U) ? p_one[j] : 1.0 - p_one[j];
  return prior;
}

struct SemanticReport {
  double gap = 0.0;  // max |log P(z | x_i=a, K) / P(z | x_i=b, K)|
  std::size_t group_index = 0;
  std::uint32_t z_bits = 0;
  std::uint32_t outside_bits = 0;  // y outside the group at the witness
  std::size_t ones_in_group = 0;   // bag of y values inside the group
  std::uint64_t conditions_checked = 0;
};

// Exact likelihood gap for owner i against an adversary who knows the
// values outside G_i and the unordered values inside G_i. y = x when
// `epsilon` is absent, otherwise y is binary randomized response of x.
inline SemanticReport audit_semantic(const ShufflePlan& plan, const BinaryPrior& prior,
                                     std::size_t i,
                                     std::optional<double> epsilon = std::nullopt) {
  validate(prior);
  const std::size_t n = plan.size();
  detail::audit_scale_guard(n, kMaxSemanticAuditN, "audit_semantic");
  require_same_size(n, prior.n, "audit_semantic");
  if (i >= n) throw InvalidArgument("audit_semantic: owner index out of range");
  const std::size_t states = std::size_t{1} << n;

  // P(x, y) marginalized to P(y, x_i = a).
  std::vector<std::array<double, 2>> joint(states, {0.0, 0.0});
  if (!epsilon) {
    for (std::size_t x = 0; x < states; ++x) joint[x][(x >> i) & 1U] += prior.pmf[x];
  } else {
    const double keep = keep_probability(RandomizerConfig{*epsilon, 2});
    for (std::size_t x = 0; x < states; ++x) {
      for (std::size_t y = 0; y < states; ++y) {
        const auto flips = static_cast<unsigned>(std::popcount(x ^ y));
        const double ch = std::pow(keep, n - flips) * std::pow(1.0 - keep, flips);
        joint[y][(x >> i) & 1U] += prior.pmf[x] * ch;
      }
    }
  }

  // Mechanism channel P_A(z | y) on bit strings.
  const auto logp = sigma_star_log_pmf(plan);
  std::vector<std::vector<double>> channel(states, std::vector<double>(states, 0.0));
  const auto perms = enumerate_permutations(n);
  for (std::size_t r = 0; r < perms.size(); ++r) {
    const double w = std::exp(logp[r]);
    if (w == 0.0) continue;
    for (std::size_t y = 0; y < states; ++y) {
      std::size_t z = 0;
      for (std::size_t k = 0; k < n; ++k) z |= ((y >> perms[r][k]) & 1U) << k;
      channel[y][z] += w;
    }
  }

  std::uint32_t group_mask = 0;
  for (Index j : plan.assignment.groups[i]) group_mask |= 1U << j;

  SemanticReport rep;
  rep.group_index = i;
  const std::uint32_t outside_mask = static_cast<std::uint32_t>(states - 1) & ~group_mask;
  for (std::uint32_t out = 0; out < states; ++out) {
    if (out & group_mask) continue;
    for (std::size_t ones = 0; ones <= plan.assignment.groups[i].size(); ++ones) {
      // Condition K = (y outside, number of ones inside).
      std::array<std::vector<double>, 2> pz = {std::vector<double>(states, 0.0),
                                               std::vector<double>(states, 0.0)};
      std::array<double, 2> mass = {0.0, 0.0};
      for (std::uint32_t y = 0; y < states; ++y) {
        if ((y & outside_mask) != out) continue;
        if (static_cast<std::size_t>(std::popcount(y & group_mask)) != ones) continue;
        for (int a = 0; a < 2; ++a) {
          mass[a] += joint[y][a];
          for (std::size_t z = 0; z < states; ++z) pz[a][z] += joint[y][a] * channel[y][z];
        }
      }
      if (mass[0] <= 0 || mass[1] <= 0) continue;
      ++rep.conditions_checked;
      for (std::size_t z = 0; z < states; ++z) {
        const double p0 = pz[0][z] / mass[0];
        const double p1 = pz[1][z] / mass[1];
        if (p0 == 0 && p1 == 0) continue;
        const double g = (p0 == 0 || p1 == 0) ? std::numeric_limits<double>::infinity()
                                              : std::abs(std::log(p0) - std::log(p1));
        if (g > rep.gap) {
          rep.gap = g;
          rep.z_bits = static_cast<std::uint32_t>(z);
          rep.outside_bits = out;
          rep.ones_in_group = ones;
        }
      }
    }
  }
  return rep;
}

// Max over all owners.
inline SemanticReport audit_semantic_all(const ShufflePlan& plan, const BinaryPrior& prior,
                                         std::optional<double> epsilon = std::nullopt) {
  SemanticReport best;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    SemanticReport r = audit_semantic(plan, prior, i, epsilon);
    if (i == 0 || r.gap > best.gap) {
      const std::uint64_t total = best.conditions_checked + r.conditions_checked;
      best = r;
      best.conditions_checked = total;
    } else {
      best.conditions_checked += r.conditions_checked;
    }
  }
  return best;
}

// ---- Randomized response as a d_sigma mechanism ----

struct LdpGroupAuditReport {
  double max_log_ratio = 0.0;
  double bound = 0.0;  // max group size * epsilon
  bool pass = false;
};

// Unshuffled binary randomized response on every ordering of every binary
// input, compared across neighboring orderings.
inline LdpGroupAuditReport audit_ldp_weak_dsigma(double epsilon, std::uint32_t k,
                                                 const GroupAssignment& g) {
  if (k != 2) throw Unsupported("audit_ldp_weak_dsigma supports binary randomized response");
  validate(g);
  const std::size_t n = g.size();
  detail::audit_scale_guard(n, kMaxSemanticAuditN, "audit_ldp_weak_dsigma");
  const RandomizerConfig cfg{epsilon, k};
  const auto ch = log_channel_matrix(cfg);
  const std::size_t states = std::size_t{1} << n;
  auto log_law = [&](std::uint32_t w, std::uint32_t y) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += ch[(w >> j) & 1U][(y >> j) & 1U];
    return s;
  };

  LdpGroupAuditReport rep;
  std::size_t max_group = 1;
  for (const auto& grp : g.groups) max_group = std::max(max_group, grp.size());
  rep.bound = static_cast<double>(max_group) * epsilon;
  const auto groups = detail::distinct_groups(g);
  for (std::uint32_t w = 0; w < states; ++w) {
    for (const auto& grp : groups) {
      std::vector<Index> image = grp;
      do {
        std::uint32_t w2 = w;
        for (std::size_t m = 0; m < grp.size(); ++m) {
          w2 &= ~(1U << grp[m]);
          w2 |= ((w >> image[m]) & 1U) << grp[m];
        }
        for (std::uint32_t y = 0; y < states; ++y)
          rep.max_log_ratio = std::max(rep.max_log_ratio, log_law(w, y) - log_law(w2, y));
      } while (std::next_permutation(image.begin(), image.end()));
    }
  }
  rep.pass = rep.max_log_ratio <= rep.bound + kAuditTolerance;
  return rep;
}

}  // namespace dsigma

#endif  // DSIGMA_AUDIT_HPP_
