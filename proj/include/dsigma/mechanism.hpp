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

// The shuffling mechanism: sample sigma_hat ~ Mallows(theta, sigma0), set
// sigma* = sigma0^{-1} sigma_hat and release z = apply(sigma*, y).

#ifndef DSIGMA_MECHANISM_HPP_
#define DSIGMA_MECHANISM_HPP_

#include <bit>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "dsigma/errors.hpp"
#include "dsigma/groups.hpp"
#include "dsigma/mallows.hpp"
#include "dsigma/permutation.hpp"
#include "dsigma/seeding.hpp"

namespace dsigma {

template <typename T>
struct ShuffleOutcome {
  std::vector<T> z;
  Permutation sigma_star;
  std::string plan_digest;
  std::uint64_t seed = 0;
};

namespace detail {

class Fnv64 {
 public:
  void bytes(const void* p, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h_ ^= b[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      const auto byte = static_cast<unsigned char>(v >> (8 * i));
      bytes(&byte, 1);
    }
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace detail

// 16 hex digits identifying every field that influences the mechanism's law.
inline std::string plan_digest(const ShufflePlan& plan) {
  detail::Fnv64 h;
  h.u64(plan.size());
  for (const auto& g : plan.assignment.groups) {
    h.u64(g.size());
    for (Index j : g) h.u64(j);
  }
  for (Index v : plan.sigma0.mapping()) h.u64(v);
  h.u64(plan.width);
  h.f64(plan.sensitivity);
  h.f64(plan.theta);
  h.f64(plan.alpha);
  h.u64(static_cast<std::uint64_t>(plan.rank_distance));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h.value()));
  return buf;
}

inline MallowsParams mallows_params(const ShufflePlan& plan) {
  return MallowsParams{plan.theta, plan.sigma0, plan.rank_distance};
}

// sigma* = sigma0^{-1} sigma_hat, i.e. sigma*(sigma0(k)) = sigma_hat(k): the
// owner at reference slot k receives the value of the owner sampled there.
inline Permutation sigma_star_from_draw(const ShufflePlan& plan, const Permutation& sigma_hat) {
  require_same_size(plan.size(), sigma_hat.size(), "sigma_star_from_draw");
  return compose(inverse(plan.sigma0), sigma_hat);
}

// Draws sigma* for a plan. Depends only on (plan, seed), never on the data.
inline Permutation draw_sigma_star(const ShufflePlan& plan, std::uint64_t seed) {
  if (plan.identity_shuffle()) return Permutation::identity(plan.size());
  if (plan.rank_distance != RankDistance::kKendallTau)
    throw Unsupported("shuffle requires a Kendall's tau plan (or an identity plan)");
  Rng rng = make_rng(seed, "mechanism");
  return sigma_star_from_draw(plan, sample(mallows_params(plan), rng));
}

template <typename T>
ShuffleOutcome<T> shuffle_with_fixed_draw(const ShufflePlan& plan, std::span<const T> y,
                                          const Permutation& sigma_hat,
                                          std::uint64_t seed = 0) {
  require_same_size(plan.size(), y.size(), "shuffle");
  ShuffleOutcome<T> out;
  out.sigma_star = sigma_star_from_draw(plan, sigma_hat);
  out.z = dsigma::apply(out.sigma_star, y);
  out.plan_digest = plan_digest(plan);
  out.seed = seed;
  return out;
}

template <typename T>
ShuffleOutcome<T> shuffle_with_fixed_draw(const ShufflePlan& plan, const std::vector<T>& y,
                                          const Permutation& sigma_hat,
                                          std::uint64_t seed = 0) {
  return shuffle_with_fixed_draw(plan, std::span<const T>(y), sigma_hat, seed);
}

template <typename T>
ShuffleOutcome<T> shuffle(const ShufflePlan& plan, std::span<const T> y, std::uint64_t seed) {
  require_same_size(plan.size(), y.size(), "shuffle");
  ShuffleOutcome<T> out;
  out.sigma_star = draw_sigma_star(plan, seed);
  out.z = dsigma::apply(out.sigma_star, y);
  out.plan_digest = plan_digest(plan);
  out.seed = seed;
  return out;
}

template <typename T>
ShuffleOutcome<T> shuffle(const ShufflePlan& plan, const std::vector<T>& y, std::uint64_t seed) {
  return shuffle(plan, std::span<const T>(y), seed);
}

// Exact law of sigma* over S_n (indexed by rank_permutation), n <= 8:
// P(sigma* = s) = Mallows(sigma_hat = sigma0 s).
inline std::vector<double> sigma_star_pmf(const ShufflePlan& plan) {
  const std::size_t n = plan.size();
  if (n > 8) throw ScaleError("sigma_star_pmf supports n <= 8");
  if (plan.identity_shuffle()) {
    std::vector<double> pmf(factorial(n), 0.0);
    pmf[rank_permutation(Permutation::identity(n))] = 1.0;
    return pmf;
  }
  const auto hat = exact_pmf(mallows_params(plan));
  std::vector<double> pmf(hat.size(), 0.0);
  for (std::uint64_t r = 0; r < hat.size(); ++r) {
    const Permutation sigma_hat = unrank_permutation(n, r);
    pmf[rank_permutation(sigma_star_from_draw(plan, sigma_hat))] += hat[r];
  }
  return pmf;
}

}  // namespace dsigma

#endif  // DSIGMA_MECHANISM_HPP_
