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

// k-ary randomized response, the local randomizer that produces y from x.

#ifndef DSIGMA_LDP_HPP_
#define DSIGMA_LDP_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dsigma/errors.hpp"
#include "dsigma/seeding.hpp"

namespace dsigma {

using Category = std::uint32_t;

struct RandomizerConfig {
  double epsilon = 1.0;
  std::uint32_t domain_size = 2;  // k
};

inline void validate(const RandomizerConfig& cfg) {
  if (!std::isfinite(cfg.epsilon) || cfg.epsilon < 0)
    throw InvalidArgument("epsilon must be finite and non-negative");
  if (cfg.domain_size < 2) throw InvalidArgument("domain size k must be >= 2");
}

// log P[output == input] = eps - log(e^eps + k - 1)
inline double log_keep_probability(const RandomizerConfig& cfg) {
  return cfg.epsilon - std::log(std::exp(cfg.epsilon) + (cfg.domain_size - 1.0));
}

// log P[output == c] for each c != input = -log(e^eps + k - 1)
inline double log_flip_probability(const RandomizerConfig& cfg) {
  return -std::log(std::exp(cfg.epsilon) + (cfg.domain_size - 1.0));
}

inline double keep_probability(const RandomizerConfig& cfg) {
  return std::exp(log_keep_probability(cfg));
}

inline Category randomize(const RandomizerConfig& cfg, Category x, Rng& rng) {
  validate(cfg);
  if (x >= cfg.domain_size)
    throw InvalidArgument("category " + std::to_string(x) + " outside domain of size " +
                          std::to_string(cfg.domain_size));
  if (uniform01(rng) < keep_probability(cfg)) return x;
  auto other = static_cast<Category>(uniform_below(rng, cfg.domain_size - 1));
  return other >= x ? other + 1 : other;
}

// Record i uses its own stream derive_seed(seed, "ldp", i), so batches can be
// split across workers without changing the output.
inline std::vector<Category> randomize_all(const RandomizerConfig& cfg,
                                           std::span<const Category> xs, std::uint64_t seed) {
  validate(cfg);
  std::vector<Category> ys(xs.size());
  const std::uint64_t base = derive_seed(seed, "ldp");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Rng rng(splitmix64(base + i));
    ys[i] = randomize(cfg, xs[i], rng);
  }
  return ys;
}

// log P[out | in] as a k x k matrix.
inline std::vector<std::vector<double>> log_channel_matrix(const RandomizerConfig& cfg) {
  validate(cfg);
  const double keep = log_keep_probability(cfg);
  const double flip = log_flip_probability(cfg);
  std::vector<std::vector<double>> m(cfg.domain_size,
                                     std::vector<double>(cfg.domain_size, flip));
  for (std::uint32_t c = 0; c < cfg.domain_size; ++c) m[c][c] = keep;
  return m;
}

// max over (x, x', out) of log(P[out|x] / P[out|x']). Equals epsilon.
inline double ldp_ratio_audit(const RandomizerConfig& cfg) {
  const auto m = log_channel_matrix(cfg);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < m.size(); ++x)
    for (std::size_t x2 = 0; x2 < m.size(); ++x2)
      for (std::size_t out = 0; out < m.size(); ++out)
        worst = std::max(worst, m[x][out] - m[x2][out]);
  return worst;
}

// Unbiased frequency estimate from randomized counts: standard RR inversion
// (f - q) / (p - q), clipped at zero and renormalized.
inline std::vector<double> debias_frequencies(std::span<const double> observed,
                                              const RandomizerConfig& cfg) {
  validate(cfg);
  if (observed.size() != cfg.domain_size)
    throw DimensionError("debias_frequencies: histogram size != k");
  double total = 0.0;
  for (double c : observed) total += c;
  std::vector<double> est(cfg.domain_size, 0.0);
  if (total <= 0) return est;
  const double p = keep_probability(cfg);
  const double q = (1.0 - p) / (cfg.domain_size - 1.0);
  double sum = 0.0;
  for (std::size_t c = 0; c < est.size(); ++c) {
    est[c] = std::max(0.0, (observed[c] / total - q) / (p - q));
    sum += est[c];
  }
  if (sum > 0) {
    for (double& e : est) e /= sum;
  } else {
    std::fill(est.begin(), est.end(), 1.0 / est.size());
  }
  return est;
}

}  // namespace dsigma

#endif  // DSIGMA_LDP_HPP_
