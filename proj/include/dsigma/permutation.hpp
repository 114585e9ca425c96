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

// Permutations of [0, n) and the two rank distances used by the mechanism.
//
// A Permutation stores its one-line form: mapping()[k] is the item placed at
// position k. Text I/O uses 1-based indices; storage is 0-based.

#ifndef DSIGMA_PERMUTATION_HPP_
#define DSIGMA_PERMUTATION_HPP_

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dsigma/errors.hpp"

namespace dsigma {

using Index = std::uint32_t;

class Permutation {
 public:
  Permutation() = default;

  // Validates that `mapping` is a bijection on [0, mapping.size()).
  explicit Permutation(std::vector<Index> mapping) : map_(std::move(mapping)) {
    std::vector<bool> seen(map_.size(), false);
    for (Index v : map_) {
      if (v >= map_.size() || seen[v]) {
        throw InvalidArgument("not a permutation: value " + std::to_string(v) +
                              " repeated or out of range for n=" +
                              std::to_string(map_.size()));
      }
      seen[v] = true;
    }
  }

  static Permutation identity(std::size_t n) {
    if (n == 0) throw InvalidArgument("identity: n must be positive");
    std::vector<Index> m(n);
    std::iota(m.begin(), m.end(), Index{0});
    return Permutation(std::move(m), Unchecked{});
  }

  // Builds from 1-based one-line notation, e.g. {1, 3, 5, 4, 2}.
  static Permutation from_one_based(std::span<const Index> one_based) {
    std::vector<Index> m(one_based.size());
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (one_based[k] == 0) throw InvalidArgument("1-based index 0");
      m[k] = one_based[k] - 1;
    }
    return Permutation(std::move(m));
  }
  static Permutation from_one_based(std::initializer_list<Index> one_based) {
    return from_one_based(std::span<const Index>(one_based.begin(), one_based.size()));
  }

  std::size_t size() const noexcept { return map_.size(); }
  Index operator[](std::size_t k) const { return map_[k]; }
  const std::vector<Index>& mapping() const noexcept { return map_; }

  std::vector<Index> one_based() const {
    std::vector<Index> out(map_.size());
    std::transform(map_.begin(), map_.end(), out.begin(),
                   [](Index v) { return v + 1; });
    return out;
  }

  bool is_identity() const noexcept {
    for (std::size_t k = 0; k < map_.size(); ++k)
      if (map_[k] != k) return false;
    return true;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  struct Unchecked {};
  Permutation(std::vector<Index> m, Unchecked) : map_(std::move(m)) {}
  friend Permutation inverse(const Permutation&);
  friend Permutation compose(const Permutation&, const Permutation&);
  friend Permutation unrank_permutation(std::size_t, std::uint64_t);

  std::vector<Index> map_;
};

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": size mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

// result[k] = x[sigma[k]]
template <typename T>
std::vector<T> apply(const Permutation& sigma, std::span<const T> x) {
  require_same_size(sigma.size(), x.size(), "apply");
  std::vector<T> out;
  out.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out.push_back(x[sigma[k]]);
  return out;
}

template <typename T>
std::vector<T> apply(const Permutation& sigma, const std::vector<T>& x) {
  return dsigma::apply(sigma, std::span<const T>(x));
}

inline Permutation inverse(const Permutation& sigma) {
  std::vector<Index> inv(sigma.size());
  for (std::size_t k = 0; k < sigma.size(); ++k) inv[sigma[k]] = static_cast<Index>(k);
  return Permutation(std::move(inv), Permutation::Unchecked{});
}

// "a then b": compose(a, b)[k] = b[a[k]], hence
// apply(compose(a, b), x) == apply(a, apply(b, x)).
// The mechanism's shuffle sigma* = sigma0^{-1} sigma_hat is
// compose(inverse(sigma0), sigma_hat).
inline Permutation compose(const Permutation& a, const Permutation& b) {
  require_same_size(a.size(), b.size(), "compose");
  std::vector<Index> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = b[a[k]];
  return Permutation(std::move(out), Permutation::Unchecked{});
}

namespace detail {

// Fenwick tree over counts; supports prefix sums and k-th one lookup.
class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}

  void add(std::size_t i, std::int64_t delta) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }
  // Sum over [0, i).
  std::int64_t prefix(std::size_t i) const {
    std::int64_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }
  // Smallest index p with prefix(p + 1) >= k (k is 1-based, counts >= 0).
  std::size_t find_kth(std::int64_t k) const {
    std::size_t pos = 0;
    std::size_t step = 1;
    while (step * 2 < tree_.size()) step *= 2;
    for (; step > 0; step /= 2) {
      if (pos + step < tree_.size() && tree_[pos + step] < k) {
        pos += step;
        k -= tree_[pos];
      }
    }
    return pos;
  }

 private:
  std::vector<std::int64_t> tree_;
};

// Number of pairs k < l with seq[k] > seq[l]; seq is a permutation of [0, n).
inline std::uint64_t count_inversions(std::span<const Index> seq) {
  Fenwick seen(seq.size());
  std::uint64_t inv = 0;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    inv += k - static_cast<std::uint64_t>(seen.prefix(seq[k] + 1));
    seen.add(seq[k], 1);
  }
  return inv;
}

}  // namespace detail

// Kendall's tau distance: the number of item pairs ordered one way in sigma
// and the other way in pi. O(n log n).
//
// This counts disagreements between the orderings of items (equivalently the
// positional formula applied to the inverses). It is invariant under
// relabeling items on the left, d(c o a, c o b) == d(a, b), which is the
// property that makes the Mallows shuffle around sigma0 respect group widths.
inline std::uint64_t kendall_tau(const Permutation& sigma, const Permutation& pi) {
  require_same_size(sigma.size(), pi.size(), "kendall_tau");
  const Permutation pos_pi = inverse(pi);
  std::vector<Index> seq(sigma.size());
  for (std::size_t k = 0; k < sigma.size(); ++k) seq[k] = pos_pi[sigma[k]];
  return detail::count_inversions(seq);
}

inline std::uint64_t hamming(const Permutation& sigma, const Permutation& pi) {
  require_same_size(sigma.size(), pi.size(), "hamming");
  std::uint64_t d = 0;
  for (std::size_t k = 0; k < sigma.size(); ++k) d += sigma[k] != pi[k];
  return d;
}

enum class RankDistance { kKendallTau, kHamming };

inline std::string_view to_string(RankDistance rd) {
  return rd == RankDistance::kKendallTau ? "kendall" : "hamming";
}

inline RankDistance parse_rank_distance(std::string_view s) {
  if (s == "kendall" || s == "kendall_tau") return RankDistance::kKendallTau;
  if (s == "hamming") return RankDistance::kHamming;
  throw InvalidArgument("unknown rank distance: " + std::string(s));
}

inline std::uint64_t rank_distance(RankDistance rd, const Permutation& a,
                                   const Permutation& b) {
  return rd == RankDistance::kKendallTau ? kendall_tau(a, b) : hamming(a, b);
}

inline constexpr std::size_t kMaxEnumerationSize = 10;

inline std::uint64_t factorial(std::size_t n) {
  if (n > 20) throw ScaleError("factorial overflows 64 bits for n > 20");
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

// Calls fn(perm) for each of the n! permutations, in lexicographic order.
inline void for_each_permutation(std::size_t n,
                                 const std::function<void(const Permutation&)>& fn) {
  if (n == 0) throw InvalidArgument("enumerate_permutations: n must be positive");
  if (n > kMaxEnumerationSize) {
    throw ScaleError("enumerate_permutations: n=" + std::to_string(n) +
                     " exceeds the enumeration bound of " +
                     std::to_string(kMaxEnumerationSize));
  }
  std::vector<Index> m(n);
  std::iota(m.begin(), m.end(), Index{0});
  do {
    fn(Permutation(m));
  } while (std::next_permutation(m.begin(), m.end()));
}

inline std::vector<Permutation> enumerate_permutations(std::size_t n) {
  std::vector<Permutation> out;
  for_each_permutation(n, [&](const Permutation& p) { out.push_back(p); });
  return out;
}

// Lexicographic rank in [0, n!). Matches the for_each_permutation order.
inline std::uint64_t rank_permutation(const Permutation& p) {
  const std::size_t n = p.size();
  detail::Fenwick remaining(n);
  for (std::size_t i = 0; i < n; ++i) remaining.add(i, 1);
  std::uint64_t r = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto smaller = static_cast<std::uint64_t>(remaining.prefix(p[k]));
    r += smaller * factorial(n - 1 - k);
    remaining.add(p[k], -1);
  }
  return r;
}

inline Permutation unrank_permutation(std::size_t n, std::uint64_t r) {
  std::vector<Index> pool(n);
  std::iota(pool.begin(), pool.end(), Index{0});
  std::vector<Index> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t f = factorial(n - 1 - k);
    const auto pick = static_cast<std::size_t>(r / f);
    r %= f;
    out.push_back(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return Permutation(std::move(out), Permutation::Unchecked{});
}

// Whitespace-separated 1-based indices on one line.
inline std::string to_string(const Permutation& p) {
  std::string s;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k) s += ' ';
    s += std::to_string(p[k] + 1);
  }
  return s;
}

inline Permutation parse_permutation(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::vector<Index> one_based;
  long long v;
  while (in >> v) {
    if (v <= 0) throw InvalidArgument("permutation indices are 1-based");
    one_based.push_back(static_cast<Index>(v));
  }
  if (!in.eof()) throw InvalidArgument("permutation: non-numeric token");
  if (one_based.empty()) throw InvalidArgument("permutation: empty line");
  return Permutation::from_one_based(one_based);
}

}  // namespace dsigma

#endif  // DSIGMA_PERMUTATION_HPP_
