#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wtl/errors.hpp"
#include "wtl/markov.hpp"
#include "wtl/parallel.hpp"
#include "wtl/rational.hpp"
#include "wtl/sparse_matrix.hpp"

// Multi-type TASEP on a ring with letter-dependent rates and the parallel updates sigma_S.
namespace wtl::ktasep {

using RingWord = std::vector<int>;
using LetterRates = std::vector<Rational>;  // x[letter - 1]

inline RingWord parse_ring_word(std::string_view text) {
  RingWord w;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (item.find_first_not_of(" \t", used) != std::string::npos || v < 1) throw ParseError("");
      w.push_back(v);
    } catch (const std::exception&) {
      throw ParseError("ring words are comma-separated positive integers, got '" + item + "'");
    }
  }
  if (w.size() < 2) throw DomainError("ring words need length at least 2");
  return w;
}

inline std::string format_ring_word(const RingWord& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
  return s;
}

inline int max_letter(const RingWord& w) { return *std::max_element(w.begin(), w.end()); }

inline LetterRates unit_rates(int letters) { return LetterRates(letters, Rational(1)); }

// sigma_i, i in [1, n]: sort the cyclic pair (w_{i-1}, w_i) so that w_{i-1} <= w_i.
inline RingWord ring_sigma(RingWord w, int i) {
  const int n = static_cast<int>(w.size());
  if (i < 1 || i > n) throw DomainError("ring sigma index out of range");
  const int cur = i - 1;
  const int prev = (i - 2 + n) % n;
  if (w[cur] < w[prev]) std::swap(w[cur], w[prev]);
  return w;
}

// Bit i-1 of mask stands for i in S.
using UpdateSet = unsigned;

inline bool in_set(UpdateSet s, int i) { return (s >> (i - 1)) & 1u; }

inline UpdateSet parse_update_set(int n, const std::vector<int>& elems) {
  UpdateSet s = 0;
  for (int i : elems) {
    if (i < 1 || i > n) throw DomainError("update set element out of range");
    s |= 1u << (i - 1);
  }
  return s;
}

inline void check_proper(int n, UpdateSet s) {
  if (s == 0 || s == (1u << n) - 1) throw DomainError("update set must be a proper nonempty subset of [n]");
}

// The order in which sigma_S applies its bells: starting after a gap g (default the smallest
// index not in S), visit g+1, ..., g+n cyclically, so sigma_{j-1} acts before sigma_j.
inline std::vector<int> update_order(int n, UpdateSet s, std::optional<int> gap = std::nullopt) {
  int g = 0;
  if (gap) {
    g = *gap;
    if (g < 1 || g > n || in_set(s, g)) throw DomainError("gap must be an index outside S");
  } else {
    for (g = 1; g <= n && in_set(s, g); ++g) {
    }
    if (g > n) throw DomainError("update set has no gap");
  }
  std::vector<int> order;
  for (int step = 1; step <= n; ++step) {
    const int j = (g - 1 + step) % n + 1;
    if (in_set(s, j)) order.push_back(j);
  }
  return order;
}

inline RingWord ring_sigma_set(RingWord w, UpdateSet s, std::optional<int> gap = std::nullopt) {
  const int n = static_cast<int>(w.size());
  check_proper(n, s);
  for (int j : update_order(n, s, gap)) w = ring_sigma(std::move(w), j);
  return w;
}

// prod_{i in S} x_{u_i}, read off the source word.
inline Rational rate_of_update(const RingWord& u, UpdateSet s, const LetterRates& x) {
  Rational r = 1;
  for (int i = 1; i <= static_cast<int>(u.size()); ++i)
    if (in_set(s, i)) {
      if (u[i - 1] > static_cast<int>(x.size())) throw DomainError("no rate for letter " + std::to_string(u[i - 1]));
      r *= x[u[i - 1] - 1];
    }
  return r;
}

// e_k of the values.
inline Rational elementary_symmetric(const std::vector<Rational>& vals, int k) {
  std::vector<Rational> e(k + 1);
  e[0] = 1;
  for (const auto& v : vals)
    for (int j = k; j >= 1; --j) e[j] += e[j - 1] * v;
  return e[k];
}

// All distinct arrangements of a multiset, lexicographically.
inline std::vector<RingWord> arrangements(RingWord multiset) {
  std::sort(multiset.begin(), multiset.end());
  std::vector<RingWord> out;
  do out.push_back(multiset);
  while (std::next_permutation(multiset.begin(), multiset.end()));
  return out;
}

class RingStates {
 public:
  explicit RingStates(const RingWord& multiset) : states_(arrangements(multiset)) {
    for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i], i);
  }
  std::size_t size() const { return states_.size(); }
  const RingWord& operator[](std::size_t i) const { return states_[i]; }
  const std::vector<RingWord>& states() const { return states_; }
  std::size_t index_of(const RingWord& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) throw InvariantViolation("word " + format_ring_word(w) + " is not an arrangement");
    return it->second;
  }
  std::optional<std::size_t> find(const RingWord& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<RingWord> states_;
  std::map<RingWord, std::size_t> index_;
};

inline void check_rates(const RingWord& multiset, const LetterRates& x) {
  if (max_letter(multiset) > static_cast<int>(x.size())) throw DomainError("letter rates do not cover every letter");
  for (const auto& v : x)
    if (v <= 0) throw DomainError("letter rates must be positive");
}

// A_k(target, source) = sum over |S| = k with sigma_S(source) = target of the update rate.
inline SparseRationalMatrix build_Ak(const RingStates& states, int k, const LetterRates& x) {
  const int n = static_cast<int>(states[0].size());
  if (k <= 0 || k >= n) throw DomainError("k must satisfy 0 < k < n");
  check_rates(states[0], x);
  std::vector<std::vector<std::pair<std::size_t, Rational>>> cols(states.size());
  parallel_for(states.size(), [&](std::size_t c) {
    std::map<std::size_t, Rational> acc;
    for (UpdateSet s = 1; s + 1 < (1u << n); ++s) {
      if (std::popcount(s) != k) continue;
      acc[states.index_of(ring_sigma_set(states[c], s))] += rate_of_update(states[c], s, x);
    }
    cols[c].assign(acc.begin(), acc.end());
  });
  SparseRationalMatrix m(states.size(), states.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (auto& [r, v] : cols[c]) m.add(r, c, v);
  return m;
}

inline SparseRationalMatrix build_Ak(const RingWord& multiset, int k, const LetterRates& x) {
  return build_Ak(RingStates(multiset), k, x);
}

struct CommutationReport {
  bool pass = true;
  int k = 0, l = 0;
  std::optional<EntryMismatch> mismatch;
};

inline CommutationReport verify_commutation(const RingWord& multiset, const LetterRates& x, int k, int l) {
  RingStates st(multiset);
  const auto ak = build_Ak(st, k, x);
  const auto al = build_Ak(st, l, x);
  CommutationReport rep{true, k, l, first_difference(ak * al, al * ak)};
  rep.pass = !rep.mismatch;
  return rep;
}

struct StationaryReport {
  bool pass = true;
  int k = 0;  // first k whose law differs from k = 1
  std::vector<Rational> reference;  // probabilities for k = 1
};

inline StationaryReport verify_equal_stationary(const RingWord& multiset, const LetterRates& x) {
  RingStates st(multiset);
  const int n = static_cast<int>(multiset.size());
  StationaryReport rep;
  std::optional<markov::Distribution> first;
  for (int k = 1; k < n; ++k) {
    auto pi = markov::stationary(build_Ak(st, k, x));
    if (!first) {
      first = pi;
      rep.reference = pi.probabilities();
    } else if (!(pi == *first)) {
      rep.pass = false;
      rep.k = k;
      return rep;
    }
  }
  return rep;
}

// Merging letters by a weakly increasing surjection f (f[letter-1] = new letter).
inline RingWord merge_letters(const RingWord& w, const std::vector<int>& f) {
  RingWord out;
  for (int x : w) out.push_back(f.at(x - 1));
  return out;
}

inline SparseRationalMatrix merge_projection(const RingStates& from, const RingStates& to, const std::vector<int>& f) {
  std::vector<std::size_t> image(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) image[i] = to.index_of(merge_letters(from[i], f));
  return markov::projection_matrix(image, to.size());
}

}  // namespace wtl::ktasep
