#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wtl/errors.hpp"
#include "wtl/markov.hpp"
#include "wtl/rational.hpp"
#include "wtl/sparse_matrix.hpp"

// Type-C particle states on the 2n-site cycle.
//
// A state is a word over {0, +-1, ..., +-K}: entry j describes column j (1-based in prose,
// 0-based in code). +c is a class-c particle in the upper row, -c one in the lower row, 0 an
// empty column. Particles flow counter-clockwise: right to left along the upper row, down the
// left edge, left to right along the lower row and up the right edge.
namespace wtl::typec {

using Subset = std::vector<int>;  // sorted, 1-based labels

inline Subset normalize_subset(Subset s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline bool contains(const Subset& s, int x) { return std::binary_search(s.begin(), s.end(), x); }

inline std::string format_subset(const Subset& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

// Every subset of {1..n}, in increasing bitmask order.
inline std::vector<Subset> all_subsets(int n) {
  std::vector<Subset> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    Subset s;
    for (int j = 1; j <= n; ++j)
      if (mask & (1u << (j - 1))) s.push_back(j);
    out.push_back(std::move(s));
  }
  return out;
}

struct TypeCWord {
  std::vector<int> entries;

  std::size_t size() const { return entries.size(); }
  int operator[](std::size_t i) const { return entries[i]; }

  int classes() const {
    int k = 0;
    for (int e : entries) k = std::max(k, std::abs(e));
    return k;
  }

  friend auto operator<=>(const TypeCWord&, const TypeCWord&) = default;
};

// "-1,1,2,4,-2,-3,3,0,-5,1"
inline TypeCWord parse_word(std::string_view text) {
  TypeCWord w;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      w.entries.push_back(std::stoi(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw ParseError("");
    } catch (const std::exception&) {
      throw ParseError("malformed state entry '" + item + "'");
    }
  }
  if (w.entries.empty()) throw ParseError("empty state");
  return w;
}

inline std::string format_word(const TypeCWord& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) out += (i ? "," : "") + std::to_string(w[i]);
  return out;
}

// Display encoding: empty columns written as K+1, e.g. "-2 -1 3 3".
inline std::string display_word(const TypeCWord& w, int classes) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) out += (i ? " " : "") + std::to_string(w[i] == 0 ? classes + 1 : w[i]);
  return out;
}

// The type m_J: blocks of [n] split at every j not in J, with the block containing n removed
// (its columns left empty) when n is in J.
struct ClassType {
  int n = 0;
  Subset J;
  std::vector<int> multiplicities;  // class c has multiplicities[c-1] particles
  int empties = 0;
  std::vector<int> class_of_label;  // index 1..n; 0 when the label's block was removed

  int classes() const { return static_cast<int>(multiplicities.size()); }
};

inline ClassType class_type(int n, Subset J) {
  if (n < 1) throw DomainError("cycle half-length must be positive");
  J = normalize_subset(std::move(J));
  for (int j : J)
    if (j < 1 || j > n) throw DomainError("J must be a subset of [" + std::to_string(n) + "]");
  ClassType t;
  t.n = n;
  t.J = J;
  t.class_of_label.assign(n + 1, 0);
  int cls = 1;
  int size = 0;
  for (int label = 1; label <= n; ++label) {
    t.class_of_label[label] = cls;
    ++size;
    if (label == n || !contains(J, label)) {
      t.multiplicities.push_back(size);
      size = 0;
      ++cls;
    }
  }
  if (contains(J, n)) {
    const int removed = t.class_of_label[n];
    t.empties = t.multiplicities.back();
    t.multiplicities.pop_back();
    for (int label = 1; label <= n; ++label)
      if (t.class_of_label[label] == removed) t.class_of_label[label] = 0;
  }
  return t;
}

inline bool has_type(const TypeCWord& w, const ClassType& t) {
  if (static_cast<int>(w.size()) != t.n) return false;
  std::vector<int> count(t.classes() + 1, 0);
  for (int e : w.entries) {
    const int c = std::abs(e);
    if (c > t.classes()) return false;
    ++count[c];
  }
  if (count[0] != t.empties) return false;
  for (int c = 1; c <= t.classes(); ++c)
    if (count[c] != t.multiplicities[c - 1]) return false;
  return true;
}

inline constexpr std::size_t kDefaultStateGuard = 1'000'000;

// Display-encoding lexicographic order: signed value, with empty counted as K+1.
inline bool display_less(const TypeCWord& a, const TypeCWord& b, int classes) {
  auto key = [classes](int e) { return e == 0 ? classes + 1 : e; };
  return std::lexicographical_compare(a.entries.begin(), a.entries.end(), b.entries.begin(), b.entries.end(),
                                      [&](int x, int y) { return key(x) < key(y); });
}

inline std::size_t count_states(const ClassType& t) {
  // multinomial(n; m_1, ..., m_K, empties) * 2^(particles)
  long double count = 1;
  int placed = 0;
  auto choose = [](int n, int k) {
    long double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  int particles = 0;
  for (int m : t.multiplicities) {
    placed += m;
    particles += m;
    count *= choose(placed, m);
  }
  placed += t.empties;
  count *= choose(placed, t.empties);
  count *= static_cast<long double>(1ull << particles);
  return static_cast<std::size_t>(count + 0.5L);
}

// Omega_J in display-lexicographic order.
inline std::vector<TypeCWord> enumerate_states(const ClassType& t, std::size_t guard = kDefaultStateGuard) {
  const std::size_t expected = count_states(t);
  if (expected > guard) throw SizeError("state space of size " + std::to_string(expected) + " exceeds guard");
  std::vector<int> base;
  for (int c = 1; c <= t.classes(); ++c) base.insert(base.end(), t.multiplicities[c - 1], c);
  base.insert(base.end(), t.empties, 0);
  std::sort(base.begin(), base.end());
  std::vector<TypeCWord> out;
  out.reserve(expected);
  do {
    std::vector<std::size_t> occupied;
    for (std::size_t i = 0; i < base.size(); ++i)
      if (base[i] != 0) occupied.push_back(i);
    for (unsigned long signs = 0; signs < (1ul << occupied.size()); ++signs) {
      TypeCWord w{base};
      for (std::size_t k = 0; k < occupied.size(); ++k)
        if (signs & (1ul << k)) w.entries[occupied[k]] = -w.entries[occupied[k]];
      out.push_back(std::move(w));
    }
  } while (std::next_permutation(base.begin(), base.end()));
  const int k = t.classes();
  std::sort(out.begin(), out.end(), [k](const TypeCWord& a, const TypeCWord& b) { return display_less(a, b, k); });
  return out;
}

inline std::vector<TypeCWord> enumerate_states(int n, const Subset& J, std::size_t guard = kDefaultStateGuard) {
  return enumerate_states(class_type(n, J), guard);
}

// Position in the order +1 < +2 < ... < empty < ... < -2 < -1; sigma_i sorts ascending in it.
inline int flow_rank(int e) {
  constexpr int kEmpty = 1 << 20;
  if (e == 0) return kEmpty;
  return e > 0 ? e : 2 * kEmpty + e;
}

// sigma_i for i in [0, n]. i = 0: +c in column 1 drops to the lower row; i = n: -c in
// column n rises to the upper row; otherwise columns i and i+1 are sorted by flow_rank.
inline TypeCWord apply_sigma(TypeCWord u, int i) {
  const int n = static_cast<int>(u.size());
  if (i < 0 || i > n) throw DomainError("sigma index out of range");
  if (i == 0) {
    if (u.entries[0] > 0) u.entries[0] = -u.entries[0];
  } else if (i == n) {
    if (u.entries[n - 1] < 0) u.entries[n - 1] = -u.entries[n - 1];
  } else if (flow_rank(u.entries[i]) < flow_rank(u.entries[i - 1])) {
    std::swap(u.entries[i - 1], u.entries[i]);
  }
  return u;
}

// Rate 1 for the two end bells, 2 for the n-1 paired interior bells; they sum to 2n.
inline Rational rate_of_sigma(int i, int n) {
  if (i < 0 || i > n) throw DomainError("sigma index out of range");
  return (i == 0 || i == n) ? Rational(1) : Rational(2);
}

// A covering pair J < J' = J + {i} of subsets of [n].
struct Link {
  int n;
  int i;
  Subset J;
  Subset Jprime;
};

inline Link make_link(int n, int i, Subset J) {
  J = normalize_subset(std::move(J));
  if (i < 1 || i > n) throw DomainError("link index out of range");
  if (contains(J, i)) throw DomainError("link index already in J");
  Subset Jp = J;
  Jp.push_back(i);
  return Link{n, i, J, normalize_subset(std::move(Jp))};
}

inline std::vector<Link> all_links(int n) {
  std::vector<Link> out;
  for (const auto& J : all_subsets(n))
    for (int i = 1; i <= n; ++i)
      if (!contains(J, i)) out.push_back(make_link(n, i, J));
  return out;
}

// Class relabelling of phi_i: class c of m_J goes to the class of m_J' holding the same labels
// (0 when those labels were removed).
inline std::vector<int> projection_class_map(const Link& link) {
  const auto from = class_type(link.n, link.J);
  const auto to = class_type(link.n, link.Jprime);
  std::vector<int> map(from.classes() + 1, 0);
  for (int label = 1; label <= link.n; ++label) {
    const int c = from.class_of_label[label];
    if (c != 0) map[c] = to.class_of_label[label];
  }
  return map;
}

inline TypeCWord project(const TypeCWord& u, const Link& link) {
  const auto map = projection_class_map(link);
  TypeCWord out = u;
  for (auto& e : out.entries) {
    const int c = std::abs(e);
    if (c >= static_cast<int>(map.size())) throw DomainError("word does not have type m_J");
    e = e > 0 ? map[c] : -map[c];
  }
  return out;
}

// Ordered state space with index lookup.
class StateSpace {
 public:
  StateSpace() = default;
  explicit StateSpace(std::vector<TypeCWord> states) : states_(std::move(states)) {
    for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i], i);
  }

  std::size_t size() const { return states_.size(); }
  const TypeCWord& operator[](std::size_t i) const { return states_[i]; }
  const std::vector<TypeCWord>& states() const { return states_; }

  std::size_t index_of(const TypeCWord& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) throw InvariantViolation("state " + format_word(w) + " is not in the state space");
    return it->second;
  }

  bool contains(const TypeCWord& w) const { return index_.contains(w); }

 private:
  std::vector<TypeCWord> states_;
  std::map<TypeCWord, std::size_t> index_;
};

inline StateSpace state_space(int n, const Subset& J, std::size_t guard = kDefaultStateGuard) {
  return StateSpace(enumerate_states(n, J, guard));
}

// M_J(v, u) = sum of rate_of_sigma(i) over i with sigma_i(u) = v, self-loops included.
inline SparseRationalMatrix build_transition_matrix(const StateSpace& omega, int n) {
  SparseRationalMatrix m(omega.size(), omega.size());
  for (std::size_t u = 0; u < omega.size(); ++u)
    for (int i = 0; i <= n; ++i) m.add(omega.index_of(apply_sigma(omega[u], i)), u, rate_of_sigma(i, n));
  return m;
}

inline SparseRationalMatrix build_transition_matrix(int n, const Subset& J, std::size_t guard = kDefaultStateGuard) {
  return build_transition_matrix(state_space(n, J, guard), n);
}

// D_{i,J}: Omega_J' x Omega_J, D(v, u) = 1 iff v = phi_i(u).
inline SparseRationalMatrix projection_matrix(const Link& link, const StateSpace& omega_j, const StateSpace& omega_jp) {
  std::vector<std::size_t> image(omega_j.size());
  for (std::size_t u = 0; u < omega_j.size(); ++u) image[u] = omega_jp.index_of(project(omega_j[u], link));
  return markov::projection_matrix(image, omega_jp.size());
}

}  // namespace wtl::typec
