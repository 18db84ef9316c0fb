#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wtl/errors.hpp"
#include "wtl/rational.hpp"
#include "wtl/sparse_matrix.hpp"

// Finite root systems of types A/B/C/D in their standard orthonormal realizations, their Weyl
// groups as exact matrix groups, and Lam's chain on elements and on parabolic cosets.
namespace wtl::weyl {

enum class Family { A, B, C, D };

inline char family_char(Family f) { return "ABCD"[static_cast<int>(f)]; }

inline Family parse_family(const std::string& s) {
  if (s == "A" || s == "a") return Family::A;
  if (s == "B" || s == "b") return Family::B;
  if (s == "C" || s == "c") return Family::C;
  if (s == "D" || s == "d") return Family::D;
  throw ConfigError("unsupported root system family '" + s + "' (expected A, B, C or D)");
}

struct CartanSpec {
  Family family;
  int rank;
};

inline std::string spec_name(const CartanSpec& s) { return std::string(1, family_char(s.family)) + std::to_string(s.rank); }

using Vec = std::vector<Rational>;

inline Rational dot(const Vec& a, const Vec& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

namespace detail {

inline Vec unit(int dim, int i, long scale = 1) {
  Vec v(dim);
  v[i] = scale;
  return v;
}

inline Vec combo(int dim, int i, long si, int j, long sj) {
  Vec v(dim);
  v[i] += si;
  v[j] += sj;
  return v;
}

// Solves g x = rhs for a small invertible matrix by Gauss-Jordan elimination.
inline Vec solve_dense(std::vector<Vec> g, Vec rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && g[piv][col] == 0) ++piv;
    if (piv == n) throw InvariantViolation("singular Gram matrix");
    std::swap(g[piv], g[col]);
    std::swap(rhs[piv], rhs[col]);
    const Rational inv = 1 / g[col][col];
    for (auto& v : g[col]) v *= inv;
    rhs[col] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || g[r][col] == 0) continue;
      const Rational f = g[r][col];
      for (std::size_t c = 0; c < n; ++c) g[r][c] -= f * g[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  return rhs;
}

}  // namespace detail

struct RootSystem {
  CartanSpec spec;
  int ambient = 0;
  std::vector<Vec> simple_roots;    // alpha_1 .. alpha_n
  std::vector<Vec> positive_roots;  // sorted by height, then lexicographically
  Vec highest_root;                 // alpha_0
  std::vector<int> marks;           // a_1 .. a_n, highest_root = sum a_i alpha_i

  int rank() const { return spec.rank; }

  // (a_0, ..., a_n) with a_0 = 1.
  std::vector<Rational> rates() const {
    std::vector<Rational> r{Rational(1)};
    for (int m : marks) r.emplace_back(m);
    return r;
  }

  // Coordinates of a vector in the simple-root basis (exact; vector must lie in their span).
  Vec simple_coordinates(const Vec& v) const {
    std::vector<Vec> gram(rank(), Vec(rank()));
    Vec rhs(rank());
    for (int i = 0; i < rank(); ++i) {
      for (int j = 0; j < rank(); ++j) gram[i][j] = dot(simple_roots[i], simple_roots[j]);
      rhs[i] = dot(simple_roots[i], v);
    }
    return detail::solve_dense(std::move(gram), std::move(rhs));
  }

  Rational height(const Vec& v) const {
    Rational h = 0;
    for (const auto& c : simple_coordinates(v)) h += c;
    return h;
  }
};

// Matrix of the reflection in the hyperplane orthogonal to alpha.
inline std::vector<Rational> reflection_matrix(const Vec& alpha) {
  const std::size_t n = alpha.size();
  const Rational norm = dot(alpha, alpha);
  std::vector<Rational> m(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m[r * n + c] = (r == c ? Rational(1) : Rational(0)) - 2 * alpha[r] * alpha[c] / norm;
  return m;
}

inline Vec reflect(const Vec& alpha, const Vec& x) {
  const Rational f = 2 * dot(x, alpha) / dot(alpha, alpha);
  Vec out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= f * alpha[i];
  return out;
}

inline RootSystem build_root_system(const CartanSpec& spec) {
  const int n = spec.rank;
  RootSystem rs;
  rs.spec = spec;
  switch (spec.family) {
    case Family::A:
      if (n < 1 || n > 8) throw ConfigError("type A supported for rank 1..8");
      rs.ambient = n + 1;
      for (int i = 0; i < n; ++i) rs.simple_roots.push_back(detail::combo(n + 1, i, 1, i + 1, -1));
      break;
    case Family::B:
    case Family::C:
      if (n < 2 || n > 7) throw ConfigError(std::string("type ") + family_char(spec.family) + " supported for rank 2..7");
      rs.ambient = n;
      for (int i = 0; i + 1 < n; ++i) rs.simple_roots.push_back(detail::combo(n, i, 1, i + 1, -1));
      rs.simple_roots.push_back(detail::unit(n, n - 1, spec.family == Family::B ? 1 : 2));
      break;
    case Family::D:
      if (n < 4 || n > 7) throw ConfigError("type D supported for rank 4..7");
      rs.ambient = n;
      for (int i = 0; i + 1 < n; ++i) rs.simple_roots.push_back(detail::combo(n, i, 1, i + 1, -1));
      rs.simple_roots.push_back(detail::combo(n, n - 2, 1, n - 1, 1));
      break;
  }
  // Every root is a W-image of a simple root: close the simple roots under simple reflections.
  std::set<Vec> roots(rs.simple_roots.begin(), rs.simple_roots.end());
  std::vector<Vec> frontier(rs.simple_roots.begin(), rs.simple_roots.end());
  while (!frontier.empty()) {
    std::vector<Vec> next;
    for (const auto& r : frontier)
      for (const auto& a : rs.simple_roots) {
        Vec img = reflect(a, r);
        if (roots.insert(img).second) next.push_back(std::move(img));
      }
    frontier = std::move(next);
  }
  std::vector<std::pair<Rational, Vec>> positive;
  for (const auto& r : roots) {
    Rational h = rs.height(r);
    if (h > 0) positive.emplace_back(std::move(h), r);
  }
  std::sort(positive.begin(), positive.end());
  for (auto& [h, r] : positive) rs.positive_roots.push_back(r);
  rs.highest_root = rs.positive_roots.back();
  for (const auto& c : rs.simple_coordinates(rs.highest_root)) {
    if (!is_integer(c) || c <= 0) throw InvariantViolation("highest root has a non-positive-integer mark");
    rs.marks.push_back(static_cast<int>(c.get_num().get_si()));
  }
  return rs;
}

// Element of W as an exact square matrix on the ambient space, row-major.
class GroupElement {
 public:
  GroupElement() = default;
  GroupElement(int dim, std::vector<Rational> entries) : dim_(dim), m_(std::move(entries)) {
    if (static_cast<int>(m_.size()) != dim * dim) throw DomainError("group element has wrong size");
  }

  static GroupElement identity(int dim) {
    std::vector<Rational> m(dim * dim);
    for (int i = 0; i < dim; ++i) m[i * dim + i] = 1;
    return {dim, std::move(m)};
  }

  int dim() const { return dim_; }
  const Rational& at(int r, int c) const { return m_[r * dim_ + c]; }
  const std::vector<Rational>& entries() const { return m_; }

  Vec apply(const Vec& x) const {
    Vec y(dim_);
    for (int r = 0; r < dim_; ++r)
      for (int c = 0; c < dim_; ++c)
        if (at(r, c) != 0) y[r] += at(r, c) * x[c];
    return y;
  }

  // Elements are orthogonal, so the inverse is the transpose.
  GroupElement inverse() const {
    std::vector<Rational> t(m_.size());
    for (int r = 0; r < dim_; ++r)
      for (int c = 0; c < dim_; ++c) t[c * dim_ + r] = at(r, c);
    return {dim_, std::move(t)};
  }

  friend GroupElement operator*(const GroupElement& a, const GroupElement& b) {
    std::vector<Rational> m(a.m_.size());
    const int n = a.dim_;
    for (int r = 0; r < n; ++r)
      for (int k = 0; k < n; ++k) {
        if (a.at(r, k) == 0) continue;
        for (int c = 0; c < n; ++c)
          if (b.at(k, c) != 0) m[r * n + c] += a.at(r, k) * b.at(k, c);
      }
    return {n, std::move(m)};
  }

  // Canonical order: lexicographic on row-major entries.
  friend bool operator<(const GroupElement& a, const GroupElement& b) { return a.m_ < b.m_; }
  friend bool operator==(const GroupElement& a, const GroupElement& b) { return a.m_ == b.m_; }

 private:
  int dim_ = 0;
  std::vector<Rational> m_;
};

// t_i; index 0 is the reflection in the highest root.
inline GroupElement reflection(const RootSystem& rs, int i) {
  if (i < 0 || i > rs.rank()) throw DomainError("reflection index out of range");
  const Vec& alpha = i == 0 ? rs.highest_root : rs.simple_roots[i - 1];
  return {rs.ambient, reflection_matrix(alpha)};
}

// #{beta in Phi+ : w(beta) in Phi-}. Throws when w does not permute the roots.
inline int length(const GroupElement& w, const RootSystem& rs) {
  static thread_local std::map<std::vector<Vec>, std::set<Vec>> cache;
  auto& positive = cache[rs.positive_roots];
  if (positive.empty()) positive.insert(rs.positive_roots.begin(), rs.positive_roots.end());
  int len = 0;
  for (const auto& beta : rs.positive_roots) {
    Vec img = w.apply(beta);
    if (positive.contains(img)) continue;
    for (auto& v : img) v = -v;
    if (!positive.contains(img)) throw DomainError("element does not permute the root system");
    ++len;
  }
  return len;
}

// Lam's sigma_i: for i != 0 move to w t_i when that shortens w; for i = 0 move to w t_0 when
// that lengthens w.
inline GroupElement lam_sigma(const GroupElement& w, int i, const RootSystem& rs) {
  GroupElement wt = w * reflection(rs, i);
  const int lw = length(w, rs);
  const int lwt = length(wt, rs);
  if (i == 0) return lwt > lw ? wt : w;
  return lwt < lw ? wt : w;
}

inline constexpr std::size_t kDefaultGroupGuard = 100'000;

// Exact order of W from the classical formulas.
inline std::size_t classical_order(const CartanSpec& s) {
  std::size_t fact = 1;
  const int n = s.rank;
  switch (s.family) {
    case Family::A:
      for (int k = 2; k <= n + 1; ++k) fact *= k;
      return fact;
    case Family::B:
    case Family::C:
      for (int k = 2; k <= n; ++k) fact *= k;
      return fact << n;
    case Family::D:
      for (int k = 2; k <= n; ++k) fact *= k;
      return fact << (n - 1);
  }
  return 0;
}

// The finite Weyl group with multiplication tables for the generators t_0..t_n.
//
// Elements are ordered breadth-first by length (the Cayley graph distance under right
// multiplication by simple reflections); ties are broken by the canonical matrix order.
class WeylGroup {
 public:
  explicit WeylGroup(RootSystem rs, std::size_t guard = kDefaultGroupGuard) : rs_(std::move(rs)) {
    const std::size_t expected = classical_order(rs_.spec);
    if (expected > guard) throw SizeError("group of order " + std::to_string(expected) + " exceeds guard");
    const int n = rs_.rank();
    std::vector<GroupElement> gens;
    for (int i = 0; i <= n; ++i) gens.push_back(reflection(rs_, i));

    std::vector<GroupElement> level{GroupElement::identity(rs_.ambient)};
    std::map<GroupElement, std::size_t> seen;
    int len = 0;
    while (!level.empty()) {
      std::sort(level.begin(), level.end());
      for (auto& g : level) {
        seen.emplace(g, elements_.size());
        elements_.push_back(std::move(g));
        lengths_.push_back(len);
      }
      std::set<GroupElement> next;
      for (std::size_t k = elements_.size() - level.size(); k < elements_.size(); ++k)
        for (int i = 1; i <= n; ++i) {
          GroupElement h = elements_[k] * gens[i];
          if (!seen.contains(h)) next.insert(std::move(h));
        }
      level.assign(next.begin(), next.end());
      ++len;
    }
    if (elements_.size() != expected) throw InvariantViolation("group enumeration does not match the classical order");
    index_ = std::move(seen);

    right_.assign(elements_.size(), std::vector<std::size_t>(n + 1));
    left_.assign(elements_.size(), std::vector<std::size_t>(n + 1));
    for (std::size_t k = 0; k < elements_.size(); ++k)
      for (int i = 0; i <= n; ++i) {
        right_[k][i] = index_of(elements_[k] * gens[i]);
        left_[k][i] = index_of(gens[i] * elements_[k]);
      }
  }

  const RootSystem& roots() const { return rs_; }
  int rank() const { return rs_.rank(); }
  std::size_t size() const { return elements_.size(); }
  const GroupElement& element(std::size_t k) const { return elements_[k]; }
  int length(std::size_t k) const { return lengths_[k]; }

  std::size_t index_of(const GroupElement& g) const {
    auto it = index_.find(g);
    if (it == index_.end()) throw DomainError("matrix is not an element of the group");
    return it->second;
  }

  std::size_t times_generator(std::size_t k, int i) const { return right_[k][i]; }  // w t_i
  std::size_t generator_times(std::size_t k, int i) const { return left_[k][i]; }   // t_i w

  std::size_t sigma(std::size_t k, int i) const {
    const std::size_t wt = right_[k][i];
    if (i == 0) return lengths_[wt] > lengths_[k] ? wt : k;
    return lengths_[wt] < lengths_[k] ? wt : k;
  }

 private:
  RootSystem rs_;
  std::vector<GroupElement> elements_;
  std::vector<int> lengths_;
  std::map<GroupElement, std::size_t> index_;
  std::vector<std::vector<std::size_t>> right_, left_;
};

inline std::vector<GroupElement> enumerate_group(const RootSystem& rs, std::size_t guard = kDefaultGroupGuard) {
  WeylGroup g(rs, guard);
  std::vector<GroupElement> out;
  for (std::size_t k = 0; k < g.size(); ++k) out.push_back(g.element(k));
  return out;
}

using Subset = std::vector<int>;

// Left cosets W_J w. Coset ids follow the group order of their first element, which is the
// unique minimal-length representative.
struct CosetTable {
  Subset J;
  std::vector<std::size_t> class_of;  // element index -> coset id
  std::vector<std::size_t> min_rep;   // coset id -> element index

  std::size_t cosets() const { return min_rep.size(); }
};

inline CosetTable coset_decompose(const WeylGroup& g, Subset J) {
  std::sort(J.begin(), J.end());
  J.erase(std::unique(J.begin(), J.end()), J.end());
  for (int j : J) {
    if (j == 0) throw DomainError("J may not contain 0");
    if (j < 0 || j > g.rank()) throw DomainError("J must be a subset of [n]");
  }
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  CosetTable t{J, std::vector<std::size_t>(g.size(), kUnset), {}};
  for (std::size_t start = 0; start < g.size(); ++start) {
    if (t.class_of[start] != kUnset) continue;
    const std::size_t id = t.min_rep.size();
    t.min_rep.push_back(start);
    std::vector<std::size_t> stack{start};
    t.class_of[start] = id;
    int min_len_count = 0;
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      if (g.length(k) == g.length(start)) ++min_len_count;
      if (g.length(k) < g.length(start)) throw InvariantViolation("coset representative is not of minimal length");
      for (int j : J) {
        const std::size_t h = g.generator_times(k, j);
        if (t.class_of[h] == kUnset) {
          t.class_of[h] = id;
          stack.push_back(h);
        }
      }
    }
    if (min_len_count != 1) throw InvariantViolation("coset has no unique minimal element");
  }
  return t;
}

// Lam's chain on W_J \ W: M(target, source) = sum of a_i over i with sigma_i(source) in target.
inline SparseRationalMatrix build_lam_chain(const WeylGroup& g, const CosetTable& cosets,
                                            const std::optional<std::vector<Rational>>& rate_override = std::nullopt) {
  const int n = g.rank();
  std::vector<Rational> rates = rate_override ? *rate_override : g.roots().rates();
  if (static_cast<int>(rates.size()) != n + 1) throw DomainError("rate override must have n+1 entries");
  for (const auto& r : rates)
    if (r <= 0) throw DomainError("rates must be positive");
  SparseRationalMatrix m(cosets.cosets(), cosets.cosets());
  for (std::size_t c = 0; c < cosets.cosets(); ++c) {
    const std::size_t rep = cosets.min_rep[c];
    for (int i = 0; i <= n; ++i) m.add(cosets.class_of[g.sigma(rep, i)], c, rates[i]);
  }
  return m;
}

struct CosetWitness {
  std::size_t w;
  std::size_t w_prime;
  int i;
};

// Checks that sigma_i respects left W_J-cosets; returns (w, w', i) on failure.
inline std::optional<CosetWitness> verify_coset_invariance(const WeylGroup& g, const CosetTable& cosets) {
  for (std::size_t w = 0; w < g.size(); ++w) {
    const std::size_t rep = cosets.min_rep[cosets.class_of[w]];
    for (int i = 0; i <= g.rank(); ++i)
      if (cosets.class_of[g.sigma(w, i)] != cosets.class_of[g.sigma(rep, i)]) return CosetWitness{rep, w, i};
  }
  return std::nullopt;
}

// D(W_J' u, W_J u) = 1 for J a subset of J'.
inline SparseRationalMatrix coset_projection(const CosetTable& from, const CosetTable& to) {
  SparseRationalMatrix d(to.cosets(), from.cosets());
  for (std::size_t c = 0; c < from.cosets(); ++c) d.set(to.class_of[from.min_rep[c]], c, Rational(1));
  return d;
}

}  // namespace wtl::weyl
