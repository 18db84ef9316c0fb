#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "wtl/errors.hpp"
#include "wtl/rational.hpp"

namespace wtl {

// Exact sparse matrix. Rows are ordered maps col -> value; explicit zeros are never stored.
//
// Chain matrices use the (target, source) orientation throughout: M(v, u) is the total rate
// of the transitions u -> v, so distributions are column vectors and M * pi = lambda * pi.
class SparseRationalMatrix {
 public:
  using Row = std::map<std::size_t, Rational>;

  SparseRationalMatrix() = default;
  SparseRationalMatrix(std::size_t nrows, std::size_t ncols) : ncols_(ncols), rows_(nrows) {}

  static SparseRationalMatrix identity(std::size_t n) {
    SparseRationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.rows_[i].emplace(i, Rational(1));
    return m;
  }

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return ncols_; }
  bool square() const { return rows() == cols(); }

  const Row& row(std::size_t r) const { return rows_.at(r); }

  Rational at(std::size_t r, std::size_t c) const {
    check(r, c);
    auto it = rows_[r].find(c);
    return it == rows_[r].end() ? Rational(0) : it->second;
  }

  void set(std::size_t r, std::size_t c, const Rational& v) {
    check(r, c);
    if (v == 0)
      rows_[r].erase(c);
    else
      rows_[r][c] = v;
  }

  void add(std::size_t r, std::size_t c, const Rational& v) {
    check(r, c);
    if (v == 0) return;
    auto [it, inserted] = rows_[r].try_emplace(c, v);
    if (!inserted) {
      it->second += v;
      if (it->second == 0) rows_[r].erase(it);
    }
  }

  std::size_t nonzeros() const {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.size();
    return n;
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t r = 0; r < rows_.size(); ++r)
      for (const auto& [c, v] : rows_[r]) f(r, c, v);
  }

  SparseRationalMatrix transpose() const {
    SparseRationalMatrix t(ncols_, rows());
    for_each([&](std::size_t r, std::size_t c, const Rational& v) { t.rows_[c].emplace(r, v); });
    return t;
  }

  std::vector<Rational> column_sums() const {
    std::vector<Rational> s(ncols_);
    for_each([&](std::size_t, std::size_t c, const Rational& v) { s[c] += v; });
    return s;
  }

  std::vector<Rational> row_sums() const {
    std::vector<Rational> s(rows());
    for_each([&](std::size_t r, std::size_t, const Rational& v) { s[r] += v; });
    return s;
  }

  std::vector<Rational> apply(std::span<const Rational> x) const {
    if (x.size() != ncols_) throw DomainError("matrix-vector size mismatch");
    std::vector<Rational> y(rows());
    for (std::size_t r = 0; r < rows_.size(); ++r)
      for (const auto& [c, v] : rows_[r]) y[r] += v * x[c];
    return y;
  }

  SparseRationalMatrix scaled(const Rational& s) const {
    SparseRationalMatrix out(rows(), cols());
    if (s == 0) return out;
    for_each([&](std::size_t r, std::size_t c, const Rational& v) { out.rows_[r].emplace(c, v * s); });
    return out;
  }

  friend SparseRationalMatrix operator*(const SparseRationalMatrix& a, const SparseRationalMatrix& b) {
    if (a.cols() != b.rows()) throw DomainError("matrix product size mismatch");
    SparseRationalMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
      Row& acc = out.rows_[r];
      for (const auto& [k, av] : a.rows_[r])
        for (const auto& [c, bv] : b.rows_[k]) acc[c] += av * bv;
      std::erase_if(acc, [](const auto& kv) { return kv.second == 0; });
    }
    return out;
  }

  friend SparseRationalMatrix operator+(SparseRationalMatrix a, const SparseRationalMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("matrix sum size mismatch");
    b.for_each([&](std::size_t r, std::size_t c, const Rational& v) { a.add(r, c, v); });
    return a;
  }

  friend SparseRationalMatrix operator-(SparseRationalMatrix a, const SparseRationalMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("matrix difference size mismatch");
    b.for_each([&](std::size_t r, std::size_t c, const Rational& v) { a.add(r, c, -v); });
    return a;
  }

  friend bool operator==(const SparseRationalMatrix& a, const SparseRationalMatrix& b) {
    return a.ncols_ == b.ncols_ && a.rows_ == b.rows_;
  }

 private:
  void check(std::size_t r, std::size_t c) const {
    if (r >= rows_.size() || c >= ncols_) throw DomainError("matrix index out of range");
  }

  std::size_t ncols_ = 0;
  std::vector<Row> rows_;
};

// First entry (row-major) where two equally sized matrices differ.
struct EntryMismatch {
  std::size_t row;
  std::size_t col;
  Rational lhs;
  Rational rhs;
};

inline std::optional<EntryMismatch> first_difference(const SparseRationalMatrix& lhs,
                                                     const SparseRationalMatrix& rhs) {
  if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols())
    throw DomainError("cannot compare matrices of different shapes");
  for (std::size_t r = 0; r < lhs.rows(); ++r) {
    if (lhs.row(r) == rhs.row(r)) continue;
    auto a = lhs.row(r).begin(), ae = lhs.row(r).end();
    auto b = rhs.row(r).begin(), be = rhs.row(r).end();
    while (a != ae || b != be) {
      std::size_t c;
      if (b == be || (a != ae && a->first < b->first))
        c = a->first;
      else
        c = b->first;
      Rational lv = (a != ae && a->first == c) ? a->second : Rational(0);
      Rational rv = (b != be && b->first == c) ? b->second : Rational(0);
      if (lv != rv) return EntryMismatch{r, c, lv, rv};
      if (a != ae && a->first == c) ++a;
      if (b != be && b->first == c) ++b;
    }
  }
  return std::nullopt;
}

// Relabels a square chain matrix: out(perm[r], perm[c]) = m(r, c).
inline SparseRationalMatrix permute(const SparseRationalMatrix& m, std::span<const std::size_t> perm) {
  if (!m.square() || perm.size() != m.rows()) throw DomainError("permutation size mismatch");
  SparseRationalMatrix out(m.rows(), m.cols());
  m.for_each([&](std::size_t r, std::size_t c, const Rational& v) { out.set(perm[r], perm[c], v); });
  return out;
}

}  // namespace wtl
