#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "wtl/rational.hpp"
#include "wtl/sparse_matrix.hpp"

namespace wtl::linalg {

// Sorted (column, value) pairs without zeros.
using SparseRow = std::vector<std::pair<std::size_t, Rational>>;

inline SparseRow to_sparse_row(const SparseRationalMatrix::Row& row) { return {row.begin(), row.end()}; }

// a - f * b for sorted sparse rows.
inline SparseRow axpy_sub(const SparseRow& a, const Rational& f, const SparseRow& b) {
  SparseRow out;
  out.reserve(a.size() + b.size());
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      out.push_back(*ia++);
    } else if (ia == a.end() || ib->first < ia->first) {
      out.emplace_back(ib->first, -f * ib->second);
      ++ib;
    } else {
      Rational v = ia->second - f * ib->second;
      if (v != 0) out.emplace_back(ia->first, std::move(v));
      ++ia;
      ++ib;
    }
  }
  return out;
}

// Incremental row-echelon form over the rationals.
//
// Each stored pivot row has its leading entry equal to 1 and is indexed by that leading
// column. Inserting a row reduces it by existing pivots in increasing column order, so the
// result depends only on the insertion order.
class EchelonForm {
 public:
  explicit EchelonForm(std::size_t ncols) : pivots_(ncols) {}

  std::size_t cols() const { return pivots_.size(); }
  std::size_t rank() const { return rank_; }

  // Returns true when the row was independent of everything inserted so far.
  bool insert(SparseRow row) {
    while (!row.empty()) {
      const std::size_t lead = row.front().first;
      if (lead >= pivots_.size()) throw DomainError("row column out of range");
      if (!pivots_[lead]) {
        const Rational inv = 1 / row.front().second;
        for (auto& [c, v] : row) v *= inv;
        pivots_[lead] = std::move(row);
        ++rank_;
        return true;
      }
      const Rational f = row.front().second;
      row = axpy_sub(row, f, *pivots_[lead]);
    }
    return false;
  }

  // True when the row lies in the span of the inserted rows.
  bool in_row_space(SparseRow row) const {
    while (!row.empty()) {
      const std::size_t lead = row.front().first;
      if (!pivots_[lead]) return false;
      const Rational f = row.front().second;
      row = axpy_sub(row, f, *pivots_[lead]);
    }
    return true;
  }

  std::vector<std::size_t> free_columns() const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < pivots_.size(); ++c)
      if (!pivots_[c]) out.push_back(c);
    return out;
  }

  // Basis of {x : row . x = 0 for every inserted row}. Vector k has a 1 at the k-th free
  // column and 0 at every other free column.
  std::vector<std::vector<Rational>> nullspace_basis() const {
    std::vector<std::vector<Rational>> basis;
    for (std::size_t f : free_columns()) {
      std::vector<Rational> x(pivots_.size());
      x[f] = 1;
      for (std::size_t p = pivots_.size(); p-- > 0;) {
        if (!pivots_[p]) continue;
        Rational acc = 0;
        for (const auto& [c, v] : *pivots_[p])
          if (c != p) acc -= v * x[c];
        x[p] = std::move(acc);
      }
      basis.push_back(std::move(x));
    }
    return basis;
  }

 private:
  std::vector<std::optional<SparseRow>> pivots_;
  std::size_t rank_ = 0;
};

inline std::vector<std::vector<Rational>> nullspace(const SparseRationalMatrix& m) {
  EchelonForm ef(m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) ef.insert(to_sparse_row(m.row(r)));
  return ef.nullspace_basis();
}

inline std::size_t rank(const SparseRationalMatrix& m) {
  EchelonForm ef(m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) ef.insert(to_sparse_row(m.row(r)));
  return ef.rank();
}

}  // namespace wtl::linalg
