#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "wtl/errors.hpp"
#include "wtl/linalg.hpp"
#include "wtl/rational.hpp"
#include "wtl/sparse_matrix.hpp"

namespace wtl::markov {

// Exact nonnegative weights on an ordered state space.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::vector<Rational> weights) : weights_(std::move(weights)) {
    bool nonzero = false;
    for (const auto& w : weights_) {
      if (w < 0) throw DomainError("distribution has a negative weight");
      if (w != 0) nonzero = true;
    }
    if (!nonzero) throw DomainError("distribution is identically zero");
  }

  std::size_t size() const { return weights_.size(); }
  const std::vector<Rational>& weights() const { return weights_; }
  const Rational& operator[](std::size_t i) const { return weights_[i]; }

  Rational total() const {
    Rational s = 0;
    for (const auto& w : weights_) s += w;
    return s;
  }

  std::vector<Rational> probabilities() const {
    const Rational t = total();
    std::vector<Rational> out;
    out.reserve(weights_.size());
    for (const auto& w : weights_) out.push_back(w / t);
    return out;
  }

  // Scaled so the smallest positive weight is exactly 1.
  std::vector<Rational> min_normalized() const {
    std::optional<Rational> lo;
    for (const auto& w : weights_)
      if (w > 0 && (!lo || w < *lo)) lo = w;
    std::vector<Rational> out;
    out.reserve(weights_.size());
    for (const auto& w : weights_) out.push_back(w / *lo);
    return out;
  }

  friend bool operator==(const Distribution& a, const Distribution& b) {
    return a.probabilities() == b.probabilities();
  }

 private:
  std::vector<Rational> weights_;
};

// Continuous-time generator: off-diagonal rates kept, diagonal set so every column sums to 0.
inline SparseRationalMatrix generator_of(const SparseRationalMatrix& m) {
  if (!m.square()) throw DomainError("generator of a non-square matrix");
  SparseRationalMatrix q(m.rows(), m.cols());
  std::vector<Rational> out(m.cols());
  m.for_each([&](std::size_t r, std::size_t c, const Rational& v) {
    if (r == c) return;
    q.set(r, c, v);
    out[c] += v;
  });
  for (std::size_t c = 0; c < m.cols(); ++c) q.add(c, c, -out[c]);
  return q;
}

// Unique stationary distribution of the chain with (target, source) matrix m.
//
// The kernel of the generator must be one-dimensional. When expected_total_rate is given,
// m * pi = rate * pi is verified as well.
inline Distribution stationary(const SparseRationalMatrix& m,
                               const std::optional<Rational>& expected_total_rate = std::nullopt) {
  const auto q = generator_of(m);
  auto kernel = linalg::nullspace(q);
  if (kernel.size() != 1)
    throw ReducibilityError("generator kernel has dimension " + std::to_string(kernel.size()) + ", expected 1");
  auto& pi = kernel.front();
  Rational sum = 0;
  for (const auto& v : pi) sum += v;
  if (sum < 0)
    for (auto& v : pi) v = -v;
  for (const auto& v : pi)
    if (v < 0) throw InvariantViolation("stationary vector has entries of both signs");
  if (expected_total_rate) {
    const auto image = m.apply(pi);
    for (std::size_t i = 0; i < pi.size(); ++i)
      if (image[i] != *expected_total_rate * pi[i])
        throw InvariantViolation("stationary vector is not an eigenvector with eigenvalue " +
                                 to_display(*expected_total_rate));
  }
  return Distribution(std::move(pi));
}

// D(image[u], u) = 1: the 0/1 matrix of a map between state spaces.
inline SparseRationalMatrix projection_matrix(std::span<const std::size_t> image, std::size_t target_size) {
  SparseRationalMatrix d(target_size, image.size());
  for (std::size_t u = 0; u < image.size(); ++u) {
    if (image[u] >= target_size) throw DomainError("projection image outside the target space");
    d.set(image[u], u, Rational(1));
  }
  return d;
}

// Checks D * MJ == MJp * D; returns the first differing entry on failure.
inline std::optional<EntryMismatch> verify_intertwine(const SparseRationalMatrix& d, const SparseRationalMatrix& mj,
                                                      const SparseRationalMatrix& mjp) {
  if (d.cols() != mj.rows() || !mj.square() || !mjp.square() || d.rows() != mjp.rows())
    throw DomainError("intertwining check on non-conformable matrices");
  return first_difference(d * mj, mjp * d);
}

// Checks A * U == U * B (conjugation, U maps the small chain into the big one).
inline std::optional<EntryMismatch> verify_conjugation(const SparseRationalMatrix& a, const SparseRationalMatrix& u,
                                                       const SparseRationalMatrix& b) {
  if (!a.square() || !b.square() || u.rows() != a.rows() || u.cols() != b.rows())
    throw DomainError("conjugation check on non-conformable matrices");
  return first_difference(a * u, u * b);
}

struct ProjectedDistribution {
  std::vector<Rational> image;  // D * pi_J
  Rational ratio;               // image = ratio * pi_J'
};

inline ProjectedDistribution project_distribution(const SparseRationalMatrix& d, const Distribution& pi_j,
                                                  const Distribution& pi_jp) {
  if (d.cols() != pi_j.size() || d.rows() != pi_jp.size()) throw DomainError("projection size mismatch");
  ProjectedDistribution out{d.apply(pi_j.weights()), Rational(0)};
  std::optional<Rational> ratio;
  for (std::size_t v = 0; v < out.image.size(); ++v) {
    if (pi_jp[v] == 0) {
      if (out.image[v] != 0) throw InvariantViolation("projected distribution not proportional");
      continue;
    }
    Rational r = out.image[v] / pi_jp[v];
    if (ratio && r != *ratio) throw InvariantViolation("projected distribution not proportional");
    ratio = r;
  }
  out.ratio = *ratio;
  return out;
}

// Solution space {U : A U = U B} for square A (n x n) and B (m x m).
class SylvesterSpace {
 public:
  SylvesterSpace(const SparseRationalMatrix& a, const SparseRationalMatrix& b)
      : n_(a.rows()), m_(b.rows()), echelon_(a.rows() * b.rows()) {
    if (!a.square() || !b.square()) throw DomainError("Sylvester solver needs square matrices");
    const auto bt = b.transpose();
    // Equation (i, j): sum_k A(i,k) U(k,j) - sum_k U(i,k) B(k,j) = 0.
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < m_; ++j) {
        std::map<std::size_t, Rational> eq;
        for (const auto& [k, v] : a.row(i)) eq[k * m_ + j] += v;
        for (const auto& [k, v] : bt.row(j)) eq[i * m_ + k] -= v;
        linalg::SparseRow row;
        for (auto& [c, v] : eq)
          if (v != 0) row.emplace_back(c, v);
        echelon_.insert(std::move(row));
      }
    }
    free_ = echelon_.free_columns();
    for (auto& x : echelon_.nullspace_basis()) {
      SparseRationalMatrix u(n_, m_);
      for (std::size_t idx = 0; idx < x.size(); ++idx)
        if (x[idx] != 0) u.set(idx / m_, idx % m_, x[idx]);
      basis_.push_back(std::move(u));
    }
  }

  std::size_t dimension() const { return basis_.size(); }
  const std::vector<SparseRationalMatrix>& basis() const { return basis_; }

  // Membership by reconstruction: the coefficient of basis element k is the candidate's value
  // at the k-th free coordinate, and the combination must reproduce the candidate exactly.
  bool contains(const SparseRationalMatrix& u) const {
    if (u.rows() != n_ || u.cols() != m_) return false;
    SparseRationalMatrix combo(n_, m_);
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      const Rational coeff = u.at(free_[k] / m_, free_[k] % m_);
      if (coeff != 0) combo = combo + basis_[k].scaled(coeff);
    }
    return combo == u;
  }

 private:
  std::size_t n_, m_;
  linalg::EchelonForm echelon_;
  std::vector<std::size_t> free_;
  std::vector<SparseRationalMatrix> basis_;
};

inline SylvesterSpace solve_sylvester(const SparseRationalMatrix& a, const SparseRationalMatrix& b) {
  return SylvesterSpace(a, b);
}

struct Residual {
  std::vector<Rational> values;  // generator_of(M) * d
  Rational max_abs;
  bool zero() const { return max_abs == 0; }
};

inline Residual equilibrium_residual(const SparseRationalMatrix& m, std::span<const Rational> d) {
  Residual r{generator_of(m).apply(d), Rational(0)};
  for (const auto& v : r.values) r.max_abs = std::max(r.max_abs, abs(v));
  return r;
}

struct IntegralityReport {
  bool all_integral = true;
  Rational max_entry;
  std::size_t states = 0;
  std::size_t non_integral = 0;
};

// Reports (never asserts) whether the min-normalized weights are integers.
inline IntegralityReport integrality_report(const Distribution& pi) {
  IntegralityReport rep;
  const auto w = pi.min_normalized();
  rep.states = w.size();
  for (const auto& v : w) {
    if (!is_integer(v)) {
      rep.all_integral = false;
      ++rep.non_integral;
    }
    rep.max_entry = std::max(rep.max_entry, v);
  }
  return rep;
}

// Exact total-variation distance: half the L1 distance of the probability forms.
inline Rational tv_distance(std::span<const Rational> p, std::span<const Rational> q) {
  if (p.size() != q.size()) throw DomainError("total variation on different index spaces");
  Rational s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += abs(p[i] - q[i]);
  return s / 2;
}

}  // namespace wtl::markov
