#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "wtl/errors.hpp"
#include "wtl/markov.hpp"
#include "wtl/sparse_matrix.hpp"
#include "wtl/typec.hpp"

// The queueing operator tau_theta: rebuilds a state with one more particle class by letting
// every particle walk clockwise to the next free site chosen by theta.
namespace wtl::queue {

using typec::Subset;
using typec::TypeCWord;

// theta_j = true means '+': column j's designated site is in the upper row.
using ThetaSign = std::vector<bool>;

inline ThetaSign parse_theta(std::string_view s) {
  ThetaSign t;
  for (char ch : s) {
    if (ch == '+')
      t.push_back(true);
    else if (ch == '-')
      t.push_back(false);
    else
      throw ParseError("theta must be a string over {+,-}");
  }
  return t;
}

inline std::string format_theta(const ThetaSign& t) {
  std::string s;
  for (bool b : t) s += b ? '+' : '-';
  return s;
}

// Bit j of mask is theta_{j+1}.
inline ThetaSign theta_from_mask(int n, unsigned mask) {
  ThetaSign t(n);
  for (int j = 0; j < n; ++j) t[j] = (mask >> j) & 1u;
  return t;
}

// Clockwise numbering of the 2n sites: upper row left to right (0..n-1), then the lower row
// right to left (n..2n-1). The clockwise successor of site s is s+1 mod 2n.
inline int site_index(int n, int column, bool upper) { return upper ? column : 2 * n - 1 - column; }

struct TauOptions {
  bool exclusive_start = false;  // wrong variant, kept as a negative control
  std::optional<std::vector<int>> order;  // explicit processing order of occupied columns
};

inline TypeCWord tau(const TypeCWord& u, const ThetaSign& theta, const TauOptions& opt = {}) {
  const int n = static_cast<int>(u.size());
  if (static_cast<int>(theta.size()) != n) throw DomainError("theta length must equal n");
  const int k = u.classes();
  std::vector<int> designated_col(2 * n, -1);
  for (int j = 0; j < n; ++j) designated_col[site_index(n, j, theta[j])] = j;

  std::vector<int> cols;
  if (opt.order) {
    cols = *opt.order;
  } else {
    for (int j = 0; j < n; ++j)
      if (u[j] != 0) cols.push_back(j);
    std::sort(cols.begin(), cols.end(), [&](int a, int b) {
      const int ca = std::abs(u[a]), cb = std::abs(u[b]);
      if (ca != cb) return ca < cb;
      return site_index(n, a, u[a] > 0) < site_index(n, b, u[b] > 0);
    });
  }
  for (std::size_t x = 1; x < cols.size(); ++x)
    if (std::abs(u[cols[x]]) < std::abs(u[cols[x - 1]])) throw DomainError("processing order must be weakly increasing in class");

  std::vector<int> placed(2 * n, 0);
  for (int j : cols) {
    if (u[j] == 0) throw DomainError("processing order names an empty column");
    const int s = site_index(n, j, u[j] > 0);
    for (int step = opt.exclusive_start ? 1 : 0; step <= 2 * n; ++step) {
      const int t = (s + step) % (2 * n);
      if (designated_col[t] >= 0 && placed[t] == 0) {
        placed[t] = std::abs(u[j]);
        break;
      }
    }
  }
  TypeCWord v;
  v.entries.resize(n);
  for (int j = 0; j < n; ++j) {
    const int c = placed[site_index(n, j, theta[j])];
    const int cls = c == 0 ? k + 1 : c;
    v.entries[j] = theta[j] ? cls : -cls;
  }
  return v;
}

// J' = J + {n}.
inline Subset with_n(int n, Subset J) {
  J.push_back(n);
  return typec::normalize_subset(std::move(J));
}

inline void check_queue_subset(int n, const Subset& J) {
  for (int j : J)
    if (j < 1 || j >= n) throw DomainError("queue construction needs J inside [n-1]");
}

// U(v, u) = #{theta : tau_theta(u) = v} on Omega_J x Omega_source.
inline SparseRationalMatrix build_U(const typec::StateSpace& target, const typec::StateSpace& source, int n,
                                    const TauOptions& opt = {}) {
  SparseRationalMatrix u(target.size(), source.size());
  for (std::size_t c = 0; c < source.size(); ++c)
    for (unsigned mask = 0; mask < (1u << n); ++mask)
      u.add(target.index_of(tau(source[c], theta_from_mask(n, mask), opt)), c, Rational(1));
  return u;
}

inline SparseRationalMatrix build_U(int n, const Subset& J, const TauOptions& opt = {}) {
  check_queue_subset(n, J);
  return build_U(typec::state_space(n, J), typec::state_space(n, with_n(n, J)), n, opt);
}

struct QueueWitness {
  std::size_t row = 0, col = 0;
  Rational lhs, rhs;
  TypeCWord u;        // source state of the failing column
  ThetaSign theta;    // a theta involved in the failing entry
  int bell = -1;      // a bell whose single-bell identity fails in that column, if any
};

struct QueueReport {
  bool pass = true;
  std::optional<QueueWitness> witness;
};

namespace detail {

inline QueueWitness make_witness(const EntryMismatch& e, const typec::StateSpace& omega_j,
                                 const typec::StateSpace& omega_src, int n, const TauOptions& opt) {
  QueueWitness w{e.row, e.col, e.lhs, e.rhs, omega_src[e.col], {}, -1};
  const auto& target = omega_j[e.row];
  // Bell j fails when the multiset {tau(sigma_j u)} differs from {sigma_j tau(u)} over theta.
  for (int j = 0; j <= n && w.bell < 0; ++j) {
    std::vector<TypeCWord> lhs, rhs;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      const auto th = theta_from_mask(n, mask);
      lhs.push_back(tau(typec::apply_sigma(w.u, j), th, opt));
      rhs.push_back(typec::apply_sigma(tau(w.u, th, opt), j));
    }
    std::sort(lhs.begin(), lhs.end());
    std::sort(rhs.begin(), rhs.end());
    if (lhs != rhs) w.bell = j;
  }
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    const auto th = theta_from_mask(n, mask);
    const int j = std::max(w.bell, 0);
    if (tau(typec::apply_sigma(w.u, j), th, opt) == target || typec::apply_sigma(tau(w.u, th, opt), j) == target) {
      w.theta = th;
      break;
    }
  }
  if (w.theta.empty()) w.theta = theta_from_mask(n, 0);
  return w;
}

}  // namespace detail

// U M_J' = M_J U for J inside [n-1], J' = J + {n}.
inline QueueReport verify_queue_theorem(int n, const Subset& J, const TauOptions& opt = {}) {
  check_queue_subset(n, J);
  const auto omega_j = typec::state_space(n, J);
  const auto omega_jp = typec::state_space(n, with_n(n, J));
  const auto u = build_U(omega_j, omega_jp, n, opt);
  const auto mj = typec::build_transition_matrix(omega_j, n);
  const auto mjp = typec::build_transition_matrix(omega_jp, n);
  QueueReport rep;
  if (auto e = first_difference(u * mjp, mj * u)) {
    rep.pass = false;
    rep.witness = detail::make_witness(*e, omega_j, omega_jp, n, opt);
  }
  return rep;
}

// Square variant on Omega_J itself (no empty columns): M_J U' = U' M_J and U' pi_J ~ pi_J.
inline QueueReport verify_square_corollary(int n, const Subset& J, const TauOptions& opt = {}) {
  check_queue_subset(n, J);
  const auto omega = typec::state_space(n, J);
  const auto u = build_U(omega, omega, n, opt);
  const auto m = typec::build_transition_matrix(omega, n);
  QueueReport rep;
  if (auto e = first_difference(m * u, u * m)) {
    rep.pass = false;
    rep.witness = detail::make_witness(*e, omega, omega, n, opt);
    return rep;
  }
  const auto pi = markov::stationary(m);
  const auto image = u.apply(pi.weights());
  const Rational ratio = image[0] / pi[0];
  for (std::size_t k = 0; k < image.size(); ++k)
    if (image[k] != ratio * pi[k]) {
      rep.pass = false;
      rep.witness = QueueWitness{k, 0, image[k], ratio * pi[k], omega[k], {}, -1};
      break;
    }
  return rep;
}

// Draws u from the exact pi_J' and returns tau_theta(u) for a uniform theta.
class QueueSampler {
 public:
  QueueSampler(int n, const Subset& J, std::uint64_t seed)
      : n_(n), source_(typec::state_space(n, with_n(n, J))), rng_(seed) {
    check_queue_subset(n, J);
    const auto pi = markov::stationary(typec::build_transition_matrix(source_, n)).probabilities();
    std::vector<double> w;
    for (const auto& p : pi) w.push_back(p.get_d());
    pick_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
  }

  TypeCWord operator()() {
    const auto& u = source_[pick_(rng_)];
    std::uniform_int_distribution<unsigned> th(0, (1u << n_) - 1);
    return tau(u, theta_from_mask(n_, th(rng_)));
  }

 private:
  int n_;
  typec::StateSpace source_;
  std::mt19937_64 rng_;
  std::discrete_distribution<std::size_t> pick_;
};

}  // namespace wtl::queue
