#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "wtl/errors.hpp"
#include "wtl/markov.hpp"
#include "wtl/rational.hpp"
#include "wtl/sparse_matrix.hpp"

// Two-class words over {-1, 0, 1} (written b, 0, 1), the bracket recursion [u] and the
// five-parameter two-class chain whose stationary law it describes.
namespace wtl::bracket {

using Word = std::vector<int>;

inline Word parse_word(std::string_view s) {
  Word w;
  for (char ch : s) {
    switch (ch) {
      case 'b': w.push_back(-1); break;
      case '0': w.push_back(0); break;
      case '1': w.push_back(1); break;
      default: throw ParseError("bracket words are strings over {b,0,1}");
    }
  }
  return w;
}

inline std::string format_word(const Word& w) {
  std::string s;
  for (int x : w) s += x < 0 ? 'b' : (x == 0 ? '0' : '1');
  return s;
}

struct Params {
  Rational a = 1, b = 1, c = 1, d = make_rational(1, 2), e = make_rational(1, 2);

  static Params from_list(const std::vector<Rational>& v) {
    if (v.size() != 5) throw ConfigError("bracket parameters need exactly five values a,b,c,d,e");
    return {v[0], v[1], v[2], v[3], v[4]};
  }

  bool positive() const { return a > 0 && b > 0 && c > 0 && d > 0 && e > 0; }

  template <class Rng>
  static Params random(Rng& rng) {
    return {random_positive_rational(rng), random_positive_rational(rng), random_positive_rational(rng),
            random_positive_rational(rng), random_positive_rational(rng)};
  }
};

inline std::string format_params(const Params& p) {
  return to_display(p.a) + "," + to_display(p.b) + "," + to_display(p.c) + "," + to_display(p.d) + "," +
         to_display(p.e);
}

// Rule numbers follow the recursion list: 1 [v01w], 2 [v b1 w], 3 [v b0 w], 4 [v b], 5 [1 v].
struct Step {
  int rule;
  std::size_t pos;  // index of the first letter of the matched pattern
};

inline std::vector<Step> applicable_steps(const Word& w) {
  std::vector<Step> out;
  if (!w.empty() && w.front() == 1) out.push_back({5, 0});
  if (!w.empty() && w.back() == -1) out.push_back({4, w.size() - 1});
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (w[i] == 0 && w[i + 1] == 1) out.push_back({1, i});
    if (w[i] == -1 && w[i + 1] == 1) out.push_back({2, i});
    if (w[i] == -1 && w[i + 1] == 0) out.push_back({3, i});
  }
  return out;
}

// Default choice: first rule in precedence 5, 4, 1, 2, 3, leftmost position.
inline std::optional<Step> deterministic_step(const Word& w) {
  auto steps = applicable_steps(w);
  if (steps.empty()) return std::nullopt;
  static constexpr int kPrecedence[] = {5, 4, 1, 2, 3};
  for (int rule : kPrecedence)
    for (const auto& s : steps)
      if (s.rule == rule) return s;  // steps are already leftmost-first per rule
  return std::nullopt;
}

inline Word erase_at(const Word& w, std::size_t i) {
  Word out = w;
  out.erase(out.begin() + static_cast<long>(i));
  return out;
}

class Evaluator {
 public:
  explicit Evaluator(Params p, std::optional<std::uint64_t> random_seed = std::nullopt, bool corrupt_rule3 = false)
      : p_(std::move(p)), corrupt_(corrupt_rule3) {
    if (p_.a == 0 || p_.b == 0 || p_.c == 0 || p_.d == 0 || p_.e == 0) throw DomainError("bracket parameters must be nonzero");
    if (random_seed) rng_.emplace(*random_seed);
  }

  const Params& params() const { return p_; }

  Rational operator()(const Word& w) {
    if (auto it = memo_.find(w); it != memo_.end()) return it->second;
    const Rational v = expand(w);
    memo_.emplace(w, v);
    return v;
  }

 private:
  Rational expand(const Word& w) {
    auto steps = applicable_steps(w);
    if (steps.empty()) {
      for (int x : w)
        if (x != 0) throw InvariantViolation("irreducible word with a particle: " + format_word(w));
      return Rational(1);
    }
    Step s;
    if (rng_) {
      std::uniform_int_distribution<std::size_t> pick(0, steps.size() - 1);
      s = steps[pick(*rng_)];
    } else {
      s = *deterministic_step(w);
    }
    switch (s.rule) {
      case 1: return (*this)(erase_at(w, s.pos + 1)) / p_.a;
      case 2: {
        Word keep_minus = erase_at(w, s.pos + 1);
        Word keep_plus = erase_at(w, s.pos);
        return ((*this)(keep_minus) + (*this)(keep_plus)) / p_.b;
      }
      case 3: return (corrupt_ ? Rational(2) : Rational(1)) * (*this)(erase_at(w, s.pos)) / p_.c;
      case 4: return (*this)(erase_at(w, s.pos)) / p_.d;
      default: return (*this)(erase_at(w, 0)) / p_.e;
    }
  }

  Params p_;
  bool corrupt_;
  std::optional<std::mt19937_64> rng_;
  std::map<Word, Rational> memo_;
};

inline Rational bracket_eval(const Word& w, const Params& p, std::optional<std::uint64_t> random_seed = std::nullopt) {
  Evaluator ev(p, random_seed);
  return ev(w);
}

// Every word over {b,0,1} of the given length in lexicographic value order (b < 0 < 1).
inline std::vector<Word> all_words(std::size_t len) {
  std::vector<Word> out;
  Word w(len, -1);
  while (true) {
    out.push_back(w);
    std::size_t i = len;
    while (i > 0 && w[i - 1] == 1) w[--i] = -1;
    if (i == 0) break;
    ++w[i - 1];
  }
  return out;
}

struct ConfluenceReport {
  bool pass = true;
  std::size_t words = 0;
  std::optional<Word> counterexample;
  Params params;
};

// For every word up to max_len and several parameter points, `trials` randomized expansions
// must agree exactly with the deterministic one.
inline ConfluenceReport check_confluence(std::size_t max_len, int trials, std::uint64_t seed, int param_points = 1) {
  if (max_len > 10) throw SizeError("confluence check limited to words of length <= 10");
  std::mt19937_64 rng(seed);
  ConfluenceReport rep;
  for (int pp = 0; pp < param_points; ++pp) {
    const Params p = Params::random(rng);
    Evaluator det(p);
    std::vector<Evaluator> randomized;
    for (int t = 0; t < trials; ++t) randomized.emplace_back(p, rng());
    for (std::size_t len = 0; len <= max_len; ++len)
      for (const auto& w : all_words(len)) {
        ++rep.words;
        const Rational ref = det(w);
        for (auto& ev : randomized)
          if (ev(w) != ref) {
            rep.pass = false;
            rep.counterexample = w;
            rep.params = p;
            return rep;
          }
      }
  }
  return rep;
}

// States: words of length n with exactly t particles, in lexicographic value order.
inline std::vector<Word> two_class_states(int n, int t) {
  if (n < 1 || t < 0 || t > n) throw DomainError("two-class chain needs 0 <= t <= n, n >= 1");
  std::vector<Word> out;
  for (const auto& w : all_words(n)) {
    int k = 0;
    for (int x : w) k += x != 0;
    if (k == t) out.push_back(w);
  }
  return out;
}

// Generalized chain (no self-loops): 01->10 at a, b1->1b at b, b0->0b at c, trailing b->1 at
// d, leading 1->b at e.
inline SparseRationalMatrix build_two_class_chain(int n, int t, const Params& p) {
  const auto states = two_class_states(n, t);
  std::map<Word, std::size_t> index;
  for (std::size_t i = 0; i < states.size(); ++i) index.emplace(states[i], i);
  SparseRationalMatrix m(states.size(), states.size());
  for (std::size_t s = 0; s < states.size(); ++s) {
    const auto& w = states[s];
    auto move = [&](Word v, const Rational& rate) { m.add(index.at(v), s, rate); };
    for (int i = 0; i + 1 < n; ++i) {
      Word v = w;
      std::swap(v[i], v[i + 1]);
      if (w[i] == 0 && w[i + 1] == 1) move(v, p.a);
      if (w[i] == -1 && w[i + 1] == 1) move(v, p.b);
      if (w[i] == -1 && w[i + 1] == 0) move(v, p.c);
    }
    if (w.back() == -1) {
      Word v = w;
      v.back() = 1;
      move(v, p.d);
    }
    if (w.front() == 1) {
      Word v = w;
      v.front() = -1;
      move(v, p.e);
    }
  }
  return m;
}

struct TheoremReport {
  bool pass = true;
  std::optional<Word> witness;  // a state with nonzero residual
  Rational residual;
};

// The bracket vector has zero equilibrium residual, and matches the exact stationary law.
inline TheoremReport verify_bracket_theorem(int n, int t, const Params& p, bool corrupt_rule3 = false) {
  const auto states = two_class_states(n, t);
  const auto m = build_two_class_chain(n, t, p);
  Evaluator ev(p, std::nullopt, corrupt_rule3);
  std::vector<Rational> vec;
  for (const auto& w : states) vec.push_back(ev(w));
  const auto res = markov::equilibrium_residual(m, vec);
  TheoremReport rep;
  for (std::size_t k = 0; k < states.size(); ++k)
    if (res.values[k] != 0) {
      rep.pass = false;
      rep.witness = states[k];
      rep.residual = res.values[k];
      return rep;
    }
  if (p.positive()) {
    const auto pi = markov::stationary(m);
    if (!(pi == markov::Distribution(vec))) {
      rep.pass = false;
      rep.witness = states.front();
    }
  }
  return rep;
}

// [u] = [v1 0][0 v2 0]...[0 vr] for u split at the zero positions `cuts`.
inline bool verify_factorization(const Word& u, const std::vector<std::size_t>& cuts, const Params& p) {
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    if (cuts[k] >= u.size() || u[cuts[k]] != 0) throw DomainError("factorization cut is not at a zero");
    if (k && cuts[k] <= cuts[k - 1]) throw DomainError("factorization cuts must increase");
  }
  Evaluator ev(p);
  Rational prod = 1;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= cuts.size(); ++k) {
    const std::size_t end = k < cuts.size() ? cuts[k] + 1 : u.size();
    prod *= ev(Word(u.begin() + static_cast<long>(start), u.begin() + static_cast<long>(end)));
    if (k < cuts.size()) start = cuts[k];
  }
  return prod == ev(u);
}

// Integer-normalized stationary weights n_u of the chain at the default parameters.
inline std::map<Word, Rational> normalized_weights(int n, int t) {
  const auto states = two_class_states(n, t);
  const auto w = markov::stationary(build_two_class_chain(n, t, Params{})).min_normalized();
  std::map<Word, Rational> out;
  for (std::size_t k = 0; k < states.size(); ++k) out.emplace(states[k], w[k]);
  return out;
}

// u = x^i 0^j y^k
inline bool has_shape(const Word& u, int x, int y) {
  std::size_t i = 0;
  while (i < u.size() && u[i] == x) ++i;
  while (i < u.size() && u[i] == 0) ++i;
  while (i < u.size() && u[i] == y) ++i;
  return i == u.size();
}

struct CorollaryReport {
  bool integrality = true;
  bool min_characterization = true;
  bool max_characterization = true;
  bool product_rule = true;
  std::optional<Word> witness;
  bool pass() const { return integrality && min_characterization && max_characterization && product_rule; }
};

// The four statements about n_u at (1,1,1,1/2,1/2); the product rule pulls n for shorter
// words from their own chains, with cache shared across calls.
inline CorollaryReport verify_corollary(int n, int t, std::map<std::pair<int, int>, std::map<Word, Rational>>* cache = nullptr) {
  std::map<std::pair<int, int>, std::map<Word, Rational>> local;
  auto& c = cache ? *cache : local;
  auto weights = [&](int len, int parts) -> const std::map<Word, Rational>& {
    auto key = std::make_pair(len, parts);
    auto it = c.find(key);
    if (it == c.end()) it = c.emplace(key, normalized_weights(len, parts)).first;
    return it->second;
  };
  auto n_of = [&](const Word& w) {
    int parts = 0;
    for (int x : w) parts += x != 0;
    return weights(static_cast<int>(w.size()), parts).at(w);
  };

  CorollaryReport rep;
  auto fail = [&](bool& flag, const Word& w) {
    flag = false;
    if (!rep.witness) rep.witness = w;
  };
  const Rational cap = Rational(1u << t);
  for (const auto& [u, nu] : weights(n, t)) {
    if (!is_integer(nu) || nu <= 0) fail(rep.integrality, u);
    if ((nu == 1) != has_shape(u, -1, 1)) fail(rep.min_characterization, u);
    if (nu > cap || ((nu == cap) != has_shape(u, 1, -1))) fail(rep.max_characterization, u);
    std::vector<std::size_t> zeros;
    for (std::size_t k = 0; k < u.size(); ++k)
      if (u[k] == 0) zeros.push_back(k);
    for (std::size_t a = 0; a < zeros.size(); ++a)
      for (std::size_t b = a + 1; b < zeros.size(); ++b) {
        const auto p = static_cast<long>(zeros[a]), q = static_cast<long>(zeros[b]);
        const Word left(u.begin(), u.begin() + p + 1);
        const Word mid(u.begin() + p, u.begin() + q + 1);
        const Word right(u.begin() + q, u.end());
        if (n_of(left) * n_of(mid) * n_of(right) != nu) fail(rep.product_rule, u);
      }
  }
  return rep;
}

}  // namespace wtl::bracket
