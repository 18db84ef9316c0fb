#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wtl/errors.hpp"
#include "wtl/ktasep.hpp"
#include "wtl/rootsys.hpp"
#include "wtl/sparse_matrix.hpp"
#include "wtl/typec.hpp"

// Matching Lam's chain on W (J = empty) with the particle chains on words.
//
// An element w is read as a word by looking at the images of the coordinate vectors: entry j
// of the word records where w sends e_j, as a signed row index. The bookkeeping is not fixed
// in advance, so a small family of conventions is searched and the unique one that makes the
// two matrices equal is returned.
namespace wtl::weyl {

struct Convention {
  bool reverse_index = false;  // read coordinates (and rows) in the opposite order
  bool negate_rows = false;    // flip the sign carried by each entry
  bool use_inverse = false;    // read w^{-1} instead of w

  std::string describe() const {
    std::string s = use_inverse ? "word from w^-1" : "word from w";
    s += reverse_index ? ", reversed indexing" : ", direct indexing";
    s += negate_rows ? ", negated signs" : ", plus = upper row";
    return s;
  }

  friend bool operator==(const Convention&, const Convention&) = default;
};

inline std::vector<Convention> all_conventions(bool with_signs) {
  std::vector<Convention> out;
  for (int inv = 0; inv < 2; ++inv)
    for (int rev = 0; rev < 2; ++rev)
      for (int neg = 0; neg < (with_signs ? 2 : 1); ++neg) out.push_back({rev == 1, neg == 1, inv == 1});
  return out;
}

// Signed-permutation reading of a monomial matrix: entry j is s * r where w e_k = s e_r.
inline std::vector<int> element_word(const GroupElement& g, const Convention& c) {
  const GroupElement m = c.use_inverse ? g.inverse() : g;
  const int dim = m.dim();
  std::vector<int> word(dim);
  for (int j = 0; j < dim; ++j) {
    const int k = c.reverse_index ? dim - 1 - j : j;
    int letter = 0;
    for (int r = 0; r < dim; ++r) {
      const Rational& v = m.at(r, k);
      if (v == 0) continue;
      if (letter != 0 || (v != 1 && v != -1)) throw DomainError("element is not a signed permutation matrix");
      const int row = c.reverse_index ? dim - r : r + 1;
      letter = v > 0 ? row : -row;
    }
    if (letter == 0) throw DomainError("element is not a signed permutation matrix");
    word[j] = c.negate_rows ? -letter : letter;
  }
  return word;
}

struct CalibrationResult {
  Convention convention;
  std::vector<Convention> matches;
};

using WordLookup = std::function<std::optional<std::size_t>(const std::vector<int>&)>;

// Tries every candidate convention; a convention matches when it maps W bijectively onto the
// word states and carries Lam's chain (J = empty) onto `word_chain` entry by entry.
inline CalibrationResult calibrate(const WeylGroup& g, const std::vector<Convention>& candidates,
                                   const WordLookup& lookup, const SparseRationalMatrix& word_chain,
                                   bool require_unique = true) {
  const auto lam = build_lam_chain(g, coset_decompose(g, {}));
  CalibrationResult res;
  for (const auto& conv : candidates) {
    if (word_chain.rows() != g.size()) break;
    std::vector<std::size_t> image(g.size());
    std::vector<bool> hit(g.size(), false);
    bool bijective = true;
    for (std::size_t k = 0; k < g.size() && bijective; ++k) {
      const auto idx = lookup(element_word(g.element(k), conv));
      if (!idx || *idx >= g.size() || hit[*idx]) {
        bijective = false;
        break;
      }
      hit[*idx] = true;
      image[k] = *idx;
    }
    if (!bijective) continue;
    if (permute(lam, image) == word_chain) res.matches.push_back(conv);
  }
  if (res.matches.empty() || (require_unique && res.matches.size() != 1)) {
    std::string msg = "calibration found " + std::to_string(res.matches.size()) + " matching conventions";
    for (const auto& m : res.matches) msg += "; " + m.describe();
    throw CalibrationError(msg);
  }
  res.convention = res.matches.front();
  return res;
}

// Type C: W(C_n) against the full-type word chain, optionally with a caller-supplied matrix.
inline CalibrationResult calibrate_typeC_correspondence(int n, const std::optional<SparseRationalMatrix>& chain = {}) {
  if (n < 2 || n > 4) throw ConfigError("type C calibration supported for n in 2..4");
  WeylGroup g(build_root_system({Family::C, n}));
  const auto omega = typec::state_space(n, {});
  const auto m = chain ? *chain : typec::build_transition_matrix(omega, n);
  WordLookup lookup = [&omega](const std::vector<int>& w) -> std::optional<std::size_t> {
    typec::TypeCWord word{w};
    if (!omega.contains(word)) return std::nullopt;
    return omega.index_of(word);
  };
  return calibrate(g, all_conventions(true), lookup, m);
}

// Type A: W(A_{n-1}) against the single-bell ring TASEP on permutations of 1..n (x = 1).
// Reversing positions and letters is a symmetry of the ring, so several conventions match;
// the first one in search order (direct reading of w) is returned.
inline CalibrationResult calibrate_typeA_correspondence(int n, const std::optional<SparseRationalMatrix>& chain = {}) {
  if (n < 2 || n > 6) throw ConfigError("type A calibration supported for n in 2..6");
  WeylGroup g(build_root_system({Family::A, n - 1}));
  ktasep::RingWord letters;
  for (int k = 1; k <= n; ++k) letters.push_back(k);
  const ktasep::RingStates states(letters);
  const auto m = chain ? *chain : ktasep::build_Ak(states, 1, ktasep::unit_rates(n));
  WordLookup lookup = [&states](const std::vector<int>& w) { return states.find(w); };
  return calibrate(g, all_conventions(false), lookup, m, false);
}

}  // namespace wtl::weyl
