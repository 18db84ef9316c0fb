#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wtl/bracket.hpp"
#include "wtl/correspondence.hpp"
#include "wtl/errors.hpp"
#include "wtl/ktasep.hpp"
#include "wtl/rootsys.hpp"
#include "wtl/sparse_matrix.hpp"
#include "wtl/typec.hpp"

// One entry point for every chain the tools can build, with printable state names.
namespace wtl::models {

struct ModelSpec {
  std::string model = "typec";  // typec | weyl | ktasep | twoclass
  int n = 3;
  std::vector<int> J;
  std::string family = "C";
  int rank = 3;
  std::string word;  // ktasep multiset, e.g. "1,1,2,3"; default 1..n
  int k = 1;
  std::string x;       // ktasep letter rates, default all 1
  int t = 1;           // twoclass particle count
  std::string params;  // twoclass a,b,c,d,e
};

struct Chain {
  std::string name;
  SparseRationalMatrix matrix;
  std::vector<std::string> states;
};

inline ktasep::RingWord ktasep_word(const ModelSpec& s) {
  if (!s.word.empty()) return ktasep::parse_ring_word(s.word);
  if (s.n < 2) throw ConfigError("ktasep needs n >= 2");
  ktasep::RingWord w;
  for (int i = 1; i <= s.n; ++i) w.push_back(i);
  return w;
}

inline ktasep::LetterRates ktasep_rates(const ModelSpec& s, const ktasep::RingWord& w) {
  if (s.x.empty()) return ktasep::unit_rates(ktasep::max_letter(w));
  return parse_rational_list(s.x);
}

inline Chain build(const ModelSpec& s) {
  Chain c;
  if (s.model == "typec") {
    const auto omega = typec::state_space(s.n, s.J);
    c.name = "typec n=" + std::to_string(s.n) + " J=" + typec::format_subset(typec::normalize_subset(s.J));
    c.matrix = typec::build_transition_matrix(omega, s.n);
    for (const auto& w : omega.states()) c.states.push_back(typec::format_word(w));
  } else if (s.model == "weyl") {
    const weyl::CartanSpec cs{weyl::parse_family(s.family), s.rank};
    const weyl::WeylGroup g(weyl::build_root_system(cs));
    const auto cosets = weyl::coset_decompose(g, s.J);
    c.name = weyl::spec_name(cs) + " J=" + typec::format_subset(cosets.J);
    c.matrix = weyl::build_lam_chain(g, cosets);
    for (std::size_t k = 0; k < cosets.cosets(); ++k) {
      std::string w;
      for (int e : weyl::element_word(g.element(cosets.min_rep[k]), {})) w += (w.empty() ? "" : ",") + std::to_string(e);
      c.states.push_back(w);
    }
  } else if (s.model == "ktasep") {
    const auto w = ktasep_word(s);
    const ktasep::RingStates st(w);
    c.name = "ktasep word=" + ktasep::format_ring_word(w) + " k=" + std::to_string(s.k);
    c.matrix = ktasep::build_Ak(st, s.k, ktasep_rates(s, w));
    for (const auto& v : st.states()) c.states.push_back(ktasep::format_ring_word(v));
  } else if (s.model == "twoclass") {
    const auto p = s.params.empty() ? bracket::Params{} : bracket::Params::from_list(parse_rational_list(s.params));
    c.name = "twoclass n=" + std::to_string(s.n) + " t=" + std::to_string(s.t);
    c.matrix = bracket::build_two_class_chain(s.n, s.t, p);
    for (const auto& v : bracket::two_class_states(s.n, s.t)) c.states.push_back(bracket::format_word(v));
  } else {
    throw ConfigError("unknown model '" + s.model + "' (typec, weyl, ktasep, twoclass)");
  }
  return c;
}

}  // namespace wtl::models
