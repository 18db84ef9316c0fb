// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any blocking check fails.
#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "wtl/wtl.hpp"

using namespace wtl;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void run(int id, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream t;
  t.precision(2);
  t << std::fixed << secs;
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail << " [" << t.str() << "s]"
            << std::endl;
  if (!o.pass) ++failures;
}

std::string where(const EntryMismatch& e) {
  return "(" + std::to_string(e.row) + "," + std::to_string(e.col) + ") " + to_display(e.lhs) + " vs " + to_display(e.rhs);
}

ktasep::LetterRates random_rates(std::mt19937_64& rng, int letters) {
  ktasep::LetterRates x;
  for (int i = 0; i < letters; ++i) x.push_back(random_positive_rational(rng));
  return x;
}

// ---- 1 ----
Outcome packaged_conjugation() {
  const auto mj = typec::build_transition_matrix(4, {3, 4});
  const auto mjp = typec::build_transition_matrix(4, {2, 3, 4});
  const auto u = io::read_matrix_file(WTL_DATA_DIR "/conjugation_matrix.txt").transpose();
  if (mj.rows() != 48 || mjp.rows() != 8) return {false, "unexpected state counts"};
  if (auto e = markov::verify_conjugation(mj, u, mjp)) return {false, "M_J U != U M_J' at " + where(*e)};
  return {true, "48x48 and 8x8 chains conjugate through the packaged 48x8 matrix"};
}

// ---- 2 ----
Outcome projections() {
  std::size_t links = 0;
  for (int n = 2; n <= 3; ++n)
    for (const auto& link : typec::all_links(n)) {
      const auto oj = typec::state_space(n, link.J), ojp = typec::state_space(n, link.Jprime);
      const auto d = typec::projection_matrix(link, oj, ojp);
      const auto mj = typec::build_transition_matrix(oj, n), mjp = typec::build_transition_matrix(ojp, n);
      const std::string name = "n=" + std::to_string(n) + " i=" + std::to_string(link.i) + " J=" + typec::format_subset(link.J);
      if (auto e = markov::verify_intertwine(d, mj, mjp)) return {false, name + " intertwining fails at " + where(*e)};
      markov::project_distribution(d, markov::stationary(mj), markov::stationary(mjp));  // throws unless proportional
      ++links;
    }
  return {true, std::to_string(links) + " links intertwine and project pi_J onto a multiple of pi_J'"};
}

// ---- 3 ----
Outcome queues() {
  std::size_t checks = 0;
  auto check = [&](int n, const typec::Subset& J) -> std::optional<std::string> {
    const std::string name = "n=" + std::to_string(n) + " J=" + typec::format_subset(J);
    const auto u = queue::build_U(n, J);
    for (const auto& s : u.column_sums())
      if (s != (1 << n)) return name + " column sum " + to_display(s);
    const auto th = queue::verify_queue_theorem(n, J);
    if (!th.pass) return name + " theorem fails for u=" + typec::format_word(th.witness->u);
    const auto sq = queue::verify_square_corollary(n, J);
    if (!sq.pass) return name + " square commutation fails";
    ++checks;
    return std::nullopt;
  };
  for (int n = 2; n <= 3; ++n)
    for (const auto& J : typec::all_subsets(n - 1))
      if (auto err = check(n, J)) return {false, *err};
  if (typec::state_space(4, {}).size() != 384 || typec::state_space(4, {4}).size() != 192)
    return {false, "n=4 state counts"};
  if (auto err = check(4, {})) return {false, *err};
  return {true, std::to_string(checks) + " (n,J) cases incl. n=4 J={} (384/192 states): theorem, 2^n column sums, square commutation"};
}

// ---- 4 ----
Outcome tau_example() {
  const auto v = queue::tau(typec::parse_word("-1,1,2,4,-2,-3,3,0,-5,1"), queue::parse_theta("+--++-----"));
  const std::string got = typec::format_word(v);
  const std::string want = "1,-6,-2,1,2,-3,-5,-4,-3,-1";
  return {got == want, "tau maps the ten-column example to " + got};
}

// ---- 5 ----
Outcome brackets() {
  const auto conf = bracket::check_confluence(6, 10, 2024, 3);
  if (!conf.pass) return {false, "(i) strategies disagree on " + bracket::format_word(*conf.counterexample)};
  std::mt19937_64 rng(77);
  std::vector<bracket::Params> points{bracket::Params{}};
  for (int k = 0; k < 3; ++k) points.push_back(bracket::Params::random(rng));
  for (const auto& p : points)
    for (int n = 1; n <= 5; ++n)
      for (int t = 0; t <= n; ++t) {
        const auto rep = bracket::verify_bracket_theorem(n, t, p);
        if (!rep.pass)
          return {false, "(ii) residual at " + bracket::format_word(*rep.witness) + " params " + bracket::format_params(p)};
      }
  const auto hand = bracket::normalized_weights(2, 1);
  if (hand.at(bracket::parse_word("b0")) != 1 || hand.at(bracket::parse_word("0b")) != 2 ||
      hand.at(bracket::parse_word("01")) != 1 || hand.at(bracket::parse_word("10")) != 2)
    return {false, "(iii) n=2,t=1 weights differ from (1,2,1,2)"};
  std::map<std::pair<int, int>, std::map<bracket::Word, Rational>> cache;
  std::ostringstream bad;
  std::size_t min_fail = 0, other_fail = 0;
  for (int n = 1; n <= 6; ++n)
    for (int t = 0; t < n; ++t) {
      const auto rep = bracket::verify_corollary(n, t, &cache);
      if (!rep.integrality || !rep.max_characterization || !rep.product_rule) {
        ++other_fail;
        bad << " n=" << n << ",t=" << t << " witness " << bracket::format_word(*rep.witness) << ";";
      } else if (!rep.min_characterization) {
        if (min_fail == 0) bad << " first min-shape counterexample n=" << n << ",t=" << t << ": " << bracket::format_word(*rep.witness) << " has weight 1;";
        ++min_fail;
      }
    }
  std::string detail = "(i) L<=6 confluent, (ii) residual zero n<=5 at 4 parameter points, (iii) t<n";
  if (min_fail == 0 && other_fail == 0) return {true, detail + ": all four weight statements hold (t=n excluded)"};
  detail += ": integrality/max/product failures " + std::to_string(other_fail) + ", minimum-shape failures " +
            std::to_string(min_fail) + " of 21 (n,t);" + bad.str();
  return {false, detail};
}

// ---- 6 ----
Outcome ktaseps() {
  std::mt19937_64 rng(31);
  std::size_t pairs = 0;
  for (const auto* word : {"1,2,3,4", "1,1,2,3", "1,2,3,4,5"}) {
    const auto w = ktasep::parse_ring_word(word);
    const int n = static_cast<int>(w.size());
    const int letters = ktasep::max_letter(w);
    for (const auto& x : {ktasep::unit_rates(letters), random_rates(rng, letters)}) {
      for (int k = 1; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          const auto rep = ktasep::verify_commutation(w, x, k, l);
          if (!rep.pass) return {false, std::string(word) + " A_" + std::to_string(k) + " A_" + std::to_string(l) + " differ at " + where(*rep.mismatch)};
          ++pairs;
        }
      const auto st = ktasep::verify_equal_stationary(w, x);
      if (!st.pass) return {false, std::string(word) + " stationary law of A_" + std::to_string(st.k) + " differs"};
    }
  }
  return {true, std::to_string(pairs) + " commuting pairs over 3 words x 2 rate vectors; all A_k share pi"};
}

// ---- 7 ----
Outcome diagram_engine() {
  std::ostringstream det;
  bool ok = true;
  for (int n = 2; n <= 4; ++n) {
    const auto rep = diagrams::sweep_population(n);
    det << "n=" << n << ": " << rep.diagrams << " diagrams, reductions " << rep.reductions << "/" << rep.reduction_failures
        << " failed, lemma pairs " << rep.lemma_pairs << "/" << rep.lemma_failures << " failed, alpha errors "
        << rep.alpha_errors << " non-involutions " << rep.non_involutions << " incompatible " << rep.incompatible
        << " foreign " << rep.outside_population << "; ";
    if (!rep.pass()) {
      ok = false;
      for (const auto& w : rep.witnesses) det << "witness " << w << "; ";
    }
  }
  // Reference pair from the 16-column example, under the default alpha and the literal label rule.
  const auto input = diagrams::make_diagram("..WWBBBBB.W.BWBW", ".BBB..WWWBBBWW..");
  const auto expected = diagrams::make_diagram(".BBWBB.WW.W.BWB.", ".W.B.WBBBBBBWW.W");
  const auto a = diagrams::involution_alpha(input);
  const auto lit = diagrams::involution_alpha(input, true);
  const bool reproduced = a.ok && a.image == expected && a.labels_after == "-UTULLLUL";
  det << "example: default alpha gives labels " << a.labels_before << " -> " << a.labels_after
      << (reproduced ? " (matches)" : " (expected output NOT reproduced)");
  det << "; literal label rule gives " << lit.labels_after << (lit.ok && lit.image == expected ? " and the expected image" : " (no match)")
      << " but that pair is " << (diagrams::compatible(input, expected) ? "compatible" : "not compatible");
  if (!reproduced) ok = false;

  bool stretch = true;
  for (const auto& x : {ktasep::unit_rates(4), ktasep::LetterRates{Rational(3), make_rational(1, 2), make_rational(7, 5), Rational(2)}}) {
    const auto rep = diagrams::verify_pairing(4, x);
    stretch = stretch && rep.pass;
    if (!rep.pass && rep.witness) det << "; stretch witness " << *rep.witness;
  }
  det << "; stretch pairing n=4: " << (stretch ? "reproduces A_k A_l" : "FAILS") << " (non-blocking)";
  return {ok, det.str()};
}

// ---- 8 ----
Outcome general_case() {
  std::size_t tables = 0;
  for (auto f : {weyl::Family::C, weyl::Family::B}) {
    const weyl::WeylGroup g(weyl::build_root_system({f, 3}));
    Rational total = 0;
    for (const auto& a : g.roots().rates()) total += a;
    if (f == weyl::Family::C && total != 6) return {false, "C3 rate sum is " + to_display(total)};
    for (const auto& J : typec::all_subsets(3)) {
      const auto c = weyl::coset_decompose(g, J);
      if (auto w = weyl::verify_coset_invariance(g, c))
        return {false, weyl::spec_name(g.roots().spec) + " J=" + typec::format_subset(J) + " sigma_" + std::to_string(w->i) + " breaks cosets"};
      for (const auto& s : weyl::build_lam_chain(g, c).column_sums())
        if (s != total) return {false, "column sum " + to_display(s)};
      ++tables;
    }
  }
  for (int n = 2; n <= 4; ++n) {
    const weyl::WeylGroup g(weyl::build_root_system({weyl::Family::C, n}));
    for (const auto& J : typec::all_subsets(n)) {
      const auto c = weyl::coset_decompose(g, J);
      if (c.cosets() != typec::state_space(n, J).size())
        return {false, "C" + std::to_string(n) + " J=" + typec::format_subset(J) + " coset count differs"};
      for (const auto& s : weyl::build_lam_chain(g, c).column_sums())
        if (s != 2 * n) return {false, "C" + std::to_string(n) + " column sum " + to_display(s)};
    }
  }
  std::string conv;
  for (int n = 2; n <= 3; ++n) conv = weyl::calibrate_typeC_correspondence(n).convention.describe();
  return {true, std::to_string(tables) + " coset tables invariant (C3, B3), |cosets| = |Omega_J| for C2..C4, word and coset chains equal under: " + conv};
}

// ---- 9 ----
Outcome monte_carlo() {
  const int n = 3;
  const auto oj = typec::state_space(n, {});
  const auto link = typec::make_link(n, n, {});
  const auto ojp = typec::state_space(n, link.Jprime);
  const auto m = typec::build_transition_matrix(oj, n);
  mc::SimSpec spec;
  spec.events = 1'000'000;
  spec.seed = 42;
  for (std::size_t k = 0; k < oj.size(); ++k) spec.projection.push_back(ojp.index_of(typec::project(oj[k], link)));
  spec.projected_size = ojp.size();
  const auto res = mc::simulate(m, spec);
  const auto exact = markov::stationary(m).probabilities();
  const auto exact_p = markov::stationary(typec::build_transition_matrix(ojp, n)).probabilities();
  const auto tv = markov::tv_distance(res.empirical(), exact);
  const auto tvp = markov::tv_distance(res.projected_empirical(), exact_p);
  const Rational tol = make_rational(2, 100);
  std::ostringstream d;
  d << "n=3 10^6 events seed 42: TV " << tv.get_d() << ", projected (phi_3) TV " << tvp.get_d();
  return {tv < tol && tvp < tol, d.str()};
}

// ---- 10 ----
Outcome integrality() {
  std::size_t chains = 0, integral = 0;
  auto emit = [&](const std::string& name, const SparseRationalMatrix& m) {
    const auto rep = markov::integrality_report(markov::stationary(m));
    std::cout << "  " << name << ": " << rep.states << " states, " << (rep.all_integral ? "integral" : "NOT integral")
              << ", max " << to_display(rep.max_entry) << "\n";
    ++chains;
    integral += rep.all_integral;
  };
  for (int n = 1; n <= 3; ++n)
    for (const auto& J : typec::all_subsets(n))
      emit("C" + std::to_string(n) + " J=" + typec::format_subset(J), typec::build_transition_matrix(n, J));
  const weyl::WeylGroup b3(weyl::build_root_system({weyl::Family::B, 3}));
  for (const auto& J : typec::all_subsets(3))
    emit("B3 J=" + typec::format_subset(J), weyl::build_lam_chain(b3, weyl::coset_decompose(b3, J)));
  return {true, "report emitted for " + std::to_string(chains) + " chains, " + std::to_string(integral) + " integral"};
}

}  // namespace

int main() {
  run(1, packaged_conjugation);
  run(2, projections);
  run(3, queues);
  run(4, tau_example);
  run(5, brackets);
  run(6, ktaseps);
  run(7, diagram_engine);
  run(8, general_case);
  run(9, monte_carlo);
  run(10, integrality);
  std::cout << (failures ? std::to_string(failures) + " criteria failed" : "all criteria passed") << std::endl;
  return failures ? 1 : 0;
}
