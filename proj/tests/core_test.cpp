#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "wtl/wtl.hpp"

using namespace wtl;

namespace {

SparseRationalMatrix dense(const std::vector<std::vector<long>>& rows) {
  SparseRationalMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m.set(r, c, Rational(rows[r][c]));
  return m;
}

long factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

}  // namespace

// ---- exact arithmetic ----

TEST(Rational, ParseAndFormat) {
  EXPECT_EQ(parse_rational("6/4"), make_rational(3, 2));
  EXPECT_EQ(parse_rational("-7"), Rational(-7));
  EXPECT_EQ(to_string(Rational(5)), "5/1");
  EXPECT_EQ(to_display(make_rational(1, 2)), "1/2");
  EXPECT_THROW(parse_rational("1/0"), ParseError);
  EXPECT_THROW(parse_rational("abc"), ParseError);
  EXPECT_EQ(parse_rational_list("1,2/3, 5").size(), 3u);
}

TEST(SparseMatrix, ProductAndTranspose) {
  const auto a = dense({{1, 2}, {0, 3}});
  const auto b = dense({{4, 0}, {1, 1}});
  EXPECT_EQ(a * b, dense({{6, 2}, {3, 3}}));
  EXPECT_EQ(a.transpose(), dense({{1, 0}, {2, 3}}));
  EXPECT_EQ(a.column_sums(), (std::vector<Rational>{1, 5}));
  EXPECT_THROW(a * dense({{1, 2, 3}}), DomainError);
  const auto diff = first_difference(a, b);
  ASSERT_TRUE(diff);
  EXPECT_EQ(diff->row, 0u);
  EXPECT_EQ(diff->col, 0u);
}

TEST(SparseMatrix, ZeroEntriesAreNotStored) {
  SparseRationalMatrix m(2, 2);
  m.add(0, 1, 3);
  m.add(0, 1, -3);
  EXPECT_EQ(m.nonzeros(), 0u);
  EXPECT_EQ(m, SparseRationalMatrix(2, 2));
}

TEST(Linalg, NullspaceOfRankOneMatrix) {
  const auto m = dense({{1, 2, 3}, {2, 4, 6}});
  EXPECT_EQ(linalg::rank(m), 1u);
  const auto ker = linalg::nullspace(m);
  ASSERT_EQ(ker.size(), 2u);
  for (const auto& v : ker) {
    for (const auto& x : m.apply(v)) EXPECT_EQ(x, 0);
  }
}

// ---- Markov chains ----

TEST(Markov, TwoStateClosedForm) {
  // rate 3 from state 0 to 1, rate 5 back: pi = (5, 3) / 8
  SparseRationalMatrix m(2, 2);
  m.set(1, 0, 3);
  m.set(0, 1, 5);
  const auto pi = markov::stationary(m).probabilities();
  EXPECT_EQ(pi[0], make_rational(5, 8));
  EXPECT_EQ(pi[1], make_rational(3, 8));
  for (const auto& s : markov::generator_of(m).column_sums()) EXPECT_EQ(s, 0);
}

TEST(Markov, ReducibleChainIsRejected) {
  SparseRationalMatrix m(2, 2);
  m.set(0, 0, 1);
  m.set(1, 1, 1);
  EXPECT_THROW(markov::stationary(m), ReducibilityError);
}

TEST(Markov, LumpableChainIntertwines) {
  // star on 3 states (0 <-> 1, 0 <-> 2, all rate 1) lumped to {0}, {1,2}
  const auto big = dense({{0, 1, 1}, {1, 0, 0}, {1, 0, 0}});
  const std::vector<std::size_t> image{0, 1, 1};
  const auto d = markov::projection_matrix(image, 2);
  EXPECT_FALSE(markov::verify_intertwine(d, big, dense({{0, 1}, {2, 0}})));
  EXPECT_TRUE(markov::verify_intertwine(d, big, dense({{0, 2}, {2, 0}})));
  // pi = (1, 1, 1) projects to (1, 2), the lumped chain's own stationary law
  const auto projected = markov::project_distribution(d, markov::stationary(big), markov::stationary(dense({{0, 1}, {2, 0}})));
  EXPECT_EQ(projected.image[1], 2 * projected.image[0]);
}

TEST(Markov, SylvesterDiagonalCase) {
  // A U = U B with A = diag(1,2), B = diag(1,2,2): U(i,j) may be nonzero only when A_ii = B_jj.
  const auto a = dense({{1, 0}, {0, 2}});
  const auto b = dense({{1, 0, 0}, {0, 2, 0}, {0, 0, 2}});
  const auto space = markov::solve_sylvester(a, b);
  EXPECT_EQ(space.dimension(), 3u);
  EXPECT_TRUE(space.contains(dense({{7, 0, 0}, {0, 1, -4}})));
  EXPECT_FALSE(space.contains(dense({{0, 1, 0}, {0, 0, 0}})));
}

TEST(Markov, TotalVariationAndIntegrality) {
  const std::vector<Rational> p{make_rational(1, 2), make_rational(1, 2)};
  const std::vector<Rational> q{Rational(1), Rational(0)};
  EXPECT_EQ(markov::tv_distance(p, q), make_rational(1, 2));
  const auto rep = markov::integrality_report(markov::Distribution({Rational(2), Rational(3), Rational(4)}));
  EXPECT_FALSE(rep.all_integral);  // min-normalized: 1, 3/2, 2
  EXPECT_EQ(rep.non_integral, 1u);
}

// ---- matrix files ----

TEST(MatrixIo, JsonAndDenseRoundTrip) {
  SparseRationalMatrix m(2, 3);
  m.set(0, 2, make_rational(-3, 7));
  m.set(1, 0, 5);
  EXPECT_EQ(io::matrix_from_json(io::to_json(m)), m);
  EXPECT_EQ(io::matrix_from_dense_text(io::to_dense_text(m)), m);
  EXPECT_THROW(io::matrix_from_dense_text("1 2\n3\n"), ParseError);
  EXPECT_THROW(io::matrix_from_json(nlohmann::json::parse(R"({"nrows":1,"ncols":1,"entries":[[0,3,"1"]]})")), ParseError);
}

TEST(MatrixIo, PackagedMatrixMatchesTranscription) {
  const auto p = io::read_matrix_file(WTL_DATA_DIR "/conjugation_matrix.txt");
  ASSERT_EQ(p.rows(), 8u);
  ASSERT_EQ(p.cols(), 48u);
  const std::string first = "1 0 1 0 2 1 0 3 0 1 0 0 0 4 0 2 0 0 2 0 2 0 4 2 1 0 2 1 0 2 0 0 0 1 0 0 1 0 2 1 4 2 0 1 0 0 2 1";
  const std::string last = "0 1 0 0 0 0 1 2 1 1 2 1 2 4 2 2 4 2 0 0 0 0 0 0 1 2 2 1 0 0 0 0 1 1 2 1 0 0 0 0 4 3 0 0 2 1 0 0";
  std::istringstream a(first), b(last);
  for (std::size_t c = 0; c < 48; ++c) {
    long x = 0, y = 0;
    a >> x;
    b >> y;
    EXPECT_EQ(p.at(0, c), x);
    EXPECT_EQ(p.at(7, c), y);
  }
}

// ---- type C states ----

TEST(TypeC, WordRoundTripAndDisplay) {
  const auto w = typec::parse_word("-1,1,2,4,-2,-3,3,0,-5,1");
  EXPECT_EQ(typec::format_word(w), "-1,1,2,4,-2,-3,3,0,-5,1");
  EXPECT_EQ(typec::display_word(typec::parse_word("-2,0,1"), 2), "-2 3 1");
  EXPECT_THROW(typec::parse_word("1,x"), ParseError);
}

TEST(TypeC, StateCountsMatchMultinomials) {
  // count = n! / (prod m_c! * empties!) * 2^(occupied columns)
  auto expected = [](int n, std::vector<int> mult, int empties) {
    long c = factorial(n) / factorial(empties);
    for (int m : mult) c /= factorial(m);
    return c << (n - empties);
  };
  EXPECT_EQ(typec::state_space(4, {3, 4}).size(), static_cast<std::size_t>(expected(4, {1, 1}, 2)));
  EXPECT_EQ(typec::state_space(4, {3, 4}).size(), 48u);
  EXPECT_EQ(typec::state_space(4, {2, 3, 4}).size(), 8u);
  EXPECT_EQ(typec::state_space(3, {}).size(), static_cast<std::size_t>(expected(3, {1, 1, 1}, 0)));
  EXPECT_EQ(typec::state_space(3, {1}).size(), static_cast<std::size_t>(expected(3, {2, 1}, 0)));
  EXPECT_EQ(typec::state_space(4, {}).size(), 384u);
}

TEST(TypeC, ColumnSumsAreTotalRate) {
  for (int n = 2; n <= 3; ++n)
    for (const auto& J : typec::all_subsets(n)) {
      const auto m = typec::build_transition_matrix(n, J);
      for (const auto& s : m.column_sums()) EXPECT_EQ(s, 2 * n);
    }
}

TEST(TypeC, OneParticleCycleByHand) {
  // n = 2, one particle: the moves form a single 4-cycle, so pi is proportional to the
  // inverse exit rates, which alternate 2 and 1 around the cycle.
  const auto omega = typec::state_space(2, {2});
  const auto pi = markov::stationary(typec::build_transition_matrix(omega, 2)).min_normalized();
  std::map<std::string, Rational> w;
  for (std::size_t k = 0; k < omega.size(); ++k) w[typec::format_word(omega[k])] = pi[k];
  EXPECT_EQ(w.at("0,1"), 1);
  EXPECT_EQ(w.at("1,0"), 2);
  EXPECT_EQ(w.at("-1,0"), 1);
  EXPECT_EQ(w.at("0,-1"), 2);
}

TEST(TypeC, ProjectionIntertwinesOnEveryLink) {
  for (const auto& link : typec::all_links(2)) {
    const auto oj = typec::state_space(2, link.J), ojp = typec::state_space(2, link.Jprime);
    const auto d = typec::projection_matrix(link, oj, ojp);
    EXPECT_FALSE(markov::verify_intertwine(d, typec::build_transition_matrix(oj, 2), typec::build_transition_matrix(ojp, 2)));
  }
}

TEST(TypeC, InvalidSubsetRejected) { EXPECT_THROW(typec::state_space(3, {4}), DomainError); }

// ---- root systems and Weyl groups ----

TEST(RootSystem, ClassicalCounts) {
  struct Case {
    weyl::Family f;
    int rank;
    std::size_t positive;
    std::size_t order;
    std::vector<int> marks;
  };
  const std::vector<Case> cases{{weyl::Family::A, 3, 6, 24, {1, 1, 1}},
                                {weyl::Family::B, 3, 9, 48, {1, 2, 2}},
                                {weyl::Family::C, 3, 9, 48, {2, 2, 1}},
                                {weyl::Family::C, 4, 16, 384, {2, 2, 2, 1}},
                                {weyl::Family::D, 4, 12, 192, {1, 2, 1, 1}}};
  for (const auto& c : cases) {
    const auto rs = weyl::build_root_system({c.f, c.rank});
    EXPECT_EQ(rs.positive_roots.size(), c.positive) << weyl::spec_name(rs.spec);
    EXPECT_EQ(rs.marks, c.marks) << weyl::spec_name(rs.spec);
    const weyl::WeylGroup g(rs);
    EXPECT_EQ(g.size(), c.order);
    EXPECT_EQ(weyl::classical_order(rs.spec), c.order);
  }
}

TEST(RootSystem, LengthGeneratingFunctionB2) {
  // Poincare polynomial of B2: 1 + 2q + 2q^2 + 2q^3 + q^4
  const weyl::WeylGroup g(weyl::build_root_system({weyl::Family::C, 2}));
  std::map<int, int> count;
  for (std::size_t k = 0; k < g.size(); ++k) ++count[g.length(k)];
  EXPECT_EQ(count, (std::map<int, int>{{0, 1}, {1, 2}, {2, 2}, {3, 2}, {4, 1}}));
}

TEST(RootSystem, ReflectionsAreInvolutions) {
  const auto rs = weyl::build_root_system({weyl::Family::B, 3});
  for (int i = 0; i <= 3; ++i) {
    const auto t = weyl::reflection(rs, i);
    EXPECT_EQ(t * t, weyl::GroupElement::identity(rs.ambient));
    EXPECT_EQ(weyl::length(t, rs) % 2, 1);
  }
  EXPECT_THROW(weyl::build_root_system({weyl::Family::D, 3}), ConfigError);
}

TEST(Weyl, CosetInvarianceAndCounts) {
  for (auto f : {weyl::Family::B, weyl::Family::C}) {
    const weyl::WeylGroup g(weyl::build_root_system({f, 3}));
    for (const auto& J : typec::all_subsets(3)) {
      const auto cosets = weyl::coset_decompose(g, J);
      EXPECT_FALSE(weyl::verify_coset_invariance(g, cosets));
      const auto m = weyl::build_lam_chain(g, cosets);
      Rational total = 0;
      for (const auto& a : g.roots().rates()) total += a;
      for (const auto& s : m.column_sums()) EXPECT_EQ(s, total);
    }
  }
}

TEST(Weyl, TypeCCosetsMatchWordStates) {
  for (int n = 2; n <= 3; ++n) {
    const weyl::WeylGroup g(weyl::build_root_system({weyl::Family::C, n}));
    for (const auto& J : typec::all_subsets(n))
      EXPECT_EQ(weyl::coset_decompose(g, J).cosets(), typec::state_space(n, J).size());
  }
}

TEST(Weyl, CosetProjectionIntertwines) {
  const weyl::WeylGroup g(weyl::build_root_system({weyl::Family::C, 3}));
  const auto a = weyl::coset_decompose(g, {1});
  const auto b = weyl::coset_decompose(g, {1, 2});
  const auto d = weyl::coset_projection(a, b);
  EXPECT_FALSE(markov::verify_intertwine(d, weyl::build_lam_chain(g, a), weyl::build_lam_chain(g, b)));
}

TEST(Correspondence, TypeCIsUniqueAndDirect) {
  for (int n = 2; n <= 3; ++n) {
    const auto r = weyl::calibrate_typeC_correspondence(n);
    EXPECT_EQ(r.matches.size(), 1u);
    EXPECT_EQ(r.convention, (weyl::Convention{false, false, false}));
  }
}

TEST(Correspondence, TypeAMatchesRingTasep) {
  const auto r = weyl::calibrate_typeA_correspondence(4);
  EXPECT_GE(r.matches.size(), 1u);
}

// ---- Monte Carlo ----

TEST(MonteCarlo, SingleStateChain) {
  SparseRationalMatrix m(1, 1);
  m.set(0, 0, 1);
  mc::SimSpec s;
  s.events = 100;
  s.seed = 1;
  const auto r = mc::simulate(m, s);
  EXPECT_EQ(r.empirical(), (std::vector<Rational>{1}));
}

TEST(MonteCarlo, DeterministicAndClose) {
  SparseRationalMatrix m(2, 2);
  m.set(1, 0, 3);
  m.set(0, 1, 5);
  mc::SimSpec s;
  s.events = 200000;
  s.seed = 7;
  const auto a = mc::simulate(m, s), b = mc::simulate(m, s);
  EXPECT_EQ(a.counts, b.counts);
  const std::vector<Rational> exact{make_rational(5, 8), make_rational(3, 8)};
  EXPECT_LT(mc::tv_distance(std::span<const Rational>(a.empirical()), std::span<const Rational>(exact)), make_rational(1, 100));
}

TEST(MonteCarlo, BadSpecsRejected) {
  SparseRationalMatrix m(2, 2);
  m.set(1, 0, 3);
  m.set(0, 1, 5);
  mc::SimSpec s;
  EXPECT_THROW(mc::simulate(m, s), ConfigError);  // no events
  s.events = 10;
  s.uniformization = Rational(1);
  EXPECT_THROW(mc::simulate(m, s), DomainError);
}

TEST(Parallel, ResultsIndependentOfThreads) {
  std::vector<long> out(1000);
  parallel_for(out.size(), [&](std::size_t i) { out[i] = static_cast<long>(i * i); });
  EXPECT_EQ(out[999], 998001);
  EXPECT_THROW(parallel_for(10, [](std::size_t i) {
                 if (i == 5) throw DomainError("boom");
               }),
               DomainError);
}
