#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wtl/wtl.hpp"

namespace {

using nlohmann::json;
using namespace wtl;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

int report(bool ok, const std::string& what, const std::string& witness = {}) {
  std::cout << (ok ? "PASS " : "FAIL ") << what << "\n";
  if (!ok && !witness.empty()) std::cout << "witness: " << witness << "\n";
  return ok ? kPass : kFail;
}

std::string mismatch_text(const EntryMismatch& e) {
  return "entry (" + std::to_string(e.row) + "," + std::to_string(e.col) + ") lhs=" + to_display(e.lhs) +
         " rhs=" + to_display(e.rhs);
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw ParseError("");
    } catch (const std::exception&) {
      throw ParseError("expected a comma-separated integer list, got '" + s + "'");
    }
  }
  return out;
}

json rationals_json(const std::vector<Rational>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

void write_or_print(const std::string& out, const json& j) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(out);
  if (!f) throw ConfigError("cannot write '" + out + "'");
  f << j.dump() << "\n";
}

struct ModelFlags {
  models::ModelSpec spec;
  std::string J;

  void attach(CLI::App* app) {
    app->add_option("--model", spec.model, "typec | weyl | ktasep | twoclass")->capture_default_str();
    app->add_option("--n", spec.n, "half-length (typec), word length (ktasep, twoclass)")->capture_default_str();
    app->add_option("--J", J, "comma-separated subset, e.g. 3,4");
    app->add_option("--family", spec.family, "root system family A|B|C|D (weyl)")->capture_default_str();
    app->add_option("--rank", spec.rank, "root system rank (weyl)")->capture_default_str();
    app->add_option("--word", spec.word, "ktasep multiset, e.g. 1,1,2,3");
    app->add_option("--k", spec.k, "ktasep update size")->capture_default_str();
    app->add_option("--x", spec.x, "ktasep letter rates, e.g. 1,2/3,5");
    app->add_option("--t", spec.t, "twoclass particle count")->capture_default_str();
    app->add_option("--params", spec.params, "twoclass rates a,b,c,d,e");
  }

  models::ModelSpec resolved() const {
    auto s = spec;
    s.J = parse_int_list(J);
    return s;
  }
};

// ---- rootsys ----

int cmd_rootsys_show(const std::string& family, int rank, bool as_json) {
  const auto rs = weyl::build_root_system({weyl::parse_family(family), rank});
  const weyl::WeylGroup g(rs);
  auto vec = [](const weyl::Vec& v) { return rationals_json(v); };
  json j{{"type", weyl::spec_name(rs.spec)}, {"ambient_dim", rs.ambient}, {"positive_roots", rs.positive_roots.size()},
         {"group_order", g.size()}, {"marks", rs.marks}, {"rates", rationals_json(rs.rates())},
         {"highest_root", vec(rs.highest_root)}};
  json simple = json::array();
  for (const auto& a : rs.simple_roots) simple.push_back(vec(a));
  j["simple_roots"] = simple;
  if (as_json) {
    std::cout << j.dump(2) << "\n";
    return kPass;
  }
  auto text = [](const weyl::Vec& v) {
    std::string s = "(";
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + to_display(v[k]);
    return s + ")";
  };
  std::cout << "type " << weyl::spec_name(rs.spec) << "  |W| = " << g.size() << "  |Phi+| = " << rs.positive_roots.size() << "\n";
  for (std::size_t i = 0; i < rs.simple_roots.size(); ++i) std::cout << "alpha_" << i + 1 << " = " << text(rs.simple_roots[i]) << "\n";
  std::cout << "alpha_0 = " << text(rs.highest_root) << "  marks = " << json(rs.marks).dump() << "\n";
  return kPass;
}

// ---- chain ----

int cmd_chain_matrix(const ModelFlags& mf, const std::string& out, bool dense) {
  const auto c = models::build(mf.resolved());
  if (!out.empty()) {
    io::write_matrix_file(out, c.matrix, dense);
    std::cout << c.name << ": " << c.matrix.rows() << " states written to " << out << "\n";
    return kPass;
  }
  write_or_print({}, json{{"chain", c.name}, {"states", c.states}, {"matrix", io::to_json(c.matrix)}});
  return kPass;
}

int cmd_chain_stationary(const ModelFlags& mf, const std::string& normalize, const std::string& out) {
  const auto c = models::build(mf.resolved());
  const auto pi = markov::stationary(c.matrix);
  std::vector<Rational> w;
  if (normalize == "integer") {
    w = pi.min_normalized();
    // clear remaining denominators
    mpz_class l = 1;
    for (const auto& v : w) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
    for (auto& v : w) v *= Rational(l);
  } else if (normalize == "prob") {
    w = pi.probabilities();
  } else {
    throw ConfigError("--normalize must be integer or prob");
  }
  write_or_print(out, json{{"chain", c.name}, {"normalize", normalize}, {"states", c.states}, {"weights", rationals_json(w)}});
  return kPass;
}

// ---- verify ----

int cmd_verify_intertwine(int n, bool all_links, const std::string& J, int i) {
  std::vector<typec::Link> links;
  if (all_links || i == 0) links = typec::all_links(n);
  else links.push_back(typec::make_link(n, i, parse_int_list(J)));
  for (const auto& link : links) {
    const auto oj = typec::state_space(n, link.J), ojp = typec::state_space(n, link.Jprime);
    const auto d = typec::projection_matrix(link, oj, ojp);
    const auto mj = typec::build_transition_matrix(oj, n), mjp = typec::build_transition_matrix(ojp, n);
    const std::string name = "link i=" + std::to_string(link.i) + " J=" + typec::format_subset(link.J);
    if (auto e = markov::verify_intertwine(d, mj, mjp)) return report(false, "verify intertwine " + name, mismatch_text(*e));
    const auto proj = d.apply(markov::stationary(mj).weights());
    const auto target = markov::stationary(mjp);
    if (!(markov::Distribution(proj) == target)) return report(false, "verify intertwine " + name, "D pi_J is not proportional to pi_J'");
  }
  return report(true, "verify intertwine n=" + std::to_string(n) + " links=" + std::to_string(links.size()));
}

int cmd_verify_queue(int n, const std::string& J, bool square, bool corrupt) {
  queue::TauOptions opt;
  opt.exclusive_start = corrupt;
  std::vector<typec::Subset> subsets;
  if (!J.empty()) subsets.push_back(typec::normalize_subset(parse_int_list(J)));
  else
    for (const auto& s : typec::all_subsets(n - 1)) subsets.push_back(s);
  for (const auto& s : subsets) {
    const auto rep = square ? queue::verify_square_corollary(n, s, opt) : queue::verify_queue_theorem(n, s, opt);
    const std::string name = std::string(square ? "verify queue-square" : "verify queue") + " n=" + std::to_string(n) +
                             " J=" + typec::format_subset(s);
    if (!rep.pass) {
      const auto& w = *rep.witness;
      return report(false, name,
                    "u=" + typec::format_word(w.u) + " theta=" + queue::format_theta(w.theta) + " bell=" + std::to_string(w.bell) +
                        " at (" + std::to_string(w.row) + "," + std::to_string(w.col) + ") lhs=" + to_display(w.lhs) +
                        " rhs=" + to_display(w.rhs));
    }
    std::cout << "PASS " << name << "\n";
  }
  return kPass;
}

int cmd_verify_conjugation(const std::string& mj, const std::string& mjp, const std::string& u, bool transpose_u) {
  const auto a = io::read_matrix_file(mj);
  const auto b = io::read_matrix_file(mjp);
  auto uu = io::read_matrix_file(u);
  if (transpose_u) uu = uu.transpose();
  if (auto e = markov::verify_conjugation(a, uu, b)) return report(false, "verify conjugation", mismatch_text(*e));
  return report(true, "verify conjugation " + std::to_string(a.rows()) + "x" + std::to_string(b.rows()));
}

int cmd_verify_bracket(int max_n, const std::string& params, bool corrupt) {
  const auto p = params.empty() ? bracket::Params{} : bracket::Params::from_list(parse_rational_list(params));
  for (int n = 1; n <= max_n; ++n)
    for (int t = 0; t <= n; ++t) {
      const auto rep = bracket::verify_bracket_theorem(n, t, p, corrupt);
      if (!rep.pass)
        return report(false, "verify bracket n=" + std::to_string(n) + " t=" + std::to_string(t),
                      "state " + bracket::format_word(*rep.witness) + " residual " + to_display(rep.residual));
    }
  return report(true, "verify bracket max-n=" + std::to_string(max_n) + " params=" + bracket::format_params(p));
}

int cmd_verify_ktasep(int n, const std::string& word, const std::string& x) {
  models::ModelSpec s;
  s.model = "ktasep";
  s.n = n;
  s.word = word;
  s.x = x;
  const auto w = models::ktasep_word(s);
  const auto rates = models::ktasep_rates(s, w);
  const int len = static_cast<int>(w.size());
  for (int k = 1; k < len; ++k)
    for (int l = k + 1; l < len; ++l) {
      const auto rep = ktasep::verify_commutation(w, rates, k, l);
      if (!rep.pass) return report(false, "verify ktasep commutation k=" + std::to_string(k) + " l=" + std::to_string(l), mismatch_text(*rep.mismatch));
    }
  const auto st = ktasep::verify_equal_stationary(w, rates);
  if (!st.pass) return report(false, "verify ktasep stationary", "k=" + std::to_string(st.k) + " differs from k=1");
  return report(true, "verify ktasep word=" + ktasep::format_ring_word(w));
}

int cmd_verify_diagrams(int max_n, bool literal) {
  bool ok = true;
  for (int n = 2; n <= max_n; ++n) {
    const auto r = diagrams::sweep_population(n, literal);
    std::cout << (r.pass() ? "PASS" : "FAIL") << " verify diagrams n=" << n << (literal ? " literal" : "") << " diagrams=" << r.diagrams
              << " reductions=" << r.reductions << " lemma-pairs=" << r.lemma_pairs << " incompatible=" << r.incompatible
              << " non-involutions=" << r.non_involutions << " relabel-matched-cores=" << r.fallback_cores << "\n";
    if (!r.pass()) {
      ok = false;
      if (!r.witnesses.empty()) std::cout << "witness: " << r.witnesses.front();
    }
  }
  return ok ? kPass : kFail;
}

// ---- diagram ----

int cmd_diagram_alpha(const std::string& file, bool literal) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open diagram file '" + file + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto d = diagrams::parse_diagram(buf.str());
  const auto a = diagrams::involution_alpha(d, literal);
  if (!a.ok) return report(false, "diagram alpha", a.error);
  std::cout << diagrams::format_diagram(a.image);
  std::cerr << "core\n" << diagrams::format_diagram(a.reduced.core) << "labels " << a.labels_before << " -> " << a.labels_after << "\n";
  return kPass;
}

// ---- simulate ----

int cmd_simulate(const ModelFlags& mf, std::uint64_t events, std::uint64_t seed, double burn_in, std::size_t initial, int link) {
  const auto spec = mf.resolved();
  const auto c = models::build(spec);
  mc::SimSpec ss;
  ss.events = events;
  ss.seed = seed;
  ss.burn_in_fraction = burn_in;
  ss.initial = initial;
  std::optional<markov::Distribution> projected_exact;
  if (link > 0) {
    if (spec.model != "typec") throw ConfigError("--link applies to the typec model");
    const auto l = typec::make_link(spec.n, link, spec.J);
    const auto oj = typec::state_space(spec.n, l.J), ojp = typec::state_space(spec.n, l.Jprime);
    for (std::size_t k = 0; k < oj.size(); ++k) ss.projection.push_back(ojp.index_of(typec::project(oj[k], l)));
    ss.projected_size = ojp.size();
    projected_exact = markov::stationary(typec::build_transition_matrix(ojp, spec.n));
  }
  const auto res = mc::simulate(c.matrix, ss);
  const auto exact = markov::stationary(c.matrix).probabilities();
  auto j = mc::summary_json(res, mc::tv_distance(std::span<const Rational>(res.empirical()), std::span<const Rational>(exact)));
  j["chain"] = c.name;
  if (projected_exact) j["projected_tv_to_exact"] = to_string(mc::tv_distance(markov::Distribution(res.projected_empirical()), *projected_exact));
  std::cout << j.dump(2) << "\n";
  return kPass;
}

// ---- report ----

int cmd_report_integrality(const ModelFlags& mf, bool all_J) {
  auto spec = mf.resolved();
  std::vector<std::vector<int>> subsets;
  if (all_J) {
    const int r = spec.model == "weyl" ? spec.rank : spec.n;
    for (const auto& s : typec::all_subsets(r)) subsets.push_back(s);
  } else {
    subsets.push_back(spec.J);
  }
  json rows = json::array();
  for (const auto& J : subsets) {
    spec.J = J;
    const auto c = models::build(spec);
    const auto rep = markov::integrality_report(markov::stationary(c.matrix));
    rows.push_back({{"chain", c.name}, {"states", rep.states}, {"integral", rep.all_integral}, {"non_integral", rep.non_integral},
                    {"max_weight", to_string(rep.max_entry)}});
    std::cout << "REPORT integrality " << c.name << ": " << (rep.all_integral ? "integral" : "not integral") << " max=" << to_display(rep.max_entry)
              << "\n";
  }
  std::cout << rows.dump() << "\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact tools for Lam's chains, multiline queues, the two-class bracket and the k-TASEP"};
  app.set_config("--config", "", "key=value file supplying flag defaults");
  app.require_subcommand(1);

  auto* rootsys = app.add_subcommand("rootsys", "root system data");
  rootsys->require_subcommand(1);
  auto* rs_show = rootsys->add_subcommand("show", "simple roots, highest root, marks");
  std::string family = "C";
  int rank = 3;
  bool as_json = false;
  rs_show->add_option("--family", family)->capture_default_str();
  rs_show->add_option("--rank", rank)->capture_default_str();
  rs_show->add_flag("--json", as_json);

  auto* chain = app.add_subcommand("chain", "build chains");
  chain->require_subcommand(1);
  auto* ch_matrix = chain->add_subcommand("matrix", "transition matrix (target, source)");
  ModelFlags mf_matrix;
  mf_matrix.attach(ch_matrix);
  std::string out;
  bool dense = false;
  ch_matrix->add_option("--out", out, "write the matrix to FILE (JSON, or dense text with --dense)");
  ch_matrix->add_flag("--dense", dense);
  auto* ch_stat = chain->add_subcommand("stationary", "exact stationary distribution");
  ModelFlags mf_stat;
  mf_stat.attach(ch_stat);
  std::string normalize = "integer";
  ch_stat->add_option("--normalize", normalize, "integer | prob")->capture_default_str();
  ch_stat->add_option("--out", out);

  auto* verify = app.add_subcommand("verify", "exact verifications");
  verify->require_subcommand(1);
  int vn = 3, vi = 0, max_n = 4;
  bool all_links = false, square = false, corrupt = false, literal = false;
  std::string vJ, mj, mjp, ufile, params, word, x;
  bool transpose_u = false;
  auto* v_inter = verify->add_subcommand("intertwine", "D M_J = M_J' D for type C links");
  v_inter->add_option("--rank", vn)->capture_default_str();
  v_inter->add_flag("--all-links", all_links);
  v_inter->add_option("--J", vJ);
  v_inter->add_option("--i", vi, "link index; 0 means every link")->capture_default_str();
  auto* v_queue = verify->add_subcommand("queue", "U M_J' = M_J U");
  v_queue->add_option("--rank", vn)->capture_default_str();
  v_queue->add_option("--J", vJ, "subset of [n-1]; default all");
  v_queue->add_flag("--square", square, "check the square corollary on Omega_J");
  v_queue->add_flag("--corrupt-tau", corrupt)->group("");
  auto* v_conj = verify->add_subcommand("conjugation", "A U = U B from matrix files");
  v_conj->add_option("--mj", mj)->required();
  v_conj->add_option("--mjp", mjp)->required();
  v_conj->add_option("--u", ufile)->required();
  v_conj->add_flag("--transpose-u", transpose_u, "read U as its transpose (rows index the small chain)");
  auto* v_bracket = verify->add_subcommand("bracket", "bracket vector is stationary for the two-class chain");
  v_bracket->add_option("--max-n", max_n)->capture_default_str();
  v_bracket->add_option("--params", params, "a,b,c,d,e");
  v_bracket->add_flag("--corrupt-rule3", corrupt)->group("");
  auto* v_ktasep = verify->add_subcommand("ktasep", "A_k commute and share a stationary law");
  v_ktasep->add_option("--n", vn)->capture_default_str();
  v_ktasep->add_option("--word", word);
  v_ktasep->add_option("--x", x);
  auto* v_diag = verify->add_subcommand("diagrams", "exhaustive diagram checks up to n");
  v_diag->add_option("--n", max_n)->capture_default_str();
  v_diag->add_flag("--literal", literal, "apply the block rewrite without the compatibility guard");

  auto* diagram = app.add_subcommand("diagram", "diagram tools");
  diagram->require_subcommand(1);
  auto* d_alpha = diagram->add_subcommand("alpha", "apply the involution to a diagram file");
  std::string dfile;
  d_alpha->add_option("--file", dfile)->required();
  d_alpha->add_flag("--literal", literal);

  auto* sim = app.add_subcommand("simulate", "uniformized Monte Carlo");
  ModelFlags mf_sim;
  mf_sim.attach(sim);
  std::uint64_t events = 0, seed = 0;
  double burn_in = 0.1;
  std::size_t initial = 0;
  int link = 0;
  sim->add_option("--events", events)->required();
  sim->add_option("--seed", seed)->required();
  sim->add_option("--burn-in", burn_in)->capture_default_str();
  sim->add_option("--initial", initial)->capture_default_str();
  sim->add_option("--link", link, "also track the projection phi_i (typec)");

  auto* rep = app.add_subcommand("report", "experimental reports");
  rep->require_subcommand(1);
  auto* r_int = rep->add_subcommand("integrality", "integer-normalized stationary vectors");
  ModelFlags mf_int;
  mf_int.attach(r_int);
  bool all_J = false;
  r_int->add_flag("--all-J", all_J);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*rs_show) return cmd_rootsys_show(family, rank, as_json);
    if (*ch_matrix) return cmd_chain_matrix(mf_matrix, out, dense);
    if (*ch_stat) return cmd_chain_stationary(mf_stat, normalize, out);
    if (*v_inter) return cmd_verify_intertwine(vn, all_links, vJ, vi);
    if (*v_queue) return cmd_verify_queue(vn, vJ, square, corrupt);
    if (*v_conj) return cmd_verify_conjugation(mj, mjp, ufile, transpose_u);
    if (*v_bracket) return cmd_verify_bracket(max_n, params, corrupt);
    if (*v_ktasep) return cmd_verify_ktasep(vn, word, x);
    if (*v_diag) return cmd_verify_diagrams(max_n, literal);
    if (*d_alpha) return cmd_diagram_alpha(dfile, literal);
    if (*sim) return cmd_simulate(mf_sim, events, seed, burn_in, initial, link);
    if (*r_int) return cmd_report_integrality(mf_int, all_J);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SizeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cout << "FAIL " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
