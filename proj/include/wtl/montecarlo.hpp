#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "wtl/errors.hpp"
#include "wtl/markov.hpp"
#include "wtl/parallel.hpp"
#include "wtl/rational.hpp"
#include "wtl/sparse_matrix.hpp"

// Uniformized simulation of a chain given by its (target, source) rate matrix.
namespace wtl::mc {

using markov::tv_distance;

inline Rational tv_distance(const markov::Distribution& a, const markov::Distribution& b) {
  const auto p = a.probabilities();
  const auto q = b.probabilities();
  return markov::tv_distance(p, q);
}

struct SimSpec {
  std::size_t initial = 0;
  std::uint64_t events = 0;
  std::uint64_t seed = 0;
  double burn_in_fraction = 0.1;
  std::optional<Rational> uniformization;  // defaults to the largest column sum
  std::vector<std::size_t> projection;     // optional state map for a projected trajectory
  std::size_t projected_size = 0;
  bool record_path = false;
};

struct SimResult {
  std::uint64_t events = 0;
  std::uint64_t seed = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t self_loops = 0;
  std::vector<std::uint64_t> counts;
  std::vector<std::uint64_t> projected_counts;
  std::vector<std::size_t> path;

  static std::vector<Rational> normalize(const std::vector<std::uint64_t>& c) {
    std::uint64_t total = 0;
    for (auto v : c) total += v;
    std::vector<Rational> out;
    for (auto v : c) out.push_back(make_rational(static_cast<long>(v), static_cast<long>(total)));
    return out;
  }

  std::vector<Rational> empirical() const { return normalize(counts); }
  std::vector<Rational> projected_empirical() const { return normalize(projected_counts); }
};

// Each step: from state s jump to t with probability M(t, s) / lambda, otherwise stay. This
// discrete chain has the same stationary law as the continuous-time one, and since holding
// times are i.i.d. the step average estimates the time average.
class Simulator {
 public:
  explicit Simulator(const SparseRationalMatrix& m, std::optional<Rational> lambda = std::nullopt) {
    if (!m.square() || m.rows() == 0) throw DomainError("simulation needs a non-empty square chain");
    const auto sums = m.column_sums();
    Rational top = 0;
    for (const auto& s : sums) top = std::max(top, s);
    lambda_ = lambda ? *lambda : top;
    if (lambda_ < top) throw DomainError("uniformization constant below the largest total rate");
    if (lambda_ <= 0) lambda_ = 1;
    targets_.resize(m.cols());
    cumulative_.resize(m.cols());
    m.for_each([&](std::size_t r, std::size_t c, const Rational& v) {
      if (v < 0) throw DomainError("negative rate in chain");
      targets_[c].push_back(r);
      const double prev = cumulative_[c].empty() ? 0.0 : cumulative_[c].back();
      cumulative_[c].push_back(prev + Rational(v / lambda_).get_d());
    });
  }

  std::size_t states() const { return targets_.size(); }
  const Rational& lambda() const { return lambda_; }

  SimResult run(const SimSpec& spec) const {
    if (spec.events == 0) throw ConfigError("event count must be positive");
    if (spec.initial >= states()) throw DomainError("initial state out of range");
    if (spec.burn_in_fraction < 0 || spec.burn_in_fraction >= 1) throw ConfigError("burn-in fraction must lie in [0, 1)");
    const bool project = !spec.projection.empty();
    if (project && spec.projection.size() != states()) throw DomainError("projection map has the wrong size");
    SimResult res;
    res.events = spec.events;
    res.seed = spec.seed;
    res.burn_in = static_cast<std::uint64_t>(spec.burn_in_fraction * static_cast<double>(spec.events));
    res.counts.assign(states(), 0);
    if (project) res.projected_counts.assign(spec.projected_size, 0);
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::size_t s = spec.initial;
    for (std::uint64_t e = 0; e < spec.events; ++e) {
      const double x = unif(rng);
      const auto& cum = cumulative_[s];
      const auto it = std::upper_bound(cum.begin(), cum.end(), x);
      if (it == cum.end()) {
        ++res.self_loops;
      } else {
        s = targets_[s][static_cast<std::size_t>(it - cum.begin())];
      }
      if (e >= res.burn_in) {
        ++res.counts[s];
        if (project) ++res.projected_counts[spec.projection[s]];
        if (spec.record_path) res.path.push_back(s);
      }
    }
    return res;
  }

 private:
  Rational lambda_;
  std::vector<std::vector<std::size_t>> targets_;
  std::vector<std::vector<double>> cumulative_;
};

inline SimResult simulate(const SparseRationalMatrix& m, const SimSpec& spec) { return Simulator(m, spec.uniformization).run(spec); }

// Independent replicas, one per seed; results come back in seed order.
inline std::vector<SimResult> simulate_replicas(const SparseRationalMatrix& m, SimSpec spec, const std::vector<std::uint64_t>& seeds) {
  Simulator sim(m, spec.uniformization);
  std::vector<SimResult> out(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    SimSpec local = spec;
    local.seed = seeds[i];
    out[i] = sim.run(local);
  });
  return out;
}

inline nlohmann::json summary_json(const SimResult& r, const std::optional<Rational>& tv_to_exact = std::nullopt) {
  nlohmann::json emp = nlohmann::json::array();
  for (const auto& p : r.empirical()) emp.push_back(to_string(p));
  nlohmann::json j{{"events", r.events}, {"seed", r.seed}, {"burn_in", r.burn_in}, {"empirical", emp}};
  if (tv_to_exact) j["tv_to_exact"] = to_string(*tv_to_exact);
  return j;
}

}  // namespace wtl::mc
