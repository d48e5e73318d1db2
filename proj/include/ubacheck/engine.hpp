#pragma once

#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "ubacheck/automata.hpp"
#include "ubacheck/cuts.hpp"
#include "ubacheck/graph.hpp"
#include "ubacheck/linalg.hpp"
#include "ubacheck/markov.hpp"
#include "ubacheck/product.hpp"

namespace ubacheck::engine {

using automata::Nba;
using markov::Dtmc;

enum class Method { Power, Rank };

std::string to_string(Method m);
Method parse_method(const std::string& name);

struct MeasureOptions {
  Method method = Method::Power;
  double epsilon = 1e-10;
  std::size_t max_iter = 1000000;
  double rank_tol = 1e-9;
  bool trust_unambiguous = false;
  unsigned workers = 1;
  bool shortcuts = true;  // co-safety and separated-automaton fast paths
  bool uniform = false;   // the chain is M[Σ]; set by measure_uniform
};

class AmbiguityError : public Error {
 public:
  AmbiguityError(automata::AmbiguityWitness witness, const std::string& description)
      : Error("automaton is ambiguous\n" + description), witness_(std::move(witness)) {}
  const automata::AmbiguityWitness& witness() const noexcept { return witness_; }

 private:
  automata::AmbiguityWitness witness_;
};

struct SccReport {
  std::uint32_t id = 0;
  std::size_t size = 0;
  bool positive = false;
  std::size_t cut_size = 0;
  std::size_t iterations = 0;
  std::size_t growth_steps = 0;
  bool used_fallback = false;
  bool cut_shortcut = false;
};

struct ComponentCut {
  std::uint32_t component;
  cuts::Cut cut;
};

struct MeasureResult {
  double probability = 0.0;      // clamped to [0,1]
  double raw_probability = 0.0;
  std::vector<double> per_node;      // clamped ζ*, indexed by product node
  std::vector<double> per_node_raw;  // before clamping
  product::ProductAutomaton product;
  graph::SccDag dag;
  std::vector<ComponentCut> cuts;
  std::vector<SccReport> sccs;
  std::string method;
  bool cosafety = false;
  double residual_max = 0.0;
  double wall_ms = 0.0;
};

/// Pr^M(L(U)).
MeasureResult measure(const Dtmc& dtmc, const Nba& nba, const MeasureOptions& opts = {});

/// Pr(L(U)) under the uniform measure on Σ^ω.
MeasureResult measure_uniform(const Nba& nba, MeasureOptions opts = {});

bool almost_universal(const Nba& nba, MeasureOptions opts = {});

/// Largest deviation from the fixed-point equations and cut normalizations.
double equation_residual(const MeasureResult& r);

/// {probability, method, sccs: [{id, size, positive, cut_size, iterations}], residual_max, wall_ms}
std::string report_json(const MeasureResult& r, int indent = 2);

struct OracleOptions {
  std::size_t max_states = std::size_t{1} << 16;
  std::size_t exact_limit = 250;  // unknowns solved with rationals
  bool exact = true;
};

struct OracleResult {
  double value = 0.0;
  std::optional<mpq_class> exact;
  std::size_t powerset_states = 0;
};

/// 1 - Pr(δ(Q0, L(s0 s1 ... sn)) = ∅ for some n). Requires the reachable
/// product to be strongly connected and to contain a final node.
OracleResult powerset_absorption_oracle(const Nba& nba, const Dtmc& dtmc, const OracleOptions& opts = {});

/// Same, started from chain state s with automaton states R already placed at s.
OracleResult absorption_from(const Nba& nba, const Dtmc& dtmc, std::uint32_t s, const StateSet& r,
                             const OracleOptions& opts = {});

/// 1 - Pr(blocking) for the powerset chain over node sets of one product
/// component, started from `start` (nodes on one chain state).
double absorption_in_component(const product::ProductAutomaton& prod, const graph::SccDag& dag,
                               std::uint32_t component, const std::vector<NodeId>& start,
                               std::size_t max_states = std::size_t{1} << 16);

struct SampleResult {
  std::size_t samples = 0;
  std::size_t blocked = 0;
  double estimate = 0.0;  // fraction of paths still alive at the horizon
  double std_error = 0.0;
};

/// Monte-Carlo estimate of the probability that δ(Q0, prefix) stays nonempty
/// for `horizon` steps. An upper bound on the measure, for sanity checks only.
SampleResult sample_alive(const Nba& nba, const Dtmc& dtmc, std::size_t samples, std::size_t horizon,
                          std::uint64_t seed);

}  // namespace ubacheck::engine
