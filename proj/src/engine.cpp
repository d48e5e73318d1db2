#include <algorithm>
#include <chrono>
#include <cmath>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "ubacheck/engine.hpp"
#include "ubacheck/parallel.hpp"

namespace ubacheck::engine {

using graph::SccStatus;
using product::ProductAutomaton;

std::string to_string(Method m) { return m == Method::Power ? "power" : "rank"; }

Method parse_method(const std::string& name) {
  if (name == "power") return Method::Power;
  if (name == "rank") return Method::Rank;
  throw ValidationError("unknown method '" + name + "' (expected power or rank)");
}

namespace {

constexpr double kValueSlack = 1e-6;

// Values of the non-bottom live components, sinks first. `value` already
// holds the values of marked bottom components (or of final nodes on the
// co-safety path); `solved[c]` tells which components are known.
void solve_outer(const ProductAutomaton& prod, const graph::SccDag& dag, std::vector<char> solved,
                 std::vector<double>& value) {
  for (std::uint32_t c = 0; c < dag.components.size(); ++c) {
    if (solved[c] || dag.info[c].status == SccStatus::Removed) continue;
    const auto& nodes = dag.components[c];
    if (!dag.alive(nodes.front())) continue;
    std::vector<double> b(nodes.size(), 0.0);
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (const auto& e : prod.edges(nodes[i])) {
        if (!dag.alive(e.target)) continue;
        if (dag.component_of[e.target] == c) {
          rows[i].emplace_back(dag.index_in_component[e.target], e.weight);
        } else {
          b[i] += e.weight * value[e.target];
        }
      }
    if (dag.info[c].trivial) {
      value[nodes.front()] = b.front();
    } else {
      auto sol = linalg::solve_absorbing(linalg::SparseMatrix::from_rows(rows), b);
      for (std::size_t i = 0; i < nodes.size(); ++i) value[nodes[i]] = sol.x[i];
    }
    solved[c] = 1;
  }
}

std::optional<cuts::Cut> separated_cut(const ProductAutomaton& prod, const graph::SccDag& dag,
                                       std::uint32_t c, const Nba& nba) {
  const auto& nodes = dag.components[c];
  const NodeId anchor = nodes.front();
  StateSet projection(nba.num_states());
  for (NodeId n : nodes) projection.set(prod.node(n).q);
  auto scc_aut = automata::restrict_scc(nba, projection, prod.node(anchor).q);
  if (!automata::is_strongly_connected(scc_aut) || !cuts::separated_shortcut(scc_aut)) return std::nullopt;
  cuts::Cut cut;
  cut.anchor = anchor;
  cut.shortcut = true;
  const auto s = prod.node(anchor).s;
  for (auto q : members(projection)) {
    auto n = prod.find(s, q);
    if (!n || dag.component_of[*n] != c || !dag.alive(*n)) return std::nullopt;
    cut.members.push_back(*n);
  }
  std::sort(cut.members.begin(), cut.members.end());
  cut.sizes.push_back(cut.members.size());
  return cut;
}

}  // namespace

MeasureResult measure(const Dtmc& dtmc, const Nba& nba, const MeasureOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  if (!(opts.epsilon > 0)) throw ValidationError("epsilon must be positive");
  if (opts.max_iter < 1) throw ValidationError("max_iter must be at least 1");

  if (!opts.trust_unambiguous) {
    auto report = automata::verify_unambiguous(nba);
    if (!report.unambiguous)
      throw AmbiguityError(*report.witness, automata::describe(nba, *report.witness));
  }

  MeasureResult r;
  r.method = to_string(opts.method);
  r.product = product::build_product(dtmc, nba);
  const auto& prod = r.product;
  const std::size_t n = prod.num_nodes();
  r.per_node_raw.assign(n, 0.0);
  spdlog::debug("product: {} nodes, {} edges", n, prod.num_edges());

  auto finish = [&]() -> MeasureResult {
    r.per_node.resize(n);
    for (NodeId u = 0; u < n; ++u) {
      double v = r.per_node_raw[u];
      if (v < -kValueSlack || v > 1.0 + kValueSlack)
        throw NumericError("state value " + std::to_string(v) + " outside [0,1] at product node " +
                           std::to_string(u));
      r.per_node[u] = std::clamp(v, 0.0, 1.0);
    }
    r.raw_probability = 0.0;
    for (NodeId u : prod.initial()) r.raw_probability += prod.init_weight(u) * r.per_node_raw[u];
    r.probability = std::clamp(r.raw_probability, 0.0, 1.0);
    r.residual_max = equation_residual(r);
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return std::move(r);
  };

  if (nba.final().none() || prod.initial().empty()) {
    r.dag = graph::sccs(prod, StateSet(n));
    return finish();
  }

  r.dag = graph::prune_unreachable_and_dead(prod, graph::sccs(prod));
  auto& dag = r.dag;
  spdlog::debug("{} live nodes in {} components", dag.live.count(), dag.components.size());
  const std::size_t m = dag.components.size();

  if (opts.shortcuts && cuts::cosafety_shortcut(nba)) {
    // Final nodes only reach final nodes, so each component is all final or all non-final.
    r.cosafety = true;
    r.method = "cosafety";
    std::vector<char> solved(m, 0);
    for (std::uint32_t c = 0; c < m; ++c)
      if (dag.info[c].has_final) {
        solved[c] = 1;
        for (NodeId u : dag.components[c]) r.per_node_raw[u] = 1.0;
      }
    solve_outer(prod, dag, std::move(solved), r.per_node_raw);
    return finish();
  }

  std::vector<linalg::PowerResult> power(m);
  auto positive = [&](std::uint32_t c) {
    auto mat = linalg::scc_matrix(prod, dag, c);
    if (opts.method == Method::Rank) return linalg::positivity_rank(mat, opts.rank_tol);
    power[c] = linalg::power_iterate(mat, {opts.epsilon, opts.max_iter, opts.rank_tol});
    return power[c].verdict == linalg::Verdict::Positive;
  };
  graph::preprocess_bsccs(prod, dag, positive, opts.workers);

  std::vector<std::uint32_t> marked;
  for (std::uint32_t c = 0; c < m; ++c)
    if (dag.info[c].status == SccStatus::Positive) marked.push_back(c);

  std::vector<cuts::Cut> cut_of(marked.size());
  parallel_for(marked.size(), opts.workers, [&](std::size_t i) {
    const auto c = marked[i];
    const auto& nodes = dag.components[c];
    std::optional<cuts::Cut> cut;
    if (opts.uniform && opts.shortcuts) cut = separated_cut(prod, dag, c, nba);
    if (!cut) cut = cuts::generate_pure_cut(prod, dag, c, nodes.front());
    std::vector<std::uint32_t> local;
    for (NodeId u : cut->members) local.push_back(dag.index_in_component[u]);

    std::vector<double> values;
    if (opts.method == Method::Rank) {
      values = linalg::solve_normalized(linalg::scc_matrix(prod, dag, c), local);
    } else {
      values = power[c].vector;
      double mass = 0.0;
      for (auto j : local) mass += values[j];
      if (!(mass > 0)) throw NumericError("eigenvector vanishes on the cut");
      for (double& v : values) v /= mass;
    }
    for (std::size_t j = 0; j < nodes.size(); ++j) r.per_node_raw[nodes[j]] = values[j];
    cut_of[i] = std::move(*cut);
  });

  std::vector<char> solved(m, 0);
  for (std::size_t i = 0; i < marked.size(); ++i) {
    solved[marked[i]] = 1;
    r.cuts.push_back({marked[i], std::move(cut_of[i])});
  }
  solve_outer(prod, dag, std::move(solved), r.per_node_raw);

  for (std::uint32_t c = 0; c < m; ++c) {
    const auto& info = dag.info[c];
    if (!info.queried) continue;
    SccReport rep;
    rep.id = c;
    rep.size = dag.components[c].size();
    rep.positive = info.status == SccStatus::Positive;
    rep.iterations = power[c].iterations;
    rep.used_fallback = power[c].used_fallback;
    for (const auto& cc : r.cuts)
      if (cc.component == c) {
        rep.cut_size = cc.cut.members.size();
        rep.growth_steps = cc.cut.growth_steps;
        rep.cut_shortcut = cc.cut.shortcut;
      }
    spdlog::debug("component {}: size {}, positive {}, iterations {}, cut {}", c, rep.size, rep.positive,
                  rep.iterations, rep.cut_size);
    r.sccs.push_back(rep);
  }
  return finish();
}

MeasureResult measure_uniform(const Nba& nba, MeasureOptions opts) {
  opts.uniform = true;
  return measure(markov::uniform_chain(nba.alphabet()), nba, opts);
}

bool almost_universal(const Nba& nba, MeasureOptions opts) {
  return measure_uniform(nba, opts).probability >= 1.0 - 1e-9;
}

double equation_residual(const MeasureResult& r) {
  const auto& prod = r.product;
  const auto& dag = r.dag;
  const auto& z = r.per_node_raw;
  double res = 0.0;
  for (NodeId u = 0; u < prod.num_nodes(); ++u) {
    if (u >= dag.live.size() || !dag.alive(u)) continue;
    double acc = 0.0;
    for (const auto& e : prod.edges(u))
      if (dag.alive(e.target)) acc += e.weight * z[e.target];
    res = std::max(res, std::abs(acc - z[u]));
  }
  for (const auto& cc : r.cuts) {
    double sum = 0.0;
    for (NodeId u : cc.cut.members) sum += z[u];
    res = std::max(res, std::abs(sum - 1.0));
  }
  return res;
}

std::string report_json(const MeasureResult& r, int indent) {
  nlohmann::json j;
  j["probability"] = r.probability;
  j["method"] = r.method;
  auto sccs = nlohmann::json::array();
  for (const auto& s : r.sccs)
    sccs.push_back({{"id", s.id}, {"size", s.size}, {"positive", s.positive}, {"cut_size", s.cut_size},
                    {"iterations", s.iterations}});
  j["sccs"] = std::move(sccs);
  j["residual_max"] = r.residual_max;
  j["wall_ms"] = r.wall_ms;
  return j.dump(indent);
}

}  // namespace ubacheck::engine
