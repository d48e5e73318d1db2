#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "support.hpp"

using namespace ubacheck;
using namespace ubacheck::engine;
using doctest::Approx;

namespace {

MeasureOptions with_method(Method m) {
  MeasureOptions o;
  o.method = m;
  return o;
}

automata::Nba drop_final(const automata::Nba& nba, State victim) {
  automata::NbaBuilder b(nba.alphabet(), nba.num_states());
  for (State q = 0; q < nba.num_states(); ++q) {
    if (nba.initial().test(q)) b.set_initial(q);
    if (nba.is_final(q) && q != victim) b.set_final(q);
    for (Symbol a = 0; a < nba.alphabet().size(); ++a)
      for (auto p : nba.successors(q, a)) b.add_transition(q, a, p);
  }
  return b.build();
}

struct Case {
  std::string name;
  markov::Dtmc dtmc;
  automata::Nba nba;
};

std::vector<Case> fixtures() {
  std::vector<Case> out;
  auto uni = [&](const std::string& name, automata::Nba nba) {
    out.push_back({name, markov::uniform_chain(nba.alphabet()), std::move(nba)});
  };
  uni("fig1-right", families::fig1_right());
  out.push_back({"blw13", families::blw13_chain(), families::blw13()});
  for (unsigned k = 1; k <= 4; ++k)
    out.push_back({"fig1-left " + std::to_string(k), families::one_hot_uniform_chain({"a", "b", "c"}),
                   families::fig1_left(k)});
  for (unsigned k = 2; k <= 4; ++k) {
    uni("complete " + std::to_string(k), families::complete(k));
    uni("nearly-complete " + std::to_string(k), families::nearly_complete(k));
  }
  return out;
}

}  // namespace

TEST_CASE("universal two-state automaton") {
  auto r = measure_uniform(families::fig1_right());
  CHECK(r.probability == Approx(1.0).epsilon(1e-12));
  REQUIRE(r.per_node.size() == 4);
  for (double v : r.per_node) CHECK(v == Approx(0.5).epsilon(1e-12));
  CHECK(almost_universal(families::fig1_right()));
}

TEST_CASE("blw13 chain") {
  auto r = measure(families::blw13_chain(), families::blw13());
  CHECK(r.probability == Approx(1.0).epsilon(1e-12));
  CHECK(r.sccs.size() == 1);
}

TEST_CASE("complete automata have an initial value of one") {
  for (unsigned k = 2; k <= 4; ++k) {
    auto nba = families::complete(k);
    auto r = measure_uniform(nba);
    CHECK(r.probability == Approx(1.0).epsilon(1e-10));
    // state 0 has read nothing yet; every other initial node sits inside one block
    for (auto n : r.product.initial())
      CHECK(r.per_node[n] == Approx(r.product.node(n).q == 0 ? 1.0 : std::ldexp(1.0, -static_cast<int>(k))).epsilon(1e-10));
    CHECK(almost_universal(nba));
    CHECK_FALSE(almost_universal(families::nearly_complete(k)));
  }
}

TEST_CASE("single accepting loop") {
  auto universal = automata::parse_hoa(
      "HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"a\"\nAcceptance: 1 Inf(0)\n--BODY--\nState: 0 {0}\n[0] 0\n--END--");
  auto chain = markov::parse_dtmc("dtmc 1 1\nap a\ninit 0 1\nlabel 0 a\ntrans 0 0 1\n");
  auto r = measure(chain, universal);
  CHECK(r.probability == 1.0);
  CHECK(r.per_node[0] == 1.0);
}

TEST_CASE("fig1-left closed form") {
  for (unsigned k = 1; k <= 6; ++k) {
    auto nba = families::fig1_left(k);
    auto chain = families::one_hot_uniform_chain({"a", "b", "c"});
    double expect = 0.5 * std::pow(2.0 / 3.0, k);
    auto r = measure(chain, nba);
    CHECK(r.probability == Approx(expect).epsilon(1e-10));
    CHECK(r.cosafety);
    MeasureOptions plain;
    plain.shortcuts = false;
    CHECK(measure(chain, nba, plain).probability == Approx(expect).epsilon(1e-10));
    CHECK(measure(chain, nba, with_method(Method::Rank)).probability == Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("nearly complete automata lose all mass") {
  auto r = measure_uniform(families::nearly_complete(5));
  CHECK(r.probability < 1.0);
  bool saw_dominant = false;
  for (const auto& s : r.sccs)
    if (s.size == 250) {
      saw_dominant = true;
      CHECK_FALSE(s.positive);
      CHECK(s.cut_size == 0);
    }
  CHECK(saw_dominant);
}

TEST_CASE("no final states") {
  automata::NbaBuilder b(automata::Alphabet::from_aps({"a"}), 1);
  b.set_initial(0).add_transition(0, 0, 0).add_transition(0, 1, 0);
  auto r = measure_uniform(b.build());
  CHECK(r.probability == 0.0);
  CHECK(r.sccs.empty());
  CHECK(r.cuts.empty());
}

TEST_CASE("ambiguous input is rejected") {
  automata::NbaBuilder b(automata::Alphabet::from_aps({"a"}), 2);
  for (State q = 0; q < 2; ++q)
    b.set_initial(q).set_final(q).add_transition(q, 0, q).add_transition(q, 1, q);
  auto nba = b.build();
  try {
    measure_uniform(nba);
    FAIL("expected AmbiguityError");
  } catch (const AmbiguityError& e) {
    CHECK_FALSE(e.witness().cycle.empty());
  }
  MeasureOptions trusted;
  trusted.trust_unambiguous = true;
  CHECK_NOTHROW(measure_uniform(nba, trusted));
}

TEST_CASE("powerset oracle") {
  auto right = families::fig1_right();
  auto chain = markov::uniform_chain(right.alphabet());
  auto full = powerset_absorption_oracle(right, chain);
  REQUIRE(full.exact);
  CHECK(*full.exact == 1);

  auto qa = automata::with_initial(right, make_set(2, {0}));
  auto half = powerset_absorption_oracle(qa, chain);
  REQUIRE(half.exact);
  CHECK(*half.exact == mpq_class(1, 2));
  CHECK(half.value == 0.5);
  CHECK(measure_uniform(qa).probability == Approx(0.5).epsilon(1e-12));

  // reading {} empties every subset: acceptance needs a^ω
  automata::NbaBuilder b(automata::Alphabet::from_aps({"a"}), 1);
  b.set_initial(0).set_final(0).add_transition(0, 1, 0);
  auto only_a = b.build();
  auto zero = powerset_absorption_oracle(only_a, markov::uniform_chain(only_a.alphabet()));
  REQUIRE(zero.exact);
  CHECK(*zero.exact == 0);

  CHECK_THROWS_AS(powerset_absorption_oracle(families::fig1_left(1), families::one_hot_uniform_chain({"a", "b", "c"})),
                  PreconditionError);
  OracleOptions tiny;
  tiny.max_states = 4;
  auto ca = families::complete(3);
  CHECK_THROWS_AS(powerset_absorption_oracle(ca, markov::uniform_chain(ca.alphabet()), tiny), PreconditionError);
}

TEST_CASE("oracle agreement on strongly connected inputs") {
  std::size_t compared = 0;
  for (const auto& c : fixtures()) {
    if (!testing::oracle_applicable(c.dtmc, c.nba)) continue;
    INFO(c.name);
    CHECK(measure(c.dtmc, c.nba).probability == Approx(powerset_absorption_oracle(c.nba, c.dtmc).value).epsilon(1e-9));
    ++compared;
  }
  std::mt19937_64 rng(31337);
  for (int i = 0; i < 150; ++i) {
    auto nba = testing::random_uba(rng, 8);
    auto chain = markov::uniform_chain(nba.alphabet());
    if (!testing::oracle_applicable(chain, nba)) continue;
    CHECK(measure(chain, nba).probability == Approx(powerset_absorption_oracle(nba, chain).value).epsilon(1e-9));
    ++compared;
  }
  CHECK(compared >= 10);
}

TEST_CASE("fixed-point residuals and method agreement") {
  for (const auto& c : fixtures()) {
    INFO(c.name);
    auto p = measure(c.dtmc, c.nba, with_method(Method::Power));
    auto r = measure(c.dtmc, c.nba, with_method(Method::Rank));
    CHECK(std::abs(p.probability - r.probability) <= 1e-8);
    CHECK(p.residual_max <= 1e-9);
    CHECK(r.residual_max <= 1e-9);
    CHECK(equation_residual(p) == p.residual_max);
  }
}

TEST_CASE("initial-state decomposition") {
  std::mt19937_64 rng(8);
  auto check = [](const MeasureResult& r) {
    double sum = 0.0;
    for (auto n : r.product.initial()) sum += r.product.init_weight(n) * r.per_node_raw[n];
    CHECK(sum == r.raw_probability);
    CHECK(r.probability == std::clamp(sum, 0.0, 1.0));
  };
  for (const auto& c : fixtures()) check(measure(c.dtmc, c.nba));
  for (int i = 0; i < 30; ++i) check(measure_uniform(testing::random_uba(rng, 8)));
}

TEST_CASE("monotone soundness") {
  std::mt19937_64 rng(50);
  for (int i = 0; i < 50; ++i) {
    auto nba = testing::random_uba(rng, 8);
    double base = measure_uniform(nba).probability;
    for (auto q : members(nba.final())) {
      auto smaller = drop_final(nba, q);
      CHECK(measure_uniform(smaller).probability <= base + 1e-9);
    }
  }
}

TEST_CASE("options do not change the result") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 30; ++i) {
    auto nba = testing::random_uba(rng, 10);
    auto base = measure_uniform(nba);
    MeasureOptions threads;
    threads.workers = 4;
    CHECK(measure_uniform(nba, threads).probability == base.probability);
    MeasureOptions plain;
    plain.shortcuts = false;
    CHECK(measure_uniform(nba, plain).probability == Approx(base.probability).epsilon(1e-9));
    MeasureOptions trusted;
    trusted.trust_unambiguous = true;
    CHECK(measure_uniform(nba, trusted).probability == base.probability);
    // deterministic
    CHECK(measure_uniform(nba).per_node_raw == base.per_node_raw);
  }
}

TEST_CASE("cut normalization") {
  std::mt19937_64 rng(404);
  std::size_t cuts = 0;
  for (int i = 0; i < 60; ++i) {
    auto r = measure_uniform(testing::random_uba(rng, 10, i % 2 == 1));
    for (const auto& cc : r.cuts) {
      double sum = 0;
      for (auto n : cc.cut.members) sum += r.per_node_raw[n];
      CHECK(std::abs(sum - 1.0) <= 1e-9);
      ++cuts;
    }
  }
  CHECK(cuts > 5);
}

TEST_CASE("sampling bounds the measure from above") {
  auto nba = families::fig1_left(2);
  auto chain = families::one_hot_uniform_chain({"a", "b", "c"});
  auto s = sample_alive(nba, chain, 20000, 200, 1);
  CHECK(s.samples == 20000);
  double p = measure(chain, nba).probability;
  CHECK(s.estimate + 5 * s.std_error >= p);
  CHECK(s.estimate == Approx(p).epsilon(0.05));
}

TEST_CASE("json report") {
  auto r = measure_uniform(families::complete(3));
  auto j = nlohmann::json::parse(report_json(r));
  CHECK(j["probability"].get<double>() == Approx(1.0));
  CHECK(j["method"] == "power");
  REQUIRE(j["sccs"].is_array());
  bool cut = false;
  for (const auto& s : j["sccs"]) {
    for (const char* key : {"id", "size", "positive", "cut_size", "iterations"}) CHECK(s.contains(key));
    if (s["positive"].get<bool>()) cut = s["cut_size"].get<int>() == 8;
  }
  CHECK(cut);
  CHECK(j.contains("residual_max"));
  CHECK(j.contains("wall_ms"));
  CHECK(parse_method("rank") == Method::Rank);
  CHECK_THROWS(parse_method("lu"));
}
