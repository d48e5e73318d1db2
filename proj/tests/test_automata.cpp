#include <doctest.h>

#include <sstream>

#include "support.hpp"

using namespace ubacheck;
using namespace ubacheck::automata;
using testing::kFig1RightHoa;

namespace {

StateSet set_of(const Nba& nba, std::vector<std::uint32_t> qs) { return make_set(nba.num_states(), qs); }

constexpr Symbol A = 1, B = 0;  // fig1-right: a = {a}, b = {}

}  // namespace

TEST_CASE("parse minimal universal automaton") {
  auto nba = parse_hoa(R"(HOA: v1
States: 1
Start: 0
AP: 2 "x" "y"
Acceptance: 1 Inf(0)
--BODY--
State: 0 {0}
[t] 0
--END--)");
  CHECK(nba.num_states() == 1);
  CHECK(nba.alphabet().size() == 4);
  CHECK(nba.is_final(0));
  for (Symbol a = 0; a < 4; ++a) {
    REQUIRE(nba.successors(0, a).size() == 1);
    CHECK(nba.successors(0, a)[0] == 0);
  }
}

TEST_CASE("parse two-state universal automaton") {
  auto nba = parse_hoa(kFig1RightHoa);
  CHECK(nba.num_states() == 2);
  CHECK(nba.num_transitions() == 4);
  CHECK(nba.initial().count() == 2);
  CHECK(nba.final().count() == 2);
  CHECK(nba.successors(0, B).empty());
  CHECK(nba.successors(1, A).empty());
  CHECK(nba.state_name(0) == "qa");
  CHECK(dump(nba) == dump(families::fig1_right()));
}

TEST_CASE("parse rejects unsupported features") {
  const std::string head = "HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"a\"\n";
  CHECK_THROWS_AS(parse_hoa(head + "Acceptance: 2 Inf(0)&Inf(1)\n--BODY--\nState: 0\n[t] 0\n--END--"),
                  UnsupportedError);
  CHECK_THROWS_AS(parse_hoa(head + "Acceptance: 1 Fin(0)\n--BODY--\nState: 0\n[t] 0\n--END--"),
                  UnsupportedError);
  CHECK_THROWS_AS(parse_hoa(head + "Acceptance: 1 Inf(0)\n--BODY--\nState: 0\n[t] 0 {0}\n--END--"),
                  UnsupportedError);
  CHECK_THROWS_AS(parse_hoa(head + "Acceptance: 1 Inf(0)\n--BODY--\nState: 0\n[t] 0&0\n--END--"),
                  UnsupportedError);
  CHECK_THROWS_AS(parse_hoa(head + "Acceptance: 1 Inf(0)\nproperties: trans-acc\n--BODY--\n--END--"),
                  UnsupportedError);
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_hoa("HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"a\"\nAcceptance: 1 Inf(0)\n--BODY--\nState: 0\n[0 0\n--END--");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 8);
  }
  CHECK_THROWS_AS(parse_hoa("States: 1\n--BODY--\n--END--"), ParseError);
  CHECK_THROWS_AS(parse_hoa("HOA: v1\nStates: 1\nStart: 3\nAP: 0\nAcceptance: 1 Inf(0)\n--BODY--\n--END--"),
                  ParseError);
  CHECK_THROWS_AS(parse_hoa("HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"a\"\nAcceptance: 1 Inf(0)\n--BODY--\nState: 0\n[1] 0\n--END--"),
                  ParseError);
}

TEST_CASE("labels, aliases and implicit edges") {
  auto nba = parse_hoa(R"(HOA: v1
States: 2
Start: 0
AP: 2 "a" "b"
Alias: @both 0 & 1
acc-name: Buchi
Acceptance: 1 Inf(0)
--BODY--
State: 0 {0}
[@both | !0 & !1] 1
[(0 | 1) & !(0 & 1)] 0
State: 1
0 1 0 1
--END--)");
  CHECK(std::vector<State>(nba.successors(0, 3).begin(), nba.successors(0, 3).end()) == std::vector<State>{1});
  CHECK(std::vector<State>(nba.successors(0, 0).begin(), nba.successors(0, 0).end()) == std::vector<State>{1});
  CHECK(std::vector<State>(nba.successors(0, 1).begin(), nba.successors(0, 1).end()) == std::vector<State>{0});
  CHECK(std::vector<State>(nba.successors(0, 2).begin(), nba.successors(0, 2).end()) == std::vector<State>{0});
  // implicit labels enumerate valuations in index order
  CHECK(nba.successors(1, 0)[0] == 0);
  CHECK(nba.successors(1, 1)[0] == 1);
  CHECK(nba.successors(1, 2)[0] == 0);
  CHECK(nba.successors(1, 3)[0] == 1);
}

TEST_CASE("HOA round trip") {
  for (const auto& nba : {families::fig1_right(), families::fig1_left(3), families::complete(2),
                          families::nearly_complete(2), families::blw13()}) {
    std::ostringstream os;
    write_hoa(nba, os);
    CHECK(dump(parse_hoa(os.str())) == dump(nba));
  }
}

TEST_CASE("dump format") {
  CHECK(dump(families::fig1_right()) ==
        "states 2\ninit qa qb\nfinal qa qb\nqa {a} -> qa\nqa {a} -> qb\nqb {} -> qa\nqb {} -> qb\n");
}

TEST_CASE("delta_word examples") {
  auto nba = families::fig1_right();
  auto all = set_of(nba, {0, 1});
  std::vector<Symbol> ab{A, B};
  CHECK(delta_word(nba, all, ab) == all);
  CHECK(delta_word(nba, set_of(nba, {1}), std::vector<Symbol>{}) == set_of(nba, {1}));
  CHECK(delta_word(nba, set_of(nba, {0}), std::vector<Symbol>{B}).none());
  CHECK(delta_word(nba, set_of(nba, {0}), std::vector<std::string>{"a", "{}"}) == all);
  CHECK_THROWS_AS(delta_word(nba, all, std::vector<Symbol>{7}), ValidationError);
}

TEST_CASE("delta_word is associative") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 40; ++round) {
    auto nba = testing::random_nba(rng, 1 + rng() % 9);
    for (int w = 0; w < 10; ++w) {
      std::vector<Symbol> word(rng() % 9);
      for (auto& a : word) a = rng() % 2;
      StateSet r(nba.num_states());
      for (State q = 0; q < nba.num_states(); ++q)
        if (rng() % 2) r.set(q);
      auto whole = delta_word(nba, r, word);
      for (std::size_t cut = 0; cut <= word.size(); ++cut) {
        std::vector<Symbol> x(word.begin(), word.begin() + cut), y(word.begin() + cut, word.end());
        CHECK(delta_word(nba, delta_word(nba, r, x), y) == whole);
      }
    }
  }
}

TEST_CASE("unambiguity of fixtures") {
  CHECK(verify_unambiguous(families::fig1_right()).unambiguous);
  CHECK(verify_unambiguous(families::blw13()).unambiguous);
  for (unsigned k = 1; k <= 6; ++k) CHECK(verify_unambiguous(families::fig1_left(k)).unambiguous);
  for (unsigned k = 1; k <= 5; ++k) {
    CHECK(verify_unambiguous(families::complete(k)).unambiguous);
    CHECK(verify_unambiguous(families::nearly_complete(k)).unambiguous);
  }
}

TEST_CASE("duplicated self-loop is ambiguous") {
  NbaBuilder b(Alphabet::from_aps({"a"}), 2);
  for (State q = 0; q < 2; ++q) b.set_initial(q).set_final(q).add_transition(q, 1, q);
  auto nba = b.build();
  auto report = verify_unambiguous(nba);
  REQUIRE_FALSE(report.unambiguous);
  const auto& w = *report.witness;
  CHECK(w.prefix.empty());
  CHECK(w.cycle == std::vector<Symbol>{1});
  CHECK(w.run1 != w.run2);
  CHECK(describe(nba, w).find("cycle") != std::string::npos);
}

TEST_CASE("ambiguity witnesses are genuine") {
  std::mt19937_64 rng(11);
  int seen = 0;
  for (int round = 0; round < 300 && seen < 40; ++round) {
    auto nba = testing::random_nba(rng, 2 + rng() % 6);
    auto report = verify_unambiguous(nba);
    if (report.unambiguous) continue;
    ++seen;
    const auto& w = *report.witness;
    std::vector<Symbol> word = w.prefix;
    word.insert(word.end(), w.cycle.begin(), w.cycle.end());
    REQUIRE_FALSE(w.cycle.empty());
    REQUIRE(w.run1.size() == word.size() + 1);
    REQUIRE(w.run2.size() == word.size() + 1);
    CHECK(w.run1 != w.run2);
    for (const auto* run : {&w.run1, &w.run2}) {
      CHECK(nba.initial().test(run->front()));
      CHECK(run->back() == (*run)[w.prefix.size()]);
      bool accepting = false;
      for (std::size_t i = 0; i < word.size(); ++i) {
        auto succ = nba.successors((*run)[i], word[i]);
        CHECK(std::find(succ.begin(), succ.end(), (*run)[i + 1]) != succ.end());
        if (i >= w.prefix.size()) accepting |= nba.is_final((*run)[i + 1]);
      }
      CHECK(accepting);
    }
  }
  CHECK(seen > 10);
}

TEST_CASE("unique runs on the universal two-state automaton") {
  auto nba = families::fig1_right();
  for (std::size_t len = 0; len <= 6; ++len)
    for (const auto& word : testing::all_words(2, len))
      for (State p = 0; p < 2; ++p) CHECK(testing::count_runs(nba, word, p) <= 1);
}

TEST_CASE("products of unambiguous automata are unambiguous") {
  std::vector<std::pair<markov::Dtmc, Nba>> cases;
  cases.emplace_back(markov::uniform_chain(families::fig1_right().alphabet()), families::fig1_right());
  cases.emplace_back(families::blw13_chain(), families::blw13());
  cases.emplace_back(families::one_hot_uniform_chain({"a", "b", "c"}), families::fig1_left(3));
  cases.emplace_back(markov::uniform_chain(families::complete(3).alphabet()), families::complete(3));
  cases.emplace_back(markov::uniform_chain(families::nearly_complete(3).alphabet()), families::nearly_complete(3));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    auto nba = testing::random_uba(rng, 8);
    cases.emplace_back(markov::uniform_chain(nba.alphabet()), nba);
  }
  for (const auto& [dtmc, nba] : cases) {
    auto prod = product::build_product(dtmc, nba);
    if (prod.num_nodes() == 0 || prod.num_nodes() > 200) continue;
    CHECK(verify_unambiguous(product::product_as_nba(prod)).unambiguous);
  }
}

TEST_CASE("restrict_scc") {
  auto right = families::fig1_right();
  auto full = restrict_scc(right, set_of(right, {0, 1}), 0);
  CHECK(full.num_transitions() == 4);
  CHECK(full.initial() == set_of(full, {0}));

  NbaBuilder b(Alphabet::from_aps({"a"}), 3);
  b.set_initial(0).set_final(1);
  b.add_transition(0, 1, 1).add_transition(1, 1, 2).add_transition(2, 0, 1).add_transition(2, 1, 0);
  auto chain = b.build();
  auto sub = restrict_scc(chain, set_of(chain, {1, 2}), 2);
  CHECK(sub.num_states() == 2);
  CHECK(sub.num_transitions() == 2);
  CHECK(sub.initial() == set_of(sub, {1}));
  CHECK(sub.is_final(0));
  CHECK(dump(sub) == "states 2\ninit 2\nfinal 1\n1 {a} -> 2\n2 {} -> 1\n");

  CHECK_THROWS_AS(restrict_scc(chain, set_of(chain, {1, 2}), 0), PreconditionError);
}

TEST_CASE("with_initial") {
  auto right = families::fig1_right();
  auto qa = with_initial(right, set_of(right, {0}));
  CHECK(delta_word(qa, qa.initial(), std::vector<Symbol>{B}).none());
  for (std::size_t len = 0; len <= 5; ++len)
    for (auto word : testing::all_words(2, len)) {
      word.insert(word.begin(), A);
      CHECK(delta_word(qa, qa.initial(), word).any());
    }
  auto none = with_initial(right, StateSet(2));
  CHECK(none.initial().none());
  CHECK(delta_word(none, none.initial(), std::vector<Symbol>{A}).none());
  auto all = with_initial(right, set_of(right, {0, 1}));
  for (const auto& word : testing::all_words(2, 6)) CHECK(delta_word(all, all.initial(), word).any());
}

TEST_CASE("strong connectivity") {
  CHECK(is_strongly_connected(families::fig1_right()));
  CHECK(is_strongly_connected(families::blw13()));
  CHECK_FALSE(is_strongly_connected(families::fig1_left(2)));
  CHECK_FALSE(is_strongly_connected(families::nearly_complete(2)));
}

TEST_CASE("alphabet names") {
  auto sigma = Alphabet::from_aps({"a", "b"});
  CHECK(sigma.size() == 4);
  CHECK(sigma.name(3) == "{a,b}");
  CHECK(sigma.name(0) == "{}");
  CHECK(*sigma.find("b") == 2);
  CHECK(*sigma.find("{a,b}") == 3);
  CHECK(*sigma.find("-") == 0);
  CHECK_FALSE(sigma.find("c"));
  CHECK_THROWS_AS(NbaBuilder(Alphabet::from_symbols({"x"}), 1).build(), ValidationError);
}
