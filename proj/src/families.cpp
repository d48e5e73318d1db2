#include "ubacheck/families.hpp"

namespace ubacheck::families {

using automata::Alphabet;
using automata::Nba;
using automata::NbaBuilder;

namespace {

constexpr unsigned kMaxK = 16;

Nba benchmark(unsigned k, bool nearly) {
  if (k < 1 || k > kMaxK) throw ValidationError("k must be in 1.." + std::to_string(kMaxK));
  const std::size_t words = std::size_t{1} << k;
  NbaBuilder b(Alphabet::from_aps({"p"}), benchmark_states(k));
  b.set_name(std::string(nearly ? "nearly-complete" : "complete") + " k=" + std::to_string(k));
  const State init = 0;
  auto branch = [](std::size_t w) { return static_cast<State>(1 + w); };
  auto gadget = [&](std::size_t w, unsigned j) { return static_cast<State>(1 + words + w * k + (j - 1)); };
  auto bit = [&](std::size_t w, unsigned j) { return static_cast<Symbol>((w >> (k - j)) & 1u); };

  b.set_initial(init).set_final(init).set_state_name(init, "I");
  for (std::size_t w = 0; w < words; ++w) {
    std::string bits;
    for (unsigned j = 1; j <= k; ++j) bits += static_cast<char>('0' + bit(w, j));
    b.set_state_name(branch(w), "B" + bits);
    for (unsigned j = 1; j <= k; ++j) b.set_state_name(gadget(w, j), "G" + bits + "_" + std::to_string(j));
    for (Symbol a = 0; a < 2; ++a) {
      b.add_transition(init, a, branch(w));
      b.add_transition(branch(w), a, gadget(w, 1));
    }
    for (unsigned j = 1; j < k; ++j) b.add_transition(gadget(w, j), bit(w, j), gadget(w, j + 1));
    if (nearly && w == 0) {
      b.add_transition(gadget(w, k), bit(w, k), gadget(w, k));
    } else {
      b.add_transition(gadget(w, k), bit(w, k), init);
    }
  }
  return b.build();
}

Symbol one_hot(std::size_t index) { return Symbol{1} << index; }

}  // namespace

Nba complete(unsigned k) { return benchmark(k, false); }

Nba nearly_complete(unsigned k) { return benchmark(k, true); }

Nba fig1_left(unsigned k) {
  if (k < 1 || k > 64) throw ValidationError("k must be in 1..64");
  const Symbol a = one_hot(0), b = one_hot(1), c = one_hot(2);
  NbaBuilder nb(Alphabet::from_aps({"a", "b", "c"}), k + 2);
  nb.set_name("fig1-left k=" + std::to_string(k));
  const State acc = k + 1;
  nb.set_initial(0).set_final(acc).set_state_name(0, "q0").set_state_name(acc, "acc");
  nb.add_transition(0, a, 0).add_transition(0, c, 0).add_transition(0, a, 1);
  for (State i = 1; i < k; ++i) {
    nb.set_state_name(i, "q" + std::to_string(i));
    nb.add_transition(i, a, i + 1).add_transition(i, c, i + 1);
  }
  nb.set_state_name(k, "q" + std::to_string(k));
  nb.add_transition(k, b, acc);
  for (Symbol v = 0; v < 8; ++v) nb.add_transition(acc, v, acc);
  return nb.build();
}

Nba fig1_right() {
  const Symbol a = 1, b = 0;
  NbaBuilder nb(Alphabet::from_aps({"a"}), 2);
  nb.set_name("fig1-right").set_state_name(0, "qa").set_state_name(1, "qb");
  for (State q = 0; q < 2; ++q) nb.set_initial(q).set_final(q);
  nb.add_transition(0, a, 0).add_transition(0, a, 1);
  nb.add_transition(1, b, 0).add_transition(1, b, 1);
  return nb.build();
}

Nba blw13() {
  const Symbol a = one_hot(0), b = one_hot(1), c = one_hot(2), d = one_hot(3);
  NbaBuilder nb(Alphabet::from_aps({"a", "b", "c", "d"}), 5);
  nb.set_name("blw13");
  const State qd = 0, qab = 1, qac = 2, qb = 3, qc = 4;
  nb.set_state_name(qd, "qd").set_state_name(qab, "qab").set_state_name(qac, "qac");
  nb.set_state_name(qb, "qb").set_state_name(qc, "qc");
  nb.set_initial(qd).set_final(qd);
  nb.add_transition(qd, d, qab).add_transition(qd, d, qac);
  nb.add_transition(qab, a, qb).add_transition(qac, a, qc);
  nb.add_transition(qb, b, qd).add_transition(qc, c, qd);
  return nb.build();
}

markov::Dtmc blw13_chain() {
  using markov::Probability;
  auto alphabet = Alphabet::from_aps({"a", "b", "c", "d"});
  // states: 0 = d, 1 = a, 2 = b, 3 = c
  std::vector<std::vector<markov::Transition>> rows{
      {{1, Probability::fraction(1, 1)}},
      {{2, Probability::fraction(1, 2)}, {3, Probability::fraction(1, 2)}},
      {{0, Probability::fraction(1, 1)}},
      {{0, Probability::fraction(1, 1)}},
  };
  std::vector<Probability> init{Probability::fraction(1, 1), Probability::fraction(0, 1),
                                Probability::fraction(0, 1), Probability::fraction(0, 1)};
  std::vector<Symbol> labels{one_hot(3), one_hot(0), one_hot(1), one_hot(2)};
  return markov::Dtmc(alphabet, std::move(rows), std::move(init), std::move(labels), {"d", "a", "b", "c"});
}

markov::Dtmc one_hot_uniform_chain(const std::vector<std::string>& aps) {
  using markov::Probability;
  const std::size_t k = aps.size();
  if (k < 2) throw ValidationError("need at least two propositions");
  auto p = Probability::fraction(1, static_cast<long>(k));
  std::vector<std::vector<markov::Transition>> rows(k);
  std::vector<Symbol> labels;
  for (std::size_t s = 0; s < k; ++s) {
    labels.push_back(one_hot(s));
    for (std::size_t t = 0; t < k; ++t) rows[s].push_back({static_cast<std::uint32_t>(t), p});
  }
  return markov::Dtmc(Alphabet::from_aps(aps), std::move(rows), std::vector<Probability>(k, p),
                      std::move(labels), aps);
}

Family generate(const std::string& name, unsigned k) {
  if (name == "complete") return {complete(k), std::nullopt};
  if (name == "nearly-complete") return {nearly_complete(k), std::nullopt};
  if (name == "fig1-left") return {fig1_left(k), one_hot_uniform_chain({"a", "b", "c"})};
  if (name == "fig1-right") return {fig1_right(), std::nullopt};
  if (name == "blw13") return {blw13(), blw13_chain()};
  throw ValidationError("unknown family '" + name +
                        "' (expected complete, nearly-complete, fig1-left, fig1-right or blw13)");
}

}  // namespace ubacheck::families
