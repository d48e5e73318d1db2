#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ubacheck/automata.hpp"
#include "ubacheck/markov.hpp"

namespace ubacheck::families {

/// CA(k): initial/final I, branch states B_w for w in {0,1}^k and gadget
/// chains G_w^1..G_w^k that check the next k bits against w before
/// returning to I. 1 + (k+1)·2^k states over one AP.
automata::Nba complete(unsigned k);

/// NCA(k): CA(k) where G_0^k loops on 0 instead of returning to I.
automata::Nba nearly_complete(unsigned k);

/// k+2 states over one-hot APs a, b, c: some b occurs and the letter k
/// positions before the first b is a.
automata::Nba fig1_left(unsigned k);

/// q_a, q_b, both initial and final; q_a reads a and q_b reads b into {q_a, q_b}.
automata::Nba fig1_right();

/// UBA for ((dab)+(dac))^ω over one-hot APs a, b, c, d.
automata::Nba blw13();

/// Chain d -> a -> {b, c} -> d, branching 1/2 at a, starting in d.
markov::Dtmc blw13_chain();

/// Uniform chain over the one-hot valuations of `aps`.
markov::Dtmc one_hot_uniform_chain(const std::vector<std::string>& aps);

struct Family {
  automata::Nba nba;
  std::optional<markov::Dtmc> dtmc;  // set when the fixture comes with its own chain
};

/// Names: complete, nearly-complete, fig1-left, fig1-right, blw13.
Family generate(const std::string& name, unsigned k);

/// Size formula 1 + (k+1)·2^k shared by both benchmark families.
inline std::size_t benchmark_states(unsigned k) { return 1 + (std::size_t{k} + 1) * (std::size_t{1} << k); }

}  // namespace ubacheck::families
