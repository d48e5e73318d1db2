#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "ubacheck/automata.hpp"
#include "ubacheck/common.hpp"

namespace ubacheck::markov {

using automata::Alphabet;

/// A probability as entered. Decimal and fractional input are both kept
/// exactly; `from_fraction` records which notation was used.
struct Probability {
  double value = 0.0;
  mpq_class exact;
  bool from_fraction = false;

  static Probability parse(std::string_view text);
  static Probability fraction(long num, long den);
  std::string str() const;
};

struct Transition {
  std::uint32_t target;
  Probability prob;
};

/// Finite labelled DTMC. Each state carries one symbol of `alphabet()`
/// (an AP valuation when the alphabet is AP based).
class Dtmc {
 public:
  Dtmc() = default;

  /// Validates row sums, the initial distribution and labels.
  Dtmc(Alphabet alphabet, std::vector<std::vector<Transition>> rows,
       std::vector<Probability> initial, std::vector<Symbol> labels,
       std::vector<std::string> state_names = {});

  std::size_t num_states() const noexcept { return rows_.size(); }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::span<const Transition> row(std::uint32_t s) const { return rows_[s]; }
  const Probability& initial(std::uint32_t s) const { return initial_[s]; }
  Symbol label(std::uint32_t s) const { return labels_[s]; }
  const std::string& state_name(std::uint32_t s) const { return names_[s]; }

  /// P(s,t), zero when there is no transition.
  const Probability* probability(std::uint32_t s, std::uint32_t t) const;

 private:
  Alphabet alphabet_;
  std::vector<std::vector<Transition>> rows_;
  std::vector<Probability> initial_;
  std::vector<Symbol> labels_;
  std::vector<std::string> names_;
};

Dtmc parse_dtmc(std::istream& in);
Dtmc parse_dtmc(std::string_view text);

void write_dtmc(const Dtmc& dtmc, std::ostream& out);
std::string serialize_dtmc(const Dtmc& dtmc);

/// M[Σ]: states are the symbols, P(a,b) = 1/|Σ|, uniform initial distribution.
Dtmc uniform_chain(const Alphabet& alphabet);

}  // namespace ubacheck::markov
