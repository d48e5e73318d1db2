#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ubacheck/common.hpp"

namespace ubacheck::automata {

/// Maximum number of atomic propositions; the alphabet is expanded eagerly.
inline constexpr std::size_t kMaxAps = 16;

/// Finite alphabet. Either the explicit valuation set 2^AP (symbol index is
/// the valuation bitmask, bit j set iff ap_names()[j] holds) or a plain list
/// of named symbols.
class Alphabet {
 public:
  Alphabet() = default;

  static Alphabet from_aps(std::vector<std::string> ap_names);
  static Alphabet from_symbols(std::vector<std::string> names);

  std::size_t size() const noexcept { return size_; }
  bool has_aps() const noexcept { return has_aps_; }
  const std::vector<std::string>& ap_names() const noexcept { return ap_names_; }

  std::string name(Symbol a) const;
  std::optional<Symbol> find(std::string_view name) const;

  /// Label expression for a valuation, e.g. "0&!1" (HOA AP indices).
  std::string hoa_label(Symbol a) const;

  bool operator==(const Alphabet& other) const = default;

 private:
  std::size_t size_ = 0;
  bool has_aps_ = false;
  std::vector<std::string> ap_names_;
  std::vector<std::string> symbol_names_;
};

class NbaBuilder;

/// Nondeterministic Büchi automaton with state-based acceptance.
/// Immutable once built; transitions are stored in CSR form keyed by (state, symbol).
class Nba {
 public:
  std::size_t num_states() const noexcept { return num_states_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }

  std::span<const State> successors(State q, Symbol a) const {
    auto k = static_cast<std::size_t>(q) * alphabet_.size() + a;
    return {targets_.data() + offsets_[k], targets_.data() + offsets_[k + 1]};
  }

  const StateSet& initial() const noexcept { return initial_; }
  const StateSet& final() const noexcept { return final_; }
  bool is_final(State q) const { return final_.test(q); }

  /// Total number of transitions, sum over q, a of |delta(q, a)|.
  std::size_t num_transitions() const noexcept { return targets_.size(); }

  const std::string& state_name(State q) const { return names_[q]; }
  const std::string& name() const noexcept { return name_; }

 private:
  friend class NbaBuilder;

  Alphabet alphabet_;
  std::size_t num_states_ = 0;
  std::vector<std::uint32_t> offsets_;
  std::vector<State> targets_;
  StateSet initial_;
  StateSet final_;
  std::vector<std::string> names_;
  std::string name_;
};

class NbaBuilder {
 public:
  NbaBuilder(Alphabet alphabet, std::size_t num_states);

  NbaBuilder& add_transition(State from, Symbol a, State to);
  NbaBuilder& set_initial(State q, bool value = true);
  NbaBuilder& set_final(State q, bool value = true);
  NbaBuilder& set_state_name(State q, std::string name);
  NbaBuilder& set_name(std::string name);

  /// Throws ValidationError when the alphabet has fewer than two symbols.
  Nba build() const;

 private:
  Alphabet alphabet_;
  std::size_t num_states_;
  std::vector<std::vector<State>> delta_;
  StateSet initial_;
  StateSet final_;
  std::vector<std::string> names_;
  std::string name_;
};

/// Parses the state-based Büchi subset of HOA v1.
Nba parse_hoa(std::istream& in);
Nba parse_hoa(std::string_view text);

/// Writes an AP-alphabet automaton as HOA v1 with explicit labels.
void write_hoa(const Nba& nba, std::ostream& out);

/// Line-oriented dump used by golden tests: `init ...`, `final ...`,
/// then one `src symbol -> dst` line per transition.
void write_dump(const Nba& nba, std::ostream& out);
std::string dump(const Nba& nba);

/// delta(source, word). Throws ValidationError on a symbol outside the alphabet.
StateSet delta_word(const Nba& nba, const StateSet& source, std::span<const Symbol> word);
StateSet delta_word(const Nba& nba, const StateSet& source,
                    const std::vector<std::string>& word);

/// Lasso over the input alphabet on which two distinct accepting runs exist.
struct AmbiguityWitness {
  std::vector<Symbol> prefix;
  std::vector<Symbol> cycle;
  // Each run has |prefix| + |cycle| + 1 states; the last state equals the
  // state at position |prefix|, so the runs close into lassos.
  std::vector<State> run1;
  std::vector<State> run2;
};

struct UnambiguityReport {
  bool unambiguous = true;
  std::optional<AmbiguityWitness> witness;
};

UnambiguityReport verify_unambiguous(const Nba& nba);

std::string describe(const Nba& nba, const AmbiguityWitness& witness);

/// Sub-automaton on `component` with initial state `p` and delta restricted to
/// the component. States are renumbered in increasing order of the original
/// index; names are carried over.
Nba restrict_scc(const Nba& nba, const StateSet& component, State p);

Nba with_initial(const Nba& nba, const StateSet& initial);

/// True iff every state reaches every other state.
bool is_strongly_connected(const Nba& nba);

}  // namespace ubacheck::automata
