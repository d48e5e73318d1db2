#include <algorithm>
#include <ostream>
#include <sstream>

#include "ubacheck/automata.hpp"
#include "ubacheck/scc.hpp"

namespace ubacheck::automata {

Alphabet Alphabet::from_aps(std::vector<std::string> ap_names) {
  if (ap_names.size() > kMaxAps)
    throw ValidationError("too many atomic propositions (" + std::to_string(ap_names.size()) +
                          ", limit " + std::to_string(kMaxAps) + ")");
  for (std::size_t i = 0; i < ap_names.size(); ++i)
    for (std::size_t j = i + 1; j < ap_names.size(); ++j)
      if (ap_names[i] == ap_names[j])
        throw ValidationError("duplicate atomic proposition '" + ap_names[i] + "'");
  Alphabet a;
  a.has_aps_ = true;
  a.size_ = std::size_t{1} << ap_names.size();
  a.ap_names_ = std::move(ap_names);
  return a;
}

Alphabet Alphabet::from_symbols(std::vector<std::string> names) {
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i + 1; j < names.size(); ++j)
      if (names[i] == names[j]) throw ValidationError("duplicate symbol '" + names[i] + "'");
  Alphabet a;
  a.size_ = names.size();
  a.symbol_names_ = std::move(names);
  return a;
}

std::string Alphabet::name(Symbol a) const {
  if (a >= size_) throw ValidationError("symbol index " + std::to_string(a) + " out of range");
  if (!has_aps_) return symbol_names_[a];
  std::string out = "{";
  bool first = true;
  for (std::size_t j = 0; j < ap_names_.size(); ++j) {
    if (!((a >> j) & 1u)) continue;
    if (!first) out += ',';
    out += ap_names_[j];
    first = false;
  }
  return out + "}";
}

std::optional<Symbol> Alphabet::find(std::string_view name) const {
  if (!has_aps_) {
    auto it = std::find(symbol_names_.begin(), symbol_names_.end(), name);
    if (it == symbol_names_.end()) return std::nullopt;
    return static_cast<Symbol>(it - symbol_names_.begin());
  }
  // "{a,b}" or "a,b" or "-" / "{}" for the empty valuation.
  if (name.size() >= 2 && name.front() == '{' && name.back() == '}')
    name = name.substr(1, name.size() - 2);
  if (name.empty() || name == "-") return Symbol{0};
  Symbol value = 0;
  std::size_t start = 0;
  while (start <= name.size()) {
    auto end = name.find(',', start);
    if (end == std::string_view::npos) end = name.size();
    auto ap = name.substr(start, end - start);
    auto it = std::find(ap_names_.begin(), ap_names_.end(), ap);
    if (it == ap_names_.end()) return std::nullopt;
    value |= Symbol{1} << (it - ap_names_.begin());
    start = end + 1;
  }
  return value;
}

std::string Alphabet::hoa_label(Symbol a) const {
  if (!has_aps_) throw ValidationError("HOA labels need an atomic-proposition alphabet");
  if (ap_names_.empty()) return "t";
  std::string out;
  for (std::size_t j = 0; j < ap_names_.size(); ++j) {
    if (j) out += '&';
    if (!((a >> j) & 1u)) out += '!';
    out += std::to_string(j);
  }
  return out;
}

NbaBuilder::NbaBuilder(Alphabet alphabet, std::size_t num_states)
    : alphabet_(std::move(alphabet)),
      num_states_(num_states),
      delta_(num_states * alphabet_.size()),
      initial_(num_states),
      final_(num_states),
      names_(num_states) {}

NbaBuilder& NbaBuilder::add_transition(State from, Symbol a, State to) {
  if (from >= num_states_ || to >= num_states_)
    throw ValidationError("transition references unknown state");
  if (a >= alphabet_.size()) throw ValidationError("transition references unknown symbol");
  delta_[static_cast<std::size_t>(from) * alphabet_.size() + a].push_back(to);
  return *this;
}

NbaBuilder& NbaBuilder::set_initial(State q, bool value) {
  if (q >= num_states_) throw ValidationError("initial state out of range");
  initial_[q] = value;
  return *this;
}

NbaBuilder& NbaBuilder::set_final(State q, bool value) {
  if (q >= num_states_) throw ValidationError("final state out of range");
  final_[q] = value;
  return *this;
}

NbaBuilder& NbaBuilder::set_state_name(State q, std::string name) {
  names_.at(q) = std::move(name);
  return *this;
}

NbaBuilder& NbaBuilder::set_name(std::string name) {
  name_ = std::move(name);
  return *this;
}

Nba NbaBuilder::build() const {
  if (alphabet_.size() < 2)
    throw ValidationError("alphabet must have at least two symbols, got " +
                          std::to_string(alphabet_.size()));
  Nba nba;
  nba.alphabet_ = alphabet_;
  nba.num_states_ = num_states_;
  nba.offsets_.reserve(delta_.size() + 1);
  nba.offsets_.push_back(0);
  for (const auto& succ : delta_) {
    std::vector<State> sorted = succ;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    nba.targets_.insert(nba.targets_.end(), sorted.begin(), sorted.end());
    nba.offsets_.push_back(static_cast<std::uint32_t>(nba.targets_.size()));
  }
  nba.initial_ = initial_;
  nba.final_ = final_;
  nba.names_ = names_;
  for (std::size_t q = 0; q < num_states_; ++q)
    if (nba.names_[q].empty()) nba.names_[q] = std::to_string(q);
  nba.name_ = name_;
  return nba;
}

StateSet delta_word(const Nba& nba, const StateSet& source, std::span<const Symbol> word) {
  StateSet current = source;
  for (Symbol a : word) {
    if (a >= nba.alphabet().size())
      throw ValidationError("unknown symbol index " + std::to_string(a));
    StateSet next(nba.num_states());
    for (auto q = current.find_first(); q != StateSet::npos; q = current.find_next(q))
      for (State p : nba.successors(static_cast<State>(q), a)) next.set(p);
    current = std::move(next);
  }
  return current;
}

StateSet delta_word(const Nba& nba, const StateSet& source,
                    const std::vector<std::string>& word) {
  std::vector<Symbol> symbols;
  symbols.reserve(word.size());
  for (const auto& w : word) {
    auto a = nba.alphabet().find(w);
    if (!a) throw ValidationError("unknown symbol '" + w + "'");
    symbols.push_back(*a);
  }
  return delta_word(nba, source, symbols);
}

Nba restrict_scc(const Nba& nba, const StateSet& component, State p) {
  if (component.size() != nba.num_states())
    throw ValidationError("component set has wrong universe size");
  if (p >= nba.num_states() || !component.test(p))
    throw PreconditionError("restrict_scc: initial state " + std::to_string(p) +
                            " is not in the component");
  std::vector<State> local(nba.num_states(), kNone);
  auto kept = members(component);
  for (std::size_t i = 0; i < kept.size(); ++i) local[kept[i]] = static_cast<State>(i);

  NbaBuilder b(nba.alphabet(), kept.size());
  b.set_name(nba.name());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    State q = kept[i];
    b.set_state_name(static_cast<State>(i), nba.state_name(q));
    if (nba.is_final(q)) b.set_final(static_cast<State>(i));
    for (Symbol a = 0; a < nba.alphabet().size(); ++a)
      for (State r : nba.successors(q, a))
        if (local[r] != kNone) b.add_transition(static_cast<State>(i), a, local[r]);
  }
  b.set_initial(local[p]);
  return b.build();
}

Nba with_initial(const Nba& nba, const StateSet& initial) {
  if (initial.size() != nba.num_states())
    throw ValidationError("with_initial: set has wrong universe size");
  NbaBuilder b(nba.alphabet(), nba.num_states());
  b.set_name(nba.name());
  for (State q = 0; q < nba.num_states(); ++q) {
    b.set_state_name(q, nba.state_name(q));
    if (nba.is_final(q)) b.set_final(q);
    if (initial.test(q)) b.set_initial(q);
    for (Symbol a = 0; a < nba.alphabet().size(); ++a)
      for (State r : nba.successors(q, a)) b.add_transition(q, a, r);
  }
  return b.build();
}

bool is_strongly_connected(const Nba& nba) {
  std::size_t n = nba.num_states();
  if (n == 0) return false;
  StateSet all(n);
  all.set();
  auto scc = tarjan_scc(n, all, [&](std::uint32_t q, std::vector<std::uint32_t>& out) {
    for (Symbol a = 0; a < nba.alphabet().size(); ++a)
      for (State p : nba.successors(q, a)) out.push_back(p);
  });
  return scc.components.size() == 1;
}

void write_dump(const Nba& nba, std::ostream& out) {
  out << "states " << nba.num_states() << "\n";
  out << "init";
  for (auto q : members(nba.initial())) out << ' ' << nba.state_name(q);
  out << "\nfinal";
  for (auto q : members(nba.final())) out << ' ' << nba.state_name(q);
  out << '\n';
  for (State q = 0; q < nba.num_states(); ++q)
    for (Symbol a = 0; a < nba.alphabet().size(); ++a)
      for (State p : nba.successors(q, a))
        out << nba.state_name(q) << ' ' << nba.alphabet().name(a) << " -> " << nba.state_name(p)
            << '\n';
}

std::string dump(const Nba& nba) {
  std::ostringstream os;
  write_dump(nba, os);
  return os.str();
}

}  // namespace ubacheck::automata
