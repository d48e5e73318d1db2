#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>

#include "ubacheck/markov.hpp"

namespace ubacheck::markov {
namespace {

constexpr double kSumTolerance = 1e-12;

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
}

mpz_class pow10(unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

// Exact value of a decimal literal such as "0.25", "1", "3e-2".
mpq_class parse_decimal(std::string_view text) {
  std::string_view mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    std::string_view exp = text.substr(e + 1);
    bool neg = false;
    if (!exp.empty() && (exp.front() == '+' || exp.front() == '-')) {
      neg = exp.front() == '-';
      exp.remove_prefix(1);
    }
    if (!all_digits(exp) || exp.size() > 6) throw ValidationError("bad probability '" + std::string(text) + "'");
    exponent = std::stol(std::string(exp));
    if (neg) exponent = -exponent;
  }
  std::string digits;
  long frac_len = 0;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    std::string_view ip = mantissa.substr(0, dot), fp = mantissa.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
      throw ValidationError("bad probability '" + std::string(text) + "'");
    digits = std::string(ip) + std::string(fp);
    frac_len = static_cast<long>(fp.size());
  } else {
    if (!all_digits(mantissa)) throw ValidationError("bad probability '" + std::string(text) + "'");
    digits = std::string(mantissa);
  }
  mpq_class value{mpz_class(digits.empty() ? "0" : digits, 10)};
  long scale = exponent - frac_len;
  if (scale > 0) value *= pow10(scale);
  if (scale < 0) value /= pow10(-scale);
  value.canonicalize();
  return value;
}

// Exact decimal expansion of a rational whose denominator divides a power of ten.
std::string decimal_string(const mpq_class& q) {
  mpz_class den = q.get_den();
  unsigned long twos = 0, fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
    den /= 2;
    ++twos;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
    den /= 5;
    ++fives;
  }
  if (den != 1) {
    std::ostringstream os;
    os.precision(17);
    os << q.get_d();
    return os.str();
  }
  unsigned long k = std::max(twos, fives);
  mpz_class scaled = q.get_num() * pow10(k) / q.get_den();
  std::string s = scaled.get_str();
  if (k == 0) return s;
  if (s.size() <= k) s.insert(0, k - s.size() + 1, '0');
  s.insert(s.size() - k, ".");
  return s;
}

}  // namespace

Probability Probability::parse(std::string_view text) {
  if (!text.empty() && text.front() == '-')
    throw ValidationError("negative probability '" + std::string(text) + "'");
  Probability p;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash), den = text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
      throw ValidationError("bad probability '" + std::string(text) + "'");
    mpz_class d(std::string(den), 10);
    if (d == 0) throw ValidationError("zero denominator in '" + std::string(text) + "'");
    p.exact = mpq_class(mpz_class(std::string(num), 10), d);
    p.exact.canonicalize();
    p.from_fraction = true;
  } else {
    p.exact = parse_decimal(text);
  }
  if (p.exact > 1) throw ValidationError("probability '" + std::string(text) + "' exceeds 1");
  p.value = p.exact.get_d();
  return p;
}

Probability Probability::fraction(long num, long den) {
  if (den <= 0 || num < 0) throw ValidationError("invalid fraction");
  Probability p;
  p.exact = mpq_class(num, den);
  p.exact.canonicalize();
  p.value = p.exact.get_d();
  p.from_fraction = true;
  return p;
}

std::string Probability::str() const {
  return from_fraction ? exact.get_str() : decimal_string(exact);
}

Dtmc::Dtmc(Alphabet alphabet, std::vector<std::vector<Transition>> rows,
           std::vector<Probability> initial, std::vector<Symbol> labels,
           std::vector<std::string> state_names)
    : alphabet_(std::move(alphabet)),
      rows_(std::move(rows)),
      initial_(std::move(initial)),
      labels_(std::move(labels)),
      names_(std::move(state_names)) {
  const std::size_t n = rows_.size();
  if (n == 0) throw ValidationError("Markov chain has no states");
  if (initial_.size() != n || labels_.size() != n)
    throw ValidationError("initial distribution and labels must cover every state");
  if (names_.empty())
    for (std::size_t s = 0; s < n; ++s) names_.push_back(std::to_string(s));

  auto check_sum = [](const auto& probs, const std::string& what) {
    bool exact = true;
    mpq_class sum = 0;
    double approx = 0.0;
    for (const Probability* p : probs) {
      exact &= p->from_fraction || p->exact == 0;
      sum += p->exact;
      approx += p->value;
    }
    bool ok = exact ? sum == 1 : std::abs(approx - 1.0) <= kSumTolerance;
    if (!ok) {
      std::ostringstream os;
      os << what << " sums to " << (exact ? sum.get_str() : std::to_string(approx)) << ", expected 1";
      throw ValidationError(os.str());
    }
  };

  for (std::size_t s = 0; s < n; ++s) {
    if (labels_[s] >= alphabet_.size())
      throw ValidationError("label of state " + std::to_string(s) + " is outside the alphabet");
    auto& row = rows_[s];
    std::vector<const Probability*> probs;
    for (const auto& t : row) {
      if (t.target >= n)
        throw ValidationError("transition " + std::to_string(s) + " -> " + std::to_string(t.target) +
                              " references an unknown state");
      if (t.prob.exact < 0) throw ValidationError("negative probability in row " + std::to_string(s));
    }
    std::erase_if(row, [](const Transition& t) { return t.prob.exact == 0; });
    std::sort(row.begin(), row.end(), [](const auto& x, const auto& y) { return x.target < y.target; });
    for (std::size_t i = 1; i < row.size(); ++i)
      if (row[i].target == row[i - 1].target)
        throw ValidationError("duplicate transition " + std::to_string(s) + " -> " +
                              std::to_string(row[i].target));
    for (const auto& t : row) probs.push_back(&t.prob);
    check_sum(probs, "row of state " + std::to_string(s));
  }
  std::vector<const Probability*> init;
  for (const auto& p : initial_) init.push_back(&p);
  check_sum(init, "initial distribution");
}

const Probability* Dtmc::probability(std::uint32_t s, std::uint32_t t) const {
  const auto& row = rows_.at(s);
  auto it = std::lower_bound(row.begin(), row.end(), t,
                             [](const Transition& x, std::uint32_t v) { return x.target < v; });
  return it != row.end() && it->target == t ? &it->prob : nullptr;
}

Dtmc parse_dtmc(std::string_view text) {
  std::istringstream lines{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  long n = -1, naps = -1;
  std::vector<std::string> aps;
  bool have_aps = false;
  std::vector<std::vector<Transition>> rows;
  std::vector<Probability> initial;
  std::vector<std::optional<Symbol>> labels;
  std::optional<Alphabet> sigma;

  auto fail = [&](const std::string& what) -> void { throw ParseError(what, lineno, 1); };
  auto state = [&](const std::string& tok) -> std::uint32_t {
    if (!all_digits(tok) || tok.size() > 9) fail("bad state id '" + tok + "'");
    long s = std::stol(tok);
    if (s >= n) throw ValidationError("line " + std::to_string(lineno) + ": unknown state " + tok);
    return static_cast<std::uint32_t>(s);
  };
  auto alphabet = [&]() -> const Alphabet& {
    if (!sigma) {
      if (naps > 0 && !have_aps) fail("'ap' line must precede labels");
      sigma = Alphabet::from_aps(aps);
    }
    return *sigma;
  };
  auto prob = [&](const std::string& tok) {
    try {
      return Probability::parse(tok);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
    }
  };

  while (std::getline(lines, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::vector<std::string> tok{std::istream_iterator<std::string>(words), {}};
    if (tok.empty()) continue;
    const std::string& kw = tok[0];
    if (n < 0 && kw != "dtmc") fail("expected 'dtmc <states> <aps>' header");
    if (kw == "dtmc") {
      if (n >= 0) fail("duplicate 'dtmc' header");
      if (tok.size() != 3 || !all_digits(tok[1]) || !all_digits(tok[2]) || tok[1].size() > 9 ||
          tok[2].size() > 3)
        fail("expected 'dtmc <states> <aps>'");
      n = std::stol(tok[1]);
      naps = std::stol(tok[2]);
      if (n == 0) fail("chain must have at least one state");
      if (static_cast<std::size_t>(naps) > automata::kMaxAps)
        throw UnsupportedError("too many atomic propositions", lineno, 1);
      rows.resize(n);
      initial.resize(n);
      labels.resize(n);
    } else if (kw == "ap") {
      if (have_aps) fail("duplicate 'ap' line");
      if (static_cast<long>(tok.size()) - 1 != naps)
        fail("expected " + std::to_string(naps) + " AP names, got " + std::to_string(tok.size() - 1));
      aps.assign(tok.begin() + 1, tok.end());
      have_aps = true;
    } else if (kw == "init") {
      if (tok.size() != 3) fail("expected 'init <state> <prob>'");
      auto s = state(tok[1]);
      initial[s] = prob(tok[2]);
    } else if (kw == "label") {
      if (tok.size() != 2 && tok.size() != 3) fail("expected 'label <state> <aps>'");
      auto s = state(tok[1]);
      std::string set = tok.size() == 3 ? tok[2] : "-";
      auto sym = alphabet().find(set);
      if (!sym) fail("unknown atomic proposition in '" + set + "'");
      labels[s] = *sym;
    } else if (kw == "trans") {
      if (tok.size() != 4) fail("expected 'trans <src> <dst> <prob>'");
      auto s = state(tok[1]);
      auto t = state(tok[2]);
      rows[s].push_back({t, prob(tok[3])});
    } else {
      fail("unknown directive '" + kw + "'");
    }
  }
  if (n < 0) throw ParseError("empty Markov chain file");
  std::vector<Symbol> final_labels;
  for (long s = 0; s < n; ++s) {
    if (!labels[s]) throw ValidationError("missing label for state " + std::to_string(s));
    final_labels.push_back(*labels[s]);
  }
  for (long s = 0; s < n; ++s) {
    if (rows[s].empty()) throw ValidationError("row of state " + std::to_string(s) + " is empty");
  }
  return Dtmc(alphabet(), std::move(rows), std::move(initial), std::move(final_labels));
}

Dtmc parse_dtmc(std::istream& in) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_dtmc(std::string_view(text));
}

void write_dtmc(const Dtmc& dtmc, std::ostream& out) {
  const Alphabet& sigma = dtmc.alphabet();
  if (!sigma.has_aps()) throw ValidationError("only AP-labelled chains can be serialized");
  out << "dtmc " << dtmc.num_states() << ' ' << sigma.ap_names().size() << '\n';
  if (!sigma.ap_names().empty()) {
    out << "ap";
    for (const auto& ap : sigma.ap_names()) out << ' ' << ap;
    out << '\n';
  }
  for (std::uint32_t s = 0; s < dtmc.num_states(); ++s)
    if (dtmc.initial(s).exact != 0) out << "init " << s << ' ' << dtmc.initial(s).str() << '\n';
  for (std::uint32_t s = 0; s < dtmc.num_states(); ++s) {
    std::string name = sigma.name(dtmc.label(s));
    name = name.substr(1, name.size() - 2);
    out << "label " << s << ' ' << (name.empty() ? "-" : name) << '\n';
  }
  for (std::uint32_t s = 0; s < dtmc.num_states(); ++s)
    for (const auto& t : dtmc.row(s)) out << "trans " << s << ' ' << t.target << ' ' << t.prob.str() << '\n';
}

std::string serialize_dtmc(const Dtmc& dtmc) {
  std::ostringstream os;
  write_dtmc(dtmc, os);
  return os.str();
}

Dtmc uniform_chain(const Alphabet& alphabet) {
  const std::size_t k = alphabet.size();
  if (k < 2) throw ValidationError("uniform chain needs at least two symbols, got " + std::to_string(k));
  Probability p = Probability::fraction(1, static_cast<long>(k));
  std::vector<std::vector<Transition>> rows(k);
  std::vector<Probability> initial(k, p);
  std::vector<Symbol> labels(k);
  std::vector<std::string> names(k);
  for (std::size_t a = 0; a < k; ++a) {
    labels[a] = static_cast<Symbol>(a);
    names[a] = alphabet.name(static_cast<Symbol>(a));
    rows[a].reserve(k);
    for (std::size_t b = 0; b < k; ++b) rows[a].push_back({static_cast<std::uint32_t>(b), p});
  }
  return Dtmc(alphabet, std::move(rows), std::move(initial), std::move(labels), std::move(names));
}

}  // namespace ubacheck::markov
