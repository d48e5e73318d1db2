// Reader and writer for the state-based Büchi subset of HOA v1.
//
// Supported: HOA/States/Start/AP/Alias/Acceptance/acc-name/name/tool/properties
// headers, explicit state-labels and edge-labels built from t, f, AP indices,
// aliases, !, &, | and parentheses, and implicit labels. Anything that would
// change the acceptance semantics (transition marks, several acceptance sets,
// alternation) is rejected.

#include <cctype>
#include <functional>
#include <istream>
#include <iterator>
#include <map>
#include <memory>
#include <ostream>

#include "ubacheck/automata.hpp"

namespace ubacheck::automata {
namespace {

enum class Tok { Header, Int, String, Ident, Alias, LBracket, RBracket, LBrace, RBrace,
                 LParen, RParen, Not, And, Or, Body, End, Eof };

struct Token {
  Tok kind;
  std::string text;
  long long value = 0;
  std::size_t line = 0;
  std::size_t column = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space();
    Token t{Tok::Eof, "", 0, line_, col_};
    if (pos_ >= text_.size()) return t;
    char c = text_[pos_];
    auto single = [&](Tok k) {
      t.kind = k;
      t.text = std::string(1, c);
      advance();
      return t;
    };
    switch (c) {
      case '[': return single(Tok::LBracket);
      case ']': return single(Tok::RBracket);
      case '{': return single(Tok::LBrace);
      case '}': return single(Tok::RBrace);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case '!': return single(Tok::Not);
      case '&': return single(Tok::And);
      case '|': return single(Tok::Or);
      default: break;
    }
    if (c == '"') {
      advance();
      std::string s;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) advance();
        s += text_[pos_];
        advance();
      }
      if (pos_ >= text_.size()) throw ParseError("unterminated string", t.line, t.column);
      advance();
      t.kind = Tok::String;
      t.text = std::move(s);
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string s;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        s += text_[pos_];
        advance();
      }
      t.kind = Tok::Int;
      t.text = s;
      if (s.size() > 9) throw ParseError("integer too large: " + s, t.line, t.column);
      t.value = std::stoll(s);
      return t;
    }
    if (c == '@' || c == '-' || std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string s;
      s += c;
      advance();
      while (pos_ < text_.size()) {
        char d = text_[pos_];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '-') {
          s += d;
          advance();
        } else {
          break;
        }
      }
      if (s == "--BODY--") {
        t.kind = Tok::Body;
      } else if (s == "--END--") {
        t.kind = Tok::End;
      } else if (s.front() == '@') {
        t.kind = Tok::Alias;
      } else if (pos_ < text_.size() && text_[pos_] == ':') {
        advance();
        t.kind = Tok::Header;
      } else {
        t.kind = Tok::Ident;
      }
      // "--ABORT--" and friends come through as identifiers starting with '-'.
      if (t.kind == Tok::Ident && s.front() == '-')
        throw UnsupportedError("unexpected token '" + s + "'", t.line, t.column);
      t.text = std::move(s);
      return t;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", t.line, t.column);
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
        advance();
        advance();
        while (pos_ + 1 < text_.size() && !(text_[pos_] == '*' && text_[pos_ + 1] == '/'))
          advance();
        if (pos_ + 1 >= text_.size()) throw ParseError("unterminated comment", line_, col_);
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// Label expressions are compiled to predicates over the valuation bitmask.
using Label = std::function<bool(Symbol)>;

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) { shift(); }

  Nba parse() {
    parse_header();
    return parse_body();
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, cur_.line, cur_.column);
  }
  [[noreturn]] void unsupported(const std::string& what) const {
    throw UnsupportedError(what, cur_.line, cur_.column);
  }

  void shift() { cur_ = lex_.next(); }

  Token expect(Tok kind, const char* what) {
    if (cur_.kind != kind) fail(std::string("expected ") + what + ", found '" + cur_.text + "'");
    Token t = cur_;
    shift();
    return t;
  }

  bool at_header_value_end() const {
    return cur_.kind == Tok::Header || cur_.kind == Tok::Body || cur_.kind == Tok::Eof;
  }

  void parse_header() {
    if (cur_.kind != Tok::Header || cur_.text != "HOA") fail("document must start with 'HOA:'");
    shift();
    Token v = expect(Tok::Ident, "format version");
    if (v.text != "v1") unsupported("unsupported HOA version '" + v.text + "'");

    bool have_acceptance = false;
    while (cur_.kind == Tok::Header) {
      Token h = cur_;
      shift();
      const std::string& name = h.text;
      if (name == "States") {
        num_states_ = expect(Tok::Int, "state count").value;
      } else if (name == "Start") {
        start_.push_back(static_cast<State>(expect(Tok::Int, "start state").value));
        if (cur_.kind == Tok::And) unsupported("alternating start ('&') is not supported");
      } else if (name == "AP") {
        auto n = expect(Tok::Int, "AP count").value;
        if (n < 0 || static_cast<std::size_t>(n) > kMaxAps)
          unsupported("AP count " + std::to_string(n) + " exceeds the limit of " +
                      std::to_string(kMaxAps));
        for (long long i = 0; i < n; ++i) aps_.push_back(expect(Tok::String, "AP name").text);
        have_aps_ = true;
      } else if (name == "Alias") {
        Token a = expect(Tok::Alias, "alias name");
        aliases_[a.text] = parse_label_expr();
      } else if (name == "Acceptance") {
        auto sets = expect(Tok::Int, "acceptance set count").value;
        std::string cond;
        while (!at_header_value_end()) {
          cond += cur_.text;
          shift();
        }
        if (sets != 1 || cond != "Inf(0)")
          throw UnsupportedError("unsupported acceptance condition '" + std::to_string(sets) +
                                     " " + cond + "' (only state-based Buchi 'Inf(0)')",
                                 h.line, h.column);
        have_acceptance = true;
      } else if (name == "acc-name") {
        Token a = expect(Tok::Ident, "acceptance name");
        if (a.text != "Buchi")
          throw UnsupportedError("unsupported acceptance '" + a.text + "'", a.line, a.column);
        while (!at_header_value_end()) shift();
      } else if (name == "name") {
        name_ = expect(Tok::String, "automaton name").text;
      } else if (name == "properties") {
        while (!at_header_value_end()) {
          if (cur_.text == "trans-acc")
            unsupported("transition-based acceptance is not supported");
          if (cur_.text == "univ-branch")
            unsupported("universal branching is not supported");
          shift();
        }
      } else if (!name.empty() && std::isupper(static_cast<unsigned char>(name[0])) &&
                 name != "HOA") {
        throw UnsupportedError("unsupported header '" + name + ":'", h.line, h.column);
      } else {
        // tool:, controllable-AP:, and other optional headers.
        while (!at_header_value_end()) shift();
      }
    }
    if (!have_acceptance) fail("missing 'Acceptance:' header");
    if (!have_aps_) aps_.clear();
    expect(Tok::Body, "--BODY--");
  }

  Label parse_label_expr() { return parse_or(); }

  Label parse_or() {
    Label lhs = parse_and();
    while (cur_.kind == Tok::Or) {
      shift();
      Label rhs = parse_and();
      lhs = [lhs, rhs](Symbol v) { return lhs(v) || rhs(v); };
    }
    return lhs;
  }

  Label parse_and() {
    Label lhs = parse_not();
    while (cur_.kind == Tok::And) {
      shift();
      Label rhs = parse_not();
      lhs = [lhs, rhs](Symbol v) { return lhs(v) && rhs(v); };
    }
    return lhs;
  }

  Label parse_not() {
    if (cur_.kind == Tok::Not) {
      shift();
      Label inner = parse_not();
      return [inner](Symbol v) { return !inner(v); };
    }
    if (cur_.kind == Tok::LParen) {
      shift();
      Label inner = parse_or();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (cur_.kind == Tok::Int) {
      auto idx = cur_.value;
      if (idx < 0 || static_cast<std::size_t>(idx) >= aps_.size())
        fail("AP index " + std::to_string(idx) + " out of range");
      shift();
      return [idx](Symbol v) { return ((v >> idx) & 1u) != 0; };
    }
    if (cur_.kind == Tok::Ident && (cur_.text == "t" || cur_.text == "f")) {
      bool value = cur_.text == "t";
      shift();
      return [value](Symbol) { return value; };
    }
    if (cur_.kind == Tok::Alias) {
      auto it = aliases_.find(cur_.text);
      if (it == aliases_.end()) fail("undefined alias '" + cur_.text + "'");
      shift();
      return it->second;
    }
    fail("malformed label expression at '" + cur_.text + "'");
  }

  std::vector<Symbol> expand(const Label& label) const {
    std::vector<Symbol> out;
    std::size_t n = std::size_t{1} << aps_.size();
    for (std::size_t v = 0; v < n; ++v)
      if (label(static_cast<Symbol>(v))) out.push_back(static_cast<Symbol>(v));
    return out;
  }

  State read_state_ref(const char* what) {
    Token t = expect(Tok::Int, what);
    if (cur_.kind == Tok::And) unsupported("alternating transitions ('&') are not supported");
    return static_cast<State>(t.value);
  }

  Nba parse_body() {
    struct Edge {
      State from;
      std::vector<Symbol> symbols;
      State to;
      std::size_t line;
    };
    std::vector<Edge> edges;
    std::vector<State> accepting;
    std::vector<std::pair<State, std::string>> names;
    State max_state = 0;
    bool any_state = false;
    std::size_t alphabet_size = std::size_t{1} << aps_.size();

    while (cur_.kind == Tok::Header && cur_.text == "State") {
      shift();
      std::optional<Label> state_label;
      if (cur_.kind == Tok::LBracket) {
        shift();
        state_label = parse_label_expr();
        expect(Tok::RBracket, "']'");
      }
      State q = static_cast<State>(expect(Tok::Int, "state number").value);
      max_state = std::max(max_state, q);
      any_state = true;
      if (cur_.kind == Tok::String) {
        names.emplace_back(q, cur_.text);
        shift();
      }
      if (cur_.kind == Tok::LBrace) {
        shift();
        while (cur_.kind == Tok::Int) {
          if (cur_.value != 0) unsupported("acceptance set index other than 0");
          accepting.push_back(q);
          shift();
        }
        expect(Tok::RBrace, "'}'");
      }

      std::size_t implicit_index = 0;
      while (cur_.kind == Tok::LBracket || cur_.kind == Tok::Int) {
        std::size_t line = cur_.line;
        std::vector<Symbol> symbols;
        if (cur_.kind == Tok::LBracket) {
          if (state_label) fail("edge label on a state that already has a state label");
          shift();
          Label l = parse_label_expr();
          expect(Tok::RBracket, "']'");
          symbols = expand(l);
        } else if (state_label) {
          symbols = expand(*state_label);
        } else {
          if (implicit_index >= alphabet_size) fail("too many implicitly labelled edges");
          symbols = {static_cast<Symbol>(implicit_index++)};
        }
        State to = read_state_ref("destination state");
        max_state = std::max(max_state, to);
        if (cur_.kind == Tok::LBrace)
          unsupported("transition-based acceptance marks are not supported");
        edges.push_back({q, std::move(symbols), to, line});
      }
    }
    if (cur_.kind != Tok::End) fail("expected 'State:' or '--END--', found '" + cur_.text + "'");

    std::size_t n = num_states_ >= 0 ? static_cast<std::size_t>(num_states_)
                                      : (any_state ? max_state + 1u : 0u);
    for (State s : start_)
      if (s >= n) fail("start state " + std::to_string(s) + " out of range");
    if (any_state && max_state >= n)
      fail("state " + std::to_string(max_state) + " out of range (States: " +
           std::to_string(n) + ")");

    NbaBuilder b(Alphabet::from_aps(aps_), n);
    b.set_name(name_);
    for (State s : start_) b.set_initial(s);
    for (State q : accepting) b.set_final(q);
    for (auto& [q, nm] : names) b.set_state_name(q, nm);
    for (const auto& e : edges)
      for (Symbol a : e.symbols) b.add_transition(e.from, a, e.to);
    return b.build();
  }

  Lexer lex_;
  Token cur_;
  long long num_states_ = -1;
  std::vector<State> start_;
  std::vector<std::string> aps_;
  bool have_aps_ = false;
  std::map<std::string, Label> aliases_;
  std::string name_;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Nba parse_hoa(std::string_view text) {
  Parser p(text);
  return p.parse();
}

Nba parse_hoa(std::istream& in) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_hoa(std::string_view(text));
}

void write_hoa(const Nba& nba, std::ostream& out) {
  const Alphabet& sigma = nba.alphabet();
  if (!sigma.has_aps()) throw ValidationError("HOA output needs an atomic-proposition alphabet");
  out << "HOA: v1\n";
  if (!nba.name().empty()) out << "name: " << quote(nba.name()) << '\n';
  out << "States: " << nba.num_states() << '\n';
  for (auto q : members(nba.initial())) out << "Start: " << q << '\n';
  out << "AP: " << sigma.ap_names().size();
  for (const auto& ap : sigma.ap_names()) out << ' ' << quote(ap);
  out << "\nacc-name: Buchi\nAcceptance: 1 Inf(0)\n";
  out << "properties: trans-labels explicit-labels state-acc\n";
  out << "--BODY--\n";
  for (State q = 0; q < nba.num_states(); ++q) {
    out << "State: " << q;
    if (nba.state_name(q) != std::to_string(q)) out << ' ' << quote(nba.state_name(q));
    if (nba.is_final(q)) out << " {0}";
    out << '\n';
    for (Symbol a = 0; a < sigma.size(); ++a)
      for (State p : nba.successors(q, a)) out << '[' << sigma.hoa_label(a) << "] " << p << '\n';
  }
  out << "--END--\n";
}

}  // namespace ubacheck::automata
