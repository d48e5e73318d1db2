#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace ubacheck {

using State = std::uint32_t;
using Symbol = std::uint32_t;
using NodeId = std::uint32_t;

inline constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

/// Dense bitset keyed by state (or node) index.
using StateSet = boost::dynamic_bitset<>;

inline std::vector<std::uint32_t> members(const StateSet& set) {
  std::vector<std::uint32_t> out;
  out.reserve(set.count());
  for (auto i = set.find_first(); i != StateSet::npos; i = set.find_next(i))
    out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

inline StateSet make_set(std::size_t universe, const std::vector<std::uint32_t>& elems) {
  StateSet set(universe);
  for (auto e : elems) set.set(e);
  return set;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(line == 0 ? what
                        : std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Input is well formed but uses something this tool does not handle.
class UnsupportedError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Structurally valid input that violates a semantic constraint
/// (row sums, unknown symbols, alphabet mismatch, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace ubacheck
