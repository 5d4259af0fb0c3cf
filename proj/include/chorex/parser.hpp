// Textual front end for `.sp` networks and `.cc` choreography programs.
//
// Networks:      p { B } | q { B } | ...
// Behaviours:    q!e; B   p?; B   q+l; B   p&{ l: B, r: B }
//                if *=q then B else B   def X = B in B   X   0   ( B )
// Choreographies p.e -> q; C   p -> q[l]; C   (eta | eta | ...); C
//                if p=q then C else C   def X = C in C   X   0   1   ( C )
// Programs:      { def X = C } main = C
// Expressions:   identifier, integer literal, `*`, or `()` for unit.
//
// `//` line comments and `/* ... */` block comments are skipped.

#pragma once

#include <set>
#include <string>
#include <string_view>

#include "chorex/syntax.hpp"

namespace chorex {

class ParseError : public Error {
 public:
  ParseError(int line, int column, std::string found, std::set<std::string> expected);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& found() const { return found_; }
  const std::set<std::string>& expected() const { return expected_; }

 private:
  int line_;
  int column_;
  std::string found_;
  std::set<std::string> expected_;
};

Network parse_network(std::string_view text);
ChoreographyProgram parse_choreography(std::string_view text);

// Single-term entry points (no program/network wrapper), mostly for tests.
Behaviour parse_behaviour(std::string_view text);
Choreography parse_choreography_term(std::string_view text);

}  // namespace chorex
