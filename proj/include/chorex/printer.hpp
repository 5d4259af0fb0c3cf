// Canonical rendering. Output re-parses to an equal AST; branches come out
// sorted by label and spacing is fixed, so equal terms render identically.

#pragma once

#include <string>

#include "chorex/syntax.hpp"

namespace chorex {

std::string render(const Interaction& eta);
std::string render(const Choreography& c);
std::string render(const ChoreographyProgram& prog);
std::string render(const Behaviour& b);
std::string render(const Network& n);

}  // namespace chorex
