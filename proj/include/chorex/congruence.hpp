// Structural congruence on finite choreographies.
//
// Rules: swapping independent multicoms (pn-disjoint), permuting actions
// with distinct senders inside a multicom, merging/splitting adjacent
// multicoms (distinct receivers, no receiver of the first sends in the
// second), moving an action in or out of a conditional it is independent
// of, and swapping independent nested conditionals. Calls and nested
// definitions are opaque.

#pragma once

#include <cstddef>
#include <vector>

#include "chorex/syntax.hpp"

namespace chorex {

/// Splits a multicom into its smallest sequentialisable groups, in a
/// dependency-respecting order. Each group has its actions stably sorted
/// by sender.
std::vector<std::vector<Interaction>> split_multicom(const std::vector<Interaction>& actions);

/// Normal form: every multicom split into groups, then the smallest
/// frontable item (group or conditional) is repeatedly moved to the head.
Choreography canonical_form(const Choreography& c);

/// All terms reachable by one rule application, at any position.
std::vector<Choreography> rewrite_once(const Choreography& c);

/// Breadth-first search over rewrite_once from both sides. `max_states`
/// bounds the visited set.
bool bounded_equiv(const Choreography& a, const Choreography& b, int depth, std::size_t max_states = 20000);

/// Decides a ≡ b via canonical forms, falling back to bounded search.
bool struct_equiv(const Choreography& a, const Choreography& b, int depth = 6);

/// Program equivalence: some bijection between procedure names makes main
/// and every pair of related bodies struct_equiv. Unreachable definitions
/// are ignored.
bool equivalent_programs(const ChoreographyProgram& a, const ChoreographyProgram& b, int depth = 6);

/// Renames calls according to `names` (names not in the map are kept).
Choreography rename_calls(const Choreography& c, const std::map<ProcedureName, ProcedureName>& names);

/// Drops definitions not reachable from main.
ChoreographyProgram prune_unreachable(const ChoreographyProgram& prog);

/// Number of conditionals / interactions (multicom parts counted) in c.
std::size_t count_conditionals(const Choreography& c);
std::size_t count_interactions(const Choreography& c);
bool contains_stuck(const Choreography& c);
bool contains_stuck(const ChoreographyProgram& prog);

}  // namespace chorex
