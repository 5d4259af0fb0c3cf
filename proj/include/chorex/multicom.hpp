// Multicom look-ahead for asynchronous extraction.

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chorex/semantics.hpp"
#include "chorex/syntax.hpp"

namespace chorex {

struct MulticomFailure {
  ProcessName process;  // the process whose behaviour has the wrong shape
  std::string residual;  // its behaviour at the point of failure
  std::string reason;
};

/// Worklist snapshot after one action moved from `waiting` to `actions`.
struct MulticomTraceStep {
  Interaction moved;
  std::vector<Interaction> actions;
  std::vector<Interaction> waiting;
};

struct MulticomResult {
  std::vector<Interaction> actions;  // in the order they were moved
  std::vector<MulticomTraceStep> trace;
  std::optional<MulticomFailure> failure;
  // Valid on success: the system after every action of the multicom has
  // been sent and received, with annotations updated.
  System next;
  std::set<ProcessName> unfolded;

  bool ok() const { return !failure; }
  /// Canonical edge label (multicom, or a plain action if unary).
  AbstractLabel label() const { return abstract_label(actions); }
};

/// Seeds the worklist with the head send/selection of `p`. If p's head is
/// neither, the result is a failure naming p.
MulticomResult compute_multicom(const System& n, const ProcessName& p);
MulticomResult compute_multicom(const Network& n, const ProcessName& p);

/// Splits every multicom into unsplittable groups (see split_multicom).
Choreography normalize_multicom(const Choreography& c);
ChoreographyProgram normalize_multicom(const ChoreographyProgram& prog);

}  // namespace chorex
