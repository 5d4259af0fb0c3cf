// Bounded behavioural equivalence between choreographies and networks.
//
// Synchronous mode plays a depth-bounded strong bisimulation game on
// concrete labels. Asynchronous mode observes completions only: on the
// network side a move is any number of enqueues followed by one dequeue,
// labelled with the dequeued payload; on the choreography side an action
// fires silently, its components become pending, and a move emits one
// pending component (conditionals are observed when they fire). A
// choreography action may fire only if none of its processes is still to
// receive a pending component.

#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "chorex/extraction.hpp"
#include "chorex/semantics.hpp"
#include "chorex/syntax.hpp"

namespace chorex {

using Trace = std::vector<std::string>;  // rendered labels

struct EquivOptions {
  Mode mode = Mode::Sync;
  int depth = 12;
  std::size_t queue_cap = 16;     // max messages in flight (async, both sides)
  std::size_t max_configs = 2'000'000;
};

struct EquivResult {
  bool equivalent = true;
  Trace counterexample;  // moves leading to the first mismatch, side-tagged
};

EquivResult check_bisim(const ChoreographyProgram& c, const Network& n, const State& sigma,
                        const EquivOptions& options = {});
bool bounded_bisim(const ChoreographyProgram& c, const Network& n, const State& sigma, int depth,
                   Mode mode = Mode::Sync);

/// All label sequences of length <= depth (prefix-closed, includes the
/// empty trace). Throws ResourceLimit past `max_traces`.
std::set<Trace> trace_set(const ChoreographyProgram& c, const State& sigma, int depth,
                          std::size_t max_traces = 1'000'000);
std::set<Trace> trace_set(const Network& n, const State& sigma, int depth, std::size_t max_traces = 1'000'000);
/// Asynchronous steps, labelled "enq ..." / "deq ...".
std::set<Trace> async_trace_set(const Network& n, const State& sigma, int depth,
                                std::size_t max_traces = 1'000'000);

/// True iff the asynchronous network can complete the labels of `trace`
/// in order (enqueues unobserved).
bool async_embeds(const Network& n, const State& sigma, const Trace& trace, std::size_t queue_cap = 16);

/// States used for equivalence checks: all-unit, plus for each process
/// and each value literal of the term (and one fresh value) the state that
/// gives only that process that value.
std::vector<State> sample_states(const ChoreographyProgram& c);
std::vector<State> sample_states(const Network& n);

}  // namespace chorex
