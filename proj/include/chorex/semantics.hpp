// Labelled reduction semantics.
//
// Networks are executed in a lifted form (`System`): every nested
// `def X = B in B'` is hoisted into a per-process procedure table with
// unique names, so a process is a table plus a definition-free current
// term. Unfolding a call replaces the term by the procedure body.

#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "chorex/syntax.hpp"

namespace chorex {

// ---------------------------------------------------------------------------
// Stores and labels

using State = std::map<ProcessName, Value>;

/// Value stored by p; processes absent from the map hold unit.
Value value_of(const State& sigma, const ProcessName& p);

Value eval_expr(const Expression& e, const Value& self_value);

std::string render(const State& sigma);

enum class LabelKind { Com, Sel, CondThen, CondElse, Multi };

/// Reduction label. `Payload` is Value for concrete reductions and
/// Expression for abstract ones. For Com/Sel, p is the sender and q the
/// receiver; for conditionals p evaluates and q is compared. A Multi label
/// holds at least two Com/Sel parts sorted by (sender, receiver).
template <class Payload>
struct BasicLabel {
  LabelKind kind = LabelKind::Com;
  ProcessName p;
  ProcessName q;
  Payload payload{};
  Label label;
  std::vector<BasicLabel> parts;

  static BasicLabel com(ProcessName p, Payload v, ProcessName q) {
    BasicLabel l;
    l.kind = LabelKind::Com;
    l.p = std::move(p);
    l.q = std::move(q);
    l.payload = std::move(v);
    return l;
  }
  static BasicLabel sel(ProcessName p, ProcessName q, Label lbl) {
    BasicLabel l;
    l.kind = LabelKind::Sel;
    l.p = std::move(p);
    l.q = std::move(q);
    l.label = std::move(lbl);
    return l;
  }
  static BasicLabel cond(bool then_branch, ProcessName p, ProcessName q) {
    BasicLabel l;
    l.kind = then_branch ? LabelKind::CondThen : LabelKind::CondElse;
    l.p = std::move(p);
    l.q = std::move(q);
    return l;
  }
  /// Canonicalises: sorts parts, and collapses a single part to itself.
  static BasicLabel multi(std::vector<BasicLabel> parts);

  bool is_multi() const { return kind == LabelKind::Multi; }
  bool is_cond() const { return kind == LabelKind::CondThen || kind == LabelKind::CondElse; }

  /// The label itself, or its parts when it is a multicom.
  std::vector<BasicLabel> components() const { return is_multi() ? parts : std::vector<BasicLabel>{*this}; }

  friend bool operator==(const BasicLabel& a, const BasicLabel& b) {
    return a.kind == b.kind && a.p == b.p && a.q == b.q && a.payload == b.payload && a.label == b.label &&
           a.parts == b.parts;
  }
  friend bool operator<(const BasicLabel& a, const BasicLabel& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.p != b.p) return a.p < b.p;
    if (a.q != b.q) return a.q < b.q;
    if (a.payload != b.payload) return a.payload < b.payload;
    if (a.label != b.label) return a.label < b.label;
    return a.parts < b.parts;
  }
};

template <class Payload>
BasicLabel<Payload> BasicLabel<Payload>::multi(std::vector<BasicLabel> parts) {
  std::sort(parts.begin(), parts.end(), [](const BasicLabel& a, const BasicLabel& b) {
    return std::tie(a.p, a.q) < std::tie(b.p, b.q);
  });
  if (parts.size() == 1) return parts.front();
  BasicLabel l;
  l.kind = LabelKind::Multi;
  l.parts = std::move(parts);
  return l;
}

using ReductionLabel = BasicLabel<Value>;
using AbstractLabel = BasicLabel<Expression>;

std::string render(const ReductionLabel& l);
std::string render(const AbstractLabel& l);

std::set<ProcessName> process_names(const ReductionLabel& l);
std::set<ProcessName> process_names(const AbstractLabel& l);

/// Choreography actions carried by a Com/Sel/Multi abstract label.
std::vector<Interaction> interactions(const AbstractLabel& l);
AbstractLabel abstract_label(const std::vector<Interaction>& actions);

/// Instantiates the expressions of an abstract label under sigma.
ReductionLabel instantiate(const AbstractLabel& l, const State& sigma);

// ---------------------------------------------------------------------------
// Choreography semantics

struct ChoreographyStep {
  ReductionLabel label;
  Choreography next;
  State state;
};

/// All reductions of `c` under `sigma`, closed under structural
/// precongruence: independent actions may overtake earlier ones, actions
/// common to both branches of a conditional may overtake it, and calls are
/// unfolded from `prog.defs` (or enclosing nested definitions) on demand.
/// Throws UnboundProcedure.
std::vector<ChoreographyStep> step_choreography(const ChoreographyProgram& prog, const Choreography& c,
                                                const State& sigma);

// ---------------------------------------------------------------------------
// Lifted networks

using ProcedureTable = std::map<ProcedureName, Behaviour>;

struct ProcessState {
  std::shared_ptr<const ProcedureTable> procedures;
  Behaviour term;      // never contains BehDef
  bool black = false;  // call annotation; only meaningful if term has calls
};

struct System {
  std::map<ProcessName, ProcessState> processes;
};

System lift(const Network& n);
/// Re-nests the procedure tables as `def` blocks (duplicating definitions
/// where mutual recursion requires it).
Network lower(const System& s);

/// Canonical text of the current terms; with `annotations`, every process
/// whose term contains calls is suffixed with its mark (∘ white, • black).
std::string render(const System& s, bool annotations = false);
/// Node identity for state-space exploration (includes annotations).
std::string key(const System& s);

bool contains_call(const Behaviour& b);
/// All processes have terminated (term is 0).
bool is_terminated(const System& s);
/// Every call in the system carries the white mark (vacuously true).
bool all_white(const System& s);

struct Head {
  Behaviour term;         // first non-call term, or nullptr on unguarded recursion
  bool unfolded = false;  // a call had to be unfolded to reach it
};

/// Unfolds calls at the head of `ps` until an action (or 0) surfaces.
Head resolve_head(const ProcessState& ps);

// ---------------------------------------------------------------------------
// Network semantics

struct NetworkStep {
  ReductionLabel label;
  System next;
  State state;
};

std::vector<NetworkStep> step_network_sync(const System& n, const State& sigma);

struct Message {
  bool is_selection = false;
  Value value;
  Label label;

  friend bool operator==(const Message&, const Message&) = default;
};

/// FIFO queue per ordered (sender, receiver) pair. Empty queues are erased,
/// so equal contents compare equal.
using Queues = std::map<std::pair<ProcessName, ProcessName>, std::deque<Message>>;

std::string render(const Queues& queues);

struct AsyncLabel {
  enum class Dir { Enqueue, Dequeue };
  Dir dir = Dir::Enqueue;
  ReductionLabel payload;

  friend bool operator==(const AsyncLabel&, const AsyncLabel&) = default;
  friend bool operator<(const AsyncLabel& a, const AsyncLabel& b) {
    if (a.dir != b.dir) return a.dir < b.dir;
    return a.payload < b.payload;
  }
};

std::string render(const AsyncLabel& l);

struct AsyncStep {
  AsyncLabel label;
  System next;
  State state;
  Queues queues;
};

/// Sends and selections enqueue; receives, branchings and conditionals
/// dequeue the head of their queue (a conditional at p compares the value
/// sent by its partner q with its own).
std::vector<AsyncStep> step_network_async(const System& n, const State& sigma, const Queues& queues);

struct AbstractStep {
  AbstractLabel label;
  System next;
  std::set<ProcessName> unfolded;  // processes whose head call was unfolded
};

/// State-free reductions with nondeterministic conditionals and call
/// annotation bookkeeping: calls introduced by an unfolding are marked
/// black, and once every call in the system is black all marks reset to
/// white.
std::vector<AbstractStep> step_network_abstract(const System& n);

/// Applies the annotation rule to `next` given the processes that unfolded.
void update_annotations(System& next, const std::set<ProcessName>& unfolded);

// Convenience overloads on plain networks.
std::vector<NetworkStep> step_network_sync(const Network& n, const State& sigma);
std::vector<AsyncStep> step_network_async(const Network& n, const State& sigma, const Queues& queues);

}  // namespace chorex
