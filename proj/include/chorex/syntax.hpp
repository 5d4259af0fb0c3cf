// Abstract syntax for choreographies (CC) and process networks (SP).
//
// Terms are immutable trees held through shared_ptr<const ...>, so subterms
// are shared freely between successor states produced by the steppers.

#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace chorex {

using ProcessName = std::string;
using Label = std::string;
using ProcedureName = std::string;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A call names a procedure with no definition in scope.
class UnboundProcedure : public Error {
 public:
  explicit UnboundProcedure(const ProcedureName& name)
      : Error("unbound procedure '" + name + "'"), name_(name) {}
  const ProcedureName& name() const { return name_; }

 private:
  ProcedureName name_;
};

/// A term violates a syntactic invariant (self-communication, duplicate
/// multicom receivers, empty branching, ...).
class MalformedTerm : public Error {
 public:
  using Error::Error;
};

bool is_identifier(const std::string& s);

// ---------------------------------------------------------------------------
// Values and expressions

class Value {
 public:
  Value() = default;  // unit
  static Value unit() { return Value(); }
  static Value constant(std::string name);

  bool is_unit() const { return unit_; }
  const std::string& name() const { return name_; }

  friend bool operator==(const Value&, const Value&) = default;
  friend auto operator<=>(const Value&, const Value&) = default;

 private:
  bool unit_ = true;
  std::string name_;
};

std::string to_string(const Value& v);

class Expression {
 public:
  /// Default-constructs the placeholder `*`.
  Expression() = default;
  /// The placeholder `*`: the value of the evaluating process.
  static Expression self() { return Expression(); }
  static Expression literal(Value v);

  bool is_self() const { return self_; }
  const Value& value() const { return value_; }

  friend bool operator==(const Expression&, const Expression&) = default;
  friend auto operator<=>(const Expression&, const Expression&) = default;

 private:
  bool self_ = true;
  Value value_;
};

std::string to_string(const Expression& e);

// ---------------------------------------------------------------------------
// Choreographies

struct Interaction {
  enum class Kind { Com, Sel };

  Kind kind = Kind::Com;
  ProcessName sender;
  ProcessName receiver;
  Expression expr = Expression::self();  // Com only
  Label label;                           // Sel only

  static Interaction com(ProcessName p, Expression e, ProcessName q);
  static Interaction sel(ProcessName p, ProcessName q, Label l);

  friend bool operator==(const Interaction&, const Interaction&) = default;
  friend auto operator<=>(const Interaction&, const Interaction&) = default;
};

struct ChoreographyNode;
using Choreography = std::shared_ptr<const ChoreographyNode>;

struct ChorEnd {};
struct ChorStuck {
  // Residual behaviours of the deadlocked processes, for diagnostics only.
  // Not part of term identity.
  std::vector<std::string> notes;
};
struct ChorSeq {
  std::vector<Interaction> actions;  // size >= 2 is a multicom
  Choreography cont;
};
struct ChorCond {
  ProcessName p;
  ProcessName q;
  Choreography then_branch;
  Choreography else_branch;
};
struct ChorCall {
  ProcedureName name;
};
// Nested definition, only produced by inline_definitions.
struct ChorDef {
  ProcedureName name;
  Choreography body;
  Choreography cont;
};

struct ChoreographyNode {
  std::variant<ChorEnd, ChorStuck, ChorSeq, ChorCond, ChorCall, ChorDef> node;
};

namespace chor {
Choreography end();
Choreography stuck(std::vector<std::string> notes = {});
Choreography seq(std::vector<Interaction> actions, Choreography cont);
Choreography com(ProcessName p, Expression e, ProcessName q, Choreography cont);
Choreography sel(ProcessName p, ProcessName q, Label l, Choreography cont);
Choreography cond(ProcessName p, ProcessName q, Choreography then_branch,
                  Choreography else_branch);
Choreography call(ProcedureName name);
Choreography def(ProcedureName name, Choreography body, Choreography cont);
}  // namespace chor

struct ChoreographyProgram {
  std::map<ProcedureName, Choreography> defs;
  Choreography main = chor::end();
};

// ---------------------------------------------------------------------------
// Process behaviours and networks

struct BehaviourNode;
using Behaviour = std::shared_ptr<const BehaviourNode>;

struct BehEnd {};
struct BehSend {
  ProcessName to;
  Expression expr;
  Behaviour cont;
};
struct BehRecv {
  ProcessName from;
  Behaviour cont;
};
struct BehSelect {
  ProcessName to;
  Label label;
  Behaviour cont;
};
struct BehBranch {
  ProcessName from;
  std::map<Label, Behaviour> branches;
};
struct BehCond {
  ProcessName other;  // `if * = other then ... else ...`
  Behaviour then_branch;
  Behaviour else_branch;
};
struct BehDef {
  ProcedureName name;
  Behaviour body;
  Behaviour cont;
};
struct BehCall {
  ProcedureName name;
};

struct BehaviourNode {
  std::variant<BehEnd, BehSend, BehRecv, BehSelect, BehBranch, BehCond, BehDef,
               BehCall>
      node;
};

namespace beh {
Behaviour end();
Behaviour send(ProcessName to, Expression e, Behaviour cont);
Behaviour recv(ProcessName from, Behaviour cont);
Behaviour select(ProcessName to, Label l, Behaviour cont);
Behaviour branch(ProcessName from, std::map<Label, Behaviour> branches);
Behaviour cond(ProcessName other, Behaviour then_branch, Behaviour else_branch);
Behaviour def(ProcedureName name, Behaviour body, Behaviour cont);
Behaviour call(ProcedureName name);
}  // namespace beh

struct Network {
  std::map<ProcessName, Behaviour> processes;

  bool empty() const { return processes.empty(); }
};

// ---------------------------------------------------------------------------
// Structural queries

bool equal(const Choreography& a, const Choreography& b);
bool equal(const Behaviour& a, const Behaviour& b);
bool equal(const Network& a, const Network& b);
bool equal(const ChoreographyProgram& a, const ChoreographyProgram& b);

std::set<ProcessName> process_names(const Interaction& eta);
std::set<ProcessName> process_names(const Choreography& c);
std::set<ProcessName> process_names(const Behaviour& b);
std::set<ProcessName> process_names(const ChoreographyProgram& prog);

/// Procedure names called anywhere in the term (bound or not).
std::set<ProcedureName> called_procedures(const Choreography& c);

/// Number of AST nodes (each constructor counts one).
std::size_t size(const Behaviour& b);
std::size_t size(const Network& n);

/// True iff the term contains neither definitions nor calls.
bool is_finite(const Behaviour& b);
bool is_finite(const Network& n);

/// Throws MalformedTerm / UnboundProcedure if the program violates the
/// syntactic invariants (distinct multicom receivers, p != q, call closure).
void validate(const ChoreographyProgram& prog);
void validate(const Network& n);

}  // namespace chorex
