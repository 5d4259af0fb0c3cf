#include "chorex/syntax.hpp"

#include <cctype>

#include "overloaded.hpp"

namespace chorex {

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  bool all_digits = true;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) all_digits = false;
  }
  if (all_digits) return true;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

Value Value::constant(std::string name) {
  if (!is_identifier(name)) throw MalformedTerm("invalid value literal '" + name + "'");
  Value v;
  v.unit_ = false;
  v.name_ = std::move(name);
  return v;
}

std::string to_string(const Value& v) { return v.is_unit() ? "()" : v.name(); }

Expression Expression::literal(Value v) {
  Expression e;
  e.self_ = false;
  e.value_ = std::move(v);
  return e;
}

std::string to_string(const Expression& e) {
  return e.is_self() ? "*" : to_string(e.value());
}

Interaction Interaction::com(ProcessName p, Expression e, ProcessName q) {
  if (p == q) throw MalformedTerm("process '" + p + "' communicates with itself");
  Interaction i;
  i.kind = Kind::Com;
  i.sender = std::move(p);
  i.receiver = std::move(q);
  i.expr = std::move(e);
  return i;
}

Interaction Interaction::sel(ProcessName p, ProcessName q, Label l) {
  if (p == q) throw MalformedTerm("process '" + p + "' selects at itself");
  Interaction i;
  i.kind = Kind::Sel;
  i.sender = std::move(p);
  i.receiver = std::move(q);
  i.label = std::move(l);
  return i;
}

// ---------------------------------------------------------------------------

namespace chor {

Choreography end() {
  static const Choreography node = std::make_shared<const ChoreographyNode>(ChoreographyNode{ChorEnd{}});
  return node;
}

Choreography stuck(std::vector<std::string> notes) {
  return std::make_shared<const ChoreographyNode>(ChoreographyNode{ChorStuck{std::move(notes)}});
}

Choreography seq(std::vector<Interaction> actions, Choreography cont) {
  if (actions.empty()) throw MalformedTerm("empty multicom");
  std::set<ProcessName> receivers;
  for (const auto& a : actions) {
    if (a.sender == a.receiver) throw MalformedTerm("process '" + a.sender + "' communicates with itself");
    if (!receivers.insert(a.receiver).second) {
      throw MalformedTerm("multicom has two actions received by '" + a.receiver + "'");
    }
  }
  return std::make_shared<const ChoreographyNode>(
      ChoreographyNode{ChorSeq{std::move(actions), std::move(cont)}});
}

Choreography com(ProcessName p, Expression e, ProcessName q, Choreography cont) {
  return seq({Interaction::com(std::move(p), std::move(e), std::move(q))}, std::move(cont));
}

Choreography sel(ProcessName p, ProcessName q, Label l, Choreography cont) {
  return seq({Interaction::sel(std::move(p), std::move(q), std::move(l))}, std::move(cont));
}

Choreography cond(ProcessName p, ProcessName q, Choreography then_branch, Choreography else_branch) {
  if (p == q) throw MalformedTerm("conditional compares '" + p + "' with itself");
  return std::make_shared<const ChoreographyNode>(ChoreographyNode{
      ChorCond{std::move(p), std::move(q), std::move(then_branch), std::move(else_branch)}});
}

Choreography call(ProcedureName name) {
  return std::make_shared<const ChoreographyNode>(ChoreographyNode{ChorCall{std::move(name)}});
}

Choreography def(ProcedureName name, Choreography body, Choreography cont) {
  return std::make_shared<const ChoreographyNode>(
      ChoreographyNode{ChorDef{std::move(name), std::move(body), std::move(cont)}});
}

}  // namespace chor

namespace beh {

Behaviour end() {
  static const Behaviour node = std::make_shared<const BehaviourNode>(BehaviourNode{BehEnd{}});
  return node;
}

Behaviour send(ProcessName to, Expression e, Behaviour cont) {
  return std::make_shared<const BehaviourNode>(
      BehaviourNode{BehSend{std::move(to), std::move(e), std::move(cont)}});
}

Behaviour recv(ProcessName from, Behaviour cont) {
  return std::make_shared<const BehaviourNode>(BehaviourNode{BehRecv{std::move(from), std::move(cont)}});
}

Behaviour select(ProcessName to, Label l, Behaviour cont) {
  return std::make_shared<const BehaviourNode>(
      BehaviourNode{BehSelect{std::move(to), std::move(l), std::move(cont)}});
}

Behaviour branch(ProcessName from, std::map<Label, Behaviour> branches) {
  if (branches.empty()) throw MalformedTerm("branching on '" + from + "' offers no labels");
  return std::make_shared<const BehaviourNode>(
      BehaviourNode{BehBranch{std::move(from), std::move(branches)}});
}

Behaviour cond(ProcessName other, Behaviour then_branch, Behaviour else_branch) {
  return std::make_shared<const BehaviourNode>(
      BehaviourNode{BehCond{std::move(other), std::move(then_branch), std::move(else_branch)}});
}

Behaviour def(ProcedureName name, Behaviour body, Behaviour cont) {
  return std::make_shared<const BehaviourNode>(
      BehaviourNode{BehDef{std::move(name), std::move(body), std::move(cont)}});
}

Behaviour call(ProcedureName name) {
  return std::make_shared<const BehaviourNode>(BehaviourNode{BehCall{std::move(name)}});
}

}  // namespace beh

// ---------------------------------------------------------------------------
// Equality

using detail::overloaded;

bool equal(const Choreography& a, const Choreography& b) {
  if (a == b) return true;
  if (!a || !b || a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [](const ChorEnd&) { return true; },
          [](const ChorStuck&) { return true; },
          [&](const ChorSeq& x) {
            const auto& y = std::get<ChorSeq>(b->node);
            return x.actions == y.actions && equal(x.cont, y.cont);
          },
          [&](const ChorCond& x) {
            const auto& y = std::get<ChorCond>(b->node);
            return x.p == y.p && x.q == y.q && equal(x.then_branch, y.then_branch) &&
                   equal(x.else_branch, y.else_branch);
          },
          [&](const ChorCall& x) { return x.name == std::get<ChorCall>(b->node).name; },
          [&](const ChorDef& x) {
            const auto& y = std::get<ChorDef>(b->node);
            return x.name == y.name && equal(x.body, y.body) && equal(x.cont, y.cont);
          },
      },
      a->node);
}

bool equal(const Behaviour& a, const Behaviour& b) {
  if (a == b) return true;
  if (!a || !b || a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [](const BehEnd&) { return true; },
          [&](const BehSend& x) {
            const auto& y = std::get<BehSend>(b->node);
            return x.to == y.to && x.expr == y.expr && equal(x.cont, y.cont);
          },
          [&](const BehRecv& x) {
            const auto& y = std::get<BehRecv>(b->node);
            return x.from == y.from && equal(x.cont, y.cont);
          },
          [&](const BehSelect& x) {
            const auto& y = std::get<BehSelect>(b->node);
            return x.to == y.to && x.label == y.label && equal(x.cont, y.cont);
          },
          [&](const BehBranch& x) {
            const auto& y = std::get<BehBranch>(b->node);
            if (x.from != y.from || x.branches.size() != y.branches.size()) return false;
            for (auto i = x.branches.begin(), j = y.branches.begin(); i != x.branches.end(); ++i, ++j) {
              if (i->first != j->first || !equal(i->second, j->second)) return false;
            }
            return true;
          },
          [&](const BehCond& x) {
            const auto& y = std::get<BehCond>(b->node);
            return x.other == y.other && equal(x.then_branch, y.then_branch) &&
                   equal(x.else_branch, y.else_branch);
          },
          [&](const BehDef& x) {
            const auto& y = std::get<BehDef>(b->node);
            return x.name == y.name && equal(x.body, y.body) && equal(x.cont, y.cont);
          },
          [&](const BehCall& x) { return x.name == std::get<BehCall>(b->node).name; },
      },
      a->node);
}

bool equal(const Network& a, const Network& b) {
  if (a.processes.size() != b.processes.size()) return false;
  for (auto i = a.processes.begin(), j = b.processes.begin(); i != a.processes.end(); ++i, ++j) {
    if (i->first != j->first || !equal(i->second, j->second)) return false;
  }
  return true;
}

bool equal(const ChoreographyProgram& a, const ChoreographyProgram& b) {
  if (a.defs.size() != b.defs.size() || !equal(a.main, b.main)) return false;
  for (auto i = a.defs.begin(), j = b.defs.begin(); i != a.defs.end(); ++i, ++j) {
    if (i->first != j->first || !equal(i->second, j->second)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Process names

std::set<ProcessName> process_names(const Interaction& eta) { return {eta.sender, eta.receiver}; }

namespace {

void collect_names(const Choreography& c, std::set<ProcessName>& out) {
  std::visit(overloaded{
                 [](const ChorEnd&) {},
                 [](const ChorStuck&) {},
                 [](const ChorCall&) {},
                 [&](const ChorSeq& x) {
                   for (const auto& a : x.actions) {
                     out.insert(a.sender);
                     out.insert(a.receiver);
                   }
                   collect_names(x.cont, out);
                 },
                 [&](const ChorCond& x) {
                   out.insert(x.p);
                   out.insert(x.q);
                   collect_names(x.then_branch, out);
                   collect_names(x.else_branch, out);
                 },
                 [&](const ChorDef& x) {
                   collect_names(x.body, out);
                   collect_names(x.cont, out);
                 },
             },
             c->node);
}

void collect_names(const Behaviour& b, std::set<ProcessName>& out) {
  std::visit(overloaded{
                 [](const BehEnd&) {},
                 [](const BehCall&) {},
                 [&](const BehSend& x) {
                   out.insert(x.to);
                   collect_names(x.cont, out);
                 },
                 [&](const BehRecv& x) {
                   out.insert(x.from);
                   collect_names(x.cont, out);
                 },
                 [&](const BehSelect& x) {
                   out.insert(x.to);
                   collect_names(x.cont, out);
                 },
                 [&](const BehBranch& x) {
                   out.insert(x.from);
                   for (const auto& [l, br] : x.branches) collect_names(br, out);
                 },
                 [&](const BehCond& x) {
                   out.insert(x.other);
                   collect_names(x.then_branch, out);
                   collect_names(x.else_branch, out);
                 },
                 [&](const BehDef& x) {
                   collect_names(x.body, out);
                   collect_names(x.cont, out);
                 },
             },
             b->node);
}

void collect_calls(const Choreography& c, std::set<ProcedureName>& out) {
  std::visit(overloaded{
                 [](const ChorEnd&) {},
                 [](const ChorStuck&) {},
                 [&](const ChorCall& x) { out.insert(x.name); },
                 [&](const ChorSeq& x) { collect_calls(x.cont, out); },
                 [&](const ChorCond& x) {
                   collect_calls(x.then_branch, out);
                   collect_calls(x.else_branch, out);
                 },
                 [&](const ChorDef& x) {
                   collect_calls(x.body, out);
                   collect_calls(x.cont, out);
                 },
             },
             c->node);
}

}  // namespace

std::set<ProcessName> process_names(const Choreography& c) {
  std::set<ProcessName> out;
  collect_names(c, out);
  return out;
}

std::set<ProcessName> process_names(const Behaviour& b) {
  std::set<ProcessName> out;
  collect_names(b, out);
  return out;
}

std::set<ProcessName> process_names(const ChoreographyProgram& prog) {
  std::set<ProcessName> out;
  collect_names(prog.main, out);
  for (const auto& [name, body] : prog.defs) collect_names(body, out);
  return out;
}

std::set<ProcedureName> called_procedures(const Choreography& c) {
  std::set<ProcedureName> out;
  collect_calls(c, out);
  return out;
}

// ---------------------------------------------------------------------------

std::size_t size(const Behaviour& b) {
  return std::visit(overloaded{
                        [](const BehEnd&) -> std::size_t { return 1; },
                        [](const BehCall&) -> std::size_t { return 1; },
                        [](const BehSend& x) { return 1 + size(x.cont); },
                        [](const BehRecv& x) { return 1 + size(x.cont); },
                        [](const BehSelect& x) { return 1 + size(x.cont); },
                        [](const BehBranch& x) {
                          std::size_t n = 1;
                          for (const auto& [l, br] : x.branches) n += size(br);
                          return n;
                        },
                        [](const BehCond& x) { return 1 + size(x.then_branch) + size(x.else_branch); },
                        [](const BehDef& x) { return 1 + size(x.body) + size(x.cont); },
                    },
                    b->node);
}

std::size_t size(const Network& n) {
  std::size_t total = 0;
  for (const auto& [p, b] : n.processes) total += size(b);
  return total;
}

bool is_finite(const Behaviour& b) {
  return std::visit(overloaded{
                        [](const BehEnd&) { return true; },
                        [](const BehCall&) { return false; },
                        [](const BehDef&) { return false; },
                        [](const BehSend& x) { return is_finite(x.cont); },
                        [](const BehRecv& x) { return is_finite(x.cont); },
                        [](const BehSelect& x) { return is_finite(x.cont); },
                        [](const BehBranch& x) {
                          for (const auto& [l, br] : x.branches) {
                            if (!is_finite(br)) return false;
                          }
                          return true;
                        },
                        [](const BehCond& x) { return is_finite(x.then_branch) && is_finite(x.else_branch); },
                    },
                    b->node);
}

bool is_finite(const Network& n) {
  for (const auto& [p, b] : n.processes) {
    if (!is_finite(b)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void check_chor(const Choreography& c, std::set<ProcedureName>& scope) {
  std::visit(overloaded{
                 [](const ChorEnd&) {},
                 [](const ChorStuck&) {},
                 [&](const ChorCall& x) {
                   if (!scope.count(x.name)) throw UnboundProcedure(x.name);
                 },
                 [&](const ChorSeq& x) {
                   std::set<ProcessName> receivers;
                   for (const auto& a : x.actions) {
                     if (a.sender == a.receiver) throw MalformedTerm("process '" + a.sender + "' communicates with itself");
                     if (!receivers.insert(a.receiver).second) {
                       throw MalformedTerm("multicom has two actions received by '" + a.receiver + "'");
                     }
                   }
                   check_chor(x.cont, scope);
                 },
                 [&](const ChorCond& x) {
                   if (x.p == x.q) throw MalformedTerm("conditional compares '" + x.p + "' with itself");
                   check_chor(x.then_branch, scope);
                   check_chor(x.else_branch, scope);
                 },
                 [&](const ChorDef& x) {
                   bool fresh = scope.insert(x.name).second;
                   check_chor(x.body, scope);
                   check_chor(x.cont, scope);
                   if (fresh) scope.erase(x.name);
                 },
             },
             c->node);
}

void check_beh(const ProcessName& self, const Behaviour& b, std::set<ProcedureName>& scope) {
  auto not_self = [&](const ProcessName& other) {
    if (other == self) throw MalformedTerm("process '" + self + "' addresses itself");
  };
  std::visit(overloaded{
                 [](const BehEnd&) {},
                 [&](const BehCall& x) {
                   if (!scope.count(x.name)) throw UnboundProcedure(x.name);
                 },
                 [&](const BehSend& x) {
                   not_self(x.to);
                   check_beh(self, x.cont, scope);
                 },
                 [&](const BehRecv& x) {
                   not_self(x.from);
                   check_beh(self, x.cont, scope);
                 },
                 [&](const BehSelect& x) {
                   not_self(x.to);
                   check_beh(self, x.cont, scope);
                 },
                 [&](const BehBranch& x) {
                   not_self(x.from);
                   if (x.branches.empty()) throw MalformedTerm("branching on '" + x.from + "' offers no labels");
                   for (const auto& [l, br] : x.branches) check_beh(self, br, scope);
                 },
                 [&](const BehCond& x) {
                   not_self(x.other);
                   check_beh(self, x.then_branch, scope);
                   check_beh(self, x.else_branch, scope);
                 },
                 [&](const BehDef& x) {
                   bool fresh = scope.insert(x.name).second;
                   check_beh(self, x.body, scope);
                   check_beh(self, x.cont, scope);
                   if (fresh) scope.erase(x.name);
                 },
             },
             b->node);
}

}  // namespace

void validate(const ChoreographyProgram& prog) {
  std::set<ProcedureName> scope;
  for (const auto& [name, body] : prog.defs) scope.insert(name);
  for (const auto& [name, body] : prog.defs) check_chor(body, scope);
  check_chor(prog.main, scope);
}

void validate(const Network& n) {
  for (const auto& [p, b] : n.processes) {
    std::set<ProcedureName> scope;
    check_beh(p, b, scope);
  }
}

}  // namespace chorex
