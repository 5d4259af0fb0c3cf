#include "chorex/semantics.hpp"

#include <algorithm>
#include <sstream>

#include "chorex/printer.hpp"
#include "overloaded.hpp"

namespace chorex {

using detail::overloaded;

Value value_of(const State& sigma, const ProcessName& p) {
  auto it = sigma.find(p);
  return it == sigma.end() ? Value::unit() : it->second;
}

Value eval_expr(const Expression& e, const Value& self_value) {
  return e.is_self() ? self_value : e.value();
}

std::string render(const State& sigma) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [p, v] : sigma) {
    os << (first ? "" : ",") << p << "=" << to_string(v);
    first = false;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Labels

namespace {

std::string payload_text(const Value& v) { return to_string(v); }
std::string payload_text(const Expression& e) { return to_string(e); }

template <class Payload>
std::string render_label(const BasicLabel<Payload>& l) {
  switch (l.kind) {
    case LabelKind::Com:
      return l.p + "." + payload_text(l.payload) + " -> " + l.q;
    case LabelKind::Sel:
      return l.p + " -> " + l.q + "[" + l.label + "]";
    case LabelKind::CondThen:
      return l.p + "=" + l.q + ":then";
    case LabelKind::CondElse:
      return l.p + "=" + l.q + ":else";
    case LabelKind::Multi: {
      std::string out = "(";
      for (std::size_t i = 0; i < l.parts.size(); ++i) {
        if (i) out += " | ";
        out += render_label(l.parts[i]);
      }
      return out + ")";
    }
  }
  return {};
}

template <class Payload>
std::set<ProcessName> label_names(const BasicLabel<Payload>& l) {
  std::set<ProcessName> out;
  for (const auto& c : l.components()) {
    out.insert(c.p);
    out.insert(c.q);
  }
  return out;
}

}  // namespace

std::string render(const ReductionLabel& l) { return render_label(l); }
std::string render(const AbstractLabel& l) { return render_label(l); }

std::set<ProcessName> process_names(const ReductionLabel& l) { return label_names(l); }
std::set<ProcessName> process_names(const AbstractLabel& l) { return label_names(l); }

std::vector<Interaction> interactions(const AbstractLabel& l) {
  std::vector<Interaction> out;
  for (const auto& c : l.components()) {
    if (c.kind == LabelKind::Com) {
      out.push_back(Interaction::com(c.p, c.payload, c.q));
    } else if (c.kind == LabelKind::Sel) {
      out.push_back(Interaction::sel(c.p, c.q, c.label));
    } else {
      throw Error("conditional label has no interaction form");
    }
  }
  return out;
}

AbstractLabel abstract_label(const std::vector<Interaction>& actions) {
  std::vector<AbstractLabel> parts;
  for (const auto& a : actions) {
    parts.push_back(a.kind == Interaction::Kind::Com ? AbstractLabel::com(a.sender, a.expr, a.receiver)
                                                     : AbstractLabel::sel(a.sender, a.receiver, a.label));
  }
  return AbstractLabel::multi(std::move(parts));
}

ReductionLabel instantiate(const AbstractLabel& l, const State& sigma) {
  switch (l.kind) {
    case LabelKind::Com:
      return ReductionLabel::com(l.p, eval_expr(l.payload, value_of(sigma, l.p)), l.q);
    case LabelKind::Sel:
      return ReductionLabel::sel(l.p, l.q, l.label);
    case LabelKind::CondThen:
    case LabelKind::CondElse:
      return ReductionLabel::cond(l.kind == LabelKind::CondThen, l.p, l.q);
    case LabelKind::Multi: {
      std::vector<ReductionLabel> parts;
      for (const auto& c : l.parts) parts.push_back(instantiate(c, sigma));
      return ReductionLabel::multi(std::move(parts));
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Choreography semantics

namespace {

using ChorEnv = std::map<ProcedureName, Choreography>;

struct ChorResult {
  ReductionLabel label;
  Choreography next;
  State state;
};

ReductionLabel fire(const std::vector<Interaction>& actions, const State& sigma, State& out) {
  std::vector<ReductionLabel> parts;
  out = sigma;
  for (const auto& a : actions) {
    if (a.kind == Interaction::Kind::Com) {
      Value v = eval_expr(a.expr, value_of(sigma, a.sender));
      out[a.receiver] = v;
      parts.push_back(ReductionLabel::com(a.sender, v, a.receiver));
    } else {
      parts.push_back(ReductionLabel::sel(a.sender, a.receiver, a.label));
    }
  }
  return ReductionLabel::multi(std::move(parts));
}

bool disjoint(const std::set<ProcessName>& a, const std::set<ProcessName>& b) {
  for (const auto& x : a) {
    if (b.count(x)) return false;
  }
  return true;
}

using Guard = std::set<std::pair<ProcedureName, std::set<ProcessName>>>;

std::vector<ChorResult> chor_steps(const Choreography& c, const std::set<ProcessName>& blocked, const ChorEnv& env,
                                   const State& sigma, Guard& guard) {
  std::vector<ChorResult> out;
  std::visit(
      overloaded{
          [](const ChorEnd&) {},
          [](const ChorStuck&) {},
          [&](const ChorSeq& x) {
            std::set<ProcessName> names;
            for (const auto& a : x.actions) {
              names.insert(a.sender);
              names.insert(a.receiver);
            }
            if (disjoint(names, blocked)) {
              State s;
              ReductionLabel l = fire(x.actions, sigma, s);
              out.push_back({l, x.cont, std::move(s)});
            }
            std::set<ProcessName> inner = blocked;
            inner.insert(names.begin(), names.end());
            for (auto& r : chor_steps(x.cont, inner, env, sigma, guard)) {
              out.push_back({r.label, chor::seq(x.actions, r.next), std::move(r.state)});
            }
          },
          [&](const ChorCond& x) {
            if (!blocked.count(x.p) && !blocked.count(x.q)) {
              bool then = value_of(sigma, x.p) == value_of(sigma, x.q);
              out.push_back({ReductionLabel::cond(then, x.p, x.q), then ? x.then_branch : x.else_branch, sigma});
            }
            std::set<ProcessName> inner = blocked;
            inner.insert(x.p);
            inner.insert(x.q);
            auto left = chor_steps(x.then_branch, inner, env, sigma, guard);
            auto right = chor_steps(x.else_branch, inner, env, sigma, guard);
            for (const auto& a : left) {
              for (const auto& b : right) {
                if (a.label == b.label) out.push_back({a.label, chor::cond(x.p, x.q, a.next, b.next), a.state});
              }
            }
          },
          [&](const ChorCall& x) {
            auto it = env.find(x.name);
            if (it == env.end()) throw UnboundProcedure(x.name);
            auto key = std::make_pair(x.name, blocked);
            if (!guard.insert(key).second) return;
            out = chor_steps(it->second, blocked, env, sigma, guard);
            guard.erase(key);
          },
          [&](const ChorDef& x) {
            ChorEnv inner = env;
            inner[x.name] = x.body;
            for (auto& r : chor_steps(x.cont, blocked, inner, sigma, guard)) {
              out.push_back({r.label, chor::def(x.name, x.body, r.next), std::move(r.state)});
            }
          },
      },
      c->node);
  return out;
}

}  // namespace

std::vector<ChoreographyStep> step_choreography(const ChoreographyProgram& prog, const Choreography& c,
                                                const State& sigma) {
  Guard guard;
  std::vector<ChoreographyStep> out;
  for (auto& r : chor_steps(c, {}, prog.defs, sigma, guard)) {
    out.push_back({std::move(r.label), std::move(r.next), std::move(r.state)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lifting

namespace {

class Lifter {
 public:
  explicit Lifter(ProcedureTable& table) : table_(table) {}

  Behaviour lift(const Behaviour& b, const std::map<ProcedureName, ProcedureName>& scope) {
    return std::visit(
        overloaded{
            [&](const BehEnd&) { return b; },
            [&](const BehCall& x) -> Behaviour {
              auto it = scope.find(x.name);
              if (it == scope.end()) throw UnboundProcedure(x.name);
              return beh::call(it->second);
            },
            [&](const BehSend& x) { return beh::send(x.to, x.expr, lift(x.cont, scope)); },
            [&](const BehRecv& x) { return beh::recv(x.from, lift(x.cont, scope)); },
            [&](const BehSelect& x) { return beh::select(x.to, x.label, lift(x.cont, scope)); },
            [&](const BehBranch& x) {
              std::map<Label, Behaviour> branches;
              for (const auto& [l, br] : x.branches) branches[l] = lift(br, scope);
              return beh::branch(x.from, std::move(branches));
            },
            [&](const BehCond& x) {
              return beh::cond(x.other, lift(x.then_branch, scope), lift(x.else_branch, scope));
            },
            [&](const BehDef& x) {
              ProcedureName fresh = x.name;
              for (int i = 1; table_.count(fresh); ++i) fresh = x.name + "_" + std::to_string(i);
              table_[fresh] = nullptr;
              auto inner = scope;
              inner[x.name] = fresh;
              table_[fresh] = lift(x.body, inner);
              return lift(x.cont, inner);
            },
        },
        b->node);
  }

 private:
  ProcedureTable& table_;
};

void direct_calls(const Behaviour& b, std::set<ProcedureName>& out) {
  std::visit(overloaded{
                 [](const BehEnd&) {},
                 [&](const BehCall& x) { out.insert(x.name); },
                 [&](const BehSend& x) { direct_calls(x.cont, out); },
                 [&](const BehRecv& x) { direct_calls(x.cont, out); },
                 [&](const BehSelect& x) { direct_calls(x.cont, out); },
                 [&](const BehBranch& x) {
                   for (const auto& [l, br] : x.branches) direct_calls(br, out);
                 },
                 [&](const BehCond& x) {
                   direct_calls(x.then_branch, out);
                   direct_calls(x.else_branch, out);
                 },
                 [&](const BehDef& x) {
                   direct_calls(x.body, out);
                   direct_calls(x.cont, out);
                 },
             },
             b->node);
}

// Wraps b in definitions for every procedure it needs from `pending`, nesting
// so each body sees the procedures it calls.
Behaviour nest(const ProcedureTable& table, std::set<ProcedureName> pending, const Behaviour& b) {
  std::set<ProcedureName> calls;
  direct_calls(b, calls);
  for (const auto& name : calls) {
    if (!pending.count(name)) continue;
    pending.erase(name);
    const Behaviour& body = table.at(name);
    return beh::def(name, nest(table, pending, body), nest(table, pending, b));
  }
  return b;
}

}  // namespace

System lift(const Network& n) {
  System s;
  for (const auto& [p, b] : n.processes) {
    auto table = std::make_shared<ProcedureTable>();
    Lifter lifter(*table);
    ProcessState ps;
    ps.term = lifter.lift(b, {});
    ps.procedures = table;
    s.processes[p] = std::move(ps);
  }
  return s;
}

Network lower(const System& s) {
  Network n;
  for (const auto& [p, ps] : s.processes) {
    std::set<ProcedureName> pending;
    if (ps.procedures) {
      for (const auto& [name, body] : *ps.procedures) pending.insert(name);
    }
    n.processes[p] = ps.procedures ? nest(*ps.procedures, pending, ps.term) : ps.term;
  }
  return n;
}

bool contains_call(const Behaviour& b) {
  std::set<ProcedureName> calls;
  direct_calls(b, calls);
  return !calls.empty();
}

std::string render(const System& s, bool annotations) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [p, ps] : s.processes) {
    if (!first) os << " | ";
    os << p << " { " << render(ps.term) << " }";
    if (annotations && contains_call(ps.term)) os << (ps.black ? "•" : "∘");
    first = false;
  }
  return os.str();
}

std::string key(const System& s) { return render(s, true); }

bool is_terminated(const System& s) {
  for (const auto& [p, ps] : s.processes) {
    if (!std::holds_alternative<BehEnd>(ps.term->node)) return false;
  }
  return true;
}

bool all_white(const System& s) {
  for (const auto& [p, ps] : s.processes) {
    if (ps.black && contains_call(ps.term)) return false;
  }
  return true;
}

Head resolve_head(const ProcessState& ps) {
  Head h{ps.term, false};
  std::set<ProcedureName> seen;
  while (const auto* call = std::get_if<BehCall>(&h.term->node)) {
    if (!seen.insert(call->name).second) return {nullptr, true};
    auto it = ps.procedures ? ps.procedures->find(call->name) : ProcedureTable::const_iterator{};
    if (!ps.procedures || it == ps.procedures->end()) throw UnboundProcedure(call->name);
    h.term = it->second;
    h.unfolded = true;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Rendezvous enumeration shared by the synchronous steppers

namespace {

struct Rendezvous {
  AbstractLabel label;             // Com/Sel, or CondThen with both branches below
  ProcessName p, q;                // p is sender / evaluator
  Behaviour p_next, p_else, q_next;
  bool p_unfolded = false, q_unfolded = false;
};

std::vector<Rendezvous> rendezvous(const System& s) {
  std::map<ProcessName, Head> heads;
  for (const auto& [p, ps] : s.processes) heads[p] = resolve_head(ps);
  std::vector<Rendezvous> out;
  for (const auto& [p, hp] : heads) {
    if (!hp.term) continue;
    auto partner = [&](const ProcessName& q) -> const Head* {
      auto it = heads.find(q);
      return it == heads.end() || !it->second.term ? nullptr : &it->second;
    };
    std::visit(overloaded{
                   [&](const BehSend& x) {
                     const Head* hq = partner(x.to);
                     if (!hq) return;
                     const auto* r = std::get_if<BehRecv>(&hq->term->node);
                     if (!r || r->from != p) return;
                     out.push_back({AbstractLabel::com(p, x.expr, x.to), p, x.to, x.cont, nullptr, r->cont,
                                    hp.unfolded, hq->unfolded});
                   },
                   [&](const BehSelect& x) {
                     const Head* hq = partner(x.to);
                     if (!hq) return;
                     const auto* r = std::get_if<BehBranch>(&hq->term->node);
                     if (!r || r->from != p) return;
                     auto br = r->branches.find(x.label);
                     if (br == r->branches.end()) return;
                     out.push_back({AbstractLabel::sel(p, x.to, x.label), p, x.to, x.cont, nullptr, br->second,
                                    hp.unfolded, hq->unfolded});
                   },
                   [&](const BehCond& x) {
                     const Head* hq = partner(x.other);
                     if (!hq) return;
                     const auto* r = std::get_if<BehSend>(&hq->term->node);
                     if (!r || r->to != p) return;
                     Rendezvous rv{AbstractLabel::cond(true, p, x.other), p, x.other, x.then_branch,
                                   x.else_branch, r->cont, hp.unfolded, hq->unfolded};
                     rv.label.payload = r->expr;
                     out.push_back(std::move(rv));
                   },
                   [](const auto&) {},
               },
               hp.term->node);
  }
  return out;
}

System advance(const System& s, const ProcessName& p, const Behaviour& bp, const ProcessName& q,
               const Behaviour& bq) {
  System next = s;
  next.processes[p].term = bp;
  next.processes[q].term = bq;
  return next;
}

}  // namespace

void update_annotations(System& next, const std::set<ProcessName>& unfolded) {
  if (unfolded.empty()) return;
  for (const auto& p : unfolded) next.processes[p].black = true;
  bool all_black = true;
  for (auto& [p, ps] : next.processes) {
    if (!contains_call(ps.term)) {
      ps.black = false;
    } else if (!ps.black) {
      all_black = false;
    }
  }
  if (all_black) {
    for (auto& [p, ps] : next.processes) ps.black = false;
  }
}

std::vector<AbstractStep> step_network_abstract(const System& n) {
  std::vector<AbstractStep> out;
  for (const auto& rv : rendezvous(n)) {
    std::set<ProcessName> unfolded;
    if (rv.p_unfolded) unfolded.insert(rv.p);
    if (rv.q_unfolded) unfolded.insert(rv.q);
    if (rv.label.is_cond()) {
      AbstractLabel then_label = AbstractLabel::cond(true, rv.p, rv.q);
      AbstractLabel else_label = AbstractLabel::cond(false, rv.p, rv.q);
      System a = advance(n, rv.p, rv.p_next, rv.q, rv.q_next);
      System b = advance(n, rv.p, rv.p_else, rv.q, rv.q_next);
      update_annotations(a, unfolded);
      update_annotations(b, unfolded);
      out.push_back({then_label, std::move(a), unfolded});
      out.push_back({else_label, std::move(b), unfolded});
    } else {
      System a = advance(n, rv.p, rv.p_next, rv.q, rv.q_next);
      update_annotations(a, unfolded);
      out.push_back({rv.label, std::move(a), unfolded});
    }
  }
  return out;
}

std::vector<NetworkStep> step_network_sync(const System& n, const State& sigma) {
  std::vector<NetworkStep> out;
  for (const auto& rv : rendezvous(n)) {
    if (rv.label.is_cond()) {
      Value v = eval_expr(rv.label.payload, value_of(sigma, rv.q));
      bool then = v == value_of(sigma, rv.p);
      out.push_back({ReductionLabel::cond(then, rv.p, rv.q),
                     advance(n, rv.p, then ? rv.p_next : rv.p_else, rv.q, rv.q_next), sigma});
    } else {
      State next_sigma = sigma;
      ReductionLabel l = instantiate(rv.label, sigma);
      if (l.kind == LabelKind::Com) next_sigma[rv.q] = l.payload;
      out.push_back({std::move(l), advance(n, rv.p, rv.p_next, rv.q, rv.q_next), std::move(next_sigma)});
    }
  }
  return out;
}

std::vector<NetworkStep> step_network_sync(const Network& n, const State& sigma) {
  return step_network_sync(lift(n), sigma);
}

// ---------------------------------------------------------------------------
// Asynchronous semantics

std::string render(const Queues& queues) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [pair, q] : queues) {
    if (q.empty()) continue;
    os << (first ? "" : " ") << pair.first << "->" << pair.second << ":[";
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (i) os << ",";
      os << (q[i].is_selection ? q[i].label : to_string(q[i].value));
      if (q[i].is_selection) os << "!";
    }
    os << "]";
    first = false;
  }
  return os.str();
}

std::string render(const AsyncLabel& l) {
  return (l.dir == AsyncLabel::Dir::Enqueue ? "enq " : "deq ") + render(l.payload);
}

std::vector<AsyncStep> step_network_async(const System& n, const State& sigma, const Queues& queues) {
  std::vector<AsyncStep> out;
  auto head_of = [&](const ProcessName& from, const ProcessName& to) -> const Message* {
    auto it = queues.find({from, to});
    return it == queues.end() || it->second.empty() ? nullptr : &it->second.front();
  };
  auto with = [&](const ProcessName& p, const Behaviour& b) {
    System next = n;
    next.processes[p].term = b;
    return next;
  };
  for (const auto& [p, ps] : n.processes) {
    Head h = resolve_head(ps);
    if (!h.term) continue;
    std::visit(
        overloaded{
            [&](const BehSend& x) {
              Value v = eval_expr(x.expr, value_of(sigma, p));
              Queues qs = queues;
              qs[{p, x.to}].push_back(Message{false, v, {}});
              out.push_back({{AsyncLabel::Dir::Enqueue, ReductionLabel::com(p, v, x.to)}, with(p, x.cont), sigma,
                             std::move(qs)});
            },
            [&](const BehSelect& x) {
              Queues qs = queues;
              qs[{p, x.to}].push_back(Message{true, {}, x.label});
              out.push_back({{AsyncLabel::Dir::Enqueue, ReductionLabel::sel(p, x.to, x.label)}, with(p, x.cont),
                             sigma, std::move(qs)});
            },
            [&](const BehRecv& x) {
              const Message* m = head_of(x.from, p);
              if (!m || m->is_selection) return;
              State s = sigma;
              s[p] = m->value;
              Queues qs = queues;
              auto& q = qs[{x.from, p}];
              q.pop_front();
              if (q.empty()) qs.erase({x.from, p});
              out.push_back({{AsyncLabel::Dir::Dequeue, ReductionLabel::com(x.from, m->value, p)}, with(p, x.cont),
                             std::move(s), std::move(qs)});
            },
            [&](const BehBranch& x) {
              const Message* m = head_of(x.from, p);
              if (!m || !m->is_selection) return;
              auto br = x.branches.find(m->label);
              if (br == x.branches.end()) return;
              Queues qs = queues;
              auto& q = qs[{x.from, p}];
              q.pop_front();
              if (q.empty()) qs.erase({x.from, p});
              out.push_back({{AsyncLabel::Dir::Dequeue, ReductionLabel::sel(x.from, p, br->first)},
                             with(p, br->second), sigma, std::move(qs)});
            },
            [&](const BehCond& x) {
              const Message* m = head_of(x.other, p);
              if (!m || m->is_selection) return;
              bool then = m->value == value_of(sigma, p);
              Queues qs = queues;
              auto& q = qs[{x.other, p}];
              q.pop_front();
              if (q.empty()) qs.erase({x.other, p});
              out.push_back({{AsyncLabel::Dir::Dequeue, ReductionLabel::cond(then, p, x.other)},
                             with(p, then ? x.then_branch : x.else_branch), sigma, std::move(qs)});
            },
            [](const auto&) {},
        },
        h.term->node);
  }
  return out;
}

std::vector<AsyncStep> step_network_async(const Network& n, const State& sigma, const Queues& queues) {
  return step_network_async(lift(n), sigma, queues);
}

}  // namespace chorex
