#include "chorex/epp.hpp"

#include "chorex/congruence.hpp"
#include "chorex/printer.hpp"
#include "chorex/semantics.hpp"
#include "overloaded.hpp"

namespace chorex {

using detail::overloaded;

MergeError::MergeError(std::string path, const Behaviour& left, const Behaviour& right)
    : Error("cannot merge at " + (path.empty() ? std::string("root") : path) + ": '" + render(left) + "' vs '" +
            render(right) + "'"),
      path_(std::move(path)) {}

ProjectionError::ProjectionError(ProcessName process, const std::string& reason)
    : Error("cannot project onto '" + process + "': " + reason), process_(std::move(process)) {}

namespace {

Behaviour merge_at(const Behaviour& a, const Behaviour& b, const std::string& path) {
  if (a == b) return a;
  auto fail = [&]() -> Behaviour { throw MergeError(path, a, b); };
  if (a->node.index() != b->node.index()) return fail();
  auto sub = [&](const std::string& step) { return path.empty() ? step : path + "/" + step; };
  return std::visit(
      overloaded{
          [&](const BehEnd&) { return a; },
          [&](const BehSend& x) {
            const auto& y = std::get<BehSend>(b->node);
            if (x.to != y.to || x.expr != y.expr) return fail();
            return beh::send(x.to, x.expr, merge_at(x.cont, y.cont, sub(x.to + "!" + to_string(x.expr))));
          },
          [&](const BehRecv& x) {
            const auto& y = std::get<BehRecv>(b->node);
            if (x.from != y.from) return fail();
            return beh::recv(x.from, merge_at(x.cont, y.cont, sub(x.from + "?")));
          },
          [&](const BehSelect& x) {
            const auto& y = std::get<BehSelect>(b->node);
            if (x.to != y.to || x.label != y.label) return fail();
            return beh::select(x.to, x.label, merge_at(x.cont, y.cont, sub(x.to + "+" + x.label)));
          },
          [&](const BehBranch& x) {
            const auto& y = std::get<BehBranch>(b->node);
            if (x.from != y.from) return fail();
            auto branches = x.branches;
            for (const auto& [l, br] : y.branches) {
              auto it = branches.find(l);
              if (it == branches.end()) {
                branches[l] = br;
              } else {
                it->second = merge_at(it->second, br, sub(x.from + "&" + l));
              }
            }
            return beh::branch(x.from, std::move(branches));
          },
          [&](const BehCond& x) {
            const auto& y = std::get<BehCond>(b->node);
            if (x.other != y.other) return fail();
            return beh::cond(x.other, merge_at(x.then_branch, y.then_branch, sub("then")),
                             merge_at(x.else_branch, y.else_branch, sub("else")));
          },
          [&](const BehDef& x) {
            const auto& y = std::get<BehDef>(b->node);
            if (x.name != y.name) return fail();
            return beh::def(x.name, merge_at(x.body, y.body, sub("def " + x.name)),
                            merge_at(x.cont, y.cont, sub("in")));
          },
          [&](const BehCall& x) {
            if (x.name != std::get<BehCall>(b->node).name) return fail();
            return a;
          },
      },
      a->node);
}

void collect_defs(const Choreography& c, std::map<ProcedureName, Choreography>& out) {
  std::visit(overloaded{
                 [&](const ChorSeq& x) { collect_defs(x.cont, out); },
                 [&](const ChorCond& x) {
                   collect_defs(x.then_branch, out);
                   collect_defs(x.else_branch, out);
                 },
                 [&](const ChorDef& x) {
                   out[x.name] = x.body;
                   collect_defs(x.body, out);
                   collect_defs(x.cont, out);
                 },
                 [](const auto&) {},
             },
             c->node);
}

}  // namespace

Behaviour merge(const Behaviour& a, const Behaviour& b) { return merge_at(a, b, ""); }

ProcedureUsage procedure_usage(const ChoreographyProgram& prog) {
  std::map<ProcedureName, Choreography> bodies = prog.defs;
  collect_defs(prog.main, bodies);
  for (const auto& [n, body] : prog.defs) collect_defs(body, bodies);

  ProcedureUsage usage;
  for (const auto& [n, body] : bodies) usage[n] = process_names(body);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [n, body] : bodies) {
      auto& mine = usage[n];
      for (const auto& callee : called_procedures(body)) {
        auto it = usage.find(callee);
        if (it == usage.end()) continue;
        for (const auto& p : it->second) changed |= mine.insert(p).second;
      }
    }
  }
  return usage;
}

Behaviour project_behaviour(const ChoreographyProgram& prog, const Choreography& c, const ProcessName& r,
                            const ProcedureUsage& usage) {
  auto proj = [&](const Choreography& sub) { return project_behaviour(prog, sub, r, usage); };
  return std::visit(
      overloaded{
          [](const ChorEnd&) { return beh::end(); },
          [&](const ChorStuck&) -> Behaviour { throw ProjectionError(r, "the choreography contains 1"); },
          [&](const ChorSeq& x) {
            Behaviour b = proj(x.cont);
            const Interaction* received = nullptr;
            for (const auto& a : x.actions) {
              if (a.receiver != r) continue;
              if (received) throw ProjectionError(r, "receives twice in one multicom");
              received = &a;
            }
            if (received) {
              b = received->kind == Interaction::Kind::Com
                      ? beh::recv(received->sender, b)
                      : beh::branch(received->sender, {{received->label, b}});
            }
            for (auto it = x.actions.rbegin(); it != x.actions.rend(); ++it) {
              if (it->sender != r) continue;
              b = it->kind == Interaction::Kind::Com ? beh::send(it->receiver, it->expr, b)
                                                     : beh::select(it->receiver, it->label, b);
            }
            return b;
          },
          [&](const ChorCond& x) {
            Behaviour t = proj(x.then_branch);
            Behaviour e = proj(x.else_branch);
            if (r == x.p) return beh::cond(x.q, t, e);
            try {
              Behaviour m = merge(t, e);
              return r == x.q ? beh::send(x.p, Expression::self(), m) : m;
            } catch (const MergeError& err) {
              throw ProjectionError(r, err.what());
            }
          },
          [&](const ChorCall& x) {
            auto it = usage.find(x.name);
            if (it == usage.end()) throw UnboundProcedure(x.name);
            return it->second.count(r) ? beh::call(x.name) : beh::end();
          },
          [&](const ChorDef& x) {
            auto it = usage.find(x.name);
            if (it != usage.end() && it->second.count(r)) return beh::def(x.name, proj(x.body), proj(x.cont));
            return proj(x.cont);
          },
      },
      c->node);
}

Network epp(const ChoreographyProgram& full) {
  ChoreographyProgram prog = prune_unreachable(full);
  validate(prog);
  ProcedureUsage usage = procedure_usage(prog);
  System system;
  for (const auto& r : process_names(prog)) {
    auto table = std::make_shared<ProcedureTable>();
    for (const auto& [name, body] : prog.defs) {
      if (usage[name].count(r)) (*table)[name] = project_behaviour(prog, body, r, usage);
    }
    ProcessState ps;
    ps.term = project_behaviour(prog, prog.main, r, usage);
    ps.procedures = table;
    system.processes[r] = std::move(ps);
  }
  return lower(system);
}

}  // namespace chorex
