#include "chorex/multicom.hpp"

#include <deque>
#include <map>

#include "chorex/congruence.hpp"
#include "chorex/printer.hpp"
#include "overloaded.hpp"

namespace chorex {

using detail::overloaded;

namespace {

Interaction action_of(const ProcessName& self, const Behaviour& b) {
  if (const auto* s = std::get_if<BehSend>(&b->node)) return Interaction::com(self, s->expr, s->to);
  const auto& s = std::get<BehSelect>(b->node);
  return Interaction::sel(self, s.to, s.label);
}

struct Scan {
  std::vector<Interaction> prefix;
  Behaviour after;  // continuation past the matching receive
  bool unfolded = false;
};

Behaviour unfold(const ProcessState& ps, Behaviour b, bool& unfolded) {
  std::set<ProcedureName> seen;
  while (const auto* call = std::get_if<BehCall>(&b->node)) {
    if (!seen.insert(call->name).second) return nullptr;
    b = ps.procedures->at(call->name);
    unfolded = true;
  }
  return b;
}

}  // namespace

MulticomResult compute_multicom(const System& n, const ProcessName& p) {
  MulticomResult out;
  auto fail = [&](const ProcessName& who, const Behaviour& b, std::string reason) {
    out.failure = MulticomFailure{who, b ? render(b) : std::string("<unguarded recursion>"), std::move(reason)};
    return out;
  };

  auto seed_it = n.processes.find(p);
  if (seed_it == n.processes.end()) return fail(p, beh::end(), "no such process");
  bool seed_unfolded = false;
  Behaviour seed = unfold(seed_it->second, seed_it->second.term, seed_unfolded);
  if (!seed || !(std::holds_alternative<BehSend>(seed->node) || std::holds_alternative<BehSelect>(seed->node))) {
    return fail(p, seed, "head is not a send or selection");
  }

  std::deque<Interaction> waiting{action_of(p, seed)};
  std::map<ProcessName, Interaction> by_receiver;  // actions and waiting, keyed by receiver
  by_receiver.emplace(waiting.front().receiver, waiting.front());
  std::map<ProcessName, Scan> scans;

  while (!waiting.empty()) {
    Interaction eta = waiting.front();
    waiting.pop_front();
    out.actions.push_back(eta);

    const ProcessName& s = eta.receiver;
    auto it = n.processes.find(s);
    if (it == n.processes.end()) return fail(s, beh::end(), "no such process");
    Scan scan;
    Behaviour b = it->second.term;
    std::set<ProcessName> targets;
    for (;;) {
      b = unfold(it->second, b, scan.unfolded);
      if (!b) return fail(s, b, "unguarded recursion");
      if (std::holds_alternative<BehSend>(b->node) || std::holds_alternative<BehSelect>(b->node)) {
        Interaction a = action_of(s, b);
        if (!targets.insert(a.receiver).second) return fail(s, b, "sends twice to " + a.receiver);
        scan.prefix.push_back(a);
        b = std::holds_alternative<BehSend>(b->node) ? std::get<BehSend>(b->node).cont
                                                     : std::get<BehSelect>(b->node).cont;
        continue;
      }
      if (const auto* r = std::get_if<BehRecv>(&b->node)) {
        if (r->from != eta.sender || eta.kind != Interaction::Kind::Com) {
          return fail(s, b, "blocking receive does not match " + render(eta));
        }
        scan.after = r->cont;
      } else if (const auto* r = std::get_if<BehBranch>(&b->node)) {
        if (r->from != eta.sender || eta.kind != Interaction::Kind::Sel) {
          return fail(s, b, "blocking branching does not match " + render(eta));
        }
        auto br = r->branches.find(eta.label);
        if (br == r->branches.end()) return fail(s, b, "label " + eta.label + " not offered");
        scan.after = br->second;
      } else {
        return fail(s, b, "expected sends or selections followed by a receive from " + eta.sender);
      }
      break;
    }
    for (const auto& a : scan.prefix) {
      auto known = by_receiver.find(a.receiver);
      if (known != by_receiver.end()) {
        if (!(known->second == a)) return fail(s, it->second.term, "two actions received by " + a.receiver);
        continue;
      }
      by_receiver.emplace(a.receiver, a);
      waiting.push_back(a);
    }
    scans[s] = std::move(scan);
    out.trace.push_back({eta, out.actions, std::vector<Interaction>(waiting.begin(), waiting.end())});
  }

  // Every sender's whole prefix must be part of the multicom; a sender that
  // is not itself a receiver can only be the seed.
  out.next = n;
  for (const auto& [s, scan] : scans) {
    out.next.processes[s].term = scan.after;
    if (scan.unfolded) out.unfolded.insert(s);
  }
  if (!scans.count(p)) {
    out.next.processes[p].term = std::holds_alternative<BehSend>(seed->node) ? std::get<BehSend>(seed->node).cont
                                                                               : std::get<BehSelect>(seed->node).cont;
    if (seed_unfolded) out.unfolded.insert(p);
  }
  update_annotations(out.next, out.unfolded);
  return out;
}

MulticomResult compute_multicom(const Network& n, const ProcessName& p) { return compute_multicom(lift(n), p); }

Choreography normalize_multicom(const Choreography& c) {
  return std::visit(overloaded{
                        [&](const ChorSeq& x) {
                          Choreography out = normalize_multicom(x.cont);
                          auto groups = split_multicom(x.actions);
                          for (auto g = groups.rbegin(); g != groups.rend(); ++g) out = chor::seq(*g, out);
                          return out;
                        },
                        [&](const ChorCond& x) {
                          return chor::cond(x.p, x.q, normalize_multicom(x.then_branch),
                                            normalize_multicom(x.else_branch));
                        },
                        [&](const ChorDef& x) {
                          return chor::def(x.name, normalize_multicom(x.body), normalize_multicom(x.cont));
                        },
                        [&](const auto&) { return c; },
                    },
                    c->node);
}

ChoreographyProgram normalize_multicom(const ChoreographyProgram& prog) {
  ChoreographyProgram out;
  out.main = normalize_multicom(prog.main);
  for (const auto& [n, body] : prog.defs) out.defs[n] = normalize_multicom(body);
  return out;
}

}  // namespace chorex
