#include "chorex/equivalence.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "chorex/printer.hpp"
#include "overloaded.hpp"

namespace chorex {

using detail::overloaded;

namespace {

std::string state_key(const State& sigma) {
  std::string out;
  for (const auto& [p, v] : sigma) {
    if (!v.is_unit()) out += p + "=" + v.name() + ",";
  }
  return out;
}

struct ChorConf {
  Choreography term;
  State sigma;
  std::vector<ReductionLabel> pending;  // async only, sorted

  std::string key() const {
    std::string k = render(term) + "|" + state_key(sigma) + "|";
    for (const auto& l : pending) k += render(l) + ";";
    return k;
  }
};

struct NetConf {
  System system;
  State sigma;
  Queues queues;

  std::string key() const { return render(system) + "|" + state_key(sigma) + "|" + render(queues); }
};

template <class Conf>
struct Move {
  ReductionLabel label;
  Conf next;
};

std::size_t in_flight(const Queues& q) {
  std::size_t n = 0;
  for (const auto& [k, v] : q) n += v.size();
  return n;
}

class Game {
 public:
  Game(const ChoreographyProgram& prog, const EquivOptions& options) : prog_(prog), opt_(options) {}

  const std::vector<Move<ChorConf>>& chor_moves(const ChorConf& c) {
    auto k = c.key();
    auto it = chor_cache_.find(k);
    if (it != chor_cache_.end()) return it->second;
    std::vector<Move<ChorConf>> out;
    if (opt_.mode == Mode::Sync) {
      for (auto& s : step_choreography(prog_, c.term, c.sigma)) {
        out.push_back({s.label, ChorConf{s.next, s.state, {}}});
      }
    } else {
      chor_weak(c, out);
    }
    budget();
    return chor_cache_.emplace(k, std::move(out)).first->second;
  }

  const std::vector<Move<NetConf>>& net_moves(const NetConf& n) {
    auto k = n.key();
    auto it = net_cache_.find(k);
    if (it != net_cache_.end()) return it->second;
    std::vector<Move<NetConf>> out;
    if (opt_.mode == Mode::Sync) {
      for (auto& s : step_network_sync(n.system, n.sigma)) {
        out.push_back({s.label, NetConf{s.next, s.state, {}}});
      }
    } else {
      net_weak(n, out);
    }
    budget();
    return net_cache_.emplace(k, std::move(out)).first->second;
  }

  bool play(const ChorConf& c, const NetConf& n, int depth) {
    if (depth <= 0) return true;
    std::string k = c.key() + "##" + n.key() + "#" + std::to_string(depth);
    auto it = memo_.find(k);
    if (it != memo_.end()) return it->second;
    budget();
    memo_[k] = true;  // provisional; the game is well-founded in depth
    const auto cm = chor_moves(c);
    const auto nm = net_moves(n);
    bool ok = true;
    for (const auto& a : cm) {
      if (!matched(a, nm, depth, true)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      for (const auto& b : nm) {
        if (!matched(b, cm, depth, false)) {
          ok = false;
          break;
        }
      }
    }
    memo_[k] = ok;
    return ok;
  }

  void explain(const ChorConf& c, const NetConf& n, int depth, Trace& out) {
    if (depth <= 0) return;
    const auto cm = chor_moves(c);
    const auto nm = net_moves(n);
    for (const auto& a : cm) {
      if (matched(a, nm, depth, true)) continue;
      for (const auto& b : nm) {
        if (b.label == a.label) {
          out.push_back("both: " + render(a.label));
          explain(a.next, b.next, depth - 1, out);
          return;
        }
      }
      out.push_back("choreography only: " + render(a.label));
      return;
    }
    for (const auto& b : nm) {
      if (matched(b, cm, depth, false)) continue;
      for (const auto& a : cm) {
        if (a.label == b.label) {
          out.push_back("both: " + render(b.label));
          explain(a.next, b.next, depth - 1, out);
          return;
        }
      }
      out.push_back("network only: " + render(b.label));
      return;
    }
  }

 private:
  template <class Mine, class Theirs>
  bool matched(const Move<Mine>& m, const std::vector<Move<Theirs>>& others, int depth, bool chor_side) {
    for (const auto& o : others) {
      if (!(o.label == m.label)) continue;
      bool ok;
      if constexpr (std::is_same_v<Mine, ChorConf>) {
        ok = play(m.next, o.next, depth - 1);
      } else {
        ok = play(o.next, m.next, depth - 1);
      }
      if (ok) return true;
    }
    (void)chor_side;
    return false;
  }

  void budget() {
    if (memo_.size() + chor_cache_.size() + net_cache_.size() > opt_.max_configs) {
      throw ResourceLimit("equivalence check exceeded " + std::to_string(opt_.max_configs) + " configurations");
    }
  }

  static bool blocked(const ReductionLabel& l, const std::vector<ReductionLabel>& pending) {
    auto names = process_names(l);
    for (const auto& p : pending) {
      if (names.count(p.q)) return true;
    }
    return false;
  }

  void chor_weak(const ChorConf& start, std::vector<Move<ChorConf>>& out) {
    std::unordered_set<std::string> seen{start.key()}, emitted;
    std::vector<ChorConf> todo{start};
    auto emit = [&](const ReductionLabel& l, ChorConf next) {
      if (emitted.insert(render(l) + "@" + next.key()).second) out.push_back({l, std::move(next)});
    };
    while (!todo.empty()) {
      ChorConf c = std::move(todo.back());
      todo.pop_back();
      for (std::size_t i = 0; i < c.pending.size(); ++i) {
        if (i > 0 && c.pending[i] == c.pending[i - 1]) continue;
        ChorConf next = c;
        next.pending.erase(next.pending.begin() + static_cast<long>(i));
        emit(c.pending[i], std::move(next));
      }
      for (auto& s : step_choreography(prog_, c.term, c.sigma)) {
        if (blocked(s.label, c.pending)) continue;
        if (s.label.is_cond()) {
          emit(s.label, ChorConf{s.next, s.state, c.pending});
          continue;
        }
        auto parts = s.label.components();
        if (c.pending.size() + parts.size() > opt_.queue_cap) continue;
        ChorConf next{s.next, s.state, c.pending};
        next.pending.insert(next.pending.end(), parts.begin(), parts.end());
        std::sort(next.pending.begin(), next.pending.end());
        if (seen.insert(next.key()).second) todo.push_back(std::move(next));
        if (seen.size() > opt_.max_configs) throw ResourceLimit("choreography silent closure too large");
      }
    }
  }

  void net_weak(const NetConf& start, std::vector<Move<NetConf>>& out) {
    std::unordered_set<std::string> seen{start.key()}, emitted;
    std::vector<NetConf> todo{start};
    while (!todo.empty()) {
      NetConf n = std::move(todo.back());
      todo.pop_back();
      for (auto& s : step_network_async(n.system, n.sigma, n.queues)) {
        NetConf next{std::move(s.next), std::move(s.state), std::move(s.queues)};
        if (s.label.dir == AsyncLabel::Dir::Dequeue) {
          if (emitted.insert(render(s.label.payload) + "@" + next.key()).second) {
            out.push_back({s.label.payload, std::move(next)});
          }
        } else if (in_flight(next.queues) <= opt_.queue_cap && seen.insert(next.key()).second) {
          todo.push_back(std::move(next));
          if (seen.size() > opt_.max_configs) throw ResourceLimit("network enqueue closure too large");
        }
      }
    }
  }

  const ChoreographyProgram& prog_;
  EquivOptions opt_;
  std::unordered_map<std::string, std::vector<Move<ChorConf>>> chor_cache_;
  std::unordered_map<std::string, std::vector<Move<NetConf>>> net_cache_;
  std::unordered_map<std::string, bool> memo_;
};

}  // namespace

EquivResult check_bisim(const ChoreographyProgram& c, const Network& n, const State& sigma,
                        const EquivOptions& options) {
  Game game(c, options);
  ChorConf cc{c.main, sigma, {}};
  NetConf nc{lift(n), sigma, {}};
  EquivResult result;
  result.equivalent = game.play(cc, nc, options.depth);
  if (!result.equivalent) game.explain(cc, nc, options.depth, result.counterexample);
  return result;
}

bool bounded_bisim(const ChoreographyProgram& c, const Network& n, const State& sigma, int depth, Mode mode) {
  EquivOptions options;
  options.mode = mode;
  options.depth = depth;
  return check_bisim(c, n, sigma, options).equivalent;
}

// ---------------------------------------------------------------------------
// Trace sets

namespace {

template <class Conf, class Moves>
std::set<Trace> collect_traces(const Conf& start, int depth, std::size_t max_traces, Moves moves) {
  std::map<std::pair<std::string, int>, std::set<Trace>> memo;
  std::function<const std::set<Trace>&(const Conf&, int)> go = [&](const Conf& c, int d) -> const std::set<Trace>& {
    auto key = std::make_pair(c.key(), d);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::set<Trace> out{Trace{}};
    if (d > 0) {
      for (const auto& [label, next] : moves(c)) {
        for (const auto& t : go(next, d - 1)) {
          Trace full{label};
          full.insert(full.end(), t.begin(), t.end());
          out.insert(std::move(full));
          if (out.size() > max_traces) throw ResourceLimit("trace set exceeds " + std::to_string(max_traces));
        }
      }
    }
    return memo.emplace(key, std::move(out)).first->second;
  };
  return go(start, depth);
}

}  // namespace

std::set<Trace> trace_set(const ChoreographyProgram& c, const State& sigma, int depth, std::size_t max_traces) {
  return collect_traces(ChorConf{c.main, sigma, {}}, depth, max_traces, [&](const ChorConf& conf) {
    std::vector<std::pair<std::string, ChorConf>> out;
    for (auto& s : step_choreography(c, conf.term, conf.sigma)) {
      out.push_back({render(s.label), ChorConf{s.next, s.state, {}}});
    }
    return out;
  });
}

std::set<Trace> trace_set(const Network& n, const State& sigma, int depth, std::size_t max_traces) {
  return collect_traces(NetConf{lift(n), sigma, {}}, depth, max_traces, [](const NetConf& conf) {
    std::vector<std::pair<std::string, NetConf>> out;
    for (auto& s : step_network_sync(conf.system, conf.sigma)) {
      out.push_back({render(s.label), NetConf{s.next, s.state, {}}});
    }
    return out;
  });
}

std::set<Trace> async_trace_set(const Network& n, const State& sigma, int depth, std::size_t max_traces) {
  return collect_traces(NetConf{lift(n), sigma, {}}, depth, max_traces, [](const NetConf& conf) {
    std::vector<std::pair<std::string, NetConf>> out;
    for (auto& s : step_network_async(conf.system, conf.sigma, conf.queues)) {
      out.push_back({render(s.label), NetConf{s.next, s.state, s.queues}});
    }
    return out;
  });
}

bool async_embeds(const Network& n, const State& sigma, const Trace& trace, std::size_t queue_cap) {
  EquivOptions options;
  options.mode = Mode::Async;
  options.queue_cap = queue_cap;
  ChoreographyProgram none;
  Game game(none, options);
  std::map<std::pair<std::string, std::size_t>, bool> memo;
  std::function<bool(const NetConf&, std::size_t)> go = [&](const NetConf& c, std::size_t i) {
    if (i == trace.size()) return true;
    auto key = std::make_pair(c.key(), i);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    bool ok = false;
    for (const auto& m : game.net_moves(c)) {
      if (render(m.label) == trace[i] && go(m.next, i + 1)) {
        ok = true;
        break;
      }
    }
    memo[key] = ok;
    return ok;
  };
  return go(NetConf{lift(n), sigma, {}}, 0);
}

// ---------------------------------------------------------------------------
// State sampling

namespace {

std::vector<State> states_for(const std::set<ProcessName>& processes, std::set<Value> literals) {
  literals.insert(Value::constant("fresh"));
  std::vector<State> out{State{}};
  for (const auto& p : processes) {
    for (const auto& v : literals) {
      if (v.is_unit()) continue;
      out.push_back(State{{p, v}});
    }
  }
  return out;
}

void chor_literals(const Choreography& c, std::set<Value>& out) {
  std::visit(overloaded{
                 [&](const ChorSeq& x) {
                   for (const auto& a : x.actions) {
                     if (a.kind == Interaction::Kind::Com && !a.expr.is_self()) out.insert(a.expr.value());
                   }
                   chor_literals(x.cont, out);
                 },
                 [&](const ChorCond& x) {
                   chor_literals(x.then_branch, out);
                   chor_literals(x.else_branch, out);
                 },
                 [&](const ChorDef& x) {
                   chor_literals(x.body, out);
                   chor_literals(x.cont, out);
                 },
                 [](const auto&) {},
             },
             c->node);
}

void beh_literals(const Behaviour& b, std::set<Value>& out) {
  std::visit(overloaded{
                 [&](const BehSend& x) {
                   if (!x.expr.is_self()) out.insert(x.expr.value());
                   beh_literals(x.cont, out);
                 },
                 [&](const BehRecv& x) { beh_literals(x.cont, out); },
                 [&](const BehSelect& x) { beh_literals(x.cont, out); },
                 [&](const BehBranch& x) {
                   for (const auto& [l, br] : x.branches) beh_literals(br, out);
                 },
                 [&](const BehCond& x) {
                   beh_literals(x.then_branch, out);
                   beh_literals(x.else_branch, out);
                 },
                 [&](const BehDef& x) {
                   beh_literals(x.body, out);
                   beh_literals(x.cont, out);
                 },
                 [](const auto&) {},
             },
             b->node);
}

}  // namespace

std::vector<State> sample_states(const ChoreographyProgram& c) {
  std::set<Value> literals;
  chor_literals(c.main, literals);
  for (const auto& [n, body] : c.defs) chor_literals(body, literals);
  return states_for(process_names(c), literals);
}

std::vector<State> sample_states(const Network& n) {
  std::set<Value> literals;
  std::set<ProcessName> processes;
  for (const auto& [p, b] : n.processes) {
    processes.insert(p);
    beh_literals(b, literals);
  }
  return states_for(processes, literals);
}

}  // namespace chorex
