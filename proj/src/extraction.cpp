#include "chorex/extraction.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "chorex/congruence.hpp"
#include "chorex/multicom.hpp"
#include "chorex/printer.hpp"
#include "overloaded.hpp"

namespace chorex {

using detail::overloaded;

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

int kind_rank(const AbstractLabel& l) {
  switch (l.kind) {
    case LabelKind::Com:
      return 0;
    case LabelKind::Sel:
      return 1;
    case LabelKind::Multi:
      return 2;
    default:
      return 3;
  }
}

std::tuple<ProcessName, int, std::string> order_key(const AbstractLabel& l) {
  auto names = process_names(l);
  return {*names.begin(), kind_rank(l), render(l)};
}

}  // namespace

NotExtractable::NotExtractable(std::vector<std::string> exhausted)
    : Error("no valid SEG exists" +
            (exhausted.empty() ? std::string() : "; exhausted at:\n  " + join(exhausted, "\n  "))),
      exhausted_(std::move(exhausted)) {}

// ---------------------------------------------------------------------------
// AES

Aes::Aes(const Network& n, Mode mode, std::size_t max_nodes) : mode_(mode), max_nodes_(max_nodes) {
  validate(n);
  intern(lift(n));
}

std::size_t Aes::intern(System s) {
  std::string k = chorex::key(s);
  auto it = index_.find(k);
  if (it != index_.end()) return it->second;
  if (nodes_.size() >= max_nodes_) {
    throw ResourceLimit("AES exceeds " + std::to_string(max_nodes_) + " nodes");
  }
  Node node;
  node.white = chorex::all_white(s);
  node.system = std::move(s);
  node.key = k;
  nodes_.push_back(std::move(node));
  index_.emplace(std::move(k), nodes_.size() - 1);
  return nodes_.size() - 1;
}

const std::vector<AesEdge>& Aes::edges(std::size_t node) {
  if (nodes_[node].expanded) return nodes_[node].edges;
  std::vector<AesEdge> out;
  const System current = nodes_[node].system;
  if (mode_ == Mode::Sync) {
    for (auto& step : step_network_abstract(current)) {
      out.push_back({std::move(step.label), intern(std::move(step.next))});
    }
  } else {
    std::set<std::string> seen;
    for (const auto& [p, ps] : current.processes) {
      Head h = resolve_head(ps);
      if (!h.term) continue;
      if (!std::holds_alternative<BehSend>(h.term->node) && !std::holds_alternative<BehSelect>(h.term->node)) continue;
      MulticomResult m = compute_multicom(current, p);
      if (!m.ok()) continue;
      AbstractLabel label = m.label();
      if (!seen.insert(render(label)).second) continue;
      out.push_back({std::move(label), intern(std::move(m.next))});
    }
    for (auto& step : step_network_abstract(current)) {
      if (step.label.is_cond()) out.push_back({std::move(step.label), intern(std::move(step.next))});
    }
  }
  nodes_[node].edges = std::move(out);
  nodes_[node].expanded = true;
  ++expanded_count_;
  return nodes_[node].edges;
}

void Aes::expand_all() {
  for (std::size_t i = 0; i < nodes_.size(); ++i) edges(i);
}

std::size_t Aes::edge_count() const {
  std::size_t n = 0;
  for (const auto& node : nodes_) n += node.edges.size();
  return n;
}

std::vector<Alternative> alternatives(Aes& aes, std::size_t node, std::optional<std::uint64_t> seed) {
  const auto& edges = aes.edges(node);
  std::vector<std::pair<std::tuple<ProcessName, int, std::string>, Alternative>> keyed;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& l = edges[i].label;
    if (l.kind == LabelKind::CondElse) continue;
    Alternative alt{{i}};
    if (l.kind == LabelKind::CondThen) {
      for (std::size_t j = 0; j < edges.size(); ++j) {
        const auto& m = edges[j].label;
        if (m.kind == LabelKind::CondElse && m.p == l.p && m.q == l.q) alt.edges.push_back(j);
      }
      if (alt.edges.size() != 2) continue;
    }
    keyed.emplace_back(order_key(l), std::move(alt));
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Alternative> out;
  for (auto& [k, alt] : keyed) out.push_back(std::move(alt));
  if (seed) {
    std::mt19937_64 rng(fnv1a(aes.key(node), *seed ^ 0x9e3779b97f4a7c15ULL));
    std::shuffle(out.begin(), out.end(), rng);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Valid SEG search

namespace {

constexpr std::size_t kMaxSearchSteps = 20'000'000;

class Search {
 public:
  Search(Aes& aes, std::optional<std::uint64_t> seed, SearchStats& stats) : aes_(aes), seed_(seed), stats_(stats) {}

  SegGraph run() {
    seg_.nodes.push_back({aes_.root(), {}, {}, false});
    if (!explore(0)) {
      std::sort(exhausted_.begin(), exhausted_.end());
      exhausted_.erase(std::unique(exhausted_.begin(), exhausted_.end()), exhausted_.end());
      throw NotExtractable(exhausted_);
    }
    return std::move(seg_);
  }

 private:
  struct StackItem {
    std::size_t seg;
    std::size_t aes;
    bool white;
    std::size_t whites_below;
  };
  struct TrailEntry {
    bool is_done;  // otherwise a loop_target flag
    std::size_t id;
  };

  bool white_between(std::size_t pos) const {
    const StackItem& top = stack_.back();
    return top.whites_below + (top.white ? 1 : 0) > stack_[pos].whites_below;
  }

  bool finite_deadlocked(std::size_t node) {
    auto cached = deadlock_.find(node);
    if (cached != deadlock_.end()) return cached->second;
    bool ok = true;
    const auto& edges = aes_.edges(node);
    const System& s = aes_.system(node);
    for (const auto& e : edges) {
      for (const auto& p : process_names(e.label)) {
        if (!contains_call(s.processes.at(p).term)) ok = false;
      }
    }
    deadlock_[node] = ok;
    return ok;
  }

  void flag_loop(std::size_t seg) {
    if (seg_.nodes[seg].loop_target) return;
    seg_.nodes[seg].loop_target = true;
    trail_.push_back({false, seg});
  }

  void undo(std::size_t nodes, std::size_t trail) {
    while (trail_.size() > trail) {
      TrailEntry e = trail_.back();
      trail_.pop_back();
      if (e.is_done) {
        done_.erase(e.id);
      } else if (e.id < seg_.nodes.size()) {
        seg_.nodes[e.id].loop_target = false;
      }
    }
    seg_.nodes.resize(nodes);
  }

  // Edge from the top of the stack into a finished subtree rooted at `seg`.
  bool sharing_ok(std::size_t seg) {
    std::vector<std::size_t> todo{seg};
    std::set<std::size_t> seen{seg};
    std::vector<std::size_t> entered;
    while (!todo.empty()) {
      std::size_t v = todo.back();
      todo.pop_back();
      std::size_t a = seg_.nodes[v].aes_node;
      if (aes_.all_white(a)) continue;
      auto on = on_stack_.find(a);
      if (on != on_stack_.end() && stack_[on->second].seg == v) {
        if (!white_between(on->second) || !finite_deadlocked(a)) return false;
        entered.push_back(v);
        continue;
      }
      for (std::size_t c : seg_.nodes[v].children) {
        if (seen.insert(c).second) todo.push_back(c);
      }
    }
    for (std::size_t v : entered) flag_loop(v);
    return true;
  }

  std::optional<std::size_t> link(std::size_t target) {
    auto on = on_stack_.find(target);
    if (on != on_stack_.end()) {
      if (!white_between(on->second) || !finite_deadlocked(target)) return std::nullopt;
      flag_loop(stack_[on->second].seg);
      return stack_[on->second].seg;
    }
    auto fin = done_.find(target);
    if (fin != done_.end()) {
      if (sharing_ok(fin->second)) return fin->second;
      ++stats_.fresh_copies;
    }
    std::size_t id = seg_.nodes.size();
    seg_.nodes.push_back({target, {}, {}, false});
    if (!explore(id)) return std::nullopt;
    return id;
  }

  void finish(std::size_t seg, std::size_t aes) {
    stack_.pop_back();
    on_stack_.erase(aes);
    if (done_.emplace(aes, seg).second) trail_.push_back({true, aes});
  }

  bool explore(std::size_t seg) {
    const std::size_t a = seg_.nodes[seg].aes_node;
    std::size_t below = 0;
    if (!stack_.empty()) below = stack_.back().whites_below + (stack_.back().white ? 1 : 0);
    stack_.push_back({seg, a, aes_.all_white(a), below});
    on_stack_[a] = stack_.size() - 1;

    auto alts = alternatives(aes_, a, seed_);
    if (alts.empty()) {
      finish(seg, a);
      return true;
    }
    for (const auto& alt : alts) {
      if (++stats_.steps > kMaxSearchSteps) throw ResourceLimit("SEG search exceeded its step budget");
      const std::size_t nodes_mark = seg_.nodes.size();
      const std::size_t trail_mark = trail_.size();
      seg_.nodes[seg].choice = alt;
      seg_.nodes[seg].children.clear();
      bool ok = true;
      for (std::size_t e : alt.edges) {
        auto child = link(aes_.edges(a)[e].target);
        if (!child) {
          ok = false;
          break;
        }
        seg_.nodes[seg].children.push_back(*child);
      }
      if (ok) {
        finish(seg, a);
        return true;
      }
      ++stats_.backtracks;
      undo(nodes_mark, trail_mark);
    }
    seg_.nodes[seg].choice = {};
    seg_.nodes[seg].children.clear();
    exhausted_.push_back(aes_.key(a));
    stack_.pop_back();
    on_stack_.erase(a);
    return false;
  }

  Aes& aes_;
  std::optional<std::uint64_t> seed_;
  SearchStats& stats_;
  SegGraph seg_;
  std::vector<StackItem> stack_;
  std::unordered_map<std::size_t, std::size_t> on_stack_;  // AES node -> stack position
  std::unordered_map<std::size_t, std::size_t> done_;      // AES node -> finished SEG node
  std::unordered_map<std::size_t, bool> deadlock_;
  std::vector<TrailEntry> trail_;
  std::vector<std::string> exhausted_;
};

}  // namespace

SegGraph find_valid_seg(Aes& aes, std::optional<std::uint64_t> seed, SearchStats* stats) {
  SearchStats local;
  return Search(aes, seed, stats ? *stats : local).run();
}

// ---------------------------------------------------------------------------
// Read-off

namespace {

class ReadOff {
 public:
  ReadOff(Aes& aes, const SegGraph& seg) : aes_(aes), seg_(seg) {}

  ChoreographyProgram run() {
    ChoreographyProgram prog;
    prog.main = node(0);
    prog.defs = std::move(defs_);
    return prog;
  }

 private:
  Choreography node(std::size_t s) {
    if (!seg_.nodes[s].loop_target) {
      if (!active_.insert(s).second) throw Error("internal: SEG cycle without a loop target");
      Choreography c = body(s);
      active_.erase(s);
      return c;
    }
    auto it = names_.find(s);
    if (it == names_.end()) {
      ProcedureName name = "X" + std::to_string(names_.size() + 1);
      names_.emplace(s, name);
      defs_[name] = body(s);
      return chor::call(name);
    }
    return chor::call(it->second);
  }

  Choreography body(std::size_t s) {
    const auto& n = seg_.nodes[s];
    if (n.choice.edges.empty()) {
      const System& sys = aes_.system(n.aes_node);
      if (is_terminated(sys)) return chor::end();
      std::vector<std::string> notes;
      for (const auto& [p, ps] : sys.processes) {
        if (!std::holds_alternative<BehEnd>(ps.term->node)) notes.push_back(p + " { " + render(ps.term) + " }");
      }
      return chor::stuck(std::move(notes));
    }
    const auto& edges = aes_.edges(n.aes_node);
    const AbstractLabel& first = edges[n.choice.edges[0]].label;
    if (first.is_cond()) return chor::cond(first.p, first.q, node(n.children[0]), node(n.children[1]));
    return chor::seq(interactions(first), node(n.children[0]));
  }

  Aes& aes_;
  const SegGraph& seg_;
  std::map<std::size_t, ProcedureName> names_;
  std::map<ProcedureName, Choreography> defs_;
  std::set<std::size_t> active_;
};

}  // namespace

ChoreographyProgram seg_to_choreography(Aes& aes, const SegGraph& seg) { return ReadOff(aes, seg).run(); }

ExtractionReport extract_with_report(const Network& n, const ExtractionOptions& options) {
  Aes aes(n, options.mode, options.max_nodes);
  if (!options.lazy) aes.expand_all();
  ExtractionReport report;
  SegGraph seg = find_valid_seg(aes, options.seed, &report.search);
  report.program = seg_to_choreography(aes, seg);
  report.aes_nodes = aes.node_count();
  report.aes_expanded = aes.expanded_count();
  return report;
}

ChoreographyProgram extract(const Network& n, const ExtractionOptions& options) {
  return extract_with_report(n, options).program;
}

// ---------------------------------------------------------------------------
// Rewriting-based extraction

namespace {

Choreography rewrite_extract(const System& s, std::mt19937_64* rng) {
  auto steps = step_network_abstract(s);
  std::vector<std::size_t> heads;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].label.kind != LabelKind::CondElse) heads.push_back(i);
  }
  if (heads.empty()) {
    if (is_terminated(s)) return chor::end();
    std::vector<std::string> notes;
    for (const auto& [p, ps] : s.processes) {
      if (!std::holds_alternative<BehEnd>(ps.term->node)) notes.push_back(p + " { " + render(ps.term) + " }");
    }
    return chor::stuck(std::move(notes));
  }
  std::size_t pick;
  if (rng) {
    pick = heads[std::uniform_int_distribution<std::size_t>(0, heads.size() - 1)(*rng)];
  } else {
    pick = *std::min_element(heads.begin(), heads.end(), [&](std::size_t a, std::size_t b) {
      return order_key(steps[a].label) < order_key(steps[b].label);
    });
  }
  const auto& l = steps[pick].label;
  if (l.kind == LabelKind::CondThen) {
    for (const auto& other : steps) {
      if (other.label.kind == LabelKind::CondElse && other.label.p == l.p && other.label.q == l.q) {
        Choreography t = rewrite_extract(steps[pick].next, rng);
        return chor::cond(l.p, l.q, t, rewrite_extract(other.next, rng));
      }
    }
  }
  return chor::seq(interactions(l), rewrite_extract(steps[pick].next, rng));
}

}  // namespace

Choreography extract_finite_rewriting(const Network& n, std::optional<std::uint64_t> seed) {
  if (!is_finite(n)) throw NotFinite("network contains recursion");
  validate(n);
  if (seed) {
    std::mt19937_64 rng(*seed);
    return rewrite_extract(lift(n), &rng);
  }
  return rewrite_extract(lift(n), nullptr);
}

// ---------------------------------------------------------------------------

namespace {

Choreography encode(const std::map<ProcedureName, Choreography>& pending,
                    const std::map<ProcedureName, ProcedureName>& renames, std::map<ProcedureName, int>& uses,
                    const Choreography& c) {
  for (const auto& name : called_procedures(c)) {
    if (!pending.count(name)) continue;
    int n = uses[name]++;
    ProcedureName fresh = n == 0 ? name : name + "_" + std::to_string(n);
    auto inner = pending;
    inner.erase(name);
    auto scope = renames;
    scope[name] = fresh;
    Choreography body = encode(inner, scope, uses, pending.at(name));
    return chor::def(fresh, body, encode(inner, scope, uses, c));
  }
  return rename_calls(c, renames);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

std::string truncate(const std::string& s, std::size_t n) {
  if (s.size() <= n) return s;
  std::size_t cut = n;
  while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;  // keep UTF-8 intact
  return s.substr(0, cut) + "...";
}

}  // namespace

Choreography inline_definitions(const ChoreographyProgram& prog) {
  std::map<ProcedureName, int> uses;
  return encode(prog.defs, {}, uses, prog.main);
}

std::string to_dot(Aes& aes) {
  aes.expand_all();
  std::ostringstream os;
  os << "digraph aes {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t i = 0; i < aes.node_count(); ++i) {
    const std::string text = aes.key(i);
    os << "  n" << i << " [label=\"" << escape(truncate(text, 120)) << "\", tooltip=\"" << escape(text) << "\"";
    if (i == aes.root()) os << ", penwidth=2";
    os << "];\n";
  }
  for (std::size_t i = 0; i < aes.node_count(); ++i) {
    for (const auto& e : aes.edges(i)) {
      os << "  n" << i << " -> n" << e.target << " [label=\"" << escape(render(e.label)) << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace chorex
