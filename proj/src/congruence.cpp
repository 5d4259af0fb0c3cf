#include "chorex/congruence.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <unordered_set>

#include "chorex/printer.hpp"
#include "overloaded.hpp"

namespace chorex {

using detail::overloaded;

namespace {

std::set<ProcessName> names_of(const std::vector<Interaction>& actions) {
  std::set<ProcessName> out;
  for (const auto& a : actions) {
    out.insert(a.sender);
    out.insert(a.receiver);
  }
  return out;
}

std::set<ProcessName> receivers(const std::vector<Interaction>& actions) {
  std::set<ProcessName> out;
  for (const auto& a : actions) out.insert(a.receiver);
  return out;
}

std::set<ProcessName> senders(const std::vector<Interaction>& actions) {
  std::set<ProcessName> out;
  for (const auto& a : actions) out.insert(a.sender);
  return out;
}

bool intersects(const std::set<ProcessName>& a, const std::set<ProcessName>& b) {
  for (const auto& x : a) {
    if (b.count(x)) return true;
  }
  return false;
}

std::string render_group(const std::vector<Interaction>& g) {
  std::string out;
  for (const auto& a : g) out += render(a) + ";";
  return out;
}

}  // namespace

std::vector<std::vector<Interaction>> split_multicom(const std::vector<Interaction>& actions) {
  const std::size_t n = actions.size();
  // le[a][b]: a must be in the same or an earlier group than b.
  std::vector<std::vector<bool>> le(n, std::vector<bool>(n, false));
  for (std::size_t x = 0; x < n; ++x) {
    le[x][x] = true;
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      if (actions[x].receiver == actions[y].sender) le[y][x] = true;
      if (x < y && actions[x].sender == actions[y].sender) le[x][y] = true;
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (le[i][k] && le[k][j]) le[i][j] = true;

  std::vector<int> comp(n, -1);
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    if (comp[i] >= 0) continue;
    comp[i] = static_cast<int>(groups.size());
    groups.push_back({i});
    for (std::size_t j = i + 1; j < n; ++j) {
      if (comp[j] < 0 && le[i][j] && le[j][i]) {
        comp[j] = comp[i];
        groups.back().push_back(j);
      }
    }
  }
  std::vector<std::vector<Interaction>> rendered(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t i : groups[g]) rendered[g].push_back(actions[i]);
    std::stable_sort(rendered[g].begin(), rendered[g].end(),
                     [](const Interaction& a, const Interaction& b) { return a.sender < b.sender; });
  }
  // Kahn's algorithm, smallest rendered group first.
  std::vector<bool> placed(groups.size(), false);
  std::vector<std::vector<Interaction>> out;
  for (std::size_t round = 0; round < groups.size(); ++round) {
    std::optional<std::size_t> best;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (placed[g]) continue;
      bool ready = true;
      for (std::size_t h = 0; h < groups.size() && ready; ++h) {
        if (h == g || placed[h]) continue;
        if (le[groups[h].front()][groups[g].front()]) ready = false;
      }
      if (ready && (!best || render_group(rendered[g]) < render_group(rendered[*best]))) best = g;
    }
    placed[*best] = true;
    out.push_back(rendered[*best]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonical form

namespace {

struct Item {
  bool is_cond = false;
  std::vector<Interaction> group;
  ProcessName p, q;

  std::set<ProcessName> names() const { return is_cond ? std::set<ProcessName>{p, q} : names_of(group); }
  std::string order_key() const { return is_cond ? "~" + p + "=" + q : render_group(group); }
  bool matches(const Item& o) const {
    return is_cond == o.is_cond && (is_cond ? (p == o.p && q == o.q) : group == o.group);
  }
};

// Rebuilds a Seq whose multicom has been split, so that groups can be
// addressed one at a time.
Choreography explode(const std::vector<std::vector<Interaction>>& groups, std::size_t from, const Choreography& cont) {
  Choreography c = cont;
  for (std::size_t i = groups.size(); i-- > from;) c = chor::seq(groups[i], c);
  return c;
}

void candidates(const Choreography& c, std::set<ProcessName> blocked, std::vector<Item>& out) {
  std::visit(overloaded{
                 [&](const ChorSeq& x) {
                   for (const auto& g : split_multicom(x.actions)) {
                     auto pn = names_of(g);
                     if (!intersects(pn, blocked)) out.push_back(Item{false, g, {}, {}});
                     blocked.insert(pn.begin(), pn.end());
                   }
                   candidates(x.cont, blocked, out);
                 },
                 [&](const ChorCond& x) {
                   if (!blocked.count(x.p) && !blocked.count(x.q)) out.push_back(Item{true, {}, x.p, x.q});
                   blocked.insert(x.p);
                   blocked.insert(x.q);
                   std::vector<Item> left, right;
                   candidates(x.then_branch, blocked, left);
                   if (left.empty()) return;
                   candidates(x.else_branch, blocked, right);
                   for (const auto& a : left) {
                     for (const auto& b : right) {
                       if (a.matches(b)) {
                         out.push_back(a);
                         break;
                       }
                     }
                   }
                 },
                 [](const auto&) {},
             },
             c->node);
}

// Removes the first frontable occurrence of `item`; returns one residual
// for a group, or the (then, else) residuals for a conditional.
std::optional<std::vector<Choreography>> remove_item(const Choreography& c, const Item& item,
                                                     std::set<ProcessName> blocked) {
  const auto pn = item.names();
  return std::visit(
      overloaded{
          [&](const ChorSeq& x) -> std::optional<std::vector<Choreography>> {
            auto groups = split_multicom(x.actions);
            for (std::size_t i = 0; i < groups.size(); ++i) {
              auto gpn = names_of(groups[i]);
              if (!item.is_cond && groups[i] == item.group && !intersects(gpn, blocked)) {
                auto rest = groups;
                rest.erase(rest.begin() + static_cast<long>(i));
                return std::vector<Choreography>{explode(rest, 0, x.cont)};
              }
              blocked.insert(gpn.begin(), gpn.end());
            }
            auto inner = remove_item(x.cont, item, blocked);
            if (!inner) return std::nullopt;
            for (auto& r : *inner) r = explode(groups, 0, r);
            return inner;
          },
          [&](const ChorCond& x) -> std::optional<std::vector<Choreography>> {
            if (item.is_cond && item.p == x.p && item.q == x.q && !blocked.count(x.p) && !blocked.count(x.q)) {
              return std::vector<Choreography>{x.then_branch, x.else_branch};
            }
            if (intersects(pn, {x.p, x.q})) return std::nullopt;
            blocked.insert(x.p);
            blocked.insert(x.q);
            auto l = remove_item(x.then_branch, item, blocked);
            if (!l) return std::nullopt;
            auto r = remove_item(x.else_branch, item, blocked);
            if (!r) return std::nullopt;
            std::vector<Choreography> out;
            for (std::size_t i = 0; i < l->size(); ++i) out.push_back(chor::cond(x.p, x.q, (*l)[i], (*r)[i]));
            return out;
          },
          [](const auto&) -> std::optional<std::vector<Choreography>> { return std::nullopt; },
      },
      c->node);
}

}  // namespace

Choreography canonical_form(const Choreography& c) {
  if (const auto* d = std::get_if<ChorDef>(&c->node)) {
    return chor::def(d->name, canonical_form(d->body), canonical_form(d->cont));
  }
  std::vector<Item> items;
  candidates(c, {}, items);
  if (items.empty()) return c;
  const Item* best = &items.front();
  for (const auto& it : items) {
    if (it.order_key() < best->order_key()) best = &it;
  }
  auto residual = remove_item(c, *best, {});
  if (!residual) throw Error("internal: canonical_form lost a frontable item");
  if (best->is_cond) {
    return chor::cond(best->p, best->q, canonical_form((*residual)[0]), canonical_form((*residual)[1]));
  }
  return chor::seq(best->group, canonical_form((*residual)[0]));
}

// ---------------------------------------------------------------------------
// One-step rewrites

std::vector<Choreography> rewrite_once(const Choreography& c) {
  std::vector<Choreography> out;
  std::visit(
      overloaded{
          [&](const ChorSeq& x) {
            const auto& a = x.actions;
            for (std::size_t i = 0; i + 1 < a.size(); ++i) {
              if (a[i].sender == a[i + 1].sender) continue;
              auto b = a;
              std::swap(b[i], b[i + 1]);
              out.push_back(chor::seq(b, x.cont));
            }
            for (std::size_t i = 1; i < a.size(); ++i) {
              std::vector<Interaction> first(a.begin(), a.begin() + static_cast<long>(i));
              std::vector<Interaction> second(a.begin() + static_cast<long>(i), a.end());
              if (!intersects(receivers(first), senders(second))) {
                out.push_back(chor::seq(first, chor::seq(second, x.cont)));
              }
            }
            std::visit(overloaded{
                           [&](const ChorSeq& y) {
                             if (!intersects(receivers(a), receivers(y.actions)) &&
                                 !intersects(receivers(a), senders(y.actions))) {
                               auto merged = a;
                               merged.insert(merged.end(), y.actions.begin(), y.actions.end());
                               out.push_back(chor::seq(merged, y.cont));
                             }
                             if (!intersects(names_of(a), names_of(y.actions))) {
                               out.push_back(chor::seq(y.actions, chor::seq(a, y.cont)));
                             }
                           },
                           [&](const ChorCond& y) {
                             if (!intersects(names_of(a), {y.p, y.q})) {
                               out.push_back(chor::cond(y.p, y.q, chor::seq(a, y.then_branch),
                                                        chor::seq(a, y.else_branch)));
                             }
                           },
                           [](const auto&) {},
                       },
                       x.cont->node);
            for (const auto& r : rewrite_once(x.cont)) out.push_back(chor::seq(a, r));
          },
          [&](const ChorCond& x) {
            const auto* s1 = std::get_if<ChorSeq>(&x.then_branch->node);
            const auto* s2 = std::get_if<ChorSeq>(&x.else_branch->node);
            if (s1 && s2 && s1->actions == s2->actions && !intersects(names_of(s1->actions), {x.p, x.q})) {
              out.push_back(chor::seq(s1->actions, chor::cond(x.p, x.q, s1->cont, s2->cont)));
            }
            const auto* c1 = std::get_if<ChorCond>(&x.then_branch->node);
            const auto* c2 = std::get_if<ChorCond>(&x.else_branch->node);
            if (c1 && c2 && c1->p == c2->p && c1->q == c2->q && !intersects({c1->p, c1->q}, {x.p, x.q})) {
              out.push_back(chor::cond(c1->p, c1->q, chor::cond(x.p, x.q, c1->then_branch, c2->then_branch),
                                       chor::cond(x.p, x.q, c1->else_branch, c2->else_branch)));
            }
            for (const auto& r : rewrite_once(x.then_branch)) out.push_back(chor::cond(x.p, x.q, r, x.else_branch));
            for (const auto& r : rewrite_once(x.else_branch)) out.push_back(chor::cond(x.p, x.q, x.then_branch, r));
          },
          [&](const ChorDef& x) {
            for (const auto& r : rewrite_once(x.body)) out.push_back(chor::def(x.name, r, x.cont));
            for (const auto& r : rewrite_once(x.cont)) out.push_back(chor::def(x.name, x.body, r));
          },
          [](const auto&) {},
      },
      c->node);
  return out;
}

namespace {

// Identity key ignoring stuck diagnostics.
std::string term_key(const Choreography& c) {
  return std::visit(overloaded{
                        [](const ChorEnd&) -> std::string { return "0"; },
                        [](const ChorStuck&) -> std::string { return "1"; },
                        [](const ChorCall& x) -> std::string { return "@" + x.name; },
                        [&](const ChorSeq& x) -> std::string {
                          return "(" + render_group(x.actions) + ")" + term_key(x.cont);
                        },
                        [&](const ChorCond& x) -> std::string {
                          return "if " + x.p + "=" + x.q + "{" + term_key(x.then_branch) + "}{" +
                                 term_key(x.else_branch) + "}";
                        },
                        [&](const ChorDef& x) -> std::string {
                          return "def " + x.name + "{" + term_key(x.body) + "}" + term_key(x.cont);
                        },
                    },
                    c->node);
}

std::unordered_set<std::string> reach(const Choreography& c, int depth, std::size_t max_states,
                                      std::map<std::string, Choreography>* terms = nullptr) {
  std::unordered_set<std::string> seen{term_key(c)};
  std::vector<Choreography> frontier{c};
  if (terms) (*terms)[term_key(c)] = c;
  for (int d = 0; d < depth && !frontier.empty() && seen.size() < max_states; ++d) {
    std::vector<Choreography> next;
    for (const auto& t : frontier) {
      for (const auto& r : rewrite_once(t)) {
        auto k = term_key(r);
        if (seen.insert(k).second) {
          next.push_back(r);
          if (seen.size() >= max_states) break;
        }
      }
    }
    frontier = std::move(next);
  }
  return seen;
}

}  // namespace

bool bounded_equiv(const Choreography& a, const Choreography& b, int depth, std::size_t max_states) {
  if (term_key(a) == term_key(b)) return true;
  auto from_a = reach(a, (depth + 1) / 2, max_states);
  auto from_b = reach(b, depth / 2, max_states);
  for (const auto& k : from_b) {
    if (from_a.count(k)) return true;
  }
  return false;
}

bool struct_equiv(const Choreography& a, const Choreography& b, int depth) {
  if (term_key(canonical_form(a)) == term_key(canonical_form(b))) return true;
  return depth > 0 && bounded_equiv(a, b, depth);
}

// ---------------------------------------------------------------------------
// Programs

Choreography rename_calls(const Choreography& c, const std::map<ProcedureName, ProcedureName>& names) {
  return std::visit(overloaded{
                        [&](const ChorCall& x) {
                          auto it = names.find(x.name);
                          return it == names.end() ? c : chor::call(it->second);
                        },
                        [&](const ChorSeq& x) { return chor::seq(x.actions, rename_calls(x.cont, names)); },
                        [&](const ChorCond& x) {
                          return chor::cond(x.p, x.q, rename_calls(x.then_branch, names),
                                            rename_calls(x.else_branch, names));
                        },
                        [&](const ChorDef& x) {
                          auto it = names.find(x.name);
                          return chor::def(it == names.end() ? x.name : it->second, rename_calls(x.body, names),
                                           rename_calls(x.cont, names));
                        },
                        [&](const auto&) { return c; },
                    },
                    c->node);
}

ChoreographyProgram prune_unreachable(const ChoreographyProgram& prog) {
  ChoreographyProgram out;
  out.main = prog.main;
  std::deque<ProcedureName> todo;
  for (const auto& n : called_procedures(prog.main)) todo.push_back(n);
  while (!todo.empty()) {
    auto n = todo.front();
    todo.pop_front();
    if (out.defs.count(n)) continue;
    auto it = prog.defs.find(n);
    if (it == prog.defs.end()) throw UnboundProcedure(n);
    out.defs[n] = it->second;
    for (const auto& m : called_procedures(it->second)) todo.push_back(m);
  }
  return out;
}

namespace {

// Walks two canonical terms in lockstep, extending the call bijection.
bool align(const Choreography& a, const Choreography& b, std::map<ProcedureName, ProcedureName>& fwd,
           std::map<ProcedureName, ProcedureName>& bwd, std::deque<std::pair<ProcedureName, ProcedureName>>& todo) {
  if (a->node.index() != b->node.index()) return false;
  return std::visit(overloaded{
                        [&](const ChorCall& x) {
                          const auto& y = std::get<ChorCall>(b->node).name;
                          auto f = fwd.find(x.name);
                          auto g = bwd.find(y);
                          if (f == fwd.end() && g == bwd.end()) {
                            fwd[x.name] = y;
                            bwd[y] = x.name;
                            todo.emplace_back(x.name, y);
                            return true;
                          }
                          return f != fwd.end() && f->second == y;
                        },
                        [&](const ChorSeq& x) {
                          const auto& y = std::get<ChorSeq>(b->node);
                          return x.actions == y.actions && align(x.cont, y.cont, fwd, bwd, todo);
                        },
                        [&](const ChorCond& x) {
                          const auto& y = std::get<ChorCond>(b->node);
                          return x.p == y.p && x.q == y.q && align(x.then_branch, y.then_branch, fwd, bwd, todo) &&
                                 align(x.else_branch, y.else_branch, fwd, bwd, todo);
                        },
                        [&](const ChorDef&) { return term_key(a) == term_key(b); },
                        [](const auto&) { return true; },
                    },
                    a->node);
}

bool equivalent_under(const ChoreographyProgram& a, const ChoreographyProgram& b,
                      const std::map<ProcedureName, ProcedureName>& names, int depth) {
  if (!struct_equiv(rename_calls(a.main, names), b.main, depth)) return false;
  for (const auto& [x, y] : names) {
    if (!struct_equiv(rename_calls(a.defs.at(x), names), b.defs.at(y), depth)) return false;
  }
  return true;
}

}  // namespace

bool equivalent_programs(const ChoreographyProgram& a0, const ChoreographyProgram& b0, int depth) {
  auto a = prune_unreachable(a0);
  auto b = prune_unreachable(b0);
  if (a.defs.size() != b.defs.size()) return false;

  std::map<ProcedureName, ProcedureName> fwd, bwd;
  std::deque<std::pair<ProcedureName, ProcedureName>> todo;
  bool ok = align(canonical_form(a.main), canonical_form(b.main), fwd, bwd, todo);
  while (ok && !todo.empty()) {
    auto [x, y] = todo.front();
    todo.pop_front();
    ok = align(canonical_form(a.defs.at(x)), canonical_form(b.defs.at(y)), fwd, bwd, todo);
  }
  if (ok && fwd.size() == a.defs.size()) return true;

  // Canonical forms disagree structurally; try every bijection on small programs.
  if (a.defs.size() > 6) return false;
  std::vector<ProcedureName> xs, ys;
  for (const auto& [n, body] : a.defs) xs.push_back(n);
  for (const auto& [n, body] : b.defs) ys.push_back(n);
  do {
    std::map<ProcedureName, ProcedureName> names;
    for (std::size_t i = 0; i < xs.size(); ++i) names[xs[i]] = ys[i];
    if (equivalent_under(a, b, names, depth)) return true;
  } while (std::next_permutation(ys.begin(), ys.end()));
  return false;
}

// ---------------------------------------------------------------------------

std::size_t count_conditionals(const Choreography& c) {
  return std::visit(overloaded{
                        [](const ChorSeq& x) { return count_conditionals(x.cont); },
                        [](const ChorCond& x) {
                          return 1 + count_conditionals(x.then_branch) + count_conditionals(x.else_branch);
                        },
                        [](const ChorDef& x) { return count_conditionals(x.body) + count_conditionals(x.cont); },
                        [](const auto&) -> std::size_t { return 0; },
                    },
                    c->node);
}

std::size_t count_interactions(const Choreography& c) {
  return std::visit(overloaded{
                        [](const ChorSeq& x) { return x.actions.size() + count_interactions(x.cont); },
                        [](const ChorCond& x) {
                          return count_interactions(x.then_branch) + count_interactions(x.else_branch);
                        },
                        [](const ChorDef& x) { return count_interactions(x.body) + count_interactions(x.cont); },
                        [](const auto&) -> std::size_t { return 0; },
                    },
                    c->node);
}

bool contains_stuck(const Choreography& c) {
  return std::visit(overloaded{
                        [](const ChorStuck&) { return true; },
                        [](const ChorSeq& x) { return contains_stuck(x.cont); },
                        [](const ChorCond& x) { return contains_stuck(x.then_branch) || contains_stuck(x.else_branch); },
                        [](const ChorDef& x) { return contains_stuck(x.body) || contains_stuck(x.cont); },
                        [](const auto&) { return false; },
                    },
                    c->node);
}

bool contains_stuck(const ChoreographyProgram& prog) {
  if (contains_stuck(prog.main)) return true;
  for (const auto& [n, body] : prog.defs) {
    if (contains_stuck(body)) return true;
  }
  return false;
}

}  // namespace chorex
