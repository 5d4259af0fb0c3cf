#include "chorex/generators.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "chorex/epp.hpp"

namespace chorex {

namespace {

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::string process(std::size_t i) { return "p" + std::to_string(i); }

Expression random_expr(std::mt19937_64& rng) {
  static const char* literals[] = {"a", "b", "0", "1"};
  std::size_t k = uniform(rng, 0, 4);
  if (k == 4) return Expression::self();
  return Expression::literal(Value::constant(literals[k]));
}

std::string label(std::size_t i) { return "l" + std::to_string(i); }

Behaviour random_behaviour(std::mt19937_64& rng, const std::vector<std::string>& peers, std::size_t budget,
                           const RandomNetworkOptions& options) {
  if (budget == 0 || peers.empty() || uniform(rng, 0, 9) == 0) return beh::end();
  const std::string& peer = peers[uniform(rng, 0, peers.size() - 1)];
  switch (uniform(rng, 0, 5)) {
    case 0:
    case 1:
      return beh::send(peer, random_expr(rng), random_behaviour(rng, peers, budget - 1, options));
    case 2:
    case 3:
      return beh::recv(peer, random_behaviour(rng, peers, budget - 1, options));
    case 4: {
      if (uniform(rng, 0, 1) == 0) {
        return beh::select(peer, label(uniform(rng, 0, options.max_labels - 1)),
                           random_behaviour(rng, peers, budget - 1, options));
      }
      std::size_t rest = budget - 1;
      std::size_t left = uniform(rng, 0, rest);
      std::map<Label, Behaviour> branches;
      branches[label(0)] = random_behaviour(rng, peers, left, options);
      if (options.max_labels > 1 && uniform(rng, 0, 1) == 1) {
        branches[label(1)] = random_behaviour(rng, peers, rest - left, options);
      }
      return beh::branch(peer, std::move(branches));
    }
    default: {
      std::size_t rest = budget - 1;
      std::size_t left = uniform(rng, 0, rest);
      return beh::cond(peer, random_behaviour(rng, peers, left, options),
                       random_behaviour(rng, peers, rest - left, options));
    }
  }
}

// Longest path, in actions.
std::size_t action_count(const Behaviour& b) {
  if (const auto* x = std::get_if<BehSend>(&b->node)) return 1 + action_count(x->cont);
  if (const auto* x = std::get_if<BehRecv>(&b->node)) return 1 + action_count(x->cont);
  if (const auto* x = std::get_if<BehSelect>(&b->node)) return 1 + action_count(x->cont);
  if (const auto* x = std::get_if<BehBranch>(&b->node)) {
    std::size_t n = 0;
    for (const auto& [l, br] : x->branches) n = std::max(n, action_count(br));
    return 1 + n;
  }
  if (const auto* x = std::get_if<BehCond>(&b->node)) {
    return 1 + std::max(action_count(x->then_branch), action_count(x->else_branch));
  }
  return 0;
}

}  // namespace

Network conditional_family(int n) {
  Network out;
  for (int i = 1; i <= n; ++i) {
    std::string odd = "p" + std::to_string(2 * i - 1);
    std::string even = "p" + std::to_string(2 * i);
    out.processes[odd] = beh::cond(even, beh::end(), beh::end());
    out.processes[even] = beh::send(odd, Expression::literal(Value::constant("e")), beh::end());
  }
  return out;
}

Network random_finite_network(std::mt19937_64& rng, const RandomNetworkOptions& options) {
  std::size_t count = uniform(rng, 2, std::max<std::size_t>(2, options.max_processes));
  Network out;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<std::string> peers;
    for (std::size_t j = 0; j < count; ++j) {
      if (j != i) peers.push_back(process(j));
    }
    out.processes[process(i)] = random_behaviour(rng, peers, uniform(rng, 0, options.max_actions), options);
  }
  return out;
}

Choreography random_finite_choreography(std::mt19937_64& rng, std::size_t processes, std::size_t actions) {
  if (actions == 0 || processes < 2) return chor::end();
  std::size_t a = uniform(rng, 0, processes - 1);
  std::size_t b = uniform(rng, 0, processes - 2);
  if (b >= a) ++b;
  std::string p = process(a), q = process(b);
  switch (uniform(rng, 0, 5)) {
    case 0:
      return chor::end();
    case 1:
      return chor::sel(p, q, label(uniform(rng, 0, 1)), random_finite_choreography(rng, processes, actions - 1));
    case 2:
    case 3: {
      // Selections from p in each branch make projectable conditionals likelier.
      auto branch = [&](const char* l) {
        Choreography c = random_finite_choreography(rng, processes, actions - 1);
        for (std::size_t r = 0; r < processes; ++r) {
          if (process(r) != p && uniform(rng, 0, 3) != 0) c = chor::sel(p, process(r), l, c);
        }
        return c;
      };
      Choreography then_branch = branch("l0");
      Choreography else_branch = branch("l1");
      return chor::cond(p, q, then_branch, else_branch);
    }
    default:
      return chor::com(p, random_expr(rng), q, random_finite_choreography(rng, processes, actions - 1));
  }
}

Network random_projected_network(std::mt19937_64& rng, std::size_t processes, std::size_t actions) {
  for (;;) {
    ChoreographyProgram prog;
    prog.main = random_finite_choreography(rng, processes, actions);
    try {
      return epp(prog);
    } catch (const Error&) {
    }
  }
}

Network random_test_network(std::mt19937_64& rng, const RandomNetworkOptions& options) {
  if (uniform(rng, 0, 1) == 0) return random_finite_network(rng, options);
  for (;;) {
    // Conditionals need selections to every process whose behaviour depends
    // on them, so smaller choreographies fit the per-process budget better.
    std::size_t procs = uniform(rng, 2, std::min<std::size_t>(4, options.max_processes));
    Network n = random_projected_network(rng, procs, std::min<std::size_t>(3, options.max_actions));
    bool small = n.processes.size() <= options.max_processes;
    for (const auto& [p, b] : n.processes) small = small && action_count(b) <= options.max_actions;
    if (small) return n;
  }
}

}  // namespace chorex
