#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "chorex/congruence.hpp"
#include "chorex/epp.hpp"
#include "chorex/equivalence.hpp"
#include "chorex/extraction.hpp"
#include "chorex/parser.hpp"
#include "chorex/printer.hpp"
#include "chorex/semantics.hpp"

using namespace chorex;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNotExtractable = 2, kResource = 3 };

struct UsageError : Error {
  using Error::Error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Network read_network(const std::string& path) {
  Network n = parse_network(slurp(path));
  validate(n);
  return n;
}

ChoreographyProgram read_program(const std::string& path) {
  ChoreographyProgram p = parse_choreography(slurp(path));
  validate(p);
  return p;
}

std::size_t default_max_nodes() {
  if (const char* env = std::getenv("CHOREX_MAX_NODES")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("CHOREX_MAX_NODES is not a number: ") + env);
    }
  }
  return Aes::kDefaultMaxNodes;
}

State parse_state(const std::string& text) {
  State sigma;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw UsageError("bad state entry '" + item + "', expected p=v");
    }
    sigma[item.substr(0, eq)] = Value::constant(item.substr(eq + 1));
  }
  return sigma;
}

void print_stuck_notes(const ChoreographyProgram& prog) {
  if (contains_stuck(prog)) std::cerr << "note: extraction contains 1 (deadlocked processes)\n";
}

int run_simulate(const std::string& cc, const std::string& sp, bool async, const State& sigma0, int max_steps,
                 std::optional<std::uint64_t> seed) {
  std::mt19937_64 rng(seed.value_or(0));
  auto pick = [&](std::size_t n) -> std::size_t {
    if (!seed) return 0;
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };
  State sigma = sigma0;
  int steps = 0;
  if (!cc.empty()) {
    if (async) throw UsageError("--async applies to networks only");
    ChoreographyProgram prog = read_program(cc);
    Choreography c = prog.main;
    for (; steps < max_steps; ++steps) {
      auto next = step_choreography(prog, c, sigma);
      if (next.empty()) break;
      auto& s = next[pick(next.size())];
      std::cout << render(s.label) << "\n";
      c = s.next;
      sigma = s.state;
    }
    std::cout << "-- " << steps << " steps; residual: " << render(c) << "\n";
  } else {
    System sys = lift(read_network(sp));
    Queues queues;
    for (; steps < max_steps; ++steps) {
      if (async) {
        auto next = step_network_async(sys, sigma, queues);
        if (next.empty()) break;
        auto& s = next[pick(next.size())];
        std::cout << render(s.label) << "\n";
        sys = s.next;
        sigma = s.state;
        queues = s.queues;
      } else {
        auto next = step_network_sync(sys, sigma);
        if (next.empty()) break;
        auto& s = next[pick(next.size())];
        std::cout << render(s.label) << "\n";
        sys = s.next;
        sigma = s.state;
      }
    }
    std::cout << "-- " << steps << " steps; residual: " << render(sys) << "\n";
    if (async && !queues.empty()) std::cout << "-- queues: " << render(queues) << "\n";
  }
  std::cout << "-- state: " << render(sigma) << "\n";
  return kOk;
}

bool all_states_bisimilar(const ChoreographyProgram& c, const Network& n, const std::vector<State>& states,
                          const EquivOptions& options, Trace* counterexample, State* witness) {
  for (const auto& sigma : states) {
    auto r = check_bisim(c, n, sigma, options);
    if (!r.equivalent) {
      if (counterexample) *counterexample = r.counterexample;
      if (witness) *witness = sigma;
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chorex: choreography extraction and endpoint projection"};
  app.require_subcommand(1);

  std::string file;
  bool async = false;
  bool lazy = false;
  bool strict = false;
  std::optional<std::uint64_t> seed;
  std::size_t max_nodes = 0;
  std::string cc_file, sp_file, state_text, out_file;
  int max_steps = 100;
  int depth = 12;

  auto* extract_cmd = app.add_subcommand("extract", "extract a choreography from a network (.sp)");
  extract_cmd->add_option("file", file, "network file")->required();
  extract_cmd->add_flag("--async", async, "asynchronous semantics (multicoms)");
  extract_cmd->add_option("--seed", seed, "permute the search order");
  extract_cmd->add_flag("--lazy", lazy, "expand the AES on demand");
  extract_cmd->add_option("--max-nodes", max_nodes, "AES node cap");

  auto* project_cmd = app.add_subcommand("project", "endpoint projection of a choreography (.cc)");
  project_cmd->add_option("file", file, "choreography file")->required();
  project_cmd->add_flag("--strict", strict, "fail on unused definitions");

  auto* simulate_cmd = app.add_subcommand("simulate", "print one run");
  auto* sim_cc = simulate_cmd->add_option("--cc", cc_file, "choreography file");
  auto* sim_sp = simulate_cmd->add_option("--sp", sp_file, "network file");
  sim_cc->excludes(sim_sp);
  simulate_cmd->add_flag("--async", async, "asynchronous network semantics");
  simulate_cmd->add_option("--state", state_text, "initial values, p=v,q=w");
  simulate_cmd->add_option("--max-steps", max_steps, "step limit");
  simulate_cmd->add_option("--seed", seed, "choose among enabled steps at random");

  auto* equiv_cmd = app.add_subcommand("check-equiv", "bounded bisimulation between a choreography and a network");
  equiv_cmd->add_option("--cc", cc_file, "choreography file")->required();
  equiv_cmd->add_option("--sp", sp_file, "network file")->required();
  equiv_cmd->add_option("--depth", depth, "game depth");
  equiv_cmd->add_flag("--async", async, "completion-label game against the asynchronous network");
  equiv_cmd->add_option("--state", state_text, "initial values (default: sampled states)");

  auto* dump_cmd = app.add_subcommand("aes-dump", "write the AES as DOT");
  dump_cmd->add_option("file", file, "network file")->required();
  dump_cmd->add_flag("--async", async, "asynchronous AES");
  dump_cmd->add_option("-o", out_file, "output file")->required();

  auto* round_cmd = app.add_subcommand("roundtrip", "project, extract and compare");
  round_cmd->add_option("file", file, "choreography file")->required();
  round_cmd->add_option("--depth", depth, "game depth");
  round_cmd->add_flag("--async", async, "asynchronous extraction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (max_nodes == 0) max_nodes = default_max_nodes();
    Mode mode = async ? Mode::Async : Mode::Sync;

    if (*extract_cmd) {
      Network n = read_network(file);
      ExtractionOptions opt;
      opt.mode = mode;
      opt.lazy = lazy;
      opt.seed = seed;
      opt.max_nodes = max_nodes;
      ChoreographyProgram prog = extract(n, opt);
      std::cout << render(prog) << "\n";
      print_stuck_notes(prog);
      return kOk;
    }
    if (*project_cmd) {
      ChoreographyProgram prog = read_program(file);
      if (strict) {
        auto pruned = prune_unreachable(prog);
        for (const auto& [name, body] : prog.defs) {
          if (!pruned.defs.count(name)) {
            std::cerr << "error: definition " << name << " is never used\n";
            return kNotExtractable;
          }
        }
      }
      std::cout << render(epp(prog)) << "\n";
      return kOk;
    }
    if (*simulate_cmd) {
      if (cc_file.empty() == sp_file.empty()) throw UsageError("simulate needs exactly one of --cc, --sp");
      return run_simulate(cc_file, sp_file, async, parse_state(state_text), max_steps, seed);
    }
    if (*equiv_cmd) {
      ChoreographyProgram c = read_program(cc_file);
      Network n = read_network(sp_file);
      EquivOptions opt;
      opt.mode = mode;
      opt.depth = depth;
      std::vector<State> states = state_text.empty() ? sample_states(c) : std::vector<State>{parse_state(state_text)};
      Trace cex;
      State witness;
      if (all_states_bisimilar(c, n, states, opt, &cex, &witness)) {
        std::cout << "EQUIVALENT\n";
        return kOk;
      }
      std::cout << "NOT EQUIVALENT\n";
      std::cerr << "state: " << (witness.empty() ? std::string("(all unit)") : render(witness)) << "\n";
      for (const auto& line : cex) std::cerr << "  " << line << "\n";
      return kUsage;
    }
    if (*dump_cmd) {
      Aes aes(read_network(file), mode, max_nodes);
      aes.expand_all();
      std::ofstream out(out_file);
      if (!out) throw UsageError("cannot write " + out_file);
      out << to_dot(aes);
      std::cerr << aes.node_count() << " nodes, " << aes.edge_count() << " edges\n";
      return kOk;
    }
    if (*round_cmd) {
      ChoreographyProgram c = read_program(file);
      Network n = epp(c);
      ExtractionOptions opt;
      opt.mode = mode;
      opt.max_nodes = max_nodes;
      ChoreographyProgram back = extract(n, opt);
      std::cout << render(back) << "\n";
      bool ok = equivalent_programs(c, back);
      if (!ok) {
        EquivOptions eo;
        eo.mode = mode;
        eo.depth = depth;
        ok = all_states_bisimilar(back, n, sample_states(c), eo, nullptr, nullptr) &&
             all_states_bisimilar(c, n, sample_states(c), eo, nullptr, nullptr);
      }
      std::cout << (ok ? "EQUIVALENT" : "NOT EQUIVALENT") << "\n";
      return ok ? kOk : kUsage;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error at " << e.what() << "\n";
    return kUsage;
  } catch (const NotExtractable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNotExtractable;
  } catch (const ProjectionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNotExtractable;
  } catch (const ResourceLimit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kResource;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}
