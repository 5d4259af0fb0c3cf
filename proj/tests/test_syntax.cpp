#include <doctest.h>

#include <random>

#include "chorex/parser.hpp"
#include "chorex/printer.hpp"
#include "chorex/syntax.hpp"
#include "support.hpp"

using namespace chorex;

namespace {

const char* kProcs[] = {"p", "q", "r", "s"};

std::string pick_proc(std::mt19937_64& rng) { return kProcs[rng() % 4]; }

std::pair<std::string, std::string> pick_pair(std::mt19937_64& rng) {
  std::string a = pick_proc(rng), b;
  do b = pick_proc(rng);
  while (b == a);
  return {a, b};
}

Expression pick_expr(std::mt19937_64& rng) {
  switch (rng() % 4) {
    case 0:
      return Expression::self();
    case 1:
      return Expression::literal(Value::unit());
    case 2:
      return Expression::literal(Value::constant("v" + std::to_string(rng() % 3)));
    default:
      return Expression::literal(Value::constant(std::to_string(rng() % 10)));
  }
}

Choreography random_chor(std::mt19937_64& rng, int depth, const std::vector<std::string>& procs) {
  if (depth == 0) {
    switch (rng() % 3) {
      case 0:
        return chor::end();
      case 1:
        return chor::stuck();
      default:
        return procs.empty() ? chor::end() : chor::call(procs[rng() % procs.size()]);
    }
  }
  switch (rng() % 4) {
    case 0: {
      auto [a, b] = pick_pair(rng);
      return chor::com(a, pick_expr(rng), b, random_chor(rng, depth - 1, procs));
    }
    case 1: {
      auto [a, b] = pick_pair(rng);
      return chor::sel(a, b, "l" + std::to_string(rng() % 2), random_chor(rng, depth - 1, procs));
    }
    case 2: {
      auto [a, b] = pick_pair(rng);
      return chor::cond(a, b, random_chor(rng, depth - 1, procs), random_chor(rng, depth - 1, procs));
    }
    default: {
      // multicom with distinct receivers
      std::vector<Interaction> actions;
      std::set<std::string> receivers;
      for (int i = 0; i < 3; ++i) {
        auto [a, b] = pick_pair(rng);
        if (!receivers.insert(b).second) continue;
        actions.push_back(rng() % 2 ? Interaction::com(a, pick_expr(rng), b) : Interaction::sel(a, b, "m"));
      }
      return chor::seq(actions, random_chor(rng, depth - 1, procs));
    }
  }
}

Behaviour random_beh(std::mt19937_64& rng, int depth, const std::string& self, std::vector<std::string> scope,
                     int& fresh) {
  std::string peer = pick_proc(rng);
  while (peer == self) peer = pick_proc(rng);
  if (depth == 0) {
    if (!scope.empty() && rng() % 2) return beh::call(scope[rng() % scope.size()]);
    return beh::end();
  }
  switch (rng() % 7) {
    case 0:
      return beh::send(peer, pick_expr(rng), random_beh(rng, depth - 1, self, scope, fresh));
    case 1:
      return beh::recv(peer, random_beh(rng, depth - 1, self, scope, fresh));
    case 2:
      return beh::select(peer, "l" + std::to_string(rng() % 2), random_beh(rng, depth - 1, self, scope, fresh));
    case 3: {
      std::map<Label, Behaviour> branches;
      branches["a"] = random_beh(rng, depth - 1, self, scope, fresh);
      if (rng() % 2) branches["b"] = random_beh(rng, depth - 1, self, scope, fresh);
      return beh::branch(peer, branches);
    }
    case 4:
      return beh::cond(peer, random_beh(rng, depth - 1, self, scope, fresh), random_beh(rng, depth - 1, self, scope, fresh));
    case 5: {
      std::string name = "X" + std::to_string(fresh++);
      scope.push_back(name);
      return beh::def(name, random_beh(rng, depth - 1, self, scope, fresh), random_beh(rng, depth - 1, self, scope, fresh));
    }
    default:
      return beh::end();
  }
}

}  // namespace

TEST_SUITE("syntax") {
  TEST_CASE("parse a two-process network") {
    Network n = parse_network("p { q!*; 0 } | q { p?; 0 }");
    REQUIRE(n.processes.size() == 2);
    const auto& send = std::get<BehSend>(n.processes.at("p")->node);
    CHECK(send.to == "q");
    CHECK(send.expr.is_self());
    CHECK(std::holds_alternative<BehRecv>(n.processes.at("q")->node));
  }

  TEST_CASE("empty input is the empty network") { CHECK(parse_network("").empty()); }

  TEST_CASE("incomplete send is a parse error with a position") {
    try {
      parse_network("p { q! }");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
      CHECK(e.column() > 1);
      CHECK(!e.expected().empty());
    }
  }

  TEST_CASE("single communication program") {
    auto prog = parse_choreography("main = p.x -> q; 0");
    CHECK(prog.defs.empty());
    const auto& seq = std::get<ChorSeq>(prog.main->node);
    REQUIRE(seq.actions.size() == 1);
    CHECK(seq.actions[0] == Interaction::com("p", Expression::literal(Value::constant("x")), "q"));
  }

  TEST_CASE("alternating bit program") {
    auto prog = parse_choreography(
        "def X = (a.1 -> b | b.ack0 -> a); (a.0 -> b | b.ack1 -> a); X  main = a.0 -> b; X");
    REQUIRE(prog.defs.count("X"));
    CHECK(std::get<ChorSeq>(prog.defs.at("X")->node).actions.size() == 2);
    CHECK(render(prog) == "def X = (a.1 -> b | b.ack0 -> a); (a.0 -> b | b.ack1 -> a); X\nmain = a.0 -> b; X");
  }

  TEST_CASE("self-comparison is rejected") { CHECK_THROWS_AS(parse_choreography("main = if p=p then 0 else 0"), ParseError); }

  TEST_CASE("multicom receivers must be distinct") {
    CHECK_THROWS(parse_choreography("main = (p.* -> q | r.* -> q); 0"));
  }

  TEST_CASE("unbound calls are rejected") {
    CHECK_THROWS_AS(parse_choreography("main = X"), ParseError);
    CHECK_THROWS_AS(parse_network("p { X }"), ParseError);
    ChoreographyProgram prog;
    prog.main = chor::call("X");
    CHECK_THROWS_AS(validate(prog), UnboundProcedure);
    Network n;
    n.processes["p"] = beh::call("X");
    CHECK_THROWS_AS(validate(n), UnboundProcedure);
  }

  TEST_CASE("render of the terminal terms") {
    CHECK(render(chor::end()) == "0");
    CHECK(render(chor::stuck()) == "1");
    CHECK(render(chor::stuck({"p { q!x; 0 }"})).rfind("1 /*", 0) == 0);
  }

  TEST_CASE("branches render sorted by label") {
    auto b = parse_behaviour("a&{ ok: s?; 0, ko: X }");
    CHECK(render(b) == "a&{ko: X, ok: s?; 0}");
  }

  TEST_CASE("process names") {
    CHECK(process_names(parse_choreography_term("p.e -> q; 0")) == std::set<ProcessName>{"p", "q"});
    CHECK(process_names(chor::end()).empty());
    auto auth = parse_choreography(test::slurp(test::kCorpus / "auth.cc"));
    CHECK(process_names(auth) == std::set<ProcessName>{"a", "c", "s"});
  }

  TEST_CASE("corpus files round-trip through render") {
    auto sp = test::corpus_files(".sp");
    auto cc = test::corpus_files(".cc");
    REQUIRE(sp.size() >= 5);
    REQUIRE(cc.size() >= 30);
    for (const auto& f : sp) {
      CAPTURE(f);
      Network n = parse_network(test::slurp(f));
      CHECK(equal(parse_network(render(n)), n));
    }
    for (const auto& f : cc) {
      CAPTURE(f);
      auto p = parse_choreography(test::slurp(f));
      CHECK(equal(parse_choreography(render(p)), p));
    }
  }

  TEST_CASE("random choreographies round-trip through render") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 300; ++i) {
      ChoreographyProgram prog;
      prog.defs["X"] = random_chor(rng, 3, {"X", "Y"});
      prog.defs["Y"] = random_chor(rng, 2, {"X"});
      prog.main = random_chor(rng, 4, {"X", "Y"});
      std::string text = render(prog);
      CAPTURE(text);
      CHECK(equal(parse_choreography(text), prog));
    }
  }

  TEST_CASE("random networks round-trip through render") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 300; ++i) {
      Network n;
      int fresh = 0;
      for (const char* p : kProcs) {
        if (rng() % 4) n.processes[p] = random_beh(rng, 4, p, {}, fresh);
      }
      std::string text = render(n);
      CAPTURE(text);
      CHECK(equal(parse_network(text), n));
    }
  }

  TEST_CASE("comments are skipped") {
    auto n = parse_network("// header\np { /* inline */ q!x; 0 } | q { p?; 0 }");
    CHECK(n.processes.size() == 2);
  }
}
