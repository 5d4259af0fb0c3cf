#include <doctest.h>

#include <random>

#include "chorex/epp.hpp"
#include "chorex/equivalence.hpp"
#include "chorex/extraction.hpp"
#include "chorex/generators.hpp"
#include "chorex/parser.hpp"
#include "chorex/printer.hpp"
#include "support.hpp"

using namespace chorex;

namespace {

ChoreographyProgram program_of(const char* file) { return parse_choreography(test::slurp(test::kCorpus / file)); }
Network network_of(const char* file) { return parse_network(test::slurp(test::kCorpus / file)); }

const State kSameSecret = {{"c", Value::constant("pwd")}, {"s", Value::constant("pwd")}};

}  // namespace

TEST_SUITE("equivalence") {
  TEST_CASE("depth 0 has only the empty trace") {
    CHECK(trace_set(program_of("auth.cc"), {}, 0) == std::set<Trace>{Trace{}});
  }

  TEST_CASE("authentication traces start with the password and a then") {
    auto traces = trace_set(program_of("auth.cc"), kSameSecret, 3);
    for (const auto& t : traces) {
      if (t.size() < 2) continue;
      CHECK(t[0] == "c.pwd -> a");
      CHECK(t[1] == "a=s:then");
    }
    CHECK(traces == trace_set(network_of("auth.sp"), kSameSecret, 3));
  }

  TEST_CASE("authentication choreography and network are bisimilar") {
    for (const auto& sigma : sample_states(program_of("auth.cc"))) {
      CHECK(bounded_bisim(program_of("auth.cc"), network_of("auth.sp"), sigma, 12));
    }
  }

  TEST_CASE("value mismatch is detected at depth 1") {
    auto r = check_bisim(parse_choreography("main = p.x -> q; 0"), parse_network("p { q!y; 0 } | q { p?; 0 }"), {},
                         {Mode::Sync, 1});
    CHECK_FALSE(r.equivalent);
    CHECK(!r.counterexample.empty());
  }

  TEST_CASE("two-bit protocol is equivalent under completions") {
    auto extracted = extract(network_of("two_bit.sp"), {Mode::Async});
    CHECK(bounded_bisim(extracted, network_of("two_bit.sp"), {}, 12, Mode::Async));
    CHECK(bounded_bisim(program_of("two_bit.cc"), network_of("two_bit.sp"), {}, 12, Mode::Async));
  }

  TEST_CASE("a sequential two-bit choreography is not") {
    auto seq = parse_choreography("def X = a.1 -> b; b.ack0 -> a; a.0 -> b; b.ack1 -> a; X\nmain = a.0 -> b; X");
    CHECK_FALSE(bounded_bisim(seq, network_of("two_bit.sp"), {}, 12, Mode::Async));
  }

  TEST_CASE("exchange multicom matches the asynchronous network") {
    auto c = parse_choreography("main = (p.* -> q | q.* -> p); 0");
    CHECK(bounded_bisim(c, network_of("exchange.sp"), {}, 6, Mode::Async));
    CHECK_FALSE(bounded_bisim(parse_choreography("main = p.* -> q; q.* -> p; 0"), network_of("exchange.sp"), {}, 6,
                              Mode::Async));
  }

  TEST_CASE("failure is monotone in depth") {
    auto c = parse_choreography("main = p.x -> q; q.y -> p; 0");
    auto n = parse_network("p { q!x; q?; 0 } | q { p?; p!z; 0 }");
    CHECK(bounded_bisim(c, n, {}, 1));
    CHECK_FALSE(bounded_bisim(c, n, {}, 2));
    CHECK_FALSE(bounded_bisim(c, n, {}, 5));
  }

  TEST_CASE("bisimilarity implies equal trace sets") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 30; ++i) {
      ChoreographyProgram prog;
      prog.main = random_finite_choreography(rng, 3, 4);
      Network n;
      try {
        n = epp(prog);
      } catch (const Error&) {
        continue;
      }
      for (const auto& sigma : sample_states(prog)) {
        CAPTURE(render(prog));
        REQUIRE(bounded_bisim(prog, n, sigma, 8));
        CHECK(trace_set(prog, sigma, 8) == trace_set(n, sigma, 8));
      }
    }
  }

  TEST_CASE("inlined definitions keep the traces") {
    auto prog = parse_choreography("def X = p.* -> q; q.* -> r; 0\nmain = r.* -> p; X");
    ChoreographyProgram nested;
    nested.main = inline_definitions(prog);
    CHECK(trace_set(prog, {}, 10) == trace_set(nested, {}, 10));
  }

  TEST_CASE("synchronous traces embed into asynchronous completions") {
    Network n = network_of("auth.sp");
    for (const auto& t : trace_set(n, kSameSecret, 6)) CHECK(async_embeds(n, kSameSecret, t));
    CHECK_FALSE(async_embeds(n, kSameSecret, Trace{"a -> c[ok]"}));
  }

  TEST_CASE("sampled states force both branches") {
    auto states = sample_states(parse_choreography("main = if p=q then 0 else 0"));
    bool then_seen = false, else_seen = false;
    for (const auto& s : states) {
      if (value_of(s, "p") == value_of(s, "q")) then_seen = true;
      else else_seen = true;
    }
    CHECK(then_seen);
    CHECK(else_seen);
  }
}
