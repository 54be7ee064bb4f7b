// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "seql/bench.hpp"
#include "seql/feedback.hpp"
#include "seql/netlist.hpp"
#include "seql/synth.hpp"
#include "support.hpp"

using namespace seql;

TEST_CASE("parse fig2a") {
  const Netlist n = testing::fig2a();
  CHECK(n.inputs() == std::vector<std::string>{"G_0", "G_1"});
  CHECK(n.outputs() == std::vector<std::string>{"G_7", "G_9"});
  CHECK(n.flip_flops() == std::vector<std::string>{"G_3", "G_5", "G_7", "G_9"});
  CHECK(n.gate_count() == 8);
  CHECK(n.d_net("G_7") == "G_6");
  CHECK(n.gate("G_2").kind == GateKind::Nor);
}

TEST_CASE("serialize then parse is the identity") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PipelineOptions o;
    o.feedback_regs = 2;
    o.seed = seed;
    const Netlist n = pipeline_design(o);
    const Netlist back = parse_bench(serialize_bench(n), n.name());
    CHECK(back == n);
  }
  const Netlist c = random_comb(5, 3, 30, 7);
  CHECK(parse_bench(serialize_bench(c), c.name()) == c);
}

TEST_CASE("keywords are case-insensitive and BUFF is a buffer") {
  const Netlist n = parse_bench("input(a)\nOutput(y)\nz = buff(a)\ny = not(z)\n");
  CHECK(n.gate("z").kind == GateKind::Buf);
  CHECK(n.gate("y").kind == GateKind::Not);
}

TEST_CASE("parse errors carry line numbers") {
  SUBCASE("syntax") {
    try {
      parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a,\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("duplicate definition") {
    CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\ny = BUF(a)\n"), ParseError);
  }
  SUBCASE("undefined reference") {
    try {
      parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a, b)\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("combinational cycle") {
    CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(y)\nx = AND(a, y)\ny = OR(x, a)\n"), ParseError);
  }
  SUBCASE("unknown gate") { CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(y)\ny = FOO(a)\n"), ParseError); }
  SUBCASE("flip-flop loops are not cycles") {
    CHECK_NOTHROW(parse_bench("INPUT(a)\nOUTPUT(q)\nq = DFF(d)\nd = XOR(q, a)\n"));
  }
}

TEST_CASE("complex cells decompose to their textbook functions") {
  const Netlist n = decompose_complex(
      "INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(d)\n"
      "OUTPUT(y1)\nOUTPUT(y2)\nOUTPUT(y3)\nOUTPUT(y4)\nOUTPUT(h_S)\nOUTPUT(h_C)\nOUTPUT(f_S)\nOUTPUT(f_C)\n"
      "y1 = AOI21(a, b, c)\ny2 = AOI22(a, b, c, d)\ny3 = OAI21(a, b, c)\ny4 = OAI22(a, b, c, d)\n"
      "h = HA(a, b)\nf = FA(a, b, c)\n");
  for (std::uint64_t p = 0; p < 16; ++p) {
    const bool a = p & 1, b = p & 2, c = p & 4, d = p & 8;
    const auto out = testing::ref_eval_index(n, p);
    CHECK(out[0] == !((a && b) || c));
    CHECK(out[1] == !((a && b) || (c && d)));
    CHECK(out[2] == !((a || b) && c));
    CHECK(out[3] == !((a || b) && (c || d)));
    CHECK(out[4] == (a != b));
    CHECK(out[5] == (a && b));
    CHECK(out[6] == ((a != b) != c));
    CHECK(out[7] == (int(a) + int(b) + int(c) >= 2));
  }
  CHECK_THROWS_AS(decompose_complex("INPUT(a)\nOUTPUT(y)\ny = AOI21(a, a)\n"), ParseError);
  CHECK_THROWS_AS(decompose_complex("INPUT(a)\nOUTPUT(y)\ny = MAJ3(a, a, a)\n"), ParseError);
}

TEST_CASE("comb_view exposes state as inputs and next state as outputs") {
  const Netlist c = comb_view(testing::fig2a());
  CHECK(c.flip_flops().empty());
  CHECK(c.inputs() == std::vector<std::string>{"G_0", "G_1", "G_3", "G_5", "G_7", "G_9"});
  CHECK(c.is_output(next_state_name("G_3")));
  CHECK(c.is_output("G_7"));
  // ns_G_3 = NOR(G_0, G_5)
  for (std::uint64_t p = 0; p < 64; ++p) {
    const auto out = testing::ref_eval_index(c, p);
    const bool g0 = p & 1, g5 = p & 8;
    const auto& outs = c.outputs();
    const auto idx = std::find(outs.begin(), outs.end(), next_state_name("G_3")) - outs.begin();
    CHECK(out[static_cast<std::size_t>(idx)] == !(g0 || g5));
  }
}

TEST_CASE("constant propagation preserves the function of the remaining inputs") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Netlist n = random_comb(6, 3, 25, seed);
    std::map<std::string, bool, std::less<>> k{{"x0", seed % 2 == 0}, {"x3", seed % 3 == 0}};
    const Netlist s = propagate_constants(n, k);
    CHECK(!s.is_input("x0"));
    CHECK(s.gate_count() <= n.gate_count() + 2);
    for (std::uint64_t p = 0; p < 16; ++p) {
      testing::Bits src{{"x0", k["x0"]}, {"x3", k["x3"]}};
      const std::vector<std::string> free{"x1", "x2", "x4", "x5"};
      for (std::size_t i = 0; i < free.size(); ++i) src[free[i]] = (p >> i) & 1;
      testing::Bits m1;
      testing::Bits m2;
      testing::Bits src2 = src;
      src2.erase("x0");
      src2.erase("x3");
      for (const auto& o : n.outputs()) {
        CHECK(testing::ref_value(n, o, src, m1) == testing::ref_value(s, o, src2, m2));
      }
    }
  }
}

TEST_CASE("feedback classification") {
  SUBCASE("fig2a") {
    const auto info = classify_feedback(testing::fig2a());
    REQUIRE(info.size() == 4);
    CHECK(info[0].has_feedback);
    CHECK(info[1].has_feedback);
    CHECK_FALSE(info[2].has_feedback);
    CHECK_FALSE(info[3].has_feedback);
  }
  SUBCASE("self loop") {
    const auto info = classify_feedback(parse_bench("INPUT(a)\nOUTPUT(q)\nq = DFF(d)\nd = AND(q, a)\n"));
    CHECK(info[0].has_feedback);
  }
  SUBCASE("pipeline registers") {
    PipelineOptions o;
    o.feedback_regs = 3;
    o.output_regs = 2;
    const Netlist n = pipeline_design(o);
    for (const auto& f : classify_feedback(n)) CHECK(f.has_feedback == (f.ff_net.rfind("fb", 0) == 0));
  }
  SUBCASE("a chain without a loop has no feedback") {
    const auto info =
        classify_feedback(parse_bench("INPUT(a)\nOUTPUT(r)\nq = DFF(a)\nr = DFF(q2)\nq2 = NOT(q)\n"));
    CHECK_FALSE(info[0].has_feedback);
    CHECK_FALSE(info[1].has_feedback);
  }
}

TEST_CASE("sized_design hits the requested gate count") {
  PipelineOptions o;
  o.feedback_regs = 4;
  o.output_regs = 8;
  o.seed = 3;
  const Netlist n = sized_design(500, o);
  CHECK(n.gate_count() == 500);
  CHECK_NOTHROW(n.validate());
}
