// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "seql/simulate.hpp"
#include "seql/synth.hpp"
#include "support.hpp"

using namespace seql;

TEST_CASE("simulate matches the reference interpreter") {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    PipelineOptions o;
    o.feedback_regs = 2;
    o.output_regs = 2;
    o.seed = seed;
    const Netlist n = pipeline_design(o);
    for (int trial = 0; trial < 10; ++trial) {
      BitAssignment pi;
      BitAssignment st;
      testing::Bits src;
      for (const auto& in : n.inputs()) src[in] = pi[in] = rng() & 1;
      for (const auto& q : n.flip_flops()) src[q] = st[q] = rng() & 1;
      const SimResult r = simulate(n, pi, st);
      testing::Bits memo;
      for (const auto& q : n.flip_flops()) CHECK(r.next_state.at(q) == testing::ref_value(n, n.d_net(q), src, memo));
      for (const auto& out : n.outputs()) CHECK(r.outputs.at(out) == testing::ref_value(n, out, src, memo));
    }
  }
}

TEST_CASE("compiled netlist evaluates 64 patterns per word") {
  const Netlist n = random_comb(7, 4, 40, 5);
  const CompiledNetlist c(n);
  std::vector<std::uint64_t> src(c.source_count());
  std::mt19937_64 rng(2);
  for (auto& w : src) w = rng();
  const auto all = c.run(src);
  for (int bit = 0; bit < 64; ++bit) {
    std::uint64_t index = 0;
    for (std::size_t i = 0; i < n.inputs().size(); ++i) index |= ((src[i] >> bit) & 1U) << i;
    const auto ref = testing::ref_eval_index(n, index);
    for (std::size_t o = 0; o < ref.size(); ++o) CHECK((((all[c.output_slots()[o]] >> bit) & 1U) != 0) == ref[o]);
  }
}

TEST_CASE("missing inputs are reported") {
  const Netlist n = testing::fig2a();
  CHECK_THROWS_AS(simulate(n, {{"G_0", false}}, {}), SimulationError);
}
