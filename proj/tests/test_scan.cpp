// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "seql/key.hpp"
#include "seql/scan.hpp"
#include "seql/simulate.hpp"
#include "seql/synth.hpp"
#include "support.hpp"

using namespace seql;

TEST_CASE("key file round trip") {
  KeyVector k;
  k.add({"keyinput0", false, KeyRole::FunctionalInput, Polarity::Xor});
  k.add({"keyinput1", true, KeyRole::ScanOutput, Polarity::Xnor});
  k.add({"kc", true, KeyRole::Comb, Polarity::Xor});
  k.add({"fo", false, KeyRole::FunctionalOutput, Polarity::Xor});
  CHECK(parse_key_file(serialize_key_file(k)) == k);
  CHECK(k.names(KeyRole::Comb) == std::vector<std::string>{"kc"});
  CHECK(k.count(KeyRole::ScanOutput) == 1);
  CHECK_THROWS_AS(parse_key_file("k0 2 Kc XOR\n"), KeyError);
  CHECK_THROWS_AS(parse_key_file("k0 1 Kx XOR\n"), KeyError);
  CHECK_THROWS_AS(k.add({"kc", false, KeyRole::Comb, Polarity::Xor}), KeyError);
}

TEST_CASE("net inversion of key gates") {
  CHECK_FALSE(net_inversion(false, Polarity::Xor));
  CHECK(net_inversion(true, Polarity::Xor));
  CHECK(net_inversion(false, Polarity::Xnor));
  CHECK_FALSE(net_inversion(true, Polarity::Xnor));
}

TEST_CASE("chain file and scan orders") {
  ScanConfig cfg;
  cfg.chains.push_back({"SI0", "SO0", {"a", "b", "c"}});
  cfg.chains.push_back({"SI1", "SO1", {"d", "e"}});
  CHECK(parse_chain_file(serialize_chain_file(cfg)) == cfg);
  CHECK(cfg.load_order() == std::vector<std::string>{"a", "b", "c", "d", "e"});
  CHECK(cfg.unload_order() == std::vector<std::string>{"c", "b", "a", "e", "d"});
  CHECK(cfg.ff_count() == 5);
}

TEST_CASE("chain validation") {
  const Netlist n = testing::fig2a();
  ScanConfig cfg = default_scan_config(n);
  CHECK_NOTHROW(cfg.validate(n));
  cfg.chains[0].order.pop_back();
  CHECK_THROWS_AS(cfg.validate(n), ScanError);
  cfg.chains[0].order.push_back("G_3");
  CHECK_THROWS_AS(cfg.validate(n), ScanError);
}

TEST_CASE("oracle query is load, capture, unload") {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    PipelineOptions o;
    o.feedback_regs = 2;
    o.seed = seed;
    const Netlist n = pipeline_design(o);
    const ScanConfig cfg = default_scan_config(n);
    for (int cycles : {1, 3}) {
      const OracleConfig oc{n, cfg, cycles};
      const auto load = cfg.load_order();
      const auto unload = cfg.unload_order();
      const auto scan_in = testing::random_bits(rng, load.size());
      std::vector<std::vector<bool>> pi;
      for (int c = 0; c < cycles; ++c) pi.push_back(testing::random_bits(rng, n.inputs().size()));

      BitAssignment state;
      for (std::size_t i = 0; i < load.size(); ++i) state[load[i]] = scan_in[i];
      for (int c = 0; c < cycles; ++c) {
        BitAssignment in;
        for (std::size_t i = 0; i < n.inputs().size(); ++i) in[n.inputs()[i]] = pi[c][i];
        state = simulate(n, in, state).next_state;
      }
      std::vector<bool> want;
      for (const auto& q : unload) want.push_back(state.at(q));
      CHECK(oracle_query(oc, scan_in, pi) == want);
      CHECK(Oracle(oc).query(scan_in, pi) == want);
    }
  }
}

TEST_CASE("shift parities of the SeqL example") {
  const LockedDesign d = testing::fig2c();
  KeyVector k = d.correct_key;
  const auto& s7 = d.style("G_7");
  const auto& s9 = d.style("G_9");
  // Invert both SQ gates and the G_9 FI gate.
  k.set(s7.sq->key, !k.value(s7.sq->key));
  k.set(s9.sq->key, !k.value(s9.sq->key));
  k.set(s9.fi->key, !k.value(s9.fi->key));
  REQUIRE(d.chains.chains.size() == 2);
  CHECK(d.chains.chains[1].order == std::vector<std::string>{"G_7", "G_9"});
  const auto sp = shift_semantics(d.styles, d.chains.chains[1], k);
  REQUIRE(sp.size() == 2);
  CHECK(sp[0].ff == "G_7");
  CHECK_FALSE(sp[0].load_parity);
  CHECK_FALSE(sp[0].observe_parity);  // sigma7 ^ sigma9 = 0
  CHECK_FALSE(sp[0].fi_parity);
  CHECK(sp[1].load_parity);  // crosses the SQ gate of G_7
  CHECK(sp[1].observe_parity);
  CHECK(sp[1].fi_parity);
  // The unlocked chain is untouched.
  for (const auto& x : shift_semantics(d.styles, d.chains.chains[0], k)) {
    CHECK_FALSE(x.load_parity);
    CHECK_FALSE(x.observe_parity);
  }
}

TEST_CASE("locked device with the correct key answers like the oracle") {
  std::mt19937_64 rng(8);
  for (const LockedDesign& d : {testing::fig2c(), testing::fig2a_eff()}) {
    const OracleConfig oc{d.original, d.chains, 2};
    for (int t = 0; t < 50; ++t) {
      const auto scan_in = testing::random_bits(rng, d.chains.ff_count());
      CHECK(locked_scan_query(d.netlist, d.chains, d.styles, d.correct_key, scan_in, 2) == oracle_query(oc, scan_in));
    }
  }
}
