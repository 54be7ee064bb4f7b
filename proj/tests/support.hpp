// SPDX-License-Identifier: Apache-2.0
// Shared fixtures and reference models for the test binaries. The reference
// evaluator here is deliberately naive (recursive, one bit at a time) so it
// shares no code with the library's simulators.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "seql/bench.hpp"
#include "seql/defense.hpp"
#include "seql/feedback.hpp"
#include "seql/synth.hpp"
#include "seql/unroll.hpp"
#include "seql/lock.hpp"
#include "seql/netlist.hpp"

namespace testing {

inline std::string bench_path(const std::string& file) { return std::string(SEQL_BENCH_DIR) + "/" + file; }

inline seql::Netlist fig2a() { return seql::read_bench_file(bench_path("fig2a.bench")); }

/// SeqL on the two output registers: G_7 with XOR/XOR, G_9 with XOR/XNOR.
/// The feedback-free registers sit on a chain of their own.
inline seql::LockedDesign fig2c() {
  const seql::Netlist n = fig2a();
  seql::LockedDesign d = seql::make_design(n, seql::separate_feedback_free_chain(n, seql::default_scan_config(n)));
  seql::lock_seql_ff(d, "G_7", seql::Polarity::Xor, seql::Polarity::Xor);
  seql::lock_seql_ff(d, "G_9", seql::Polarity::Xor, seql::Polarity::Xnor);
  return d;
}

/// EFF on the first two flip-flops: XOR on G_3, XNOR on G_5.
inline seql::LockedDesign fig2a_eff() {
  seql::LockedDesign d = seql::make_design(fig2a());
  seql::lock_eff_ff(d, "G_3", seql::Polarity::Xor);
  seql::lock_eff_ff(d, "G_5", seql::Polarity::Xnor);
  return d;
}

using Bits = std::unordered_map<std::string, bool>;

/// Value of `net` given values of inputs and flip-flop outputs.
inline bool ref_value(const seql::Netlist& n, const std::string& net, const Bits& src, Bits& memo) {
  if (auto it = src.find(net); it != src.end()) return it->second;
  if (auto it = memo.find(net); it != memo.end()) return it->second;
  const seql::Gate& g = n.gate(net);
  std::vector<bool> in;
  for (const auto& f : g.fanin) in.push_back(ref_value(n, f, src, memo));
  bool v = false;
  using K = seql::GateKind;
  switch (g.kind) {
    case K::And: v = true; for (bool b : in) v = v && b; break;
    case K::Nand: v = true; for (bool b : in) v = v && b; v = !v; break;
    case K::Or: v = false; for (bool b : in) v = v || b; break;
    case K::Nor: v = false; for (bool b : in) v = v || b; v = !v; break;
    case K::Xor: v = false; for (bool b : in) v = v != b; break;
    case K::Xnor: v = true; for (bool b : in) v = v != b; break;
    case K::Not: v = !in[0]; break;
    case K::Buf: v = in[0]; break;
    case K::Mux: v = in[0] ? in[2] : in[1]; break;
    case K::Const0: v = false; break;
    case K::Const1: v = true; break;
    case K::Dff: throw std::logic_error("flip-flop output missing from sources: " + net);
  }
  memo[net] = v;
  return v;
}

/// Outputs of a combinational netlist for the input pattern `index` (bit i
/// = value of the i-th input).
inline std::vector<bool> ref_eval_index(const seql::Netlist& n, std::uint64_t index) {
  Bits src;
  for (std::size_t i = 0; i < n.inputs().size(); ++i) src[n.inputs()[i]] = ((index >> i) & 1U) != 0;
  Bits memo;
  std::vector<bool> out;
  for (const auto& o : n.outputs()) out.push_back(ref_value(n, o, src, memo));
  return out;
}

/// Exhaustive comparison of two combinational netlists with the same input
/// names (matched by name) and outputs (matched by name).
inline bool ref_equivalent(const seql::Netlist& a, const seql::Netlist& b) {
  const auto& ins = a.inputs();
  for (std::uint64_t p = 0; p < (std::uint64_t{1} << ins.size()); ++p) {
    Bits src;
    for (std::size_t i = 0; i < ins.size(); ++i) src[ins[i]] = ((p >> i) & 1U) != 0;
    Bits ma;
    Bits mb;
    for (const auto& o : a.outputs()) {
      if (ref_value(a, o, src, ma) != ref_value(b, o, src, mb)) return false;
    }
  }
  return true;
}

inline std::vector<bool> random_bits(std::mt19937_64& rng, std::size_t n) {
  std::vector<bool> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = (rng() & 1U) != 0;
  return v;
}

/// Pipeline with feedback registers, split over one or two chains, with
/// SeqL locks on random feedback-free flip-flops (anywhere on the chain),
/// EFF locks on some other flip-flops and a few K_c gates.
inline seql::LockedDesign random_locked_design(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  seql::PipelineOptions o;
  o.primary_inputs = 2 + rng() % 2;
  o.input_regs = 2 + rng() % 3;
  o.feedback_regs = 1 + rng() % 3;
  o.output_regs = 1 + rng() % 3;
  o.gates_per_reg = 2 + rng() % 3;
  o.seed = seed;
  const seql::Netlist n = seql::pipeline_design(o);
  auto ffs = n.flip_flops();
  std::shuffle(ffs.begin(), ffs.end(), rng);
  seql::ScanConfig chains;
  const std::size_t split = (rng() & 1U) != 0 ? ffs.size() / 2 : ffs.size();
  chains.chains.push_back({"SI0", "SO0", {ffs.begin(), ffs.begin() + static_cast<std::ptrdiff_t>(split)}});
  if (split < ffs.size()) {
    chains.chains.push_back({"SI1", "SO1", {ffs.begin() + static_cast<std::ptrdiff_t>(split), ffs.end()}});
  }
  seql::LockedDesign d = seql::make_design(n, chains);
  seql::insert_comb_keys(d, {1 + rng() % 2, seed, {}});
  auto pol = [&] { return (rng() & 1U) != 0 ? seql::Polarity::Xnor : seql::Polarity::Xor; };
  for (const auto& info : seql::classify_feedback(n)) {
    const auto r = rng() % 3;
    if (r == 0 && !info.has_feedback) {
      const auto fi = pol();
      const auto sq = pol();
      seql::lock_seql_ff(d, info.ff_net, fi, sq);
    } else if (r == 1) {
      seql::lock_eff_ff(d, info.ff_net, pol());
    }
  }
  return d;
}

/// Evaluates an attack instance with the reference interpreter.
inline std::vector<bool> eval_instance(const seql::AttackInstance& inst, const std::vector<bool>& scan_in,
                                       const std::vector<std::vector<bool>>& pi, const seql::KeyVector& key,
                                       const std::vector<std::string>& pi_names) {
  Bits src;
  for (std::size_t i = 0; i < inst.scan_inputs.size(); ++i) src[inst.scan_inputs[i]] = scan_in[i];
  for (std::size_t c = 0; c < pi.size(); ++c) {
    for (std::size_t i = 0; i < pi_names.size(); ++i) {
      const std::string name = "pi_" + std::to_string(c + 1) + "_" + pi_names[i];
      if (inst.comb.is_input(name)) src[name] = pi[c][i];
    }
  }
  for (const auto& k : inst.key_inputs) src[k] = key.value(k);
  Bits memo;
  std::vector<bool> out;
  for (const auto& o : inst.comb.outputs()) out.push_back(ref_value(inst.comb, o, src, memo));
  return out;
}

}  // namespace testing
