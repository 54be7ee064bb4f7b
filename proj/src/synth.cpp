// SPDX-License-Identifier: Apache-2.0
#include "seql/synth.hpp"

#include <algorithm>
#include <random>

#include "seql/kag.hpp"
#include "seql/unroll.hpp"

namespace seql {

namespace {

template <class T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

GateKind complement(GateKind k) {
  switch (k) {
    case GateKind::And: return GateKind::Nand;
    case GateKind::Nand: return GateKind::And;
    case GateKind::Or: return GateKind::Nor;
    case GateKind::Nor: return GateKind::Or;
    case GateKind::Xor: return GateKind::Xnor;
    case GateKind::Xnor: return GateKind::Xor;
    case GateKind::Not: return GateKind::Buf;
    case GateKind::Buf: return GateKind::Not;
    default: return k;
  }
}

const std::vector<GateKind> kMonotoneish{GateKind::And, GateKind::Or, GateKind::Nand, GateKind::Nor};

}  // namespace

Netlist random_comb(std::size_t inputs, std::size_t outputs, std::size_t gates, std::uint64_t seed) {
  if (inputs == 0 || outputs == 0 || gates < outputs) throw std::invalid_argument("random_comb: bad sizes");
  static const std::vector<GateKind> kinds{GateKind::And, GateKind::Or,  GateKind::Nand, GateKind::Nor, GateKind::Xor,
                                           GateKind::Xnor, GateKind::Not, GateKind::Buf,  GateKind::Mux};
  std::mt19937_64 rng(seed);
  Netlist n("rand" + std::to_string(seed));
  std::vector<std::string> pool;
  for (std::size_t i = 0; i < inputs; ++i) {
    pool.push_back("x" + std::to_string(i));
    n.add_input(pool.back());
  }
  for (std::size_t i = 0; i < gates; ++i) {
    const GateKind k = pick(kinds, rng);
    std::size_t arity = 2;
    if (k == GateKind::Not || k == GateKind::Buf) arity = 1;
    if (k == GateKind::Mux) arity = 3;
    if (arity == 2 && (rng() & 3U) == 0) arity = 3;
    std::vector<std::string> fanin;
    for (std::size_t a = 0; a < arity; ++a) fanin.push_back(pick(pool, rng));
    const std::size_t first_out = gates - outputs;
    std::string name = i >= first_out ? "y" + std::to_string(i - first_out) : "g" + std::to_string(i);
    n.add_gate(name, k, std::move(fanin));
    pool.push_back(std::move(name));
  }
  for (std::size_t j = 0; j < outputs; ++j) n.add_output("y" + std::to_string(j));
  n.validate();
  return n;
}

Netlist mutate_comb(const Netlist& src, bool preserve, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Netlist n = src;
  std::vector<std::string> gates;
  for (const auto& g : n.gate_order()) {
    if (n.gate(g).kind != GateKind::Dff) gates.push_back(g);
  }
  if (gates.empty()) return n;
  if (preserve) {
    for (int r = 0; r < 3; ++r) {
      const std::string g = pick(gates, rng);
      const Gate old = n.gate(g);
      const std::string m = n.fresh_name(g + "_m");
      if (old.kind == GateKind::Mux) {
        n.add_gate(m, GateKind::Not, {old.fanin[0]});
        n.set_gate(g, GateKind::Mux, {m, old.fanin[2], old.fanin[1]});
      } else if ((old.kind == GateKind::And || old.kind == GateKind::Or) && (rng() & 1U) != 0) {
        // De Morgan: AND(a..) = NOR(NOT a..), OR(a..) = NAND(NOT a..)
        std::vector<std::string> inv;
        for (std::size_t i = 0; i < old.fanin.size(); ++i) {
          inv.push_back(n.fresh_name(g + "_n" + std::to_string(i)));
          n.add_gate(inv.back(), GateKind::Not, {old.fanin[i]});
        }
        n.set_gate(g, old.kind == GateKind::And ? GateKind::Nor : GateKind::Nand, inv);
      } else if (old.kind != GateKind::Const0 && old.kind != GateKind::Const1) {
        n.add_gate(m, complement(old.kind), old.fanin);
        n.set_gate(g, GateKind::Not, {m});
      }
    }
  } else {
    const std::string g = pick(gates, rng);
    Gate old = n.gate(g);
    if (old.fanin.size() >= 2 && old.kind != GateKind::Mux && (rng() & 1U) != 0) {
      static const std::vector<GateKind> two{GateKind::And, GateKind::Or,  GateKind::Nand,
                                             GateKind::Nor, GateKind::Xor, GateKind::Xnor};
      GateKind k = old.kind;
      while (k == old.kind) k = pick(two, rng);
      n.set_gate(g, k, old.fanin);
    } else if (!n.inputs().empty()) {
      const std::size_t i = std::uniform_int_distribution<std::size_t>(0, old.fanin.size() - 1)(rng);
      old.fanin[i] = pick(n.inputs(), rng);
      n.set_gate(g, old.kind, old.fanin);
    }
  }
  n.validate();
  return n;
}

namespace {

// Builds `count` gates ending in `out`, reading `required` (if set) and
// otherwise random members of `pool`.
void build_cone(Netlist& n, const std::string& out, const std::string& required,
                const std::vector<std::string>& pool, std::size_t count, std::mt19937_64& rng) {
  count = std::max<std::size_t>(count, 1);
  auto other = [&](const std::string& not_this) {
    for (int tries = 0; tries < 8; ++tries) {
      const auto& c = pick(pool, rng);
      if (c != not_this) return c;
    }
    return pick(pool, rng);
  };
  std::string last = required.empty() ? pick(pool, rng) : required;
  for (std::size_t i = 0; i < count; ++i) {
    const std::string name = i + 1 == count ? out : out + "_g" + std::to_string(i);
    n.add_gate(name, pick(kMonotoneish, rng), {last, other(last)});
    last = name;
  }
}

}  // namespace

Netlist pipeline_design(const PipelineOptions& o) {
  if (o.input_regs == 0) throw std::invalid_argument("pipeline needs at least one input register");
  if (o.primary_inputs == 0) throw std::invalid_argument("pipeline needs at least one primary input");
  std::mt19937_64 rng(o.seed);
  Netlist n("pipe" + std::to_string(o.seed));
  for (std::size_t i = 0; i < o.primary_inputs; ++i) n.add_input("in" + std::to_string(i));

  std::vector<std::string> ri;
  std::vector<std::string> fb;
  std::vector<std::string> ro;
  for (std::size_t k = 0; k < o.input_regs; ++k) {
    ri.push_back("ri" + std::to_string(k));
    n.add_gate(ri.back(), GateKind::Dff, {"in" + std::to_string(k % o.primary_inputs)});
  }
  for (std::size_t k = 0; k < o.feedback_regs; ++k) {
    fb.push_back("fb" + std::to_string(k));
    n.add_gate(fb.back(), GateKind::Dff, {fb.back() + "_d"});
  }
  for (std::size_t k = 0; k < o.output_regs; ++k) {
    ro.push_back("ro" + std::to_string(k));
    n.add_gate(ro.back(), GateKind::Dff, {ro.back() + "_d"});
    n.add_output(ro.back());
  }

  std::vector<std::string> pool = ri;
  pool.insert(pool.end(), fb.begin(), fb.end());
  for (std::size_t k = 0; k < fb.size(); ++k) {
    build_cone(n, fb[k] + "_d", fb[(k + 1) % fb.size()], pool, o.gates_per_reg, rng);
  }
  for (const auto& r : ro) build_cone(n, r + "_d", "", pool, o.gates_per_reg, rng);
  n.validate();
  return n;
}

Netlist sized_design(std::size_t gate_count, const PipelineOptions& o) {
  Netlist n = pipeline_design(o);
  if (n.gate_count() > gate_count) {
    throw std::invalid_argument("base pipeline already has " + std::to_string(n.gate_count()) + " gates");
  }
  const std::size_t deficit = gate_count - n.gate_count();
  if (deficit == 0) return n;
  std::mt19937_64 rng(o.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<std::string> pool;
  for (const auto& q : n.flip_flops()) {
    if (q.rfind("ro", 0) != 0) pool.push_back(q);
  }
  const std::string target = n.flip_flops().back();
  std::string last = n.d_net(target);
  for (std::size_t i = 0; i < deficit; ++i) {
    const std::string name = "pad" + std::to_string(i);
    n.add_gate(name, pick(kMonotoneish, rng), {last, pick(pool, rng)});
    last = name;
  }
  n.set_gate(target, GateKind::Dff, {last});
  n.validate();
  return n;
}

bool comb_key_identifiable(const LockedDesign& d) {
  const auto kc = d.correct_key.names(KeyRole::Comb);
  if (kc.empty()) return true;
  const Netlist partial = apply_key(
      d.netlist, d.correct_key,
      std::set<KeyRole>{KeyRole::FunctionalInput, KeyRole::ScanOutput, KeyRole::FunctionalOutput});
  const auto match = matching_keys(comb_view(partial), comb_view(d.original), kc);
  return std::count(match.begin(), match.end(), true) == 1;
}

bool comb_key_scan_identifiable(const LockedDesign& d, int cycles) {
  const auto kc = d.correct_key.names(KeyRole::Comb);
  if (kc.empty()) return true;
  KeyVector others = d.correct_key;
  for (const auto& k : kc) others.erase(k);
  const Netlist keyed = apply_key(unroll(d, cycles).comb, others);
  const auto match = matching_keys(keyed, unroll_oracle(d, cycles).comb, kc);
  return std::count(match.begin(), match.end(), true) == 1;
}

LockedDesign attack_benchmark(const PipelineOptions& opts, std::size_t comb_keys, std::uint64_t seed,
                              const std::vector<int>& scan_cycles) {
  for (std::uint64_t s = seed; s < seed + 200; ++s) {
    PipelineOptions o = opts;
    o.seed = s;
    const Netlist n = pipeline_design(o);
    LockedDesign d = make_design(n);
    if (comb_keys > 0) {
      std::vector<std::string> fb;
      for (const auto& q : n.flip_flops()) {
        if (q.rfind("fb", 0) == 0) fb.push_back(q);
      }
      insert_comb_keys(d, {comb_keys, s, fb});
    }
    if (!comb_key_identifiable(d)) continue;
    if (std::all_of(scan_cycles.begin(), scan_cycles.end(),
                    [&](int c) { return comb_key_scan_identifiable(d, c); })) {
      return d;
    }
  }
  throw LockError("no benchmark with identifiable combinational keys near seed " + std::to_string(seed));
}

}  // namespace seql
