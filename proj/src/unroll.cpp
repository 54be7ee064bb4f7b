// SPDX-License-Identifier: Apache-2.0
#include "seql/unroll.hpp"

#include <functional>
#include <unordered_map>

namespace seql {

namespace {

GateKind gate_kind(Polarity p) { return p == Polarity::Xor ? GateKind::Xor : GateKind::Xnor; }

AttackInstance build_instance(const Netlist& locked, const ScanConfig& chains, const LockStyles& styles,
                              const KeyVector& key, int cycles, const UnrollOptions& opts) {
  if (cycles < 1) throw ScanError("capture cycle count must be >= 1");
  AttackInstance inst;
  inst.cycles = cycles;
  Netlist& out = inst.comb;
  out.set_name(locked.name() + "_unrolled");

  std::vector<std::string> pis;
  for (const auto& in : locked.inputs()) {
    if (!key.contains(in)) pis.push_back(in);
  }

  for (const auto& ff : chains.load_order()) {
    inst.scan_inputs.push_back("si_" + ff);
    out.add_input(inst.scan_inputs.back());
  }
  std::map<std::string, bool, std::less<>> tied;
  for (int c = 1; c <= cycles; ++c) {
    for (const auto& p : pis) {
      std::string name = "pi_" + std::to_string(c) + "_" + p;
      out.add_input(name);
      if (opts.expose_pis) {
        inst.pi_inputs.push_back(name);
      } else {
        tied.emplace(name, false);
      }
    }
  }
  for (const auto& k : key.bits()) {
    if (!locked.is_input(k.name)) continue;
    inst.key_inputs.push_back(k.name);
    inst.key_layout.add({k.name, false, k.role, k.polarity});
    out.add_input(k.name);
  }

  auto scan_gate = [&](const std::string& ff) -> const std::optional<KeyGate>* {
    auto it = styles.find(ff);
    if (it == styles.end()) return nullptr;
    const auto& g = it->second.scan_gate();
    return g ? &g : nullptr;
  };

  // Load stage.
  std::unordered_map<std::string, std::string> loaded;
  for (std::size_t ci = 0; ci < chains.chains.size(); ++ci) {
    const auto& order = chains.chains[ci].order;
    for (std::size_t k = 0; k < order.size(); ++k) {
      std::string cur = "si_" + order[k];
      for (std::size_t j = 0; j < k; ++j) {
        if (const auto* g = scan_gate(order[j])) {
          std::string net = "ld_" + order[k] + "_" + std::to_string(j);
          out.add_gate(net, gate_kind((*g)->polarity), {cur, (*g)->key});
          cur = net;
        }
      }
      loaded.emplace(order[k], cur);
    }
  }

  // Capture copies.
  const auto topo = locked.topo_order();
  std::function<std::string(int, const std::string&)> resolve = [&](int c, const std::string& net) -> std::string {
    if (key.contains(net)) return net;
    if (locked.is_input(net)) return "pi_" + std::to_string(c) + "_" + net;
    if (locked.is_flip_flop(net)) return c == 1 ? loaded.at(net) : resolve(c - 1, locked.d_net(net));
    return "c" + std::to_string(c) + "_" + net;
  };
  for (int c = 1; c <= cycles; ++c) {
    for (const auto& net : topo) {
      const Gate& g = locked.gate(net);
      std::vector<std::string> fanin;
      fanin.reserve(g.fanin.size());
      for (const auto& in : g.fanin) fanin.push_back(resolve(c, in));
      out.add_gate(resolve(c, net), g.kind, std::move(fanin));
    }
  }

  // Observe stage.
  std::unordered_map<std::string, std::string> so_net;
  for (std::size_t ci = 0; ci < chains.chains.size(); ++ci) {
    const auto& order = chains.chains[ci].order;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::string so = "so_" + order[k];
      std::string cur = resolve(cycles, locked.d_net(order[k]));
      std::vector<const KeyGate*> path;
      for (std::size_t j = k; j < order.size(); ++j) {
        if (const auto* g = scan_gate(order[j])) path.push_back(&**g);
      }
      if (path.empty()) {
        out.add_gate(so, GateKind::Buf, {cur});
      }
      for (std::size_t t = 0; t < path.size(); ++t) {
        std::string net = t + 1 == path.size() ? so : "ob_" + order[k] + "_" + std::to_string(t);
        out.add_gate(net, gate_kind(path[t]->polarity), {cur, path[t]->key});
        cur = net;
      }
      so_net.emplace(order[k], so);
      inst.ff_map.push_back({order[k], ci, k, "si_" + order[k], so});
    }
  }
  for (const auto& ff : chains.unload_order()) out.add_output(so_net.at(ff));

  out.sweep();
  if (!tied.empty()) {
    out = propagate_constants(out, tied);
  } else {
    out.validate();
  }
  return inst;
}

}  // namespace

AttackInstance unroll(const LockedDesign& d, int cycles, const UnrollOptions& opts) {
  return build_instance(d.netlist, d.chains, d.styles, d.correct_key, cycles, opts);
}

AttackInstance unroll_oracle(const LockedDesign& d, int cycles, const UnrollOptions& opts) {
  return build_instance(d.original, d.chains, {}, KeyVector{}, cycles, opts);
}

Netlist apply_key(const Netlist& n, const KeyVector& key, const std::optional<std::set<KeyRole>>& roles) {
  std::map<std::string, bool, std::less<>> constants;
  for (const auto& b : key.bits()) {
    if (roles && !roles->contains(b.role)) continue;
    if (!n.is_input(b.name)) throw KeyError("key bit '" + b.name + "' is not an input of '" + n.name() + "'");
    constants.emplace(b.name, b.value);
  }
  return propagate_constants(n, constants);
}

}  // namespace seql
