// SPDX-License-Identifier: Apache-2.0
#include "seql/simulate.hpp"

namespace seql {

CompiledNetlist::CompiledNetlist(const Netlist& n) {
  auto add_slot = [&](const std::string& net) {
    slot_of_.emplace(net, slot_names_.size());
    slot_names_.push_back(net);
  };
  for (const auto& in : n.inputs()) add_slot(in);
  input_count_ = slot_names_.size();
  const auto ffs = n.flip_flops();
  for (const auto& q : ffs) add_slot(q);
  source_count_ = slot_names_.size();

  const auto topo = n.topo_order();
  for (const auto& net : topo) add_slot(net);
  ops_.reserve(topo.size());
  for (const auto& net : topo) {
    const Gate& g = n.gate(net);
    Op op{g.kind, static_cast<std::uint32_t>(slot(net)), static_cast<std::uint32_t>(args_.size()),
          static_cast<std::uint32_t>(g.fanin.size())};
    for (const auto& in : g.fanin) args_.push_back(static_cast<std::uint32_t>(slot(in)));
    ops_.push_back(op);
  }
  for (const auto& out : n.outputs()) output_slots_.push_back(slot(out));
  for (const auto& q : ffs) next_state_slots_.push_back(slot(n.d_net(q)));
}

std::size_t CompiledNetlist::slot(std::string_view net) const {
  auto it = slot_of_.find(std::string(net));
  if (it == slot_of_.end()) throw SimulationError("unknown net '" + std::string(net) + "'");
  return it->second;
}

void CompiledNetlist::eval(std::span<std::uint64_t> v) const {
  for (const Op& op : ops_) {
    const std::uint32_t* a = args_.data() + op.first;
    std::uint64_t r = 0;
    switch (op.kind) {
      case GateKind::And:
      case GateKind::Nand:
        r = ~std::uint64_t{0};
        for (std::uint32_t i = 0; i < op.count; ++i) r &= v[a[i]];
        if (op.kind == GateKind::Nand) r = ~r;
        break;
      case GateKind::Or:
      case GateKind::Nor:
        for (std::uint32_t i = 0; i < op.count; ++i) r |= v[a[i]];
        if (op.kind == GateKind::Nor) r = ~r;
        break;
      case GateKind::Xor:
      case GateKind::Xnor:
        for (std::uint32_t i = 0; i < op.count; ++i) r ^= v[a[i]];
        if (op.kind == GateKind::Xnor) r = ~r;
        break;
      case GateKind::Not: r = ~v[a[0]]; break;
      case GateKind::Buf: r = v[a[0]]; break;
      case GateKind::Mux: r = (v[a[0]] & v[a[2]]) | (~v[a[0]] & v[a[1]]); break;
      case GateKind::Const0: r = 0; break;
      case GateKind::Const1: r = ~std::uint64_t{0}; break;
      case GateKind::Dff: break;
    }
    v[op.out] = r;
  }
}

std::vector<std::uint64_t> CompiledNetlist::run(std::span<const std::uint64_t> sources) const {
  if (sources.size() != source_count_) throw SimulationError("source vector has wrong size");
  std::vector<std::uint64_t> values(slot_count(), 0);
  std::copy(sources.begin(), sources.end(), values.begin());
  eval(values);
  return values;
}

SimResult simulate(const Netlist& n, const BitAssignment& pi, const BitAssignment& state) {
  CompiledNetlist c(n);
  std::vector<std::uint64_t> sources(c.source_count());
  for (std::size_t s = 0; s < c.source_count(); ++s) {
    const auto& net = c.slot_name(s);
    const BitAssignment& from = s < c.input_count() ? pi : state;
    auto it = from.find(net);
    if (it == from.end()) {
      throw SimulationError(std::string(s < c.input_count() ? "input" : "state") +
                            " '" + net + "' has no assignment");
    }
    sources[s] = it->second ? 1 : 0;
  }
  auto values = c.run(sources);
  SimResult r;
  for (std::size_t i = 0; i < n.outputs().size(); ++i) {
    r.outputs[n.outputs()[i]] = (values[c.output_slots()[i]] & 1) != 0;
  }
  const auto ffs = n.flip_flops();
  for (std::size_t i = 0; i < ffs.size(); ++i) {
    r.next_state[ffs[i]] = (values[c.next_state_slots()[i]] & 1) != 0;
  }
  return r;
}

}  // namespace seql
