// SPDX-License-Identifier: Apache-2.0
#include "seql/netlist.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>
#include <unordered_map>

namespace seql {

namespace {

struct KindName {
  GateKind kind;
  std::string_view name;
};

constexpr std::array kKindNames{
    KindName{GateKind::And, "AND"},     KindName{GateKind::Or, "OR"},
    KindName{GateKind::Nand, "NAND"},   KindName{GateKind::Nor, "NOR"},
    KindName{GateKind::Xor, "XOR"},     KindName{GateKind::Xnor, "XNOR"},
    KindName{GateKind::Not, "NOT"},     KindName{GateKind::Buf, "BUF"},
    KindName{GateKind::Mux, "MUX"},     KindName{GateKind::Dff, "DFF"},
    KindName{GateKind::Const0, "CONST0"}, KindName{GateKind::Const1, "CONST1"},
};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::toupper(static_cast<unsigned char>(x)) ==
                  std::toupper(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::string_view to_string(GateKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<GateKind> parse_gate_kind(std::string_view keyword) {
  for (const auto& [k, name] : kKindNames) {
    if (iequals(keyword, name)) return k;
  }
  // Common alias in ISCAS files.
  if (iequals(keyword, "BUFF")) return GateKind::Buf;
  return std::nullopt;
}

bool arity_ok(GateKind kind, std::size_t n) {
  switch (kind) {
    case GateKind::Not:
    case GateKind::Buf:
    case GateKind::Dff:
      return n == 1;
    case GateKind::Mux:
      return n == 3;
    case GateKind::Const0:
    case GateKind::Const1:
      return n == 0;
    default:
      return n >= 2;
  }
}

bool Netlist::is_output(std::string_view net) const {
  return std::find(outputs_.begin(), outputs_.end(), net) != outputs_.end();
}

const Gate& Netlist::gate(std::string_view net) const {
  auto it = gates_.find(net);
  if (it == gates_.end()) throw NetlistError("no gate drives net '" + std::string(net) + "'");
  return it->second;
}

const Gate* Netlist::find_gate(std::string_view net) const {
  auto it = gates_.find(net);
  return it == gates_.end() ? nullptr : &it->second;
}

std::vector<std::string> Netlist::flip_flops() const {
  std::vector<std::string> ffs;
  for (const auto& net : order_) {
    if (gates_.find(net)->second.kind == GateKind::Dff) ffs.push_back(net);
  }
  return ffs;
}

bool Netlist::is_flip_flop(std::string_view net) const {
  const Gate* g = find_gate(net);
  return g != nullptr && g->kind == GateKind::Dff;
}

const std::string& Netlist::d_net(std::string_view q) const {
  const Gate& g = gate(q);
  if (g.kind != GateKind::Dff) throw NetlistError("net '" + std::string(q) + "' is not a flip-flop");
  return g.fanin.front();
}

void Netlist::add_input(std::string net) {
  if (has_net(net)) throw NetlistError("duplicate definition of net '" + net + "'");
  input_set_.insert(net);
  inputs_.push_back(std::move(net));
}

void Netlist::add_output(std::string net) {
  if (is_output(net)) throw NetlistError("duplicate output '" + net + "'");
  outputs_.push_back(std::move(net));
}

void Netlist::add_gate(std::string net, GateKind kind, std::vector<std::string> fanin) {
  if (has_net(net)) throw NetlistError("duplicate definition of net '" + net + "'");
  if (!arity_ok(kind, fanin.size())) {
    throw NetlistError("gate '" + net + "': " + std::string(to_string(kind)) + " cannot take " +
                       std::to_string(fanin.size()) + " inputs");
  }
  order_.push_back(net);
  gates_.emplace(std::move(net), Gate{kind, std::move(fanin)});
}

void Netlist::set_gate(std::string_view net, GateKind kind, std::vector<std::string> fanin) {
  auto it = gates_.find(net);
  if (it == gates_.end()) throw NetlistError("no gate drives net '" + std::string(net) + "'");
  if (!arity_ok(kind, fanin.size())) {
    throw NetlistError("gate '" + std::string(net) + "': bad arity for " + std::string(to_string(kind)));
  }
  it->second = Gate{kind, std::move(fanin)};
}

void Netlist::remove_gate(std::string_view net) {
  auto it = gates_.find(net);
  if (it == gates_.end()) throw NetlistError("no gate drives net '" + std::string(net) + "'");
  gates_.erase(it);
  order_.erase(std::find(order_.begin(), order_.end(), net));
}

void Netlist::remove_input(std::string_view net) {
  auto it = input_set_.find(net);
  if (it == input_set_.end()) throw NetlistError("no input '" + std::string(net) + "'");
  input_set_.erase(it);
  inputs_.erase(std::find(inputs_.begin(), inputs_.end(), net));
}

void Netlist::redirect_fanouts(std::string_view from, std::string_view to,
                               const std::set<std::string, std::less<>>& keep) {
  for (auto& [net, g] : gates_) {
    if (keep.contains(net)) continue;
    for (auto& in : g.fanin) {
      if (in == from) in = std::string(to);
    }
  }
}

std::vector<std::string> Netlist::fanouts(std::string_view net) const {
  std::vector<std::string> result;
  for (const auto& name : order_) {
    const auto& fanin = gates_.find(name)->second.fanin;
    if (std::find(fanin.begin(), fanin.end(), net) != fanin.end()) result.push_back(name);
  }
  return result;
}

std::string Netlist::fresh_name(std::string_view base) const {
  std::string candidate(base);
  for (int i = 1; has_net(candidate); ++i) candidate = std::string(base) + "_" + std::to_string(i);
  return candidate;
}

void Netlist::validate() const {
  for (const auto& in : inputs_) {
    if (gates_.contains(in)) throw NetlistError("primary input '" + in + "' is also driven by a gate");
  }
  for (const auto& net : order_) {
    const Gate& g = gates_.find(net)->second;
    if (!arity_ok(g.kind, g.fanin.size())) {
      throw NetlistError("gate '" + net + "': bad arity for " + std::string(to_string(g.kind)));
    }
    for (const auto& in : g.fanin) {
      if (!has_net(in)) throw NetlistError("gate '" + net + "' reads undefined net '" + in + "'");
    }
  }
  for (const auto& out : outputs_) {
    if (!has_net(out)) throw NetlistError("output '" + out + "' is undefined");
  }
  (void)topo_order();
}

std::vector<std::string> Netlist::topo_order() const {
  // Iterative DFS; DFF outputs and primary inputs terminate the search.
  enum class Mark : std::uint8_t { None, Active, Done };
  std::unordered_map<std::string_view, Mark> mark;
  mark.reserve(order_.size());
  std::vector<std::string> result;
  result.reserve(order_.size());

  for (const auto& root : order_) {
    if (gates_.find(root)->second.kind == GateKind::Dff) continue;
    if (mark[root] != Mark::None) continue;
    std::vector<std::pair<std::string_view, std::size_t>> stack{{root, 0}};
    mark[root] = Mark::Active;
    while (!stack.empty()) {
      auto& [net, next] = stack.back();
      const Gate& g = gates_.find(net)->second;
      if (next < g.fanin.size()) {
        std::string_view in = g.fanin[next++];
        auto git = gates_.find(in);
        if (git == gates_.end() || git->second.kind == GateKind::Dff) continue;
        Mark& m = mark[in];
        if (m == Mark::Active) {
          throw NetlistError("combinational cycle through net '" + std::string(in) + "'");
        }
        if (m == Mark::None) {
          m = Mark::Active;
          stack.emplace_back(git->first, 0);
        }
      } else {
        mark[net] = Mark::Done;
        result.emplace_back(net);
        stack.pop_back();
      }
    }
  }
  return result;
}

void Netlist::sweep() {
  std::set<std::string_view> live;
  std::vector<std::string_view> work;
  auto visit = [&](std::string_view net) {
    if (gates_.contains(net) && live.insert(net).second) work.push_back(net);
  };
  for (const auto& out : outputs_) visit(out);
  for (const auto& net : order_) {
    if (gates_.find(net)->second.kind == GateKind::Dff) visit(net);
  }
  while (!work.empty()) {
    auto net = work.back();
    work.pop_back();
    for (const auto& in : gates_.find(net)->second.fanin) visit(in);
  }
  std::vector<std::string> kept;
  kept.reserve(live.size());
  for (const auto& net : order_) {
    if (live.contains(net)) kept.push_back(net);
  }
  for (auto it = gates_.begin(); it != gates_.end();) {
    it = live.contains(it->first) ? std::next(it) : gates_.erase(it);
  }
  order_ = std::move(kept);
}

bool Netlist::operator==(const Netlist& other) const {
  return inputs_ == other.inputs_ && outputs_ == other.outputs_ && order_ == other.order_ &&
         gates_ == other.gates_;
}

std::string next_state_name(std::string_view q) { return "ns_" + std::string(q); }

Netlist comb_view(const Netlist& n) {
  Netlist view(n.name());
  const auto ffs = n.flip_flops();
  for (const auto& in : n.inputs()) view.add_input(in);
  for (const auto& q : ffs) view.add_input(q);
  for (const auto& net : n.gate_order()) {
    const Gate& g = n.gate(net);
    if (g.kind != GateKind::Dff) view.add_gate(net, g.kind, g.fanin);
  }
  for (const auto& out : n.outputs()) view.add_output(out);
  for (const auto& q : ffs) {
    auto ns = next_state_name(q);
    view.add_gate(ns, GateKind::Buf, {n.d_net(q)});
    view.add_output(ns);
  }
  return view;
}

namespace {

// Removes BUF gates that are neither primary outputs nor flip-flop data
// sources by wiring their readers straight to the buffered net.
void collapse_buffers(Netlist& n) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& net : std::vector<std::string>(n.gate_order())) {
      const Gate* g = n.find_gate(net);
      if (g == nullptr || g->kind != GateKind::Buf || n.is_output(net)) continue;
      std::string src = g->fanin.front();
      n.redirect_fanouts(net, src);
      n.remove_gate(net);
      changed = true;
    }
  }
}

}  // namespace

Netlist propagate_constants(const Netlist& n,
                            const std::map<std::string, bool, std::less<>>& constants) {
  Netlist out(n.name());
  for (const auto& in : n.inputs()) {
    if (!constants.contains(in)) out.add_input(in);
  }
  for (const auto& o : n.outputs()) out.add_output(o);

  std::unordered_map<std::string, bool> value;
  for (const auto& [net, v] : constants) value.emplace(net, v);

  const auto topo = n.topo_order();
  std::unordered_map<std::string_view, Gate> simplified;
  for (const auto& net : topo) {
    const Gate& g = n.gate(net);
    std::vector<std::string> live;
    std::vector<bool> fixed;
    for (const auto& in : g.fanin) {
      auto it = value.find(in);
      if (it == value.end()) {
        live.push_back(in);
      } else {
        fixed.push_back(it->second);
      }
    }
    auto set_const = [&](bool v) {
      value[net] = v;
      simplified[net] = Gate{v ? GateKind::Const1 : GateKind::Const0, {}};
    };
    auto keep = [&](GateKind kind, std::vector<std::string> fanin) {
      simplified[net] = Gate{kind, std::move(fanin)};
    };
    const bool any0 = std::find(fixed.begin(), fixed.end(), false) != fixed.end();
    const bool any1 = std::find(fixed.begin(), fixed.end(), true) != fixed.end();
    switch (g.kind) {
      case GateKind::Const0: set_const(false); break;
      case GateKind::Const1: set_const(true); break;
      case GateKind::Buf:
      case GateKind::Not:
        if (live.empty()) {
          set_const(fixed.front() != (g.kind == GateKind::Not));
        } else {
          keep(g.kind, live);
        }
        break;
      case GateKind::And:
      case GateKind::Nand:
      case GateKind::Or:
      case GateKind::Nor: {
        const bool is_and = g.kind == GateKind::And || g.kind == GateKind::Nand;
        const bool inverted = g.kind == GateKind::Nand || g.kind == GateKind::Nor;
        const bool controlling = is_and ? any0 : any1;
        if (controlling) {
          set_const(is_and ? inverted : !inverted);
        } else if (live.empty()) {
          set_const(is_and ? !inverted : inverted);
        } else if (live.size() == 1) {
          keep(inverted ? GateKind::Not : GateKind::Buf, live);
        } else {
          keep(g.kind, live);
        }
        break;
      }
      case GateKind::Xor:
      case GateKind::Xnor: {
        bool parity = g.kind == GateKind::Xnor;
        for (bool b : fixed) parity ^= b;
        if (live.empty()) {
          set_const(parity);
        } else if (live.size() == 1) {
          keep(parity ? GateKind::Not : GateKind::Buf, live);
        } else {
          keep(parity ? GateKind::Xnor : GateKind::Xor, live);
        }
        break;
      }
      case GateKind::Mux: {
        auto sel = value.find(g.fanin[0]);
        if (sel != value.end()) {
          const std::string& pick = g.fanin[sel->second ? 2 : 1];
          auto pv = value.find(pick);
          if (pv != value.end()) {
            set_const(pv->second);
          } else {
            keep(GateKind::Buf, {pick});
          }
        } else {
          auto a = value.find(g.fanin[1]);
          auto b = value.find(g.fanin[2]);
          if (a != value.end() && b != value.end() && a->second == b->second) {
            set_const(a->second);
          } else {
            // Constant data inputs stay as constant gates feeding the mux.
            keep(GateKind::Mux, g.fanin);
          }
        }
        break;
      }
      case GateKind::Dff:
        break;
    }
  }

  // Emit in original declaration order. Constant-valued internal nets that
  // still have readers (mux data inputs, DFF data, outputs) are materialised.
  for (const auto& net : n.gate_order()) {
    const Gate& g = n.gate(net);
    if (g.kind == GateKind::Dff) {
      out.add_gate(net, GateKind::Dff, g.fanin);
    } else {
      const Gate& s = simplified.at(net);
      out.add_gate(net, s.kind, s.fanin);
    }
  }
  // Any reference to a constant primary input must now point at a gate.
  for (const auto& [net, v] : constants) {
    if (!n.is_input(net)) continue;
    auto readers = out.fanouts(net);
    if (readers.empty() && !out.is_output(net)) continue;
    out.add_gate(net, v ? GateKind::Const1 : GateKind::Const0, {});
  }
  out.sweep();
  collapse_buffers(out);
  out.validate();
  return out;
}

}  // namespace seql
