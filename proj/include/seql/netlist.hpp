// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seql {

/// Gate primitives understood by the netlist IR.
///
/// `Const0`/`Const1` are zero-input constants. They only appear after
/// constant propagation (key application, tied primary inputs) and are
/// written as `n = CONST0()` in bench text.
enum class GateKind : std::uint8_t {
  And,
  Or,
  Nand,
  Nor,
  Xor,
  Xnor,
  Not,
  Buf,
  Mux,  // MUX(sel, a, b) = sel ? b : a
  Dff,
  Const0,
  Const1,
};

std::string_view to_string(GateKind kind);

/// Case-insensitive keyword lookup.
std::optional<GateKind> parse_gate_kind(std::string_view keyword);

bool arity_ok(GateKind kind, std::size_t fanin_count);

inline bool is_key_gate_kind(GateKind kind) {
  return kind == GateKind::Xor || kind == GateKind::Xnor;
}

struct Gate {
  GateKind kind{GateKind::Buf};
  std::vector<std::string> fanin;

  bool operator==(const Gate&) const = default;
};

class NetlistError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gate-level netlist: primary I/O, single-output gates keyed by their output
/// net, and D flip-flops written as `q = DFF(d)`.
///
/// Edits keep declaration order so that serialization is stable. Structural
/// invariants (no dangling fan-in, acyclic combinational part) are checked by
/// validate(), not by the individual edit calls, so a caller can go through
/// intermediate states while rewiring.
class Netlist {
 public:
  Netlist() = default;
  explicit Netlist(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  const std::vector<std::string>& inputs() const { return inputs_; }
  const std::vector<std::string>& outputs() const { return outputs_; }
  const std::vector<std::string>& gate_order() const { return order_; }

  std::size_t gate_count() const { return order_.size(); }
  bool is_input(std::string_view net) const { return input_set_.contains(net); }
  bool is_output(std::string_view net) const;
  bool has_gate(std::string_view net) const { return gates_.contains(net); }
  bool has_net(std::string_view net) const { return is_input(net) || has_gate(net); }

  const Gate& gate(std::string_view net) const;
  const Gate* find_gate(std::string_view net) const;

  /// DFF output nets in declaration order.
  std::vector<std::string> flip_flops() const;
  bool is_flip_flop(std::string_view net) const;
  /// Data input net of the flip-flop whose output is `q`.
  const std::string& d_net(std::string_view q) const;

  void add_input(std::string net);
  void add_output(std::string net);
  void add_gate(std::string net, GateKind kind, std::vector<std::string> fanin);
  void set_gate(std::string_view net, GateKind kind, std::vector<std::string> fanin);
  void remove_gate(std::string_view net);
  void remove_input(std::string_view net);

  /// Rewrites every fan-in reference to `from` into `to`, except inside the
  /// gates listed in `keep`.
  void redirect_fanouts(std::string_view from, std::string_view to,
                        const std::set<std::string, std::less<>>& keep = {});

  /// Names of gates that read `net`.
  std::vector<std::string> fanouts(std::string_view net) const;

  /// `base` if unused, otherwise `base_1`, `base_2`, ...
  std::string fresh_name(std::string_view base) const;

  /// Throws NetlistError on dangling fan-in, arity violations, inputs that
  /// are also gates, undefined outputs or a combinational cycle.
  void validate() const;

  /// Non-DFF gates in topological order (DFF outputs act as sources).
  std::vector<std::string> topo_order() const;

  /// Drops gates that reach neither a primary output nor a flip-flop.
  void sweep();

  bool operator==(const Netlist& other) const;

 private:
  std::string name_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::vector<std::string> order_;
  std::map<std::string, Gate, std::less<>> gates_;
  std::set<std::string, std::less<>> input_set_;
};

/// Next-state pseudo-output name used by comb_view() for flip-flop `q`.
std::string next_state_name(std::string_view q);

/// Combinational view: every DFF output becomes a pseudo-input (appended
/// after the primary inputs) and every DFF data input becomes a pseudo-output
/// `ns_<q>` (appended after the primary outputs).
Netlist comb_view(const Netlist& n);

/// Replaces the listed inputs by constants and simplifies. Dead logic is
/// swept afterwards; outputs that become constant are kept as CONST gates.
Netlist propagate_constants(const Netlist& n, const std::map<std::string, bool, std::less<>>& constants);

}  // namespace seql
