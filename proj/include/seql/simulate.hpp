// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "seql/netlist.hpp"

namespace seql {

using BitAssignment = std::unordered_map<std::string, bool>;

struct SimResult {
  BitAssignment outputs;     // primary outputs
  BitAssignment next_state;  // keyed by flip-flop output net
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One clock of the netlist: combinational logic in topological order, then
/// next_state[q] = value at the D input of flip-flop q.
SimResult simulate(const Netlist& n, const BitAssignment& pi, const BitAssignment& state);

/// Netlist flattened into slot-indexed operations on 64-bit words, so each
/// bit position evaluates an independent pattern.
///
/// Sources are the primary inputs followed by the flip-flop outputs, in
/// netlist order.
class CompiledNetlist {
 public:
  explicit CompiledNetlist(const Netlist& n);

  std::size_t slot_count() const { return slot_names_.size(); }
  std::size_t input_count() const { return input_count_; }
  std::size_t source_count() const { return source_count_; }

  std::size_t slot(std::string_view net) const;
  const std::string& slot_name(std::size_t s) const { return slot_names_[s]; }

  const std::vector<std::size_t>& output_slots() const { return output_slots_; }
  /// D-input slot of each flip-flop (same order as the flip-flop sources).
  const std::vector<std::size_t>& next_state_slots() const { return next_state_slots_; }

  /// `values` holds slot_count() words with the sources already written.
  void eval(std::span<std::uint64_t> values) const;

  /// Convenience: evaluates from a vector of source words and returns all slots.
  std::vector<std::uint64_t> run(std::span<const std::uint64_t> sources) const;

 private:
  struct Op {
    GateKind kind;
    std::uint32_t out;
    std::uint32_t first;
    std::uint32_t count;
  };

  std::vector<std::string> slot_names_;
  std::unordered_map<std::string, std::size_t> slot_of_;
  std::vector<Op> ops_;
  std::vector<std::uint32_t> args_;
  std::vector<std::size_t> output_slots_;
  std::vector<std::size_t> next_state_slots_;
  std::size_t input_count_ = 0;
  std::size_t source_count_ = 0;
};

}  // namespace seql
