// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "seql/netlist.hpp"

namespace seql {

struct FlipFlopInfo {
  std::string ff_net;  // Q
  std::string d_net;   // D
  bool has_feedback = false;
};

/// Flip-flop dependency graph: entry i lists the flip-flops j with a purely
/// combinational path from Q_j to D_i. Indices follow Netlist::flip_flops().
std::vector<std::vector<std::size_t>> ff_dependencies(const Netlist& n);

/// A flip-flop has feedback iff it lies on a cycle of the dependency graph
/// (a strongly connected component of size >= 2, or a self-loop).
std::vector<FlipFlopInfo> classify_feedback(const Netlist& n);

}  // namespace seql
