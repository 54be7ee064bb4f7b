// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "seql/key.hpp"
#include "seql/lock.hpp"
#include "seql/netlist.hpp"

namespace seql {

struct UnrollOptions {
  /// Give every capture cycle its own primary inputs `pi_<cycle>_<name>`.
  /// Off by default: primary inputs are tied to 0, matching the oracle's
  /// default per-cycle inputs.
  bool expose_pis = false;
};

struct ScanPosition {
  std::string ff;
  std::size_t chain = 0;
  std::size_t position = 0;  // from the SI end
  std::string si_net;
  std::string so_net;
};

/// Combinational circuit seen by a scan attacker: inputs are `si_<ff>` (in
/// ScanConfig::load_order()), optional per-cycle primary inputs and the key
/// inputs; outputs are `so_<ff>` in ScanConfig::unload_order().
struct AttackInstance {
  Netlist comb;
  std::vector<ScanPosition> ff_map;  // load order
  std::vector<std::string> scan_inputs;
  std::vector<std::string> pi_inputs;  // cycle-major
  std::vector<std::string> key_inputs;
  KeyVector key_layout;  // names, roles and polarities of key_inputs; values zero
  int cycles = 1;
};

/// Load stage (scan-in bits crossing the scan-path key gates of their chain
/// predecessors), `cycles` copies of the locked combinational logic, and the
/// observe stage (captured values crossing their own and successors' scan
/// key gates).
AttackInstance unroll(const LockedDesign& d, int cycles, const UnrollOptions& opts = {});

/// Scan-mode behaviour of the unlocked design, i.e. the oracle as a circuit.
AttackInstance unroll_oracle(const LockedDesign& d, int cycles, const UnrollOptions& opts = {});

/// Substitutes key bits (optionally only those whose role is in `roles`) by
/// constants and simplifies. Every substituted name must be a netlist input.
Netlist apply_key(const Netlist& n, const KeyVector& key,
                  const std::optional<std::set<KeyRole>>& roles = std::nullopt);

}  // namespace seql
