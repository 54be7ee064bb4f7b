// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seql/lock.hpp"
#include "seql/netlist.hpp"

namespace seql {

/// Random combinational netlist over inputs `x0..`, outputs `y0..`, using
/// every combinational gate kind.
Netlist random_comb(std::size_t inputs, std::size_t outputs, std::size_t gates, std::uint64_t seed);

/// Random rewrite of `n` with the same interface. With `preserve` the result
/// is equivalent (De Morgan / double-negation rewrites); otherwise one gate is
/// changed, which may or may not alter the function.
Netlist mutate_comb(const Netlist& n, bool preserve, std::uint64_t seed);

/// Pipelined sequential design:
///  - `ri<k>`: input registers loading primary inputs `in<k>`;
///  - `fb<k>`: state registers on a dependency ring (all have feedback);
///  - `ro<k>`: output registers whose Q only drives a primary output.
/// Register logic uses AND/OR/NAND/NOR over register outputs only, so scan
/// access controls all of it. Flip-flops are declared ri, fb, ro, so the
/// default chain runs SI -> ri -> fb -> ro -> SO.
struct PipelineOptions {
  std::size_t primary_inputs = 3;
  std::size_t input_regs = 3;
  std::size_t feedback_regs = 0;
  std::size_t output_regs = 2;
  std::size_t gates_per_reg = 3;
  std::uint64_t seed = 0;
};
Netlist pipeline_design(const PipelineOptions& opts);

/// pipeline_design padded with extra logic to exactly `gate_count` gates.
Netlist sized_design(std::size_t gate_count, const PipelineOptions& opts);

/// True when only the correct K_c assignment (other keys at their correct
/// values) gives a functionally equivalent design.
bool comb_key_identifiable(const LockedDesign& d);

/// True when only the correct K_c assignment (other keys at their correct
/// values) reproduces the oracle's scan responses over `cycles` captures
/// with primary inputs tied to 0.
bool comb_key_scan_identifiable(const LockedDesign& d, int cycles);

/// Small benchmark for attack experiments: a pipeline with feedback
/// registers and `comb_keys` K_c gates inside the feedback cones, drawn
/// from seeds starting at `seed` until the K_c bits are identifiable, both
/// functionally and through scan at every capture count in `scan_cycles`.
LockedDesign attack_benchmark(const PipelineOptions& opts, std::size_t comb_keys, std::uint64_t seed,
                              const std::vector<int>& scan_cycles = {});

}  // namespace seql
