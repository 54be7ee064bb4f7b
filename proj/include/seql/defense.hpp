// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seql/attack.hpp"
#include "seql/lock.hpp"

namespace seql {

struct ResilienceCheck {
  AttackKind kind = AttackKind::Sat;
  int cycles = 1;
};

struct DefenseOptions {
  double gamma = 0.05;  // |K_fi| + |K_sq| <= gamma * gate count
  std::uint64_t seed = 0;
  AttackLimits limits;
  /// Attacks run after each new lock; locking stops once none of them
  /// returns a functionally equivalent key.
  std::vector<ResilienceCheck> checks{{AttackKind::Sat, 1}};
  UnrollOptions unroll;
};

struct DefenseResult {
  LockedDesign design;
  std::size_t n = 0;       // SeqL-locked flip-flops
  bool resilient = false;  // last round of checks found no functionally equivalent key
  std::vector<AttackReport> reports;  // last round, one per check
  std::string note;
};

/// Moves every feedback-free flip-flop of `chains` (in chain order) onto a
/// chain of its own, `SI_wof` -> `SO_wof`, appended last. Chains left empty
/// are dropped.
ScanConfig separate_feedback_free_chain(const Netlist& n, const ScanConfig& chains);

/// Unlocked feedback-free flip-flop nearest to a scan-out port (ties go to
/// the lower chain index), or nothing.
std::optional<std::string> next_lock_candidate(const LockedDesign& d);

/// Moves `ff` within its chain to sit right before the SO-side run of
/// SeqL-locked flip-flops.
void restitch_to_suffix(LockedDesign& d, const std::string& ff);

/// Locks FI-SQ pairs from the scan-out end until the attacks stop recovering
/// a functionally correct key or the key-gate budget runs out. Throws
/// LockError when no feedback-free flip-flop exists or not even one pair fits
/// the budget.
DefenseResult ibla(LockedDesign base, const DefenseOptions& opts);
DefenseResult ibla(const Netlist& s, const ScanConfig& chains, const DefenseOptions& opts);

/// Trades combinational key gates for FI-SQ pairs, two for one, until the
/// attacks stop recovering a functionally correct key. The total key count
/// never grows. Throws LockError when the input has fewer than two K_c
/// gates or no feedback-free flip-flop.
DefenseResult ikpa(LockedDesign base, const DefenseOptions& opts);

}  // namespace seql
