// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "seql/key.hpp"
#include "seql/netlist.hpp"
#include "seql/scan.hpp"

namespace seql {

class LockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A locked sequential design together with everything needed to attack and
/// verify it: the unlocked netlist that plays the oracle, the scan chains,
/// per-flip-flop lock styles and the correct key.
struct LockedDesign {
  Netlist original;
  Netlist netlist;
  ScanConfig chains;
  LockStyles styles;
  std::vector<KeyGate> comb_gates;  // K_c gates inside the combinational logic
  KeyVector correct_key;
  std::string key_prefix = "keyinput";
  std::uint64_t seed = 0;

  /// Flip-flops carrying a scan-lock (EFF or SeqL).
  std::vector<std::string> locked_ffs() const;
  std::size_t seql_count() const;
  const FFLockStyle& style(std::string_view ff) const;
};

/// Unlocked starting point; `chains` defaults to one chain in declaration order.
LockedDesign make_design(const Netlist& original, std::optional<ScanConfig> chains = std::nullopt);

/// Next unused `<prefix><i>` name.
std::string next_key_name(const LockedDesign& d);

/// Key gate on Q of `ff`, driving both its functional fanout and the scan path.
KeyGate lock_eff_ff(LockedDesign& d, std::string_view ff, Polarity polarity);

/// EFF-style locking of `ffs` with seeded-random polarities.
LockedDesign lock_eff(LockedDesign base, const std::vector<std::string>& ffs, std::uint64_t seed);
LockedDesign lock_eff(const Netlist& n, const ScanConfig& chains, const std::vector<std::string>& ffs,
                      std::uint64_t seed);

struct SeqlLock {
  KeyGate fi;
  KeyGate sq;
};

/// SeqL FI-SQ pair on a feedback-free flip-flop: key gate between the D cone
/// and the flip-flop, and key gate on the scan-only output.
SeqlLock lock_seql_ff(LockedDesign& d, std::string_view ff, Polarity fi_polarity, Polarity sq_polarity);

struct CombLockOptions {
  std::size_t count = 0;
  std::uint64_t seed = 0;
  /// When non-empty, key gates only go on nets in the fan-in cone of these
  /// flip-flops' data inputs.
  std::vector<std::string> cone_of;
};

/// Generic random XOR/XNOR inserter standing in for prior combinational
/// locking: each chosen gate `g` becomes `g = XOR/XNOR(g_pre, key)`.
void insert_comb_keys(LockedDesign& d, const CombLockOptions& opts);

/// Undoes one combinational key gate (the gate becomes a buffer) and drops
/// the key bit.
void remove_comb_key(LockedDesign& d, std::string_view key);

struct OverheadReport {
  std::size_t key_gate_count = 0;   // all key gates in the locked netlist
  std::size_t scan_key_gates = 0;   // K_fi + K_sq + K_fo
  std::size_t gate_count = 0;       // gates of the unlocked design
  double percent = 0.0;             // key_gate_count / gate_count * 100
};

OverheadReport overhead_report(const LockedDesign& d);

/// Recovers lock styles and K_c gates from a locked netlist and its key file
/// by following each key input to the gate it drives.
void infer_lock_structure(LockedDesign& d);

struct DesignFiles {
  std::filesystem::path bench;
  std::filesystem::path key;
  std::filesystem::path chain;
  std::filesystem::path oracle;
};

/// `<dir>/<stem>.bench`, `.key`, `.chain` and `.oracle.bench`.
DesignFiles design_files(const std::filesystem::path& dir, const std::string& stem);
/// Companion files of a locked bench path `x.bench`: `x.key`, `x.chain`, `x.oracle.bench`.
DesignFiles companion_files(const std::filesystem::path& locked_bench);

void save_design(const LockedDesign& d, const DesignFiles& files);
LockedDesign load_design(const DesignFiles& files);

}  // namespace seql
