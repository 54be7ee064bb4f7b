// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seql/key.hpp"
#include "seql/netlist.hpp"
#include "seql/simulate.hpp"

namespace seql {

class ScanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScanChain {
  std::string si_port = "SI";
  std::string so_port = "SO";
  std::vector<std::string> order;  // flip-flops, SI side first

  bool operator==(const ScanChain&) const = default;
};

/// Ordered list of scan chains. Flat positions used by oracle queries run
/// chain by chain, SI to SO inside each chain.
struct ScanConfig {
  std::vector<ScanChain> chains;

  std::size_t ff_count() const;
  /// All flip-flops, chain by chain, SI side first.
  std::vector<std::string> load_order() const;
  /// All flip-flops in the order their bits leave the SO ports:
  /// chain by chain, SO side first.
  std::vector<std::string> unload_order() const;

  /// Every flip-flop of `n` appears in exactly one chain exactly once.
  void validate(const Netlist& n) const;

  bool operator==(const ScanConfig&) const = default;
};

/// One chain through all flip-flops in declaration order.
ScanConfig default_scan_config(const Netlist& n);

/// `CHAIN <si> <so>: ff1 ff2 ... ffn` per line, SI to SO order.
ScanConfig parse_chain_file(std::string_view text);
std::string serialize_chain_file(const ScanConfig& cfg);

/// A key gate inserted by a locking scheme; `net` is the gate's output.
struct KeyGate {
  std::string key;
  Polarity polarity = Polarity::Xor;
  std::string net;

  bool operator==(const KeyGate&) const = default;
};

/// How a scan flip-flop is locked.
///  - EffFo: one key gate on Q, shared by the functional fanout and the scan path.
///  - Seql: a key gate on the D input (FI) and one on the scan-only output (SQ);
///    the functional Q stays unencrypted.
struct FFLockStyle {
  enum class Kind : std::uint8_t { Unlocked, EffFo, Seql };

  Kind kind = Kind::Unlocked;
  std::optional<KeyGate> fo;
  std::optional<KeyGate> fi;
  std::optional<KeyGate> sq;

  /// Gate seen by the scan path after Q, if any.
  const std::optional<KeyGate>& scan_gate() const { return kind == Kind::EffFo ? fo : sq; }

  bool operator==(const FFLockStyle&) const = default;
};

using LockStyles = std::map<std::string, FFLockStyle, std::less<>>;

/// Unlocked device answering scan queries.
struct OracleConfig {
  Netlist netlist;
  ScanConfig chains;
  int cycles = 1;
};

/// Loads `scan_in` (load_order()) as the state, runs `cycles` capture
/// clocks and returns the state in unload_order(). `pi` holds one vector per
/// cycle over the primary inputs; empty means all-zero inputs.
std::vector<bool> oracle_query(const OracleConfig& cfg, const std::vector<bool>& scan_in,
                               const std::vector<std::vector<bool>>& pi = {});

/// Reusable form of oracle_query working on 64 patterns per word.
class Oracle {
 public:
  explicit Oracle(OracleConfig cfg);

  const OracleConfig& config() const { return cfg_; }
  std::size_t scan_width() const { return load_.size(); }
  std::size_t pi_width() const { return cfg_.netlist.inputs().size(); }

  /// Word forms: `scan_in` indexed like load_order(), `pi` as
  /// cycles * pi_width words (cycle-major) or empty for zero inputs.
  std::vector<std::uint64_t> query_words(std::span<const std::uint64_t> scan_in,
                                         std::span<const std::uint64_t> pi = {}) const;
  std::vector<bool> query(const std::vector<bool>& scan_in,
                          const std::vector<std::vector<bool>>& pi = {}) const;

 private:
  OracleConfig cfg_;
  CompiledNetlist compiled_;
  std::vector<std::size_t> load_;    // load position -> flip-flop source index
  std::vector<std::size_t> unload_;  // unload position -> flip-flop source index
};

/// Affine shift behaviour of one flip-flop under a key.
///   loaded   = scan_in  ^ load_parity
///   observed = captured ^ observe_parity
/// For SeqL the captured value is D ^ fi_parity; for EFF the functional value
/// is loaded ^ fo_parity.
struct ShiftParity {
  std::string ff;
  bool load_parity = false;
  bool observe_parity = false;
  bool fi_parity = false;
  bool fo_parity = false;
};

std::vector<ShiftParity> shift_semantics(const LockStyles& styles, const ScanChain& chain,
                                         const KeyVector& key);

/// Cycle-accurate model of a locked device in test mode: shifts `scan_in`
/// through the chains one clock at a time (each bit crosses the scan-path key
/// gates of the flip-flops it passes), runs `cycles` capture clocks on the
/// locked netlist with `key` applied, then shifts the state out. Inputs and
/// outputs use the same orderings as oracle_query.
std::vector<bool> locked_scan_query(const Netlist& locked, const ScanConfig& chains,
                                    const LockStyles& styles, const KeyVector& key,
                                    const std::vector<bool>& scan_in, int cycles,
                                    const std::vector<std::vector<bool>>& pi = {});

}  // namespace seql
