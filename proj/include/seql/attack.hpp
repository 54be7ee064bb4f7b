// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seql/key.hpp"
#include "seql/lock.hpp"
#include "seql/scan.hpp"
#include "seql/unroll.hpp"

namespace seql {

/// `Unverified` is what the bare attacks return when they found a key: only
/// verify_flow decides between BROKEN and RESILIENT.
enum class Verdict : std::uint8_t { Broken, Resilient, Timeout, NoKey, Unverified };
enum class AttackKind : std::uint8_t { Sat, DoubleDip };

std::string_view to_string(Verdict v);
std::string_view to_string(AttackKind k);
std::optional<AttackKind> parse_attack_kind(std::string_view s);

struct AttackLimits {
  double seconds = 60.0;
  std::size_t max_dips = std::numeric_limits<std::size_t>::max();
  std::uint64_t seed = 0;
};

/// One oracle query: instance inputs (scan_inputs then pi_inputs) and the
/// oracle's scan-out response in unload order.
struct IoPair {
  std::vector<bool> input;
  std::vector<bool> output;
};

struct AttackReport {
  std::optional<KeyVector> recovered_key;
  std::size_t dip_count = 0;
  bool scan_correct = false;
  bool functionally_equivalent = false;
  double elapsed_ms = 0.0;
  Verdict verdict = Verdict::NoKey;
  std::vector<IoPair> transcript;

  // Filled by verify_flow.
  std::optional<bool> kc_correct;  // empty when the design has no K_c
  std::vector<std::pair<std::string, bool>> phi;  // FI key -> net inversion
  std::size_t phi_nonzero = 0;
  std::string anomaly;
};

AttackReport sat_attack(const AttackInstance& inst, const OracleConfig& oracle, const AttackLimits& limits = {});

/// Each iteration asks for a pattern on which two distinct wrong-key pairs
/// disagree; when no such pattern is left, finishes with single DIPs.
AttackReport double_dip_attack(const AttackInstance& inst, const OracleConfig& oracle,
                               const AttackLimits& limits = {});

AttackReport run_attack(AttackKind kind, const AttackInstance& inst, const OracleConfig& oracle,
                        const AttackLimits& limits = {});

/// True when `key` reproduces every recorded oracle response on `inst`.
bool replay_consistent(const AttackInstance& inst, const KeyVector& key, const std::vector<IoPair>& transcript);

/// Unroll, attack, then judge the recovered key: scan-correct against the
/// unrolled oracle and functionally equivalent against the original design.
AttackReport verify_flow(const LockedDesign& d, int cycles, AttackKind kind, const AttackLimits& limits = {},
                         const UnrollOptions& opts = {});

struct ReportRow {
  std::string benchmark;
  std::string style;
  std::size_t n = 0;
  int cycles = 1;
  std::size_t dip_count = 0;
  double elapsed_ms = 0.0;
  Verdict verdict = Verdict::NoKey;
};

inline constexpr std::string_view kReportHeader = "benchmark,style,n,N,dip_count,elapsed_ms,verdict";

std::string to_csv_row(const ReportRow& r);
/// Parses a report CSV (header line required).
std::vector<ReportRow> parse_report_csv(std::string_view text);
std::optional<Verdict> parse_verdict(std::string_view s);

}  // namespace seql
