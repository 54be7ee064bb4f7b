// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "seql/key.hpp"
#include "seql/lock.hpp"
#include "seql/netlist.hpp"

namespace seql {

/// FI and SQ gate polarities of one SeqL flip-flop.
struct PairPolarity {
  Polarity fi = Polarity::Xor;
  Polarity sq = Polarity::Xor;
};

/// Vertex labels are net-inversion bits (phi of the FI gate, sigma of the SQ
/// gate), so 00 is the identity pair whatever the gate types. Depth d holds
/// the d-th locked flip-flop counted from the scan-out end.
struct KagVertex {
  bool phi = false;
  bool sigma = false;
  int depth = 0;
  int parent = -1;
  bool edge_parity = false;  // parity of the edge from the parent
  bool path_parity = false;  // XOR of sigma from the root down to here
  std::vector<int> children;
};

class Kag {
 public:
  std::size_t depth() const { return polarities_.size(); }
  const std::vector<KagVertex>& vertices() const { return vertices_; }
  const KagVertex& root() const { return vertices_.front(); }
  const std::vector<PairPolarity>& polarities() const { return polarities_; }

  std::vector<int> leaves() const;
  /// (phi, sigma) per depth along the path from the root to `v`.
  std::vector<std::pair<bool, bool>> path(int v) const;
  /// Raw (FI key, SQ key) values along the path.
  std::vector<std::pair<bool, bool>> key_path(int v) const;

  /// Both child edges of every vertex carry the same parity.
  bool edge_parities_uniform() const;
  /// Every vertex above the last level has exactly two children and all
  /// leaves sit at full depth.
  bool full_binary() const;

 private:
  friend Kag build_kag(const std::vector<PairPolarity>& so_to_si);
  std::vector<PairPolarity> polarities_;
  std::vector<KagVertex> vertices_;
};

/// Builds the tree of scan-correct FI-SQ assignments; `so_to_si` lists the
/// locked flip-flops starting next to the scan-out port.
Kag build_kag(const std::vector<PairPolarity>& so_to_si);

/// SeqL flip-flops of `d` ordered from the scan-out end. Throws LockError
/// when they sit on more than one chain.
std::vector<std::string> seql_ffs_from_so(const LockedDesign& d);
std::vector<PairPolarity> kag_polarities(const LockedDesign& d);

/// Every chain carrying SeqL holds only SeqL flip-flops, no EFF lock
/// exists, and no SeqL output reaches a flip-flop data input.
bool closed_form_applies(const LockedDesign& d);

enum class CensusMethod : std::uint8_t { ClosedForm, BruteForce };

struct KeySpaceCensus {
  std::size_t n = 0;
  std::uint64_t total_keys = 0;
  std::uint64_t scan_correct_count = 0;
  std::uint64_t functional_correct_count = 0;
  std::uint64_t intersection_count = 0;
  double p = 0.0;
  std::string warning;
};

/// Brute force needs at most 24 key bits and at most 24 scan/data inputs.
KeySpaceCensus census(const LockedDesign& d, CensusMethod method);

/// For every key index (bit j of the index = value of the j-th key in
/// key.bits()), whether that key is scan-correct / functionally correct.
struct KeyClassification {
  std::vector<bool> scan_correct;
  std::vector<bool> functional_correct;
};
KeyClassification classify_keys(const LockedDesign& d);

/// Exhaustive matcher: for every assignment of `key_names`, whether `keyed`
/// agrees with `reference` on every input pattern. Both netlists must have
/// the same outputs and the same non-key inputs.
std::vector<bool> matching_keys(const Netlist& keyed, const Netlist& reference,
                                const std::vector<std::string>& key_names);

struct TruthRow {
  std::vector<bool> key;  // raw values, key.bits() order
  bool scan_correct = false;
  bool functional_correct = false;
};

struct TruthTable {
  std::vector<KeyBit> layout;
  std::vector<TruthRow> rows;  // row r holds key index r
};

/// At most 16 key bits.
TruthTable truth_table(const LockedDesign& d);

/// Canonical CSV: raw key columns, then `inv_<name>` net-inversion columns,
/// then the two flags. With `pair_columns`, SeqL pairs are listed from
/// the scan-out end as `fik_<j>,sqk_<j>` holding net-inversion values (a
/// trailing `'` marks XNOR gates, whose column is the complemented key) and
/// rows are ordered by those columns; other keys follow as raw columns.
void write_truth_table_csv(std::ostream& os, const LockedDesign& d, const TruthTable& t, bool pair_columns);

void write_census_csv(std::ostream& os, const std::vector<KeySpaceCensus>& rows);

}  // namespace seql
