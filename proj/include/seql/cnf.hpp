// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <concepts>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "seql/netlist.hpp"
#include "seql/solver.hpp"

namespace seql {

class EncodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class S>
concept ClauseSink = requires(S& s, std::span<const int> clause) {
  { s.new_var() } -> std::convertible_to<int>;
  s.add_clause(clause);
};

/// Clause list with DIMACS literals, usable as a ClauseSink.
struct CnfFormula {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;
  std::unordered_map<std::string, int> net_lits;

  int new_var() { return ++num_vars; }
  void add_clause(std::span<const int> c) { clauses.emplace_back(c.begin(), c.end()); }
  int lit(std::string_view net) const;
};

using NetLits = std::unordered_map<std::string, int>;

/// Tseitin encoder. Buffers and inverters alias literals instead of creating
/// variables, and gates with constant inputs are folded.
template <ClauseSink Sink>
class CircuitEncoder {
 public:
  explicit CircuitEncoder(Sink& sink) : sink_(sink) {}

  int constant(bool v) {
    if (true_lit_ == 0) {
      true_lit_ = sink_.new_var();
      clause({true_lit_});
    }
    return v ? true_lit_ : -true_lit_;
  }
  bool is_const(int l) const { return true_lit_ != 0 && (l == true_lit_ || l == -true_lit_); }

  int fresh() { return sink_.new_var(); }

  int and_of(std::vector<int> ins) {
    std::vector<int> keep;
    for (int l : ins) {
      if (true_lit_ != 0 && l == -true_lit_) return l;
      if (true_lit_ != 0 && l == true_lit_) continue;
      keep.push_back(l);
    }
    if (keep.empty()) return constant(true);
    if (keep.size() == 1) return keep[0];
    const int o = fresh();
    std::vector<int> big{o};
    for (int l : keep) {
      clause({-o, l});
      big.push_back(-l);
    }
    sink_.add_clause(std::span<const int>(big));
    return o;
  }

  int or_of(std::vector<int> ins) {
    for (int& l : ins) l = -l;
    return -and_of(std::move(ins));
  }

  int xor2(int a, int b) {
    if (is_const(a)) return a == true_lit_ ? -b : b;
    if (is_const(b)) return b == true_lit_ ? -a : a;
    if (a == b) return constant(false);
    if (a == -b) return constant(true);
    const int o = fresh();
    clause({-o, a, b});
    clause({-o, -a, -b});
    clause({o, -a, b});
    clause({o, a, -b});
    return o;
  }

  // sel ? b : a
  int mux(int sel, int a, int b) {
    if (is_const(sel)) return sel == true_lit_ ? b : a;
    if (a == b) return a;
    const int o = fresh();
    clause({sel, -a, o});
    clause({sel, a, -o});
    clause({-sel, -b, o});
    clause({-sel, b, -o});
    clause({-a, -b, o});
    clause({a, b, -o});
    return o;
  }

  /// Literal that is true iff the two literal vectors differ somewhere.
  int differ(std::span<const int> x, std::span<const int> y) {
    std::vector<int> diffs;
    for (std::size_t i = 0; i < x.size(); ++i) diffs.push_back(xor2(x[i], y[i]));
    return or_of(std::move(diffs));
  }

  /// Encodes the combinational netlist `n`. Inputs already present in
  /// `lits` reuse those literals; other inputs get fresh variables. Returns
  /// the literal of every net.
  NetLits encode(const Netlist& n, NetLits lits = {}) {
    if (!n.flip_flops().empty()) {
      throw EncodeError("cannot encode sequential element '" + n.flip_flops().front() +
                        "'; use comb_view or unroll first");
    }
    for (const auto& in : n.inputs()) {
      if (!lits.contains(in)) lits.emplace(in, fresh());
    }
    std::vector<int> ins;
    for (const auto& net : n.topo_order()) {
      const Gate& g = n.gate(net);
      ins.clear();
      for (const auto& f : g.fanin) ins.push_back(lits.at(f));
      lits[net] = gate(g.kind, ins, net);
    }
    return lits;
  }

 private:
  void clause(std::initializer_list<int> c) { sink_.add_clause(std::span<const int>(c.begin(), c.size())); }

  int gate(GateKind kind, const std::vector<int>& ins, const std::string& net) {
    switch (kind) {
      case GateKind::And: return and_of(ins);
      case GateKind::Nand: return -and_of(ins);
      case GateKind::Or: return or_of(ins);
      case GateKind::Nor: return -or_of(ins);
      case GateKind::Xor:
      case GateKind::Xnor: {
        int acc = ins[0];
        for (std::size_t i = 1; i < ins.size(); ++i) acc = xor2(acc, ins[i]);
        return kind == GateKind::Xor ? acc : -acc;
      }
      case GateKind::Not: return -ins[0];
      case GateKind::Buf: return ins[0];
      case GateKind::Mux: return mux(ins[0], ins[1], ins[2]);
      case GateKind::Const0: return constant(false);
      case GateKind::Const1: return constant(true);
      case GateKind::Dff: break;
    }
    throw EncodeError("cannot encode sequential element '" + net + "'; use comb_view or unroll first");
  }

  Sink& sink_;
  int true_lit_ = 0;
};

/// Whole-netlist Tseitin encoding; `net_lits` maps every net to its literal.
CnfFormula tseitin(const Netlist& n);

void write_dimacs(std::ostream& os, const CnfFormula& f);
CnfFormula parse_dimacs(std::string_view text);

struct SolveOutcome {
  SolveStatus status = SolveStatus::Timeout;
  std::vector<bool> model;  // indexed by variable - 1
  bool value(int lit) const { return lit > 0 ? model.at(lit - 1) : !model.at(-lit - 1); }
};

SolveOutcome solve(const CnfFormula& f, std::span<const int> assumptions = {}, const SolveLimits& limits = {},
                   std::uint64_t seed = 0);

/// Two copies of the circuits sharing the inputs named in `shared`; outputs
/// are matched by name. `net_lits` holds `a:<net>` and `b:<net>` entries.
struct Miter {
  CnfFormula cnf;
  int diff = 0;  // true iff some matched output differs
};
Miter build_miter(const Netlist& a, const Netlist& b, const std::vector<std::string>& shared);

enum class Equivalence : std::uint8_t { Equivalent, Different, Unknown };

struct EquivalenceResult {
  Equivalence verdict = Equivalence::Unknown;
  std::unordered_map<std::string, bool> witness;  // inputs of a distinguishing pattern
};

/// Combinational equivalence. Both netlists must have the same input and
/// output names.
EquivalenceResult check_equivalence(const Netlist& a, const Netlist& b, const SolveLimits& limits = {});

}  // namespace seql
