// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace seql {

enum class SolveStatus : std::uint8_t { Sat, Unsat, Timeout };

struct SolveLimits {
  double seconds = 60.0;
  std::uint64_t conflicts = std::numeric_limits<std::uint64_t>::max();
};

/// Incremental CDCL SAT solver: two watched literals, VSIDS branching with
/// phase saving, first-UIP learning with clause minimisation, Luby restarts
/// and activity-based learnt clause deletion.
///
/// Literals use the DIMACS convention (variable v >= 1, negation -v).
/// Clauses can be added between solve() calls; learnt clauses are kept since
/// they remain implied by the growing clause set. Solving under assumptions
/// does not add them permanently.
class SatSolver {
 public:
  explicit SatSolver(std::uint64_t seed = 0);

  int new_var();
  int var_count() const { return static_cast<int>(assigns_.size()); }

  /// Returns false once the clause set is unsatisfiable at level 0.
  bool add_clause(std::span<const int> lits);
  bool add_clause(std::initializer_list<int> lits) {
    return add_clause(std::span<const int>(lits.begin(), lits.size()));
  }

  SolveStatus solve(std::span<const int> assumptions = {}, const SolveLimits& limits = {});
  SolveStatus solve(std::initializer_list<int> assumptions, const SolveLimits& limits = {}) {
    return solve(std::span<const int>(assumptions.begin(), assumptions.size()), limits);
  }

  /// Value of a literal in the last model (valid after Sat).
  bool model_value(int lit) const;
  const std::vector<bool>& model() const { return model_; }

  bool okay() const { return ok_; }
  std::uint64_t conflicts() const { return stat_conflicts_; }
  std::uint64_t decisions() const { return stat_decisions_; }

 private:
  using Lit = std::uint32_t;
  using CRef = std::uint32_t;
  static constexpr CRef kNoReason = std::numeric_limits<CRef>::max();

  struct Clause {
    std::vector<Lit> lits;
    double activity = 0;
    bool learnt = false;
    bool deleted = false;
  };
  struct Watcher {
    CRef cref;
    Lit blocker;
  };

  static Lit to_lit(int dimacs);
  static std::uint32_t var(Lit l) { return l >> 1; }
  static bool sign(Lit l) { return (l & 1) != 0; }

  // 1 true, -1 false, 0 unassigned
  std::int8_t value(Lit l) const {
    const std::int8_t a = assigns_[var(l)];
    return sign(l) ? static_cast<std::int8_t>(-a) : a;
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit l, CRef reason);
  CRef propagate();
  void analyze(CRef conflict, std::vector<Lit>& learnt, int& backjump);
  bool redundant(Lit l) const;
  void cancel_until(int level);
  CRef attach(std::vector<Lit> lits, bool learnt);
  void reduce_db();
  bool locked(CRef c) const;

  void bump_var(std::uint32_t v);
  void bump_clause(Clause& c);
  void heap_insert(std::uint32_t v);
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  std::uint32_t heap_pop();
  bool heap_contains(std::uint32_t v) const { return heap_index_[v] >= 0; }

  SolveStatus search(std::uint64_t conflict_budget, std::span<const Lit> assumptions,
                     const SolveLimits& limits, bool& out_of_time);
  bool out_of_time(const SolveLimits& limits) const;

  std::vector<Clause> clauses_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<std::int8_t> assigns_;
  std::vector<int> level_;
  std::vector<CRef> reason_;
  std::vector<bool> polarity_;
  std::vector<double> activity_;
  std::vector<std::uint32_t> heap_;
  std::vector<int> heap_index_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  mutable std::vector<std::uint8_t> seen_;
  std::vector<bool> model_;

  double var_inc_ = 1.0;
  double cla_inc_ = 1.0;
  std::size_t learnt_count_ = 0;
  double max_learnts_ = 0;
  bool ok_ = true;
  std::mt19937_64 rng_;

  std::uint64_t stat_conflicts_ = 0;
  std::uint64_t stat_decisions_ = 0;
  std::uint64_t solve_conflicts_ = 0;
  double start_time_ = 0;
};

}  // namespace seql
