// SPDX-License-Identifier: Apache-2.0
#include "seql/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <stdexcept>

namespace seql {

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

double luby(double y, int x) {
  int size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

constexpr double kVarDecay = 0.95;
constexpr double kClauseDecay = 0.999;
constexpr int kRestartUnit = 100;

}  // namespace

SatSolver::SatSolver(std::uint64_t seed) : rng_(seed) {}

SatSolver::Lit SatSolver::to_lit(int dimacs) {
  if (dimacs == 0) throw std::invalid_argument("literal 0 is not a valid literal");
  const auto v = static_cast<std::uint32_t>(std::abs(dimacs) - 1);
  return (v << 1) | (dimacs < 0 ? 1U : 0U);
}

int SatSolver::new_var() {
  const auto v = static_cast<std::uint32_t>(assigns_.size());
  assigns_.push_back(0);
  level_.push_back(0);
  reason_.push_back(kNoReason);
  polarity_.push_back((rng_() & 1) != 0);
  activity_.push_back(0.0);
  heap_index_.push_back(-1);
  seen_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return static_cast<int>(v) + 1;
}

bool SatSolver::add_clause(std::span<const int> dimacs) {
  if (!ok_) return false;
  if (decision_level() != 0) cancel_until(0);
  std::vector<Lit> lits;
  lits.reserve(dimacs.size());
  for (int d : dimacs) {
    if (std::abs(d) > var_count()) throw std::out_of_range("literal refers to unknown variable");
    lits.push_back(to_lit(d));
  }
  std::sort(lits.begin(), lits.end());
  std::vector<Lit> kept;
  kept.reserve(lits.size());
  for (std::size_t i = 0; i < lits.size(); ++i) {
    const Lit l = lits[i];
    if (!kept.empty() && kept.back() == l) continue;
    if (!kept.empty() && kept.back() == (l ^ 1U)) return true;  // tautology
    if (value(l) > 0) return true;
    if (value(l) < 0) continue;
    kept.push_back(l);
  }
  if (kept.empty()) {
    ok_ = false;
    return false;
  }
  if (kept.size() == 1) {
    enqueue(kept[0], kNoReason);
    if (propagate() != kNoReason) ok_ = false;
    return ok_;
  }
  attach(std::move(kept), false);
  return true;
}

SatSolver::CRef SatSolver::attach(std::vector<Lit> lits, bool learnt) {
  const auto cref = static_cast<CRef>(clauses_.size());
  watches_[lits[0]].push_back({cref, lits[1]});
  watches_[lits[1]].push_back({cref, lits[0]});
  Clause c;
  c.lits = std::move(lits);
  c.learnt = learnt;
  clauses_.push_back(std::move(c));
  if (learnt) ++learnt_count_;
  return cref;
}

void SatSolver::enqueue(Lit l, CRef reason) {
  const auto v = var(l);
  assigns_[v] = sign(l) ? -1 : 1;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(l);
}

// watches_[l] holds the clauses watching literal l; they are visited when l
// becomes false.
SatSolver::CRef SatSolver::propagate() {
  CRef conflict = kNoReason;
  while (qhead_ < trail_.size()) {
    const Lit p = trail_[qhead_++];
    const Lit false_lit = p ^ 1U;
    auto& ws = watches_[false_lit];
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ws.size()) {
      const Watcher w = ws[i];
      if (value(w.blocker) > 0) {
        ws[j++] = ws[i++];
        continue;
      }
      Clause& c = clauses_[w.cref];
      if (c.deleted) {
        ++i;
        continue;
      }
      if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
      ++i;
      const Lit first = c.lits[0];
      if (first != w.blocker && value(first) > 0) {
        ws[j++] = {w.cref, first};
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.lits.size(); ++k) {
        if (value(c.lits[k]) >= 0) {
          std::swap(c.lits[1], c.lits[k]);
          watches_[c.lits[1]].push_back({w.cref, first});
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = {w.cref, first};
      if (value(first) < 0) {
        conflict = w.cref;
        qhead_ = trail_.size();
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
    if (conflict != kNoReason) break;
  }
  return conflict;
}

bool SatSolver::redundant(Lit l) const {
  const CRef r = reason_[var(l)];
  if (r == kNoReason) return false;
  for (std::size_t k = 1; k < clauses_[r].lits.size(); ++k) {
    const auto v = var(clauses_[r].lits[k]);
    if (!seen_[v] && level_[v] > 0) return false;
  }
  return true;
}

void SatSolver::analyze(CRef conflict, std::vector<Lit>& learnt, int& backjump) {
  learnt.clear();
  learnt.push_back(0);
  int path = 0;
  bool have_p = false;
  Lit p = 0;
  std::size_t index = trail_.size();
  CRef confl = conflict;
  do {
    Clause& c = clauses_[confl];
    if (c.learnt) bump_clause(c);
    for (std::size_t j = have_p ? 1 : 0; j < c.lits.size(); ++j) {
      const Lit q = c.lits[j];
      const auto v = var(q);
      if (seen_[v] || level_[v] == 0) continue;
      bump_var(v);
      seen_[v] = 1;
      if (level_[v] >= decision_level()) {
        ++path;
      } else {
        learnt.push_back(q);
      }
    }
    while (!seen_[var(trail_[--index])]) {
    }
    p = trail_[index];
    have_p = true;
    confl = reason_[var(p)];
    seen_[var(p)] = 0;
    --path;
  } while (path > 0);
  learnt[0] = p ^ 1U;

  // Drop literals implied by the rest of the clause.
  std::vector<Lit> all(learnt.begin(), learnt.end());
  std::size_t keep = 1;
  for (std::size_t i = 1; i < learnt.size(); ++i) {
    if (!redundant(learnt[i])) learnt[keep++] = learnt[i];
  }
  learnt.resize(keep);
  for (Lit l : all) seen_[var(l)] = 0;

  backjump = 0;
  if (learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i) {
      if (level_[var(learnt[i])] > level_[var(learnt[max_i])]) max_i = i;
    }
    std::swap(learnt[1], learnt[max_i]);
    backjump = level_[var(learnt[1])];
  }
}

void SatSolver::cancel_until(int level) {
  if (decision_level() <= level) return;
  const auto stop = static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(level)]);
  for (std::size_t i = trail_.size(); i > stop; --i) {
    const Lit l = trail_[i - 1];
    const auto v = var(l);
    assigns_[v] = 0;
    reason_[v] = kNoReason;
    polarity_[v] = !sign(l);
    if (!heap_contains(v)) heap_insert(v);
  }
  trail_.resize(stop);
  trail_lim_.resize(static_cast<std::size_t>(level));
  qhead_ = trail_.size();
}

bool SatSolver::locked(CRef c) const {
  const Lit l = clauses_[c].lits[0];
  return value(l) > 0 && reason_[var(l)] == c;
}

void SatSolver::reduce_db() {
  std::vector<CRef> learnts;
  for (CRef c = 0; c < clauses_.size(); ++c) {
    if (clauses_[c].learnt && !clauses_[c].deleted) learnts.push_back(c);
  }
  std::sort(learnts.begin(), learnts.end(), [&](CRef a, CRef b) {
    const auto& ca = clauses_[a];
    const auto& cb = clauses_[b];
    if ((ca.lits.size() > 2) != (cb.lits.size() > 2)) return ca.lits.size() > 2;
    return ca.activity < cb.activity;
  });
  const double limit = cla_inc_ / static_cast<double>(std::max<std::size_t>(learnts.size(), 1));
  for (std::size_t i = 0; i < learnts.size(); ++i) {
    Clause& c = clauses_[learnts[i]];
    if (c.lits.size() <= 2 || locked(learnts[i])) continue;
    if (i < learnts.size() / 2 || c.activity < limit) {
      c.deleted = true;
      c.lits.clear();
      c.lits.shrink_to_fit();
      --learnt_count_;
    }
  }
}

void SatSolver::bump_var(std::uint32_t v) {
  activity_[v] += var_inc_;
  if (activity_[v] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_contains(v)) heap_up(static_cast<std::size_t>(heap_index_[v]));
}

void SatSolver::bump_clause(Clause& c) {
  c.activity += cla_inc_;
  if (c.activity > 1e20) {
    for (auto& cl : clauses_) {
      if (cl.learnt) cl.activity *= 1e-20;
    }
    cla_inc_ *= 1e-20;
  }
}

void SatSolver::heap_insert(std::uint32_t v) {
  heap_index_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

void SatSolver::heap_up(std::size_t i) {
  const auto v = heap_[i];
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (activity_[heap_[parent]] >= activity_[v]) break;
    heap_[i] = heap_[parent];
    heap_index_[heap_[i]] = static_cast<int>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_index_[v] = static_cast<int>(i);
}

void SatSolver::heap_down(std::size_t i) {
  const auto v = heap_[i];
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= heap_.size()) break;
    if (child + 1 < heap_.size() && activity_[heap_[child + 1]] > activity_[heap_[child]]) ++child;
    if (activity_[heap_[child]] <= activity_[v]) break;
    heap_[i] = heap_[child];
    heap_index_[heap_[i]] = static_cast<int>(i);
    i = child;
  }
  heap_[i] = v;
  heap_index_[v] = static_cast<int>(i);
}

std::uint32_t SatSolver::heap_pop() {
  const auto top = heap_.front();
  heap_index_[top] = -1;
  const auto last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_index_[last] = 0;
    heap_down(0);
  }
  return top;
}

bool SatSolver::out_of_time(const SolveLimits& limits) const {
  return now_seconds() - start_time_ > limits.seconds;
}

SolveStatus SatSolver::search(std::uint64_t conflict_budget, std::span<const Lit> assumptions,
                              const SolveLimits& limits, bool& timed_out) {
  std::uint64_t local_conflicts = 0;
  std::vector<Lit> learnt;
  for (;;) {
    const CRef confl = propagate();
    if (confl != kNoReason) {
      ++stat_conflicts_;
      ++solve_conflicts_;
      ++local_conflicts;
      if (decision_level() == 0) {
        ok_ = false;
        return SolveStatus::Unsat;
      }
      int backjump = 0;
      analyze(confl, learnt, backjump);
      cancel_until(backjump);
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoReason);
      } else {
        const CRef cref = attach(learnt, true);
        bump_clause(clauses_[cref]);
        enqueue(learnt[0], cref);
      }
      var_inc_ /= kVarDecay;
      cla_inc_ /= kClauseDecay;
      if ((solve_conflicts_ & 255U) == 0 && out_of_time(limits)) {
        timed_out = true;
        return SolveStatus::Timeout;
      }
      if (solve_conflicts_ >= limits.conflicts) {
        timed_out = true;
        return SolveStatus::Timeout;
      }
      continue;
    }

    if (local_conflicts >= conflict_budget) {
      cancel_until(0);
      return SolveStatus::Timeout;  // restart
    }
    if (static_cast<double>(learnt_count_) - static_cast<double>(trail_.size()) >= max_learnts_) {
      reduce_db();
    }

    Lit next = 0;
    bool have_next = false;
    while (static_cast<std::size_t>(decision_level()) < assumptions.size()) {
      const Lit a = assumptions[static_cast<std::size_t>(decision_level())];
      if (value(a) > 0) {
        trail_lim_.push_back(static_cast<int>(trail_.size()));
      } else if (value(a) < 0) {
        return SolveStatus::Unsat;
      } else {
        next = a;
        have_next = true;
        break;
      }
    }
    if (!have_next) {
      ++stat_decisions_;
      if ((stat_decisions_ & 4095U) == 0 && out_of_time(limits)) {
        timed_out = true;
        return SolveStatus::Timeout;
      }
      while (!heap_.empty()) {
        const auto v = heap_pop();
        if (assigns_[v] == 0) {
          next = (v << 1) | (polarity_[v] ? 0U : 1U);
          have_next = true;
          break;
        }
      }
      if (!have_next) return SolveStatus::Sat;
    }
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(next, kNoReason);
  }
}

SolveStatus SatSolver::solve(std::span<const int> assumptions, const SolveLimits& limits) {
  model_.clear();
  if (!ok_) return SolveStatus::Unsat;
  cancel_until(0);
  std::vector<Lit> assume;
  assume.reserve(assumptions.size());
  for (int a : assumptions) {
    if (std::abs(a) > var_count()) throw std::out_of_range("assumption refers to unknown variable");
    assume.push_back(to_lit(a));
  }
  start_time_ = now_seconds();
  solve_conflicts_ = 0;
  if (max_learnts_ == 0) {
    max_learnts_ = std::max(2000.0, static_cast<double>(clauses_.size()) / 3.0);
  }
  SolveStatus status = SolveStatus::Timeout;
  for (int restart = 0;; ++restart) {
    bool timed_out = false;
    const auto budget = static_cast<std::uint64_t>(luby(2.0, restart) * kRestartUnit);
    status = search(budget, assume, limits, timed_out);
    if (status != SolveStatus::Timeout || timed_out) break;
    max_learnts_ *= 1.05;
    if (out_of_time(limits)) break;
  }
  if (status == SolveStatus::Sat) {
    model_.resize(assigns_.size());
    for (std::size_t v = 0; v < assigns_.size(); ++v) model_[v] = assigns_[v] > 0;
  }
  cancel_until(0);
  return status;
}

bool SatSolver::model_value(int lit) const {
  const auto v = static_cast<std::size_t>(std::abs(lit) - 1);
  if (v >= model_.size()) throw std::out_of_range("no model value for literal");
  return lit > 0 ? model_[v] : !model_[v];
}

}  // namespace seql
