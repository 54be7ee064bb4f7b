// SPDX-License-Identifier: Apache-2.0
#include "seql/defense.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "seql/feedback.hpp"

namespace seql {

namespace {

bool is_seql(const LockedDesign& d, const std::string& ff) {
  auto it = d.styles.find(ff);
  return it != d.styles.end() && it->second.kind == FFLockStyle::Kind::Seql;
}

// Runs every configured check; true when none of them broke the design.
bool run_checks(const LockedDesign& d, const DefenseOptions& opts, std::vector<AttackReport>& reports) {
  reports.clear();
  bool resilient = true;
  for (const auto& c : opts.checks) {
    reports.push_back(verify_flow(d, c.cycles, c.kind, opts.limits, opts.unroll));
    if (reports.back().verdict == Verdict::Broken) resilient = false;
  }
  return resilient;
}

Polarity random_polarity(std::mt19937_64& rng) {
  return std::bernoulli_distribution(0.5)(rng) ? Polarity::Xnor : Polarity::Xor;
}

}  // namespace

ScanConfig separate_feedback_free_chain(const Netlist& n, const ScanConfig& chains) {
  std::set<std::string, std::less<>> feedback;
  for (const auto& info : classify_feedback(n)) {
    if (info.has_feedback) feedback.insert(info.ff_net);
  }
  ScanConfig out;
  ScanChain wof{"SI_wof", "SO_wof", {}};
  for (const auto& c : chains.chains) {
    ScanChain kept{c.si_port, c.so_port, {}};
    for (const auto& ff : c.order) (feedback.contains(ff) ? kept.order : wof.order).push_back(ff);
    if (!kept.order.empty()) out.chains.push_back(std::move(kept));
  }
  if (!wof.order.empty()) out.chains.push_back(std::move(wof));
  return out;
}

std::optional<std::string> next_lock_candidate(const LockedDesign& d) {
  std::set<std::string, std::less<>> feedback;
  for (const auto& info : classify_feedback(d.netlist)) {
    if (info.has_feedback) feedback.insert(info.ff_net);
  }
  std::optional<std::string> best;
  std::size_t best_dist = 0;
  for (const auto& chain : d.chains.chains) {
    const auto& order = chain.order;
    for (std::size_t i = order.size(); i-- > 0;) {
      const auto& ff = order[i];
      if (feedback.contains(ff) || d.style(ff).kind != FFLockStyle::Kind::Unlocked) continue;
      const std::size_t dist = order.size() - 1 - i;
      if (!best || dist < best_dist) {
        best = ff;
        best_dist = dist;
      }
      break;
    }
  }
  return best;
}

void restitch_to_suffix(LockedDesign& d, const std::string& ff) {
  for (auto& chain : d.chains.chains) {
    auto& order = chain.order;
    auto it = std::find(order.begin(), order.end(), ff);
    if (it == order.end()) continue;
    order.erase(it);
    std::size_t pos = order.size();
    while (pos > 0 && is_seql(d, order[pos - 1])) --pos;
    order.insert(order.begin() + static_cast<std::ptrdiff_t>(pos), ff);
    return;
  }
  throw LockError("flip-flop '" + ff + "' is not on any scan chain");
}

DefenseResult ibla(LockedDesign base, const DefenseOptions& opts) {
  if (!(opts.gamma > 0)) throw LockError("gamma must be positive");
  if (!next_lock_candidate(base)) throw LockError("no feedback-free flip-flop to lock");
  const double budget = opts.gamma * static_cast<double>(base.original.gate_count());
  auto scan_keys = [](const LockedDesign& d) {
    return d.correct_key.count(KeyRole::FunctionalInput) + d.correct_key.count(KeyRole::ScanOutput);
  };
  if (static_cast<double>(scan_keys(base) + 2) > budget) {
    throw LockError("budget exhausted: gamma " + std::to_string(opts.gamma) + " allows no FI-SQ pair on " +
                    std::to_string(base.original.gate_count()) + " gates");
  }

  std::mt19937_64 rng(opts.seed);
  DefenseResult r;
  r.design = std::move(base);
  r.design.seed = opts.seed;
  for (;;) {
    if (static_cast<double>(scan_keys(r.design) + 2) > budget) {
      r.note = "budget exhausted without corruption";
      break;
    }
    const auto ff = next_lock_candidate(r.design);
    if (!ff) {
      r.note = "no feedback-free flip-flop left";
      break;
    }
    restitch_to_suffix(r.design, *ff);
    const Polarity fi = random_polarity(rng);
    const Polarity sq = random_polarity(rng);
    lock_seql_ff(r.design, *ff, fi, sq);
    ++r.n;
    if (run_checks(r.design, opts, r.reports)) {
      r.resilient = true;
      break;
    }
  }
  return r;
}

DefenseResult ibla(const Netlist& s, const ScanConfig& chains, const DefenseOptions& opts) {
  return ibla(make_design(s, chains), opts);
}

DefenseResult ikpa(LockedDesign base, const DefenseOptions& opts) {
  if (base.comb_gates.size() < 2) throw LockError("need at least two combinational key gates to push");
  if (!next_lock_candidate(base)) throw LockError("no feedback-free flip-flop to lock");

  std::mt19937_64 rng(opts.seed);
  DefenseResult r;
  r.design = std::move(base);
  r.design.seed = opts.seed;
  for (;;) {
    if (r.design.comb_gates.size() < 2) {
      r.note = "no combinational key gates left";
      break;
    }
    const auto ff = next_lock_candidate(r.design);
    if (!ff) {
      r.note = "no feedback-free flip-flop left";
      break;
    }
    Polarity pol[2];
    for (auto& p : pol) {
      std::uniform_int_distribution<std::size_t> pick(0, r.design.comb_gates.size() - 1);
      const KeyGate g = r.design.comb_gates[pick(rng)];
      p = g.polarity;
      remove_comb_key(r.design, g.key);
    }
    restitch_to_suffix(r.design, *ff);
    lock_seql_ff(r.design, *ff, pol[0], pol[1]);
    ++r.n;
    if (run_checks(r.design, opts, r.reports)) {
      r.resilient = true;
      break;
    }
  }
  return r;
}

}  // namespace seql
