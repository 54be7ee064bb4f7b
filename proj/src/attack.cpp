// SPDX-License-Identifier: Apache-2.0
#include "seql/attack.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "seql/cnf.hpp"
#include "seql/simulate.hpp"

namespace seql {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Broken: return "BROKEN";
    case Verdict::Resilient: return "RESILIENT";
    case Verdict::Timeout: return "TIMEOUT";
    case Verdict::NoKey: return "NO_KEY";
    case Verdict::Unverified: return "UNVERIFIED";
  }
  return "?";
}

std::optional<Verdict> parse_verdict(std::string_view s) {
  for (auto v : {Verdict::Broken, Verdict::Resilient, Verdict::Timeout, Verdict::NoKey, Verdict::Unverified}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::string_view to_string(AttackKind k) { return k == AttackKind::Sat ? "sat" : "ddip"; }

std::optional<AttackKind> parse_attack_kind(std::string_view s) {
  if (s == "sat") return AttackKind::Sat;
  if (s == "ddip" || s == "double-dip") return AttackKind::DoubleDip;
  return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

class AttackEngine {
 public:
  AttackEngine(const AttackInstance& inst, const OracleConfig& oracle, const AttackLimits& limits)
      : inst_(inst), oracle_(oracle), limits_(limits), solver_(limits.seed), enc_(solver_), start_(Clock::now()) {
    if (inst.scan_inputs.size() != oracle_.scan_width()) {
      throw ScanError("attack instance and oracle disagree on the scan width");
    }
    if (inst.comb.outputs().size() != oracle_.scan_width()) {
      throw ScanError("attack instance and oracle disagree on the scan-out width");
    }
    data_inputs_ = inst.scan_inputs;
    data_inputs_.insert(data_inputs_.end(), inst.pi_inputs.begin(), inst.pi_inputs.end());
    for (std::size_t i = 0; i < data_inputs_.size(); ++i) x_.push_back(enc_.fresh());
    if (!inst.pi_inputs.empty()) {
      std::unordered_map<std::string, std::size_t> pos;
      for (std::size_t i = 0; i < data_inputs_.size(); ++i) pos.emplace(data_inputs_[i], i);
      const auto& names = oracle.netlist.inputs();
      for (int c = 1; c <= oracle.cycles; ++c) {
        for (const auto& p : names) {
          auto it = pos.find("pi_" + std::to_string(c) + "_" + p);
          if (it == pos.end()) throw ScanError("attack instance lacks primary input '" + p + "'");
          pi_slots_.push_back(it->second);
        }
      }
    }
  }

  std::size_t add_key_copy() {
    std::vector<int> k;
    NetLits lits;
    for (std::size_t i = 0; i < data_inputs_.size(); ++i) lits.emplace(data_inputs_[i], x_[i]);
    for (const auto& name : inst_.key_inputs) {
      k.push_back(enc_.fresh());
      lits.emplace(name, k.back());
    }
    lits = enc_.encode(inst_.comb, std::move(lits));
    outs_.push_back(output_lits(lits));
    keys_.push_back(std::move(k));
    return keys_.size() - 1;
  }

  const std::vector<int>& outs(std::size_t copy) const { return outs_[copy]; }
  const std::vector<int>& keys(std::size_t copy) const { return keys_[copy]; }
  CircuitEncoder<SatSolver>& enc() { return enc_; }

  double remaining_seconds() const {
    return limits_.seconds - std::chrono::duration<double>(Clock::now() - start_).count();
  }
  double elapsed_ms() const { return std::chrono::duration<double, std::milli>(Clock::now() - start_).count(); }

  SolveStatus solve(std::initializer_list<int> assumptions) {
    const double left = remaining_seconds();
    if (left <= 0) return SolveStatus::Timeout;
    SolveLimits sl;
    sl.seconds = left;
    return solver_.solve(assumptions, sl);
  }
  bool okay() const { return solver_.okay(); }

  /// Reads the pattern from the current model, asks the oracle and
  /// constrains every key copy to agree with the response.
  void record_dip(AttackReport& rep) {
    IoPair io;
    for (int v : x_) io.input.push_back(solver_.model_value(v));
    std::vector<std::uint64_t> scan(inst_.scan_inputs.size());
    for (std::size_t i = 0; i < scan.size(); ++i) scan[i] = io.input[i] ? 1 : 0;
    std::vector<std::uint64_t> pi;
    for (std::size_t slot : pi_slots_) pi.push_back(io.input[slot] ? 1 : 0);
    for (auto w : oracle_.query_words(scan, pi)) io.output.push_back((w & 1) != 0);
    for (std::size_t c = 0; c < keys_.size(); ++c) constrain(c, io);
    rep.transcript.push_back(std::move(io));
    ++rep.dip_count;
  }

  KeyVector model_key(std::size_t copy) const {
    KeyVector k = inst_.key_layout;
    for (std::size_t i = 0; i < inst_.key_inputs.size(); ++i) {
      k.set(inst_.key_inputs[i], solver_.model_value(keys_[copy][i]));
    }
    return k;
  }

  bool dip_budget_left(const AttackReport& rep) const { return rep.dip_count < limits_.max_dips; }

 private:
  std::vector<int> output_lits(const NetLits& lits) const {
    std::vector<int> o;
    for (const auto& out : inst_.comb.outputs()) o.push_back(lits.at(out));
    return o;
  }

  void constrain(std::size_t copy, const IoPair& io) {
    NetLits lits;
    for (std::size_t i = 0; i < data_inputs_.size(); ++i) lits.emplace(data_inputs_[i], enc_.constant(io.input[i]));
    for (std::size_t i = 0; i < inst_.key_inputs.size(); ++i) lits.emplace(inst_.key_inputs[i], keys_[copy][i]);
    lits = enc_.encode(inst_.comb, std::move(lits));
    const auto o = output_lits(lits);
    for (std::size_t i = 0; i < o.size(); ++i) solver_.add_clause({io.output[i] ? o[i] : -o[i]});
  }

  const AttackInstance& inst_;
  Oracle oracle_;
  AttackLimits limits_;
  SatSolver solver_;
  CircuitEncoder<SatSolver> enc_;
  Clock::time_point start_;
  std::vector<std::string> data_inputs_;
  std::vector<int> x_;
  std::vector<std::size_t> pi_slots_;
  std::vector<std::vector<int>> keys_;
  std::vector<std::vector<int>> outs_;
};

// Returns false when the attack ended (timeout or dip budget) before the
// miter became unsatisfiable.
bool dip_loop(AttackEngine& e, int miter, AttackReport& rep) {
  for (;;) {
    if (!e.dip_budget_left(rep)) return false;
    const SolveStatus st = e.solve({miter});
    if (st == SolveStatus::Unsat) return true;
    if (st == SolveStatus::Timeout) return false;
    e.record_dip(rep);
  }
}

void extract(AttackEngine& e, AttackReport& rep) {
  if (!e.okay()) {
    rep.verdict = Verdict::NoKey;
    return;
  }
  switch (e.solve({})) {
    case SolveStatus::Sat:
      rep.recovered_key = e.model_key(0);
      rep.scan_correct = true;
      rep.verdict = Verdict::Unverified;
      break;
    case SolveStatus::Unsat: rep.verdict = Verdict::NoKey; break;
    case SolveStatus::Timeout: rep.verdict = Verdict::Timeout; break;
  }
}

}  // namespace

AttackReport sat_attack(const AttackInstance& inst, const OracleConfig& oracle, const AttackLimits& limits) {
  AttackEngine e(inst, oracle, limits);
  AttackReport rep;
  const auto a = e.add_key_copy();
  const auto b = e.add_key_copy();
  const int miter = e.enc().differ(e.outs(a), e.outs(b));
  if (dip_loop(e, miter, rep)) {
    extract(e, rep);
  } else {
    rep.verdict = Verdict::Timeout;
  }
  rep.elapsed_ms = e.elapsed_ms();
  return rep;
}

AttackReport double_dip_attack(const AttackInstance& inst, const OracleConfig& oracle, const AttackLimits& limits) {
  AttackEngine e(inst, oracle, limits);
  AttackReport rep;
  std::size_t c[4];
  for (auto& i : c) i = e.add_key_copy();
  auto& enc = e.enc();
  const int diff01 = enc.differ(e.outs(c[0]), e.outs(c[1]));
  const int diff23 = enc.differ(e.outs(c[2]), e.outs(c[3]));
  const int same02 = -enc.differ(e.outs(c[0]), e.outs(c[2]));
  const int same13 = -enc.differ(e.outs(c[1]), e.outs(c[3]));
  const int key02 = enc.differ(e.keys(c[0]), e.keys(c[2]));
  const int key13 = enc.differ(e.keys(c[1]), e.keys(c[3]));
  const int two_pairs = enc.and_of({diff01, diff23, same02, same13, key02, key13});

  if (dip_loop(e, two_pairs, rep) && dip_loop(e, diff01, rep)) {
    extract(e, rep);
  } else {
    rep.verdict = Verdict::Timeout;
  }
  rep.elapsed_ms = e.elapsed_ms();
  return rep;
}

AttackReport run_attack(AttackKind kind, const AttackInstance& inst, const OracleConfig& oracle,
                        const AttackLimits& limits) {
  return kind == AttackKind::Sat ? sat_attack(inst, oracle, limits) : double_dip_attack(inst, oracle, limits);
}

bool replay_consistent(const AttackInstance& inst, const KeyVector& key, const std::vector<IoPair>& transcript) {
  const CompiledNetlist cn(inst.comb);
  std::vector<std::string> data = inst.scan_inputs;
  data.insert(data.end(), inst.pi_inputs.begin(), inst.pi_inputs.end());
  std::vector<std::uint64_t> values(cn.slot_count(), 0);
  for (const auto& io : transcript) {
    std::fill(values.begin(), values.end(), 0);
    for (std::size_t i = 0; i < data.size(); ++i) values[cn.slot(data[i])] = io.input[i] ? 1 : 0;
    for (const auto& name : inst.key_inputs) values[cn.slot(name)] = key.value(name) ? 1 : 0;
    cn.eval(values);
    for (std::size_t i = 0; i < io.output.size(); ++i) {
      if (((values[cn.output_slots()[i]] & 1) != 0) != io.output[i]) return false;
    }
  }
  return true;
}

AttackReport verify_flow(const LockedDesign& d, int cycles, AttackKind kind, const AttackLimits& limits,
                         const UnrollOptions& opts) {
  const AttackInstance inst = unroll(d, cycles, opts);
  const OracleConfig oracle{d.original, d.chains, cycles};
  AttackReport rep = run_attack(kind, inst, oracle, limits);
  if (!rep.recovered_key) return rep;

  KeyVector key = d.correct_key;
  for (const auto& b : rep.recovered_key->bits()) key.set(b.name, b.value);
  rep.recovered_key = key;

  SolveLimits sl;
  sl.seconds = limits.seconds;
  const auto scan = check_equivalence(apply_key(inst.comb, key), unroll_oracle(d, cycles, opts).comb, sl);
  const auto func = check_equivalence(comb_view(apply_key(d.netlist, key)), comb_view(d.original), sl);
  if (scan.verdict == Equivalence::Unknown || func.verdict == Equivalence::Unknown) {
    rep.verdict = Verdict::Timeout;
    return rep;
  }
  rep.scan_correct = scan.verdict == Equivalence::Equivalent;
  rep.functionally_equivalent = func.verdict == Equivalence::Equivalent;

  bool any_kc = false;
  bool kc_ok = true;
  for (const auto& b : key.bits()) {
    if (b.role == KeyRole::Comb) {
      any_kc = true;
      kc_ok = kc_ok && b.value == d.correct_key.value(b.name);
    } else if (b.role == KeyRole::FunctionalInput) {
      const bool phi = net_inversion(b.value, b.polarity);
      rep.phi.emplace_back(b.name, phi);
      if (phi) ++rep.phi_nonzero;
    }
  }
  if (any_kc) rep.kc_correct = kc_ok;

  if (rep.functionally_equivalent) {
    rep.verdict = Verdict::Broken;
  } else if (rep.scan_correct) {
    rep.verdict = Verdict::Resilient;
  } else {
    rep.verdict = Verdict::NoKey;
    rep.anomaly = "recovered key is neither scan-correct nor functionally equivalent";
  }
  return rep;
}

std::string to_csv_row(const ReportRow& r) {
  char ms[32];
  std::snprintf(ms, sizeof ms, "%.3f", r.elapsed_ms);
  std::ostringstream os;
  os << r.benchmark << ',' << r.style << ',' << r.n << ',' << r.cycles << ',' << r.dip_count << ',' << ms << ','
     << to_string(r.verdict);
  return os.str();
}

std::vector<ReportRow> parse_report_csv(std::string_view text) {
  std::vector<ReportRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != kReportHeader) throw std::runtime_error("report line 1: unexpected header '" + line + "'");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    auto bad = [&] { return std::runtime_error("report line " + std::to_string(line_no) + ": malformed row"); };
    if (f.size() != 7) throw bad();
    ReportRow r;
    try {
      r.benchmark = f[0];
      r.style = f[1];
      r.n = std::stoul(f[2]);
      r.cycles = std::stoi(f[3]);
      r.dip_count = std::stoul(f[4]);
      r.elapsed_ms = std::stod(f[5]);
    } catch (const std::logic_error&) {
      throw bad();
    }
    auto v = parse_verdict(f[6]);
    if (!v) throw bad();
    r.verdict = *v;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace seql
