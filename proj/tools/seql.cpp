// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "seql/attack.hpp"
#include "seql/bench.hpp"
#include "seql/cnf.hpp"
#include "seql/defense.hpp"
#include "seql/feedback.hpp"
#include "seql/kag.hpp"
#include "seql/lock.hpp"
#include "seql/scan.hpp"
#include "seql/unroll.hpp"

namespace fs = std::filesystem;
using namespace seql;

namespace {

constexpr int kOk = 0;
constexpr int kVerdictFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("no such file: " + path);
}

LockedDesign load(const std::string& path) {
  require_file(path);
  return load_design(companion_files(path));
}

std::string benchmark_name(const fs::path& p) {
  std::string stem = p.stem().string();
  for (const char* suffix : {".seql", ".eff"}) {
    const std::string s = suffix;
    if (stem.size() > s.size() && stem.ends_with(s)) return stem.substr(0, stem.size() - s.size());
  }
  return stem;
}

std::string style_name(const LockedDesign& d) {
  if (d.seql_count() > 0) return "seql";
  for (const auto& [ff, s] : d.styles) {
    if (s.kind == FFLockStyle::Kind::EffFo) return "eff";
  }
  return "none";
}

Polarity polarity_arg(const std::string& s) {
  auto p = parse_polarity(s);
  if (!p) throw UsageError("bad polarity '" + s + "' (want xor or xnor)");
  return *p;
}

void write_output(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

struct LockArgs {
  std::string bench;
  std::string style = "seql";
  double gamma = 0.05;
  int cycles = 1;
  std::uint64_t seed = 0;
  double time_limit = 60;
  std::string out = ".";
  std::vector<std::string> ffs;
  std::size_t comb_keys = 0;
  std::string chain;
  bool wof_chain = false;
};

int cmd_lock(const LockArgs& a) {
  require_file(a.bench);
  const Netlist n = read_bench_file(a.bench);
  ScanConfig chains = default_scan_config(n);
  if (!a.chain.empty()) {
    require_file(a.chain);
    chains = parse_chain_file(read_text_file(a.chain));
  }
  if (a.wof_chain) chains = separate_feedback_free_chain(n, chains);
  LockedDesign d = make_design(n, chains);
  if (a.comb_keys > 0) insert_comb_keys(d, {a.comb_keys, a.seed, {}});

  int rc = kOk;
  if (a.style == "eff") {
    std::vector<std::string> ffs = a.ffs.empty() ? n.flip_flops() : a.ffs;
    std::vector<std::pair<std::string, std::optional<Polarity>>> items;
    bool explicit_pol = false;
    for (const auto& f : ffs) {
      const auto colon = f.find(':');
      if (colon == std::string::npos) {
        items.emplace_back(f, std::nullopt);
      } else {
        items.emplace_back(f.substr(0, colon), polarity_arg(f.substr(colon + 1)));
        explicit_pol = true;
      }
    }
    if (explicit_pol) {
      for (const auto& [ff, pol] : items) lock_eff_ff(d, ff, pol.value_or(Polarity::Xor));
    } else {
      std::vector<std::string> names;
      for (const auto& it : items) names.push_back(it.first);
      d = lock_eff(std::move(d), names, a.seed);
    }
    std::cerr << "eff: locked " << items.size() << " flip-flops\n";
  } else if (a.style == "seql") {
    if (!a.ffs.empty()) {
      std::mt19937_64 rng(a.seed);
      for (const auto& spec : a.ffs) {
        std::vector<std::string> parts;
        std::stringstream ss(spec);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        auto coin = [&] { return std::bernoulli_distribution(0.5)(rng) ? Polarity::Xnor : Polarity::Xor; };
        const Polarity fi = parts.size() > 1 ? polarity_arg(parts[1]) : coin();
        const Polarity sq = parts.size() > 2 ? polarity_arg(parts[2]) : coin();
        lock_seql_ff(d, parts[0], fi, sq);
      }
      std::cerr << "seql: locked " << a.ffs.size() << " flip-flops as given\n";
    } else {
      DefenseOptions opts;
      opts.gamma = a.gamma;
      opts.seed = a.seed;
      opts.limits.seconds = a.time_limit;
      opts.limits.seed = a.seed;
      opts.checks = {{AttackKind::Sat, a.cycles}};
      DefenseResult r = ibla(std::move(d), opts);
      std::cerr << "seql: ibla locked n=" << r.n << (r.resilient ? " (resilient)" : "")
                << (r.note.empty() ? "" : "; " + r.note) << '\n';
      if (!r.resilient) rc = kVerdictFailure;
      d = std::move(r.design);
    }
  } else {
    throw UsageError("unknown style '" + a.style + "' (want eff or seql)");
  }
  const auto ov = overhead_report(d);
  std::cerr << "key gates: " << ov.key_gate_count << " / " << ov.gate_count << " gates (" << ov.percent << "%)\n";

  fs::create_directories(a.out);
  const auto files = design_files(a.out, fs::path(a.bench).stem().string() + "." + a.style);
  save_design(d, files);
  std::cout << files.bench.string() << '\n';
  return rc;
}

int cmd_unroll(const std::string& bench, int cycles, bool expose, const std::string& out, const std::string& dimacs) {
  const LockedDesign d = load(bench);
  UnrollOptions o;
  o.expose_pis = expose;
  const AttackInstance inst = unroll(d, cycles, o);
  write_output(out, serialize_bench(inst.comb));
  if (!dimacs.empty()) {
    std::ofstream os(dimacs);
    if (!os) throw UsageError("cannot write " + dimacs);
    write_dimacs(os, tseitin(inst.comb));
  }
  return kOk;
}

struct AttackArgs {
  std::vector<std::string> benches;
  std::string attack = "sat";
  int cycles = 1;
  std::uint64_t seed = 0;
  double time_limit = 60;
  unsigned jobs = 1;
  std::string out;
  bool expose_pis = false;
};

int cmd_attack(const AttackArgs& a) {
  const auto kind = parse_attack_kind(a.attack);
  if (!kind) throw UsageError("unknown attack '" + a.attack + "' (want sat or ddip)");
  for (const auto& b : a.benches) require_file(b);

  std::vector<std::string> rows(a.benches.size());
  std::vector<std::string> errors(a.benches.size());
  std::atomic<std::size_t> next{0};
  std::mutex log;
  auto worker = [&] {
    for (std::size_t i = next++; i < a.benches.size(); i = next++) {
      try {
        const LockedDesign d = load(a.benches[i]);
        AttackLimits lim;
        lim.seconds = a.time_limit;
        lim.seed = a.seed;
        UnrollOptions uo;
        uo.expose_pis = a.expose_pis;
        const AttackReport rep = verify_flow(d, a.cycles, *kind, lim, uo);
        ReportRow row{benchmark_name(a.benches[i]), style_name(d), d.locked_ffs().size(), a.cycles,
                      rep.dip_count, rep.elapsed_ms, rep.verdict};
        rows[i] = to_csv_row(row);
        std::lock_guard lk(log);
        std::cerr << a.benches[i] << ": " << to_string(rep.verdict) << " after " << rep.dip_count << " DIPs";
        if (rep.kc_correct) std::cerr << ", K_c " << (*rep.kc_correct ? "recovered" : "wrong");
        if (!rep.phi.empty()) std::cerr << ", " << rep.phi_nonzero << "/" << rep.phi.size() << " FI bits inverted";
        if (!rep.anomaly.empty()) std::cerr << " [" << rep.anomaly << "]";
        std::cerr << '\n';
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned jobs = std::max(1U, std::min<unsigned>(a.jobs, static_cast<unsigned>(a.benches.size())));
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int rc = kOk;
  std::ostringstream csv;
  csv << kReportHeader << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!errors[i].empty()) {
      std::cerr << "error: " << a.benches[i] << ": " << errors[i] << '\n';
      rc = kUsage;
      continue;
    }
    csv << rows[i] << '\n';
  }
  write_output(a.out, csv.str());
  return rc;
}

int cmd_verify(const std::string& bench, const std::string& keyfile, int cycles, double time_limit) {
  const LockedDesign d = load(bench);
  require_file(keyfile);
  const KeyVector candidate = parse_key_file(read_text_file(keyfile));
  KeyVector key = d.correct_key;
  for (const auto& b : candidate.bits()) {
    if (!key.contains(b.name)) throw UsageError("key file names unknown key '" + b.name + "'");
    key.set(b.name, b.value);
  }
  SolveLimits sl;
  sl.seconds = time_limit;
  const auto scan = check_equivalence(apply_key(unroll(d, cycles).comb, key), unroll_oracle(d, cycles).comb, sl);
  const auto func = check_equivalence(comb_view(apply_key(d.netlist, key)), comb_view(d.original), sl);
  auto word = [](Equivalence e) {
    return e == Equivalence::Equivalent ? "yes" : e == Equivalence::Different ? "no" : "unknown";
  };
  std::cout << "scan_correct: " << word(scan.verdict) << "\nfunctionally_equivalent: " << word(func.verdict) << '\n';
  return func.verdict == Equivalence::Equivalent ? kOk : kVerdictFailure;
}

int cmd_census(const std::vector<std::string>& benches, const std::string& method, const std::string& out) {
  CensusMethod m;
  if (method == "brute" || method == "brute_force") {
    m = CensusMethod::BruteForce;
  } else if (method == "closed" || method == "closed_form") {
    m = CensusMethod::ClosedForm;
  } else {
    throw UsageError("unknown census method '" + method + "'");
  }
  std::vector<KeySpaceCensus> rows;
  for (const auto& b : benches) {
    rows.push_back(census(load(b), m));
    if (!rows.back().warning.empty()) std::cerr << "warning: " << b << ": " << rows.back().warning << '\n';
  }
  std::ostringstream os;
  write_census_csv(os, rows);
  write_output(out, os.str());
  return kOk;
}

int cmd_truth_table(const std::string& bench, bool pairs, const std::string& out) {
  const LockedDesign d = load(bench);
  std::ostringstream os;
  write_truth_table_csv(os, d, truth_table(d), pairs);
  write_output(out, os.str());
  return kOk;
}

int cmd_report(const std::vector<std::string>& csvs, std::size_t p_series, const std::string& out) {
  std::vector<ReportRow> rows;
  for (const auto& c : csvs) {
    require_file(c);
    auto r = parse_report_csv(read_text_file(c));
    rows.insert(rows.end(), r.begin(), r.end());
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.benchmark, a.style, a.cycles) < std::tie(b.benchmark, b.style, b.cycles);
  });
  std::ostringstream os;
  os << kReportHeader << '\n';
  for (const auto& r : rows) os << to_csv_row(r) << '\n';
  if (p_series > 0) {
    os << "\nn,p\n";
    for (std::size_t n = 1; n <= p_series; ++n) {
      os << n << ',' << 1.0 - std::ldexp(1.0, -static_cast<int>(n)) << '\n';
    }
  }
  write_output(out, os.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scan-locking lab: lock, attack and analyse sequential netlists"};
  app.require_subcommand(1);

  LockArgs la;
  auto* lock = app.add_subcommand("lock", "Lock a .bench netlist (EFF or SeqL via IBLA)");
  lock->add_option("bench", la.bench, "Input .bench netlist")->required();
  lock->add_option("--style", la.style, "eff or seql")->check(CLI::IsMember({"eff", "seql"}));
  lock->add_option("--gamma", la.gamma, "Key-gate budget as a fraction of the gate count");
  lock->add_option("--cycles", la.cycles, "Capture cycles used by the IBLA attack check")->check(CLI::PositiveNumber);
  lock->add_option("--seed", la.seed, "Seed for polarities and the solver");
  lock->add_option("--time-limit", la.time_limit, "Seconds per attack");
  lock->add_option("--out", la.out, "Output directory");
  lock->add_option("--ffs", la.ffs, "Explicit flip-flops, ff[:fi[:sq]] for seql, ff[:pol] for eff")->delimiter(',');
  lock->add_option("--comb-keys", la.comb_keys, "Random combinational key gates inserted first");
  lock->add_option("--chain", la.chain, "Chain file (default: one chain in declaration order)");
  lock->add_flag("--wof-chain", la.wof_chain, "Stitch feedback-free flip-flops onto a chain of their own");

  std::string ubench;
  int ucycles = 1;
  bool uexpose = false;
  std::string uout;
  std::string udimacs;
  auto* unr = app.add_subcommand("unroll", "Write the combinational attack instance of a locked design");
  unr->add_option("bench", ubench, "Locked .bench (companion .key/.chain/.oracle.bench alongside)")->required();
  unr->add_option("--cycles", ucycles, "Capture cycles")->check(CLI::PositiveNumber);
  unr->add_flag("--expose-pis", uexpose, "Give each capture cycle its own primary inputs");
  unr->add_option("--out", uout, "Output .bench (default stdout)");
  unr->add_option("--dimacs", udimacs, "Also write the CNF in DIMACS form");

  AttackArgs aa;
  auto* att = app.add_subcommand("attack", "Attack locked designs and print a CSV report");
  att->add_option("benches", aa.benches, "Locked .bench files")->required();
  att->add_option("--attack", aa.attack, "sat or ddip");
  att->add_option("--cycles", aa.cycles, "Capture cycles")->check(CLI::PositiveNumber);
  att->add_option("--seed", aa.seed, "Solver seed");
  att->add_option("--time-limit", aa.time_limit, "Seconds per attack");
  att->add_option("--jobs", aa.jobs, "Parallel attacks")->check(CLI::PositiveNumber);
  att->add_option("--out", aa.out, "CSV output (default stdout)");
  att->add_flag("--expose-pis", aa.expose_pis, "Let the attacker drive per-cycle primary inputs");

  std::string vbench;
  std::string vkey;
  int vcycles = 1;
  double vlimit = 60;
  auto* ver = app.add_subcommand("verify", "Check a candidate key for scan-correctness and functional equivalence");
  ver->add_option("bench", vbench, "Locked .bench")->required();
  ver->add_option("--key", vkey, "Candidate key file")->required();
  ver->add_option("--cycles", vcycles, "Capture cycles")->check(CLI::PositiveNumber);
  ver->add_option("--time-limit", vlimit, "Seconds per equivalence check");

  std::vector<std::string> cbenches;
  std::string cmethod = "brute";
  std::string cout_path;
  auto* cen = app.add_subcommand("census", "Count scan-correct and functionally correct keys");
  cen->add_option("benches", cbenches, "Locked .bench files")->required();
  cen->add_option("--method", cmethod, "brute or closed");
  cen->add_option("--out", cout_path, "CSV output (default stdout)");

  std::string tbench;
  bool tpairs = false;
  std::string tout;
  auto* tt = app.add_subcommand("truth-table", "Enumerate every key with its correctness flags");
  tt->add_option("bench", tbench, "Locked .bench")->required();
  tt->add_flag("--pairs", tpairs, "Net-inversion columns per FI-SQ pair from the scan-out end");
  tt->add_option("--out", tout, "CSV output (default stdout)");

  std::vector<std::string> rcsvs;
  std::size_t rseries = 0;
  std::string rout;
  auto* rep = app.add_subcommand("report", "Merge attack CSVs");
  rep->add_option("csvs", rcsvs, "Attack CSV files");
  rep->add_option("--p-series", rseries, "Append p = 1 - 2^-n for n = 1..N");
  rep->add_option("--out", rout, "Output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*lock) return cmd_lock(la);
    if (*unr) return cmd_unroll(ubench, ucycles, uexpose, uout, udimacs);
    if (*att) return cmd_attack(aa);
    if (*ver) return cmd_verify(vbench, vkey, vcycles, vlimit);
    if (*cen) return cmd_census(cbenches, cmethod, cout_path);
    if (*tt) return cmd_truth_table(tbench, tpairs, tout);
    if (*rep) return cmd_report(rcsvs, rseries, rout);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const LockError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kVerdictFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}
