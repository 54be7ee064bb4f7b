// SPDX-License-Identifier: Apache-2.0
#include "seql/cnf.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <set>
#include <sstream>

namespace seql {

int CnfFormula::lit(std::string_view net) const {
  auto it = net_lits.find(std::string(net));
  if (it == net_lits.end()) throw EncodeError("net '" + std::string(net) + "' has no literal");
  return it->second;
}

CnfFormula tseitin(const Netlist& n) {
  CnfFormula f;
  CircuitEncoder enc(f);
  f.net_lits = enc.encode(n);
  return f;
}

void write_dimacs(std::ostream& os, const CnfFormula& f) {
  os << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
  for (const auto& c : f.clauses) {
    for (int l : c) os << l << ' ';
    os << "0\n";
  }
}

CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula f;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = false;
  std::vector<int> cur;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == 'c' || line[0] == '%') continue;
    std::istringstream ls(line);
    if (line[0] == 'p') {
      std::string p;
      std::string fmt;
      std::size_t nclauses = 0;
      if (!(ls >> p >> fmt >> f.num_vars >> nclauses) || fmt != "cnf") {
        throw EncodeError("line " + std::to_string(line_no) + ": malformed DIMACS header");
      }
      header = true;
      continue;
    }
    if (!header) throw EncodeError("line " + std::to_string(line_no) + ": clause before DIMACS header");
    std::string tok;
    while (ls >> tok) {
      int v = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw EncodeError("line " + std::to_string(line_no) + ": bad literal '" + tok + "'");
      }
      if (v == 0) {
        f.clauses.push_back(std::move(cur));
        cur.clear();
      } else {
        f.num_vars = std::max(f.num_vars, std::abs(v));
        cur.push_back(v);
      }
    }
  }
  if (!cur.empty()) f.clauses.push_back(std::move(cur));
  return f;
}

SolveOutcome solve(const CnfFormula& f, std::span<const int> assumptions, const SolveLimits& limits,
                   std::uint64_t seed) {
  SatSolver s(seed);
  for (int i = 0; i < f.num_vars; ++i) s.new_var();
  SolveOutcome out;
  for (const auto& c : f.clauses) {
    if (!s.add_clause(c)) {
      out.status = SolveStatus::Unsat;
      return out;
    }
  }
  out.status = s.solve(assumptions, limits);
  if (out.status == SolveStatus::Sat) out.model = s.model();
  return out;
}

namespace {

std::vector<std::string> sorted(const std::vector<std::string>& v) {
  std::vector<std::string> s = v;
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

Miter build_miter(const Netlist& a, const Netlist& b, const std::vector<std::string>& shared) {
  if (sorted(a.outputs()) != sorted(b.outputs())) {
    throw EncodeError("miter: '" + a.name() + "' and '" + b.name() + "' have different outputs");
  }
  Miter m;
  CircuitEncoder enc(m.cnf);
  NetLits common;
  for (const auto& s : shared) {
    if (!a.is_input(s) || !b.is_input(s)) throw EncodeError("miter: shared net '" + s + "' is not an input of both");
    common.emplace(s, enc.fresh());
  }
  const NetLits la = enc.encode(a, common);
  const NetLits lb = enc.encode(b, common);
  std::vector<int> xa;
  std::vector<int> xb;
  for (const auto& o : a.outputs()) {
    xa.push_back(la.at(o));
    xb.push_back(lb.at(o));
  }
  m.diff = enc.differ(xa, xb);
  for (const auto& [net, l] : la) m.cnf.net_lits.emplace("a:" + net, l);
  for (const auto& [net, l] : lb) m.cnf.net_lits.emplace("b:" + net, l);
  return m;
}

EquivalenceResult check_equivalence(const Netlist& a, const Netlist& b, const SolveLimits& limits) {
  if (sorted(a.inputs()) != sorted(b.inputs())) {
    throw EncodeError("equivalence: '" + a.name() + "' and '" + b.name() + "' have different inputs");
  }
  Miter m = build_miter(a, b, a.inputs());
  m.cnf.add_clause(std::span<const int>(&m.diff, 1));
  const SolveOutcome r = solve(m.cnf, {}, limits);
  EquivalenceResult res;
  switch (r.status) {
    case SolveStatus::Unsat: res.verdict = Equivalence::Equivalent; break;
    case SolveStatus::Timeout: res.verdict = Equivalence::Unknown; break;
    case SolveStatus::Sat:
      res.verdict = Equivalence::Different;
      for (const auto& in : a.inputs()) res.witness.emplace(in, r.value(m.cnf.lit("a:" + in)));
      break;
  }
  return res;
}

}  // namespace seql
