// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <sstream>

#include "seql/cnf.hpp"
#include "seql/solver.hpp"
#include "seql/synth.hpp"
#include "support.hpp"

using namespace seql;

namespace {

using Clauses = std::vector<std::vector<int>>;

bool satisfies(const Clauses& cs, std::uint64_t assignment) {
  for (const auto& c : cs) {
    bool sat = false;
    for (int l : c) {
      const bool v = ((assignment >> (std::abs(l) - 1)) & 1U) != 0;
      if ((l > 0) == v) sat = true;
    }
    if (!sat) return false;
  }
  return true;
}

bool brute_sat(const Clauses& cs, int vars) {
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << vars); ++a) {
    if (satisfies(cs, a)) return true;
  }
  return false;
}

Clauses random_3sat(int vars, int clauses, std::mt19937_64& rng) {
  Clauses cs;
  for (int i = 0; i < clauses; ++i) {
    std::vector<int> c;
    for (int j = 0; j < 3; ++j) {
      const int v = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(vars));
      c.push_back((rng() & 1U) != 0 ? v : -v);
    }
    cs.push_back(c);
  }
  return cs;
}

// Pigeons p into holes h; variable (i, j) = pigeon i in hole j.
Clauses pigeonhole(int pigeons, int holes) {
  auto var = [&](int i, int j) { return i * holes + j + 1; };
  Clauses cs;
  for (int i = 0; i < pigeons; ++i) {
    std::vector<int> c;
    for (int j = 0; j < holes; ++j) c.push_back(var(i, j));
    cs.push_back(c);
  }
  for (int j = 0; j < holes; ++j) {
    for (int a = 0; a < pigeons; ++a) {
      for (int b = a + 1; b < pigeons; ++b) cs.push_back({-var(a, j), -var(b, j)});
    }
  }
  return cs;
}

}  // namespace

TEST_CASE("solver agrees with brute force on random 3-SAT") {
  std::mt19937_64 rng(1);
  int sat = 0;
  int unsat = 0;
  for (int t = 0; t < 300; ++t) {
    const int vars = 4 + static_cast<int>(rng() % 9);
    const Clauses cs = random_3sat(vars, static_cast<int>(vars * 4.3), rng);
    SatSolver s(static_cast<std::uint64_t>(t));
    for (int v = 0; v < vars; ++v) s.new_var();
    bool ok = true;
    for (const auto& c : cs) ok = s.add_clause(c) && ok;
    const SolveStatus st = ok ? s.solve() : SolveStatus::Unsat;
    const bool want = brute_sat(cs, vars);
    CHECK((st == SolveStatus::Sat) == want);
    if (st == SolveStatus::Sat) {
      std::uint64_t a = 0;
      for (int v = 1; v <= vars; ++v) a |= std::uint64_t{s.model_value(v)} << (v - 1);
      CHECK(satisfies(cs, a));
      ++sat;
    } else {
      ++unsat;
    }
  }
  CHECK(sat > 20);
  CHECK(unsat > 20);
}

TEST_CASE("pigeonhole 6 into 5 is unsatisfiable") {
  const Clauses cs = pigeonhole(6, 5);
  CnfFormula f;
  f.num_vars = 30;
  f.clauses = cs;
  CHECK(solve(f).status == SolveStatus::Unsat);
  const Clauses ok = pigeonhole(5, 5);
  f.clauses = ok;
  f.num_vars = 25;
  const auto r = solve(f);
  REQUIRE(r.status == SolveStatus::Sat);
}

TEST_CASE("time limit yields a timeout") {
  CnfFormula f;
  f.num_vars = 12 * 11;
  f.clauses = pigeonhole(12, 11);
  SolveLimits lim;
  lim.seconds = 0.05;
  CHECK(solve(f, {}, lim).status == SolveStatus::Timeout);
  lim.seconds = 60;
  lim.conflicts = 50;
  CHECK(solve(f, {}, lim).status == SolveStatus::Timeout);
}

TEST_CASE("assumptions and incremental clauses") {
  SatSolver s;
  const int a = s.new_var();
  const int b = s.new_var();
  const int c = s.new_var();
  s.add_clause({a, b});
  s.add_clause({-a, c});
  CHECK(s.solve({-b}) == SolveStatus::Sat);
  CHECK(s.model_value(a));
  CHECK(s.model_value(c));
  CHECK(s.solve({-b, -c}) == SolveStatus::Unsat);
  CHECK(s.okay());  // assumption failure does not poison the solver
  CHECK(s.solve() == SolveStatus::Sat);
  s.add_clause({-b});
  s.add_clause({-c});
  CHECK(s.solve() == SolveStatus::Unsat);
  CHECK_FALSE(s.okay());
  SatSolver t;
  t.new_var();
  CHECK_THROWS(t.add_clause({7}));
}

TEST_CASE("empty clause and tautologies") {
  SatSolver s;
  const int a = s.new_var();
  CHECK(s.add_clause({a, -a}));
  CHECK(s.solve() == SolveStatus::Sat);
  CHECK_FALSE(s.add_clause(std::span<const int>{}));
  CHECK(s.solve() == SolveStatus::Unsat);
}

TEST_CASE("DIMACS round trip") {
  CnfFormula f;
  f.num_vars = 3;
  f.clauses = {{1, -2}, {2, 3, -1}, {-3}};
  std::ostringstream os;
  write_dimacs(os, f);
  CHECK(os.str() == "p cnf 3 3\n1 -2 0\n2 3 -1 0\n-3 0\n");
  const CnfFormula g = parse_dimacs("c comment\n" + os.str());
  CHECK(g.num_vars == 3);
  CHECK(g.clauses == f.clauses);
  CHECK_THROWS_AS(parse_dimacs("1 2 0\n"), EncodeError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 x 0\n"), EncodeError);
}

TEST_CASE("Tseitin encoding agrees with simulation") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Netlist n = random_comb(5, 3, 20, seed);
    const CnfFormula f = tseitin(n);
    for (std::uint64_t p = 0; p < 32; ++p) {
      std::vector<int> assume;
      for (std::size_t i = 0; i < 5; ++i) {
        const int l = f.lit(n.inputs()[i]);
        assume.push_back(((p >> i) & 1U) != 0 ? l : -l);
      }
      const auto r = solve(f, assume);
      REQUIRE(r.status == SolveStatus::Sat);
      const auto want = testing::ref_eval_index(n, p);
      for (std::size_t o = 0; o < want.size(); ++o) CHECK(r.value(f.lit(n.outputs()[o])) == want[o]);
    }
  }
  CHECK_THROWS_AS(tseitin(testing::fig2a()), EncodeError);
}

TEST_CASE("equivalence checking agrees with exhaustive comparison") {
  int equal = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Netlist a = random_comb(6, 3, 30, seed);
    const Netlist b = mutate_comb(a, seed % 2 == 0, seed + 1000);
    const auto r = check_equivalence(a, b);
    const bool want = testing::ref_equivalent(a, b);
    REQUIRE(r.verdict != Equivalence::Unknown);
    CHECK((r.verdict == Equivalence::Equivalent) == want);
    if (want) ++equal;
    if (r.verdict == Equivalence::Different) {
      std::uint64_t index = 0;
      for (std::size_t i = 0; i < a.inputs().size(); ++i) index |= std::uint64_t{r.witness.at(a.inputs()[i])} << i;
      CHECK(testing::ref_eval_index(a, index) != testing::ref_eval_index(b, index));
    }
  }
  CHECK(equal >= 20);
}

TEST_CASE("miter interface checks") {
  const Netlist a = random_comb(3, 2, 8, 1);
  const Netlist b = random_comb(3, 3, 8, 1);
  CHECK_THROWS_AS(build_miter(a, b, a.inputs()), EncodeError);
  CHECK_THROWS_AS(build_miter(a, a, {"zz"}), EncodeError);
  const Miter m = build_miter(a, a, a.inputs());
  CnfFormula f = m.cnf;
  f.clauses.push_back({m.diff});
  CHECK(solve(f).status == SolveStatus::Unsat);
}
