// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <set>
#include <sstream>

#include "seql/kag.hpp"
#include "seql/scan.hpp"
#include "seql/unroll.hpp"
#include "support.hpp"

using namespace seql;

namespace {

using Path = std::vector<std::pair<bool, bool>>;

// Scan-out parity of the i-th locked flip-flop counted from SO: its own FI
// and SQ inversions plus every SQ gate between it and the scan-out port.
bool scan_condition(const Path& p) {
  bool sigma_before = false;
  for (const auto& [phi, sigma] : p) {
    if ((phi != sigma) != sigma_before) return false;
    sigma_before = sigma_before != sigma;
  }
  return true;
}

std::vector<PairPolarity> random_polarities(std::size_t n, std::mt19937_64& rng) {
  std::vector<PairPolarity> v(n);
  for (auto& p : v) {
    p.fi = (rng() & 1U) != 0 ? Polarity::Xnor : Polarity::Xor;
    p.sq = (rng() & 1U) != 0 ? Polarity::Xnor : Polarity::Xor;
  }
  return v;
}

KeyVector key_from_index(const KeyVector& layout, std::uint64_t index) {
  KeyVector k = layout;
  for (std::size_t j = 0; j < layout.size(); ++j) k.set(layout.bits()[j].name, ((index >> j) & 1U) != 0);
  return k;
}

// Classification by the reference interpreter: exhaustive over scan
// patterns (PIs tied to 0) and over functional inputs and states.
KeyClassification reference_classes(const LockedDesign& d) {
  KeyClassification c;
  const AttackInstance inst = unroll(d, 1);
  const OracleConfig oc{d.original, d.chains, 1};
  const std::size_t w = inst.scan_inputs.size();
  std::vector<std::vector<bool>> want;
  for (std::uint64_t p = 0; p < (std::uint64_t{1} << w); ++p) {
    std::vector<bool> in(w);
    for (std::size_t i = 0; i < w; ++i) in[i] = ((p >> i) & 1U) != 0;
    want.push_back(oracle_query(oc, in));
  }
  for (std::uint64_t k = 0; k < (std::uint64_t{1} << d.correct_key.size()); ++k) {
    const KeyVector key = key_from_index(d.correct_key, k);
    bool scan = true;
    for (std::uint64_t p = 0; p < want.size() && scan; ++p) {
      std::vector<bool> in(w);
      for (std::size_t i = 0; i < w; ++i) in[i] = ((p >> i) & 1U) != 0;
      scan = testing::eval_instance(inst, in, {}, key, {}) == want[p];
    }
    c.scan_correct.push_back(scan);
    c.functional_correct.push_back(
        testing::ref_equivalent(comb_view(apply_key(d.netlist, key)), comb_view(d.original)));
  }
  return c;
}

LockedDesign pipeline_with_seql(std::size_t n, std::uint64_t seed) {
  PipelineOptions o;
  o.primary_inputs = 2;
  o.input_regs = 2;
  o.feedback_regs = 1;
  o.output_regs = n;
  o.gates_per_reg = 2;
  o.seed = seed;
  const Netlist s = pipeline_design(o);
  ScanConfig chains;
  chains.chains.push_back({"SI0", "SO0", {}});
  chains.chains.push_back({"SI1", "SO1", {}});
  for (const auto& ff : s.flip_flops()) chains.chains[ff.starts_with("ro") ? 1 : 0].order.push_back(ff);
  LockedDesign d = make_design(s, chains);
  std::mt19937_64 rng(seed);
  for (const auto& ff : chains.chains[1].order) {
    const auto pol = random_polarities(1, rng)[0];
    lock_seql_ff(d, ff, pol.fi, pol.sq);
  }
  return d;
}

}  // namespace

TEST_CASE("single pair KAG") {
  const Kag g = build_kag({{Polarity::Xor, Polarity::Xor}});
  const auto leaves = g.leaves();
  REQUIRE(leaves.size() == 2);
  std::set<Path> got;
  for (int l : leaves) got.insert(g.path(l));
  CHECK(got == std::set<Path>{{{false, false}}, {{true, true}}});
  for (int l : leaves) CHECK(g.key_path(l) == g.path(l));

  const Kag x = build_kag({{Polarity::Xnor, Polarity::Xor}});
  std::set<Path> keys;
  for (int l : x.leaves()) keys.insert(x.key_path(l));
  CHECK(keys == std::set<Path>{{{true, false}}, {{false, true}}});
}

TEST_CASE("KAG enumerates exactly the scan-correct assignments") {
  std::mt19937_64 rng(13);
  for (std::size_t n = 0; n <= 6; ++n) {
    const Kag g = build_kag(random_polarities(n, rng));
    CHECK(g.depth() == n);
    CHECK(g.full_binary());
    CHECK(g.edge_parities_uniform());
    std::set<Path> leaves;
    std::size_t identity = 0;
    for (int l : g.leaves()) {
      const Path p = g.path(l);
      CHECK(p.size() == n);
      CHECK(scan_condition(p));
      leaves.insert(p);
      if (std::all_of(p.begin(), p.end(), [](auto x) { return !x.first && !x.second; })) ++identity;
    }
    CHECK(leaves.size() == (std::size_t{1} << n));
    CHECK(identity == 1);
    std::size_t valid = 0;
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << (2 * n)); ++a) {
      Path p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = {((a >> (2 * i)) & 1U) != 0, ((a >> (2 * i + 1)) & 1U) != 0};
      if (scan_condition(p)) {
        ++valid;
        CHECK(leaves.contains(p));
      }
    }
    CHECK(valid == leaves.size());
  }
  CHECK_THROWS(build_kag(std::vector<PairPolarity>(25)));
}

TEST_CASE("sibling edges and path parities") {
  const Kag g = build_kag(std::vector<PairPolarity>(3));
  for (const auto& v : g.vertices()) {
    if (v.children.size() != 2) continue;
    const auto& a = g.vertices()[static_cast<std::size_t>(v.children[0])];
    const auto& b = g.vertices()[static_cast<std::size_t>(v.children[1])];
    CHECK(a.edge_parity == v.path_parity);
    CHECK(b.edge_parity == v.path_parity);
    CHECK(a.sigma != b.sigma);
    CHECK(a.path_parity != b.path_parity);
  }
}

TEST_CASE("fig2c KAG leaves are the scan-correct keys") {
  const LockedDesign d = testing::fig2c();
  CHECK(seql_ffs_from_so(d) == std::vector<std::string>{"G_9", "G_7"});
  const Kag g = build_kag(kag_polarities(d));
  const KeyClassification ref = reference_classes(d);
  const KeyClassification lib = classify_keys(d);
  CHECK(lib.scan_correct == ref.scan_correct);
  CHECK(lib.functional_correct == ref.functional_correct);

  const auto ffs = seql_ffs_from_so(d);
  std::set<std::uint64_t> from_kag;
  for (int l : g.leaves()) {
    const auto kp = g.key_path(l);
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < ffs.size(); ++i) {
      const auto& s = d.style(ffs[i]);
      const auto& bits = d.correct_key.bits();
      for (std::size_t j = 0; j < bits.size(); ++j) {
        if (bits[j].name == s.fi->key && kp[i].first) idx |= std::uint64_t{1} << j;
        if (bits[j].name == s.sq->key && kp[i].second) idx |= std::uint64_t{1} << j;
      }
    }
    from_kag.insert(idx);
  }
  std::set<std::uint64_t> scan;
  for (std::size_t k = 0; k < ref.scan_correct.size(); ++k) {
    if (ref.scan_correct[k]) scan.insert(k);
  }
  CHECK(from_kag == scan);
}

TEST_CASE("closed-form census agrees with brute force") {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const LockedDesign d = pipeline_with_seql(n, seed * 10 + n);
      REQUIRE(closed_form_applies(d));
      const auto c = census(d, CensusMethod::ClosedForm);
      const auto b = census(d, CensusMethod::BruteForce);
      CHECK(c.warning.empty());
      CHECK(c.n == n);
      CHECK(b.scan_correct_count == c.scan_correct_count);
      CHECK(b.functional_correct_count == c.functional_correct_count);
      CHECK(b.intersection_count == c.intersection_count);
      CHECK(b.p == doctest::Approx(c.p));
      CHECK(c.p == doctest::Approx(1.0 - 1.0 / static_cast<double>(1U << n)));
      if (n <= 2) {
        const auto ref = reference_classes(d);
        std::size_t sc = 0;
        for (bool s : ref.scan_correct) sc += s;
        CHECK(sc == b.scan_correct_count);
      }
    }
  }
}

TEST_CASE("census edge cases") {
  const LockedDesign none = make_design(testing::fig2a());
  const auto c0 = census(none, CensusMethod::ClosedForm);
  CHECK(c0.n == 0);
  CHECK(c0.p == 0.0);
  CHECK(census(none, CensusMethod::BruteForce).p == 0.0);
  const auto c8 = census(pipeline_with_seql(8, 1), CensusMethod::ClosedForm);
  CHECK(c8.p == doctest::Approx(0.99609375).epsilon(1e-12));

  // SeqL sharing a chain with unlocked flip-flops: closed form warns, and
  // the unlocked flip-flops' scan-out adds one more parity constraint.
  LockedDesign d = make_design(testing::fig2a());
  lock_seql_ff(d, "G_9", Polarity::Xor, Polarity::Xor);
  lock_seql_ff(d, "G_7", Polarity::Xor, Polarity::Xnor);
  CHECK_FALSE(closed_form_applies(d));
  CHECK_FALSE(census(d, CensusMethod::ClosedForm).warning.empty());
  const auto shared = census(d, CensusMethod::BruteForce);
  CHECK(shared.scan_correct_count == 2);
  CHECK(shared.intersection_count == 1);
}

TEST_CASE("SQ keys never affect functional correctness") {
  const LockedDesign d = pipeline_with_seql(3, 7);
  const auto ref = reference_classes(d);
  const auto& bits = d.correct_key.bits();
  for (std::size_t k = 0; k < ref.functional_correct.size(); ++k) {
    for (std::size_t j = 0; j < bits.size(); ++j) {
      if (bits[j].role != KeyRole::ScanOutput) continue;
      CHECK(ref.functional_correct[k] == ref.functional_correct[k ^ (std::size_t{1} << j)]);
    }
  }
}

TEST_CASE("EFF keys are scan-correct exactly when functionally correct") {
  const auto c = classify_keys(testing::fig2a_eff());
  CHECK(c.scan_correct == c.functional_correct);
  CHECK(std::count(c.scan_correct.begin(), c.scan_correct.end(), true) == 1);
}

TEST_CASE("truth table output") {
  const LockedDesign d = testing::fig2c();
  const TruthTable t = truth_table(d);
  CHECK(t.rows.size() == 16);
  std::ostringstream canon;
  write_truth_table_csv(canon, d, t, false);
  std::string header = canon.str().substr(0, canon.str().find('\n'));
  CHECK(header.find("inv_") != std::string::npos);
  CHECK(header.ends_with("scan_correct,functional_correct"));

  std::ostringstream pairs;
  write_truth_table_csv(pairs, d, t, true);
  std::istringstream in(pairs.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "fik_1,sqk_1',fik_0,sqk_0,Scan-Correct,Functional-Correct");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 16);

  std::ostringstream cs;
  write_census_csv(cs, {census(d, CensusMethod::BruteForce)});
  CHECK(cs.str() == "n,total_keys,scan_correct,functional_correct,intersection,p\n2,16,4,4,1,0.75\n");
}

TEST_CASE("SeqL across chains is rejected") {
  ScanConfig two;
  two.chains.push_back({"SI0", "SO0", {"G_3", "G_7"}});
  two.chains.push_back({"SI1", "SO1", {"G_5", "G_9"}});
  LockedDesign d = make_design(testing::fig2a(), two);
  lock_seql_ff(d, "G_7", Polarity::Xor, Polarity::Xor);
  lock_seql_ff(d, "G_9", Polarity::Xor, Polarity::Xor);
  CHECK_THROWS_AS(seql_ffs_from_so(d), LockError);
}
