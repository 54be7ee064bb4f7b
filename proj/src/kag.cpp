// SPDX-License-Identifier: Apache-2.0
#include "seql/kag.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <set>
#include <unordered_map>

#include "seql/feedback.hpp"
#include "seql/simulate.hpp"
#include "seql/unroll.hpp"

namespace seql {

std::vector<int> Kag::leaves() const {
  std::vector<int> out;
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    if (vertices_[v].children.empty() && v != 0) out.push_back(static_cast<int>(v));
  }
  if (polarities_.empty()) out.push_back(0);
  return out;
}

std::vector<std::pair<bool, bool>> Kag::path(int v) const {
  std::vector<std::pair<bool, bool>> out;
  for (; v > 0; v = vertices_[static_cast<std::size_t>(v)].parent) {
    const auto& x = vertices_[static_cast<std::size_t>(v)];
    out.emplace_back(x.phi, x.sigma);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<std::pair<bool, bool>> Kag::key_path(int v) const {
  auto p = path(v);
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i].first = p[i].first != identity_bit(polarities_[i].fi);
    p[i].second = p[i].second != identity_bit(polarities_[i].sq);
  }
  return p;
}

bool Kag::edge_parities_uniform() const {
  for (const auto& v : vertices_) {
    for (int c : v.children) {
      if (vertices_[static_cast<std::size_t>(c)].edge_parity !=
          vertices_[static_cast<std::size_t>(v.children.front())].edge_parity) {
        return false;
      }
    }
  }
  return true;
}

bool Kag::full_binary() const {
  const int n = static_cast<int>(polarities_.size());
  for (const auto& v : vertices_) {
    if (v.depth < n && v.children.size() != 2) return false;
    if (v.depth == n && !v.children.empty()) return false;
  }
  return true;
}

Kag build_kag(const std::vector<PairPolarity>& so_to_si) {
  if (so_to_si.size() > 24) throw std::invalid_argument("KAG depth above 24 is not supported");
  Kag g;
  g.polarities_ = so_to_si;
  g.vertices_.push_back(KagVertex{});
  std::vector<int> level{0};
  for (std::size_t d = 1; d <= so_to_si.size(); ++d) {
    std::vector<int> next;
    for (int v : level) {
      const bool parity = g.vertices_[static_cast<std::size_t>(v)].path_parity;
      // phi ^ sigma must cancel the inversion accumulated on the way out.
      for (bool sigma : {parity, !parity}) {
        KagVertex c;
        c.sigma = sigma;
        c.phi = parity != sigma;
        c.depth = static_cast<int>(d);
        c.parent = v;
        c.edge_parity = c.phi != c.sigma;
        c.path_parity = parity != sigma;
        const int id = static_cast<int>(g.vertices_.size());
        g.vertices_.push_back(c);
        g.vertices_[static_cast<std::size_t>(v)].children.push_back(id);
        next.push_back(id);
      }
    }
    level = std::move(next);
  }
  return g;
}

std::vector<std::string> seql_ffs_from_so(const LockedDesign& d) {
  std::vector<std::string> out;
  std::size_t chains_used = 0;
  for (const auto& chain : d.chains.chains) {
    bool used = false;
    for (auto it = chain.order.rbegin(); it != chain.order.rend(); ++it) {
      if (d.style(*it).kind == FFLockStyle::Kind::Seql) {
        out.push_back(*it);
        used = true;
      }
    }
    if (used) ++chains_used;
  }
  if (chains_used > 1) throw LockError("SeqL flip-flops span more than one scan chain");
  return out;
}

std::vector<PairPolarity> kag_polarities(const LockedDesign& d) {
  std::vector<PairPolarity> out;
  for (const auto& ff : seql_ffs_from_so(d)) {
    const auto& s = d.style(ff);
    out.push_back({s.fi->polarity, s.sq->polarity});
  }
  return out;
}

bool closed_form_applies(const LockedDesign& d) {
  // Any other flip-flop on a chain carrying SeqL would see every SQ gate
  // between it and the scan-out port.
  for (const auto& chain : d.chains.chains) {
    const auto seql = std::count_if(chain.order.begin(), chain.order.end(),
                                    [&](const std::string& ff) { return d.style(ff).kind == FFLockStyle::Kind::Seql; });
    if (seql > 0 && static_cast<std::size_t>(seql) != chain.order.size()) return false;
    for (const auto& ff : chain.order) {
      if (d.style(ff).kind == FFLockStyle::Kind::EffFo) return false;
    }
  }
  const auto ffs = d.netlist.flip_flops();
  const auto deps = ff_dependencies(d.netlist);
  for (const auto& row : deps) {
    for (std::size_t j : row) {
      if (d.style(ffs[j]).kind == FFLockStyle::Kind::Seql) return false;
    }
  }
  return true;
}

namespace {

constexpr std::uint64_t kAll = ~std::uint64_t{0};

// Word holding bit `bit` of the indices base..base+63.
std::uint64_t index_word(std::size_t bit, std::uint64_t base) {
  static constexpr std::uint64_t kLow[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
                                            0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
  if (bit < 6) return kLow[bit];
  return ((base >> bit) & 1U) != 0 ? kAll : 0;
}

std::uint64_t valid_mask(std::uint64_t count) { return count >= 64 ? kAll : (std::uint64_t{1} << count) - 1; }

}  // namespace

std::vector<bool> matching_keys(const Netlist& keyed, const Netlist& reference,
                                const std::vector<std::string>& key_names) {
  const std::set<std::string, std::less<>> keys(key_names.begin(), key_names.end());
  std::vector<std::string> data;
  for (const auto& in : keyed.inputs()) {
    if (!keys.contains(in)) data.push_back(in);
  }
  {
    auto a = data;
    auto b = reference.inputs();
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) throw std::invalid_argument("keyed and reference netlists have different data inputs");
    auto oa = keyed.outputs();
    auto ob = reference.outputs();
    std::sort(oa.begin(), oa.end());
    std::sort(ob.begin(), ob.end());
    if (oa != ob) throw std::invalid_argument("keyed and reference netlists have different outputs");
  }
  if (data.size() > 24) throw std::invalid_argument("exhaustive matching needs at most 24 data inputs");
  if (key_names.size() > 24) throw std::invalid_argument("exhaustive matching needs at most 24 key bits");

  const CompiledNetlist ck(keyed);
  const CompiledNetlist cr(reference);
  const std::uint64_t patterns = std::uint64_t{1} << data.size();
  const std::uint64_t words = std::max<std::uint64_t>(1, patterns / 64);
  const std::uint64_t pmask = valid_mask(patterns);
  const std::size_t no = reference.outputs().size();

  std::vector<std::size_t> kdata;
  std::vector<std::size_t> rdata;
  for (const auto& in : data) {
    kdata.push_back(ck.slot(in));
    rdata.push_back(cr.slot(in));
  }
  std::vector<std::size_t> kkey;
  for (const auto& k : key_names) kkey.push_back(ck.slot(k));
  std::vector<std::size_t> kout;
  for (const auto& o : reference.outputs()) kout.push_back(ck.slot(o));

  // Reference responses, 64 patterns per word.
  std::vector<std::uint64_t> ref(words * no);
  {
    std::vector<std::uint64_t> v(cr.slot_count(), 0);
    for (std::uint64_t w = 0; w < words; ++w) {
      std::fill(v.begin(), v.end(), 0);
      for (std::size_t i = 0; i < data.size(); ++i) v[rdata[i]] = index_word(i, w * 64);
      cr.eval(v);
      for (std::size_t o = 0; o < no; ++o) ref[w * no + o] = v[cr.output_slots()[o]];
    }
  }
  auto ref_bit = [&](std::uint64_t p, std::size_t o) { return ((ref[(p / 64) * no + o] >> (p % 64)) & 1U) != 0; };

  // Screening patterns: extremes plus a fixed random sample.
  std::vector<std::uint64_t> screen{0, patterns - 1};
  std::mt19937_64 rng(0x5EC1);
  while (screen.size() < std::min<std::uint64_t>(patterns, 48)) screen.push_back(rng() % patterns);

  const std::uint64_t nkeys = std::uint64_t{1} << key_names.size();
  std::vector<bool> match(nkeys, false);
  std::vector<std::uint64_t> v(ck.slot_count(), 0);
  std::vector<std::uint64_t> survivors;

  for (std::uint64_t base = 0; base < nkeys; base += 64) {
    std::uint64_t alive = valid_mask(nkeys - base);
    for (std::uint64_t p : screen) {
      std::fill(v.begin(), v.end(), 0);
      for (std::size_t i = 0; i < data.size(); ++i) v[kdata[i]] = ((p >> i) & 1U) != 0 ? kAll : 0;
      for (std::size_t j = 0; j < kkey.size(); ++j) v[kkey[j]] = index_word(j, base);
      ck.eval(v);
      for (std::size_t o = 0; o < no; ++o) {
        const std::uint64_t want = ref_bit(p, o) ? kAll : 0;
        alive &= ~(v[kout[o]] ^ want);
      }
      if (alive == 0) break;
    }
    for (std::uint64_t b = 0; b < 64; ++b) {
      if (((alive >> b) & 1U) != 0) survivors.push_back(base + b);
    }
  }

  for (std::uint64_t k : survivors) {
    bool ok = true;
    for (std::uint64_t w = 0; w < words && ok; ++w) {
      std::fill(v.begin(), v.end(), 0);
      for (std::size_t i = 0; i < data.size(); ++i) v[kdata[i]] = index_word(i, w * 64);
      for (std::size_t j = 0; j < kkey.size(); ++j) v[kkey[j]] = ((k >> j) & 1U) != 0 ? kAll : 0;
      ck.eval(v);
      for (std::size_t o = 0; o < no; ++o) {
        if (((v[kout[o]] ^ ref[w * no + o]) & pmask) != 0) {
          ok = false;
          break;
        }
      }
    }
    match[k] = ok;
  }
  return match;
}

KeyClassification classify_keys(const LockedDesign& d) {
  const auto names = d.correct_key.names();
  KeyClassification c;
  const AttackInstance inst = unroll(d, 1);
  const AttackInstance ref = unroll_oracle(d, 1);
  c.scan_correct = matching_keys(inst.comb, ref.comb, names);
  c.functional_correct = matching_keys(comb_view(d.netlist), comb_view(d.original), names);
  return c;
}

KeySpaceCensus census(const LockedDesign& d, CensusMethod method) {
  KeySpaceCensus r;
  r.n = d.seql_count();
  const std::size_t k = d.correct_key.size();
  if (k > 63) throw std::invalid_argument("key space too large to count");
  r.total_keys = std::uint64_t{1} << k;
  if (method == CensusMethod::ClosedForm) {
    if (!closed_form_applies(d)) {
      r.warning = "closed form assumes SeqL flip-flops on chains of their own whose outputs reach no flip-flop";
    }
    r.scan_correct_count = std::uint64_t{1} << r.n;
    r.functional_correct_count = std::uint64_t{1} << r.n;
    r.intersection_count = 1;
    r.p = 1.0 - 1.0 / std::ldexp(1.0, static_cast<int>(r.n));
    return r;
  }
  if (k > 24) throw std::invalid_argument("brute-force census needs at most 24 key bits, design has " + std::to_string(k));
  const auto c = classify_keys(d);
  for (std::size_t i = 0; i < c.scan_correct.size(); ++i) {
    r.scan_correct_count += c.scan_correct[i] ? 1 : 0;
    r.functional_correct_count += c.functional_correct[i] ? 1 : 0;
    r.intersection_count += c.scan_correct[i] && c.functional_correct[i] ? 1 : 0;
  }
  if (r.scan_correct_count > 0) {
    r.p = 1.0 - static_cast<double>(r.intersection_count) / static_cast<double>(r.scan_correct_count);
  }
  return r;
}

TruthTable truth_table(const LockedDesign& d) {
  if (d.correct_key.size() > 16) throw std::invalid_argument("truth table needs at most 16 key bits");
  TruthTable t;
  t.layout = d.correct_key.bits();
  const auto c = classify_keys(d);
  for (std::size_t r = 0; r < c.scan_correct.size(); ++r) {
    TruthRow row;
    for (std::size_t j = 0; j < t.layout.size(); ++j) row.key.push_back(((r >> j) & 1U) != 0);
    row.scan_correct = c.scan_correct[r];
    row.functional_correct = c.functional_correct[r];
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

const char* flag(bool b) { return b ? "TRUE" : "FALSE"; }

}  // namespace

void write_truth_table_csv(std::ostream& os, const LockedDesign& d, const TruthTable& t, bool pair_columns) {
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t j = 0; j < t.layout.size(); ++j) pos.emplace(t.layout[j].name, j);

  if (!pair_columns) {
    for (const auto& b : t.layout) os << b.name << ',';
    for (const auto& b : t.layout) os << "inv_" << b.name << ',';
    os << "scan_correct,functional_correct\n";
    for (const auto& row : t.rows) {
      for (bool v : row.key) os << (v ? 1 : 0) << ',';
      for (std::size_t j = 0; j < t.layout.size(); ++j) os << (net_inversion(row.key[j], t.layout[j].polarity) ? 1 : 0) << ',';
      os << flag(row.scan_correct) << ',' << flag(row.functional_correct) << '\n';
    }
    return;
  }

  // Column j (most significant first) -> key position and whether the value
  // shown is the net inversion.
  struct Column {
    std::string header;
    std::size_t key;
  };
  std::vector<Column> cols;
  std::set<std::size_t> used;
  const auto ffs = seql_ffs_from_so(d);
  for (std::size_t i = 0; i < ffs.size(); ++i) {
    const auto& s = d.style(ffs[i]);
    const std::string idx = std::to_string(ffs.size() - 1 - i);
    cols.push_back({"fik_" + idx + (s.fi->polarity == Polarity::Xnor ? "'" : ""), pos.at(s.fi->key)});
    cols.push_back({"sqk_" + idx + (s.sq->polarity == Polarity::Xnor ? "'" : ""), pos.at(s.sq->key)});
    used.insert(cols[cols.size() - 2].key);
    used.insert(cols.back().key);
  }
  for (std::size_t j = 0; j < t.layout.size(); ++j) {
    if (!used.contains(j)) cols.push_back({t.layout[j].name, j});
  }
  for (const auto& c : cols) os << c.header << ',';
  os << "Scan-Correct,Functional-Correct\n";

  const std::size_t w = cols.size();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    std::size_t index = 0;
    std::vector<bool> shown(w);
    for (std::size_t c = 0; c < w; ++c) {
      shown[c] = ((r >> (w - 1 - c)) & 1U) != 0;
      const auto& bit = t.layout[cols[c].key];
      const bool is_pair = used.contains(cols[c].key);
      const bool raw = is_pair ? shown[c] != identity_bit(bit.polarity) : shown[c];
      if (raw) index |= std::size_t{1} << cols[c].key;
    }
    for (bool b : shown) os << (b ? 1 : 0) << ',';
    os << flag(t.rows[index].scan_correct) << ',' << flag(t.rows[index].functional_correct) << '\n';
  }
}

void write_census_csv(std::ostream& os, const std::vector<KeySpaceCensus>& rows) {
  os << "n,total_keys,scan_correct,functional_correct,intersection,p\n";
  for (const auto& r : rows) {
    os << r.n << ',' << r.total_keys << ',' << r.scan_correct_count << ',' << r.functional_correct_count << ','
       << r.intersection_count << ',' << r.p << '\n';
  }
}

}  // namespace seql
