// SPDX-License-Identifier: Apache-2.0
#include "seql/lock.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "seql/bench.hpp"
#include "seql/feedback.hpp"

namespace seql {

namespace {

GateKind gate_kind(Polarity p) { return p == Polarity::Xor ? GateKind::Xor : GateKind::Xnor; }

void add_key_input(LockedDesign& d, const std::string& key, KeyRole role, Polarity pol) {
  d.netlist.add_input(key);
  d.correct_key.add({key, identity_bit(pol), role, pol});
}

FFLockStyle& mutable_style(LockedDesign& d, std::string_view ff) {
  auto it = d.styles.find(ff);
  if (it == d.styles.end()) it = d.styles.emplace(std::string(ff), FFLockStyle{}).first;
  return it->second;
}

}  // namespace

std::vector<std::string> LockedDesign::locked_ffs() const {
  std::vector<std::string> out;
  for (const auto& ff : chains.load_order()) {
    auto it = styles.find(ff);
    if (it != styles.end() && it->second.kind != FFLockStyle::Kind::Unlocked) out.push_back(ff);
  }
  return out;
}

std::size_t LockedDesign::seql_count() const {
  return static_cast<std::size_t>(std::count_if(styles.begin(), styles.end(), [](const auto& kv) {
    return kv.second.kind == FFLockStyle::Kind::Seql;
  }));
}

const FFLockStyle& LockedDesign::style(std::string_view ff) const {
  static const FFLockStyle unlocked;
  auto it = styles.find(ff);
  return it == styles.end() ? unlocked : it->second;
}

LockedDesign make_design(const Netlist& original, std::optional<ScanConfig> chains) {
  LockedDesign d;
  d.original = original;
  d.netlist = original;
  d.chains = chains ? std::move(*chains) : default_scan_config(original);
  d.chains.validate(original);
  return d;
}

std::string next_key_name(const LockedDesign& d) {
  for (std::size_t i = 0;; ++i) {
    std::string name = d.key_prefix + std::to_string(i);
    if (!d.netlist.has_net(name) && !d.original.has_net(name)) return name;
  }
}

KeyGate lock_eff_ff(LockedDesign& d, std::string_view ff, Polarity polarity) {
  if (!d.netlist.is_flip_flop(ff)) throw LockError("flip-flop '" + std::string(ff) + "' not found");
  if (d.style(ff).kind != FFLockStyle::Kind::Unlocked) {
    throw LockError("flip-flop '" + std::string(ff) + "' is already locked");
  }
  const std::string key = next_key_name(d);
  const std::string net = d.netlist.fresh_name(std::string(ff) + "_fo");
  add_key_input(d, key, KeyRole::FunctionalOutput, polarity);
  d.netlist.add_gate(net, gate_kind(polarity), {std::string(ff), key});
  d.netlist.redirect_fanouts(ff, net, {net});
  FFLockStyle& s = mutable_style(d, ff);
  s.kind = FFLockStyle::Kind::EffFo;
  s.fo = KeyGate{key, polarity, net};
  return *s.fo;
}

LockedDesign lock_eff(LockedDesign base, const std::vector<std::string>& ffs, std::uint64_t seed) {
  if (ffs.empty()) throw LockError("no flip-flops selected for locking");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  for (const auto& ff : ffs) lock_eff_ff(base, ff, coin(rng) ? Polarity::Xnor : Polarity::Xor);
  base.seed = seed;
  base.netlist.validate();
  return base;
}

LockedDesign lock_eff(const Netlist& n, const ScanConfig& chains, const std::vector<std::string>& ffs,
                      std::uint64_t seed) {
  return lock_eff(make_design(n, chains), ffs, seed);
}

SeqlLock lock_seql_ff(LockedDesign& d, std::string_view ff, Polarity fi_polarity, Polarity sq_polarity) {
  if (!d.netlist.is_flip_flop(ff)) throw LockError("flip-flop '" + std::string(ff) + "' not found");
  if (d.style(ff).kind != FFLockStyle::Kind::Unlocked) {
    throw LockError("flip-flop '" + std::string(ff) + "' is already locked");
  }
  for (const auto& info : classify_feedback(d.netlist)) {
    if (info.ff_net == ff && info.has_feedback) {
      throw LockError("flip-flop '" + std::string(ff) + "' has feedback and cannot take a SeqL lock");
    }
  }
  const std::string d_net = d.netlist.d_net(ff);
  const std::string fi_key = next_key_name(d);
  add_key_input(d, fi_key, KeyRole::FunctionalInput, fi_polarity);
  const std::string sq_key = next_key_name(d);
  add_key_input(d, sq_key, KeyRole::ScanOutput, sq_polarity);

  const std::string fi_net = d.netlist.fresh_name(std::string(ff) + "_fi");
  d.netlist.add_gate(fi_net, gate_kind(fi_polarity), {d_net, fi_key});
  d.netlist.set_gate(ff, GateKind::Dff, {fi_net});
  const std::string sq_net = d.netlist.fresh_name(std::string(ff) + "_sq");
  d.netlist.add_gate(sq_net, gate_kind(sq_polarity), {std::string(ff), sq_key});

  FFLockStyle& s = mutable_style(d, ff);
  s.kind = FFLockStyle::Kind::Seql;
  s.fi = KeyGate{fi_key, fi_polarity, fi_net};
  s.sq = KeyGate{sq_key, sq_polarity, sq_net};
  return {*s.fi, *s.sq};
}

void insert_comb_keys(LockedDesign& d, const CombLockOptions& opts) {
  std::set<std::string, std::less<>> excluded;
  for (const auto& [ff, s] : d.styles) {
    for (const auto* g : {&s.fi, &s.sq, &s.fo}) {
      if (*g) excluded.insert((*g)->net);
    }
  }
  for (const auto& g : d.comb_gates) excluded.insert(g.net);

  // Nets feeding flip-flop data inputs (optionally restricted to some flip-flops).
  std::set<std::string, std::less<>> cone;
  std::vector<std::string> work;
  const auto roots = opts.cone_of.empty() ? d.netlist.flip_flops() : opts.cone_of;
  for (const auto& q : roots) work.push_back(d.netlist.d_net(q));
  if (opts.cone_of.empty()) {
    for (const auto& o : d.netlist.outputs()) work.push_back(o);
  }
  while (!work.empty()) {
    std::string net = work.back();
    work.pop_back();
    const Gate* g = d.netlist.find_gate(net);
    if (g == nullptr || g->kind == GateKind::Dff || !cone.insert(net).second) continue;
    for (const auto& in : g->fanin) work.push_back(in);
  }

  std::vector<std::string> candidates;
  for (const auto& net : d.netlist.gate_order()) {
    if (!cone.contains(net) || excluded.contains(net)) continue;
    const Gate& g = d.netlist.gate(net);
    if (g.kind == GateKind::Const0 || g.kind == GateKind::Const1) continue;
    const bool reads_key = std::any_of(g.fanin.begin(), g.fanin.end(),
                                       [&](const std::string& in) { return d.correct_key.contains(in); });
    if (!reads_key) candidates.push_back(net);
  }
  if (candidates.size() < opts.count) {
    throw LockError("only " + std::to_string(candidates.size()) + " sites available for " +
                    std::to_string(opts.count) + " combinational key gates");
  }
  std::mt19937_64 rng(opts.seed);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < opts.count; ++i) {
    const std::string& net = candidates[i];
    const Polarity pol = coin(rng) ? Polarity::Xnor : Polarity::Xor;
    const std::string key = next_key_name(d);
    add_key_input(d, key, KeyRole::Comb, pol);
    const Gate g = d.netlist.gate(net);
    const std::string pre = d.netlist.fresh_name(net + "_pre");
    d.netlist.add_gate(pre, g.kind, g.fanin);
    d.netlist.set_gate(net, gate_kind(pol), {pre, key});
    d.comb_gates.push_back(KeyGate{key, pol, net});
  }
  d.netlist.validate();
}

void remove_comb_key(LockedDesign& d, std::string_view key) {
  auto it = std::find_if(d.comb_gates.begin(), d.comb_gates.end(),
                         [&](const KeyGate& g) { return g.key == key; });
  if (it == d.comb_gates.end()) throw LockError("no combinational key gate uses '" + std::string(key) + "'");
  const Gate g = d.netlist.gate(it->net);
  const std::string pre = g.fanin[0] == key ? g.fanin[1] : g.fanin[0];
  const Gate inner = d.netlist.gate(pre);
  if (d.netlist.fanouts(pre).size() == 1 && !d.netlist.is_output(pre) && !d.netlist.is_flip_flop(pre)) {
    d.netlist.set_gate(it->net, inner.kind, inner.fanin);
    d.netlist.remove_gate(pre);
  } else {
    d.netlist.set_gate(it->net, GateKind::Buf, {pre});
  }
  d.netlist.remove_input(key);
  d.correct_key.erase(key);
  d.comb_gates.erase(it);
}

OverheadReport overhead_report(const LockedDesign& d) {
  OverheadReport r;
  r.key_gate_count = d.correct_key.size();
  r.scan_key_gates = d.correct_key.count(KeyRole::FunctionalInput) + d.correct_key.count(KeyRole::ScanOutput) +
                     d.correct_key.count(KeyRole::FunctionalOutput);
  r.gate_count = d.original.gate_count();
  r.percent = r.gate_count == 0 ? 0.0 : 100.0 * static_cast<double>(r.key_gate_count) / static_cast<double>(r.gate_count);
  return r;
}

void infer_lock_structure(LockedDesign& d) {
  d.styles.clear();
  d.comb_gates.clear();
  std::map<std::string, std::string, std::less<>> dff_of_d;
  for (const auto& q : d.netlist.flip_flops()) dff_of_d.emplace(d.netlist.d_net(q), q);

  for (const auto& bit : d.correct_key.bits()) {
    if (!d.netlist.is_input(bit.name)) throw LockError("key '" + bit.name + "' is not an input of the netlist");
    auto readers = d.netlist.fanouts(bit.name);
    if (readers.size() != 1) {
      throw LockError("key '" + bit.name + "' must drive exactly one key gate, drives " +
                      std::to_string(readers.size()));
    }
    const std::string& net = readers.front();
    const Gate& g = d.netlist.gate(net);
    if (!is_key_gate_kind(g.kind) || g.fanin.size() != 2) {
      throw LockError("key '" + bit.name + "' does not drive a 2-input XOR/XNOR gate");
    }
    const std::string& other = g.fanin[0] == bit.name ? g.fanin[1] : g.fanin[0];
    KeyGate kg{bit.name, bit.polarity, net};
    switch (bit.role) {
      case KeyRole::Comb:
        d.comb_gates.push_back(kg);
        break;
      case KeyRole::FunctionalInput: {
        auto it = dff_of_d.find(net);
        if (it == dff_of_d.end()) throw LockError("FI key '" + bit.name + "' does not feed a flip-flop");
        auto& s = mutable_style(d, it->second);
        s.kind = FFLockStyle::Kind::Seql;
        s.fi = kg;
        break;
      }
      case KeyRole::ScanOutput:
      case KeyRole::FunctionalOutput: {
        if (!d.netlist.is_flip_flop(other)) {
          throw LockError("key '" + bit.name + "' does not sit on a flip-flop output");
        }
        auto& s = mutable_style(d, other);
        if (bit.role == KeyRole::ScanOutput) {
          s.kind = FFLockStyle::Kind::Seql;
          s.sq = kg;
        } else {
          s.kind = FFLockStyle::Kind::EffFo;
          s.fo = kg;
        }
        break;
      }
    }
  }
  for (const auto& [ff, s] : d.styles) {
    if (s.kind == FFLockStyle::Kind::Seql && (!s.fi || !s.sq)) {
      throw LockError("flip-flop '" + ff + "' has an incomplete FI-SQ pair");
    }
  }
}

DesignFiles design_files(const std::filesystem::path& dir, const std::string& stem) {
  return {dir / (stem + ".bench"), dir / (stem + ".key"), dir / (stem + ".chain"),
          dir / (stem + ".oracle.bench")};
}

DesignFiles companion_files(const std::filesystem::path& locked_bench) {
  auto dir = locked_bench.parent_path();
  auto stem = locked_bench.stem().string();
  return design_files(dir, stem);
}

void save_design(const LockedDesign& d, const DesignFiles& files) {
  write_text_file(files.bench, serialize_bench(d.netlist));
  write_text_file(files.key, serialize_key_file(d.correct_key));
  write_text_file(files.chain, serialize_chain_file(d.chains));
  write_text_file(files.oracle, serialize_bench(d.original));
}

LockedDesign load_design(const DesignFiles& files) {
  LockedDesign d;
  d.netlist = read_bench_file(files.bench);
  d.original = std::filesystem::exists(files.oracle) ? read_bench_file(files.oracle) : Netlist{};
  d.correct_key = std::filesystem::exists(files.key) ? parse_key_file(read_text_file(files.key)) : KeyVector{};
  d.chains = std::filesystem::exists(files.chain) ? parse_chain_file(read_text_file(files.chain))
                                                  : default_scan_config(d.netlist);
  if (!std::filesystem::exists(files.oracle)) {
    if (!d.correct_key.empty()) {
      throw LockError("missing oracle netlist '" + files.oracle.string() + "' for a locked design");
    }
    d.original = d.netlist;
  }
  d.chains.validate(d.netlist);
  infer_lock_structure(d);
  return d;
}

}  // namespace seql
