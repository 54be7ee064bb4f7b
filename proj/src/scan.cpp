// SPDX-License-Identifier: Apache-2.0
#include "seql/scan.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

namespace seql {

std::size_t ScanConfig::ff_count() const {
  std::size_t n = 0;
  for (const auto& c : chains) n += c.order.size();
  return n;
}

std::vector<std::string> ScanConfig::load_order() const {
  std::vector<std::string> out;
  for (const auto& c : chains) out.insert(out.end(), c.order.begin(), c.order.end());
  return out;
}

std::vector<std::string> ScanConfig::unload_order() const {
  std::vector<std::string> out;
  for (const auto& c : chains) out.insert(out.end(), c.order.rbegin(), c.order.rend());
  return out;
}

void ScanConfig::validate(const Netlist& n) const {
  std::set<std::string, std::less<>> seen;
  for (const auto& c : chains) {
    for (const auto& ff : c.order) {
      if (!n.is_flip_flop(ff)) throw ScanError("scan chain lists '" + ff + "', which is not a flip-flop");
      if (!seen.insert(ff).second) throw ScanError("flip-flop '" + ff + "' appears twice in the scan chains");
    }
  }
  for (const auto& ff : n.flip_flops()) {
    if (!seen.contains(ff)) throw ScanError("flip-flop '" + ff + "' is not on any scan chain");
  }
}

ScanConfig default_scan_config(const Netlist& n) {
  ScanConfig cfg;
  cfg.chains.push_back(ScanChain{"SI", "SO", n.flip_flops()});
  return cfg;
}

ScanConfig parse_chain_file(std::string_view text) {
  ScanConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto colon = line.find(':');
    std::istringstream head(line.substr(0, colon));
    std::string kw;
    if (!(head >> kw)) continue;
    ScanChain chain;
    std::string extra;
    if (kw != "CHAIN" || colon == std::string::npos || !(head >> chain.si_port >> chain.so_port) ||
        (head >> extra)) {
      throw ScanError("chain file line " + std::to_string(line_no) + ": expected 'CHAIN <si> <so>: ff...'");
    }
    std::istringstream body(line.substr(colon + 1));
    for (std::string ff; body >> ff;) chain.order.push_back(ff);
    cfg.chains.push_back(std::move(chain));
  }
  return cfg;
}

std::string serialize_chain_file(const ScanConfig& cfg) {
  std::ostringstream os;
  for (const auto& c : cfg.chains) {
    os << "CHAIN " << c.si_port << ' ' << c.so_port << ':';
    for (const auto& ff : c.order) os << ' ' << ff;
    os << '\n';
  }
  return os.str();
}

Oracle::Oracle(OracleConfig cfg) : cfg_(std::move(cfg)), compiled_(cfg_.netlist) {
  if (cfg_.cycles < 1) throw ScanError("capture cycle count must be >= 1");
  cfg_.chains.validate(cfg_.netlist);
  const auto ffs = cfg_.netlist.flip_flops();
  std::unordered_map<std::string, std::size_t> ff_index;
  for (std::size_t i = 0; i < ffs.size(); ++i) ff_index.emplace(ffs[i], i);
  for (const auto& ff : cfg_.chains.load_order()) load_.push_back(ff_index.at(ff));
  for (const auto& ff : cfg_.chains.unload_order()) unload_.push_back(ff_index.at(ff));
}

std::vector<std::uint64_t> Oracle::query_words(std::span<const std::uint64_t> scan_in,
                                               std::span<const std::uint64_t> pi) const {
  const std::size_t width = pi_width();
  if (scan_in.size() != scan_width()) throw ScanError("scan-in vector has wrong length");
  if (!pi.empty() && pi.size() != width * static_cast<std::size_t>(cfg_.cycles)) {
    throw ScanError("primary-input vector has wrong length");
  }
  const std::size_t nff = load_.size();
  std::vector<std::uint64_t> state(nff);
  for (std::size_t p = 0; p < nff; ++p) state[load_[p]] = scan_in[p];

  std::vector<std::uint64_t> values(compiled_.slot_count(), 0);
  for (int c = 0; c < cfg_.cycles; ++c) {
    for (std::size_t i = 0; i < width; ++i) values[i] = pi.empty() ? 0 : pi[c * width + i];
    for (std::size_t f = 0; f < nff; ++f) values[width + f] = state[f];
    compiled_.eval(values);
    for (std::size_t f = 0; f < nff; ++f) state[f] = values[compiled_.next_state_slots()[f]];
  }
  std::vector<std::uint64_t> out(nff);
  for (std::size_t p = 0; p < nff; ++p) out[p] = state[unload_[p]];
  return out;
}

namespace {

std::vector<std::uint64_t> to_words(const std::vector<bool>& bits) {
  std::vector<std::uint64_t> w(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) w[i] = bits[i] ? 1 : 0;
  return w;
}

std::vector<std::uint64_t> flatten_pi(const std::vector<std::vector<bool>>& pi, std::size_t width,
                                      int cycles) {
  if (pi.empty()) return {};
  if (pi.size() != static_cast<std::size_t>(cycles)) throw ScanError("need one input vector per capture cycle");
  std::vector<std::uint64_t> out;
  for (const auto& v : pi) {
    if (v.size() != width) throw ScanError("primary-input vector has wrong length");
    for (bool b : v) out.push_back(b ? 1 : 0);
  }
  return out;
}

}  // namespace

std::vector<bool> Oracle::query(const std::vector<bool>& scan_in,
                                const std::vector<std::vector<bool>>& pi) const {
  auto words = query_words(to_words(scan_in), flatten_pi(pi, pi_width(), cfg_.cycles));
  std::vector<bool> out(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) out[i] = (words[i] & 1) != 0;
  return out;
}

std::vector<bool> oracle_query(const OracleConfig& cfg, const std::vector<bool>& scan_in,
                               const std::vector<std::vector<bool>>& pi) {
  return Oracle(cfg).query(scan_in, pi);
}

std::vector<ShiftParity> shift_semantics(const LockStyles& styles, const ScanChain& chain,
                                         const KeyVector& key) {
  const std::size_t m = chain.order.size();
  std::vector<bool> sigma(m, false);
  std::vector<ShiftParity> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    out[k].ff = chain.order[k];
    auto it = styles.find(chain.order[k]);
    if (it == styles.end()) continue;
    const FFLockStyle& s = it->second;
    if (const auto& g = s.scan_gate()) sigma[k] = net_inversion(key.value(g->key), g->polarity);
    if (s.kind == FFLockStyle::Kind::Seql && s.fi) out[k].fi_parity = net_inversion(key.value(s.fi->key), s.fi->polarity);
    if (s.kind == FFLockStyle::Kind::EffFo) out[k].fo_parity = sigma[k];
  }
  bool prefix = false;
  for (std::size_t k = 0; k < m; ++k) {
    out[k].load_parity = prefix;
    prefix = prefix != sigma[k];
  }
  bool suffix = false;
  for (std::size_t k = m; k-- > 0;) {
    suffix = suffix != sigma[k];
    out[k].observe_parity = suffix;
  }
  return out;
}

std::vector<bool> locked_scan_query(const Netlist& locked, const ScanConfig& chains,
                                    const LockStyles& styles, const KeyVector& key,
                                    const std::vector<bool>& scan_in, int cycles,
                                    const std::vector<std::vector<bool>>& pi) {
  if (cycles < 1) throw ScanError("capture cycle count must be >= 1");
  if (scan_in.size() != chains.ff_count()) throw ScanError("scan-in vector has wrong length");

  std::unordered_map<std::string, bool> state;
  auto scan_q = [&](const std::string& ff) {
    bool v = state[ff];
    auto it = styles.find(ff);
    if (it != styles.end()) {
      if (const auto& g = it->second.scan_gate()) v = v != net_inversion(key.value(g->key), g->polarity);
    }
    return v;
  };
  auto shift = [&](const ScanChain& c, bool si) {
    // Returns the bit present at SO before the clock edge.
    const bool so = scan_q(c.order.back());
    for (std::size_t j = c.order.size(); j-- > 1;) state[c.order[j]] = scan_q(c.order[j - 1]);
    state[c.order.front()] = si;
    return so;
  };

  for (const auto& ff : locked.flip_flops()) state[ff] = false;
  std::size_t base = 0;
  for (const auto& c : chains.chains) {
    const std::size_t m = c.order.size();
    for (std::size_t t = 0; t < m; ++t) shift(c, scan_in[base + m - 1 - t]);
    base += m;
  }

  CompiledNetlist compiled(locked);
  std::vector<std::uint64_t> values(compiled.slot_count(), 0);
  const auto ffs = locked.flip_flops();
  for (int cyc = 0; cyc < cycles; ++cyc) {
    std::size_t pi_pos = 0;
    for (std::size_t i = 0; i < compiled.input_count(); ++i) {
      const auto& net = locked.inputs()[i];
      if (key.contains(net)) {
        values[i] = key.value(net) ? 1 : 0;
      } else {
        values[i] = (!pi.empty() && pi.at(cyc).at(pi_pos)) ? 1 : 0;
        ++pi_pos;
      }
    }
    for (std::size_t f = 0; f < ffs.size(); ++f) values[compiled.input_count() + f] = state[ffs[f]] ? 1 : 0;
    compiled.eval(values);
    for (std::size_t f = 0; f < ffs.size(); ++f) state[ffs[f]] = (values[compiled.next_state_slots()[f]] & 1) != 0;
  }

  std::vector<bool> out;
  out.reserve(scan_in.size());
  for (const auto& c : chains.chains) {
    for (std::size_t t = 0; t < c.order.size(); ++t) out.push_back(shift(c, false));
  }
  return out;
}

}  // namespace seql
