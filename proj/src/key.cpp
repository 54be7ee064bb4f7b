// SPDX-License-Identifier: Apache-2.0
#include "seql/key.hpp"

#include <algorithm>
#include <sstream>

namespace seql {

std::string_view to_string(Polarity p) { return p == Polarity::Xor ? "XOR" : "XNOR"; }

std::string_view to_string(KeyRole r) {
  switch (r) {
    case KeyRole::Comb: return "Kc";
    case KeyRole::FunctionalInput: return "Kfi";
    case KeyRole::ScanOutput: return "Ksq";
    case KeyRole::FunctionalOutput: return "Kfo";
  }
  return "?";
}

std::optional<Polarity> parse_polarity(std::string_view s) {
  if (s == "XOR" || s == "xor") return Polarity::Xor;
  if (s == "XNOR" || s == "xnor") return Polarity::Xnor;
  return std::nullopt;
}

std::optional<KeyRole> parse_key_role(std::string_view s) {
  for (auto r : {KeyRole::Comb, KeyRole::FunctionalInput, KeyRole::ScanOutput, KeyRole::FunctionalOutput}) {
    if (s == to_string(r)) return r;
  }
  return std::nullopt;
}

void KeyVector::add(KeyBit bit) {
  if (contains(bit.name)) throw KeyError("duplicate key '" + bit.name + "'");
  index_.emplace(bit.name, bits_.size());
  bits_.push_back(std::move(bit));
}

const KeyBit& KeyVector::at(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw KeyError("missing key bit '" + std::string(name) + "'");
  return bits_[it->second];
}

void KeyVector::set(std::string_view name, bool value) {
  auto it = index_.find(name);
  if (it == index_.end()) throw KeyError("missing key bit '" + std::string(name) + "'");
  bits_[it->second].value = value;
}

void KeyVector::erase(std::string_view name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw KeyError("missing key bit '" + std::string(name) + "'");
  bits_.erase(bits_.begin() + static_cast<std::ptrdiff_t>(it->second));
  reindex();
}

void KeyVector::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < bits_.size(); ++i) index_.emplace(bits_[i].name, i);
}

std::vector<std::string> KeyVector::names(std::optional<KeyRole> role) const {
  std::vector<std::string> out;
  for (const auto& b : bits_) {
    if (!role || b.role == *role) out.push_back(b.name);
  }
  return out;
}

std::size_t KeyVector::count(KeyRole role) const {
  return static_cast<std::size_t>(
      std::count_if(bits_.begin(), bits_.end(), [&](const KeyBit& b) { return b.role == role; }));
}

KeyVector KeyVector::with_values(const std::map<std::string, bool, std::less<>>& values) const {
  KeyVector out = *this;
  for (auto& b : out.bits_) {
    auto it = values.find(b.name);
    if (it == values.end()) throw KeyError("missing key bit '" + b.name + "'");
    b.value = it->second;
  }
  return out;
}

std::map<std::string, bool, std::less<>> KeyVector::values() const {
  std::map<std::string, bool, std::less<>> out;
  for (const auto& b : bits_) out.emplace(b.name, b.value);
  return out;
}

KeyVector parse_key_file(std::string_view text) {
  KeyVector key;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string name, bit, role, pol;
    if (!(ls >> name)) continue;
    std::string extra;
    if (!(ls >> bit >> role >> pol) || (ls >> extra)) {
      throw KeyError("key file line " + std::to_string(line_no) + ": expected '<name> <bit> <role> <polarity>'");
    }
    auto r = parse_key_role(role);
    auto p = parse_polarity(pol);
    if ((bit != "0" && bit != "1") || !r || !p) {
      throw KeyError("key file line " + std::to_string(line_no) + ": malformed entry");
    }
    key.add({name, bit == "1", *r, *p});
  }
  return key;
}

std::string serialize_key_file(const KeyVector& key) {
  std::ostringstream os;
  for (const auto& b : key.bits()) {
    os << b.name << ' ' << (b.value ? 1 : 0) << ' ' << to_string(b.role) << ' ' << to_string(b.polarity) << '\n';
  }
  return os.str();
}

}  // namespace seql
