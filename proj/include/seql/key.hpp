// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seql {

enum class Polarity : std::uint8_t { Xor, Xnor };

/// Which part of the sequential key a bit belongs to. `FunctionalOutput`
/// holds the Q-side keys of EFF-style locking; the other three are the
/// combinational, flip-flop input and scan-output partitions.
enum class KeyRole : std::uint8_t { Comb, FunctionalInput, ScanOutput, FunctionalOutput };

std::string_view to_string(Polarity p);
std::string_view to_string(KeyRole r);
std::optional<Polarity> parse_polarity(std::string_view s);
std::optional<KeyRole> parse_key_role(std::string_view s);

/// Key value under which a key gate of polarity `p` is transparent.
constexpr bool identity_bit(Polarity p) { return p == Polarity::Xnor; }

/// Effective inversion applied by a key gate: key for XOR, complement for XNOR.
constexpr bool net_inversion(bool key, Polarity p) { return key != identity_bit(p); }

struct KeyBit {
  std::string name;
  bool value = false;
  KeyRole role = KeyRole::Comb;
  Polarity polarity = Polarity::Xor;

  bool operator==(const KeyBit&) const = default;
};

class KeyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered set of named key bits with their partition and gate polarity.
class KeyVector {
 public:
  KeyVector() = default;

  void add(KeyBit bit);
  bool contains(std::string_view name) const { return index_.contains(name); }
  const KeyBit& at(std::string_view name) const;
  bool value(std::string_view name) const { return at(name).value; }
  void set(std::string_view name, bool value);
  void erase(std::string_view name);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  const std::vector<KeyBit>& bits() const { return bits_; }
  std::vector<std::string> names(std::optional<KeyRole> role = std::nullopt) const;
  std::size_t count(KeyRole role) const;

  /// Same names, values replaced from `values` (missing names throw).
  KeyVector with_values(const std::map<std::string, bool, std::less<>>& values) const;
  std::map<std::string, bool, std::less<>> values() const;

  bool operator==(const KeyVector& other) const { return bits_ == other.bits_; }

 private:
  void reindex();

  std::vector<KeyBit> bits_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// One line per key: `<name> <bit> <Kc|Kfi|Ksq|Kfo> <XOR|XNOR>`; `#` comments.
KeyVector parse_key_file(std::string_view text);
std::string serialize_key_file(const KeyVector& key);

}  // namespace seql
