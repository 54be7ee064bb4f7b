// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "seql/netlist.hpp"

namespace seql {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads the `.bench` dialect: `INPUT(x)`, `OUTPUT(x)`, `y = KIND(a, b, ...)`
/// and `#` comments. Keywords are case-insensitive. The result is validated.
Netlist parse_bench(std::string_view text, std::string name = "top");

/// Inverse of parse_bench up to whitespace and comments.
std::string serialize_bench(const Netlist& n);

/// Parses bench text that may also use the complex cells AOI21, AOI22,
/// OAI21, OAI22, HA and FA, rewriting each into basic gates. A half or full
/// adder `h = HA(a, b)` defines the two nets `h_S` (sum) and `h_C` (carry).
Netlist decompose_complex(std::string_view text, std::string name = "top");

Netlist read_bench_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace seql
