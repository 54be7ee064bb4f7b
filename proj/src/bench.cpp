// SPDX-License-Identifier: Apache-2.0
#include "seql/bench.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace seql {

namespace {

struct Statement {
  enum class Type { Input, Output, Assign } type;
  std::size_t line = 0;
  std::string lhs;
  std::string keyword;
  std::vector<std::string> args;
};

std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool valid_net_name(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '[' || c == ']';
  });
}

std::string upper(std::string_view s) {
  std::string r(s);
  for (auto& c : r) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return r;
}

// Splits "KW(a, b, c)" into keyword and argument list.
void split_call(std::string_view text, std::size_t line, std::string& keyword,
                std::vector<std::string>& args) {
  auto open = text.find('(');
  auto close = text.rfind(')');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open ||
      !trim(text.substr(close + 1)).empty()) {
    throw ParseError(line, "expected KEYWORD(args), got '" + std::string(text) + "'");
  }
  keyword = std::string(trim(text.substr(0, open)));
  if (keyword.empty()) throw ParseError(line, "missing gate keyword");
  std::string_view inner = text.substr(open + 1, close - open - 1);
  args.clear();
  if (trim(inner).empty()) return;
  std::size_t start = 0;
  while (true) {
    auto comma = inner.find(',', start);
    auto piece = trim(inner.substr(start, comma == std::string_view::npos ? inner.npos : comma - start));
    if (!valid_net_name(piece)) throw ParseError(line, "invalid net name '" + std::string(piece) + "'");
    args.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
}

std::vector<Statement> tokenize(std::string_view text) {
  std::vector<Statement> statements;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;

    Statement st;
    st.line = line_no;
    if (auto eq = raw.find('='); eq != std::string_view::npos) {
      st.type = Statement::Type::Assign;
      st.lhs = std::string(trim(raw.substr(0, eq)));
      if (!valid_net_name(st.lhs)) throw ParseError(line_no, "invalid net name '" + st.lhs + "'");
      split_call(trim(raw.substr(eq + 1)), line_no, st.keyword, st.args);
    } else {
      std::string kw;
      split_call(raw, line_no, kw, st.args);
      auto ukw = upper(kw);
      if (ukw == "INPUT") {
        st.type = Statement::Type::Input;
      } else if (ukw == "OUTPUT") {
        st.type = Statement::Type::Output;
      } else {
        throw ParseError(line_no, "unknown declaration '" + kw + "'");
      }
      if (st.args.size() != 1) throw ParseError(line_no, kw + " takes exactly one net");
      st.lhs = st.args.front();
    }
    statements.push_back(std::move(st));
  }
  return statements;
}

Netlist build(const std::vector<Statement>& statements, std::string name) {
  Netlist n(std::move(name));
  std::unordered_map<std::string, std::size_t> def_line;
  std::vector<const Statement*> outputs;
  for (const auto& st : statements) {
    switch (st.type) {
      case Statement::Type::Input:
        if (def_line.contains(st.lhs)) throw ParseError(st.line, "duplicate definition of net '" + st.lhs + "'");
        def_line[st.lhs] = st.line;
        n.add_input(st.lhs);
        break;
      case Statement::Type::Output:
        outputs.push_back(&st);
        break;
      case Statement::Type::Assign: {
        if (def_line.contains(st.lhs)) throw ParseError(st.line, "duplicate definition of net '" + st.lhs + "'");
        auto kind = parse_gate_kind(st.keyword);
        if (!kind) throw ParseError(st.line, "unknown gate kind '" + st.keyword + "'");
        if (!arity_ok(*kind, st.args.size())) {
          throw ParseError(st.line, std::string(to_string(*kind)) + " cannot take " +
                                        std::to_string(st.args.size()) + " inputs");
        }
        def_line[st.lhs] = st.line;
        n.add_gate(st.lhs, *kind, st.args);
        break;
      }
    }
  }
  for (const auto* st : outputs) {
    if (n.is_output(st->lhs)) throw ParseError(st->line, "duplicate output '" + st->lhs + "'");
    if (!def_line.contains(st->lhs)) throw ParseError(st->line, "output '" + st->lhs + "' is undefined");
    n.add_output(st->lhs);
  }
  for (const auto& st : statements) {
    if (st.type != Statement::Type::Assign) continue;
    for (const auto& in : st.args) {
      if (!def_line.contains(in)) throw ParseError(st.line, "reference to undefined net '" + in + "'");
    }
  }
  try {
    n.validate();
  } catch (const NetlistError& e) {
    // Only a cycle can remain at this point; point at the net named in it.
    std::string msg = e.what();
    std::size_t line = 0;
    auto q1 = msg.find('\'');
    auto q2 = msg.rfind('\'');
    if (q1 != std::string::npos && q2 > q1) {
      auto it = def_line.find(msg.substr(q1 + 1, q2 - q1 - 1));
      if (it != def_line.end()) line = it->second;
    }
    throw ParseError(line, msg);
  }
  return n;
}

struct Macro {
  std::string_view name;
  std::size_t arity;
};

constexpr Macro kMacros[] = {{"AOI21", 3}, {"AOI22", 4}, {"OAI21", 3},
                             {"OAI22", 4}, {"HA", 2},    {"FA", 3}};

}  // namespace

Netlist parse_bench(std::string_view text, std::string name) {
  return build(tokenize(text), std::move(name));
}

std::string serialize_bench(const Netlist& n) {
  std::ostringstream os;
  os << "# " << n.name() << "\n";
  for (const auto& in : n.inputs()) os << "INPUT(" << in << ")\n";
  for (const auto& out : n.outputs()) os << "OUTPUT(" << out << ")\n";
  os << "\n";
  for (const auto& net : n.gate_order()) {
    const Gate& g = n.gate(net);
    os << net << " = " << to_string(g.kind) << "(";
    for (std::size_t i = 0; i < g.fanin.size(); ++i) os << (i ? ", " : "") << g.fanin[i];
    os << ")\n";
  }
  return os.str();
}

Netlist decompose_complex(std::string_view text, std::string name) {
  std::vector<Statement> in = tokenize(text);
  std::vector<Statement> out;
  out.reserve(in.size());
  for (auto& st : in) {
    if (st.type != Statement::Type::Assign || parse_gate_kind(st.keyword)) {
      out.push_back(std::move(st));
      continue;
    }
    const std::string kw = upper(st.keyword);
    auto macro = std::find_if(std::begin(kMacros), std::end(kMacros),
                              [&](const Macro& m) { return m.name == kw; });
    if (macro == std::end(kMacros)) throw ParseError(st.line, "unknown cell '" + st.keyword + "'");
    if (st.args.size() != macro->arity) {
      throw ParseError(st.line, kw + " expects " + std::to_string(macro->arity) + " inputs, got " +
                                    std::to_string(st.args.size()));
    }
    auto emit = [&](std::string lhs, std::string_view kind, std::vector<std::string> args) {
      Statement s;
      s.type = Statement::Type::Assign;
      s.line = st.line;
      s.lhs = std::move(lhs);
      s.keyword = std::string(kind);
      s.args = std::move(args);
      out.push_back(std::move(s));
    };
    const auto& a = st.args;
    const std::string& y = st.lhs;
    if (kw == "AOI21") {
      emit(y + "_d0", "AND", {a[0], a[1]});
      emit(y, "NOR", {y + "_d0", a[2]});
    } else if (kw == "AOI22") {
      emit(y + "_d0", "AND", {a[0], a[1]});
      emit(y + "_d1", "AND", {a[2], a[3]});
      emit(y, "NOR", {y + "_d0", y + "_d1"});
    } else if (kw == "OAI21") {
      emit(y + "_d0", "OR", {a[0], a[1]});
      emit(y, "NAND", {y + "_d0", a[2]});
    } else if (kw == "OAI22") {
      emit(y + "_d0", "OR", {a[0], a[1]});
      emit(y + "_d1", "OR", {a[2], a[3]});
      emit(y, "NAND", {y + "_d0", y + "_d1"});
    } else if (kw == "HA") {
      emit(y + "_S", "XOR", {a[0], a[1]});
      emit(y + "_C", "AND", {a[0], a[1]});
    } else {  // FA
      emit(y + "_S", "XOR", {a[0], a[1], a[2]});
      emit(y + "_d0", "AND", {a[0], a[1]});
      emit(y + "_d1", "AND", {a[0], a[2]});
      emit(y + "_d2", "AND", {a[1], a[2]});
      emit(y + "_C", "OR", {y + "_d0", y + "_d1", y + "_d2"});
    }
  }
  return build(out, std::move(name));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

Netlist read_bench_file(const std::filesystem::path& path) {
  return parse_bench(read_text_file(path), path.stem().string());
}

}  // namespace seql
