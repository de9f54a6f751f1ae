#pragma once

// Text formats.
//   Junta:          n=<int> / relevant=<1-based comma list> / table=<0/1 chars>
//   AssignmentSet:  one row of n '0'/'1' characters per line
//   Hash family:    one map per line, n space-separated values in 1..q

#include <fstream>
#include <optional>
#include <sstream>

#include "junta/designs.hpp"

namespace junta::io {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::string format_junta(const Junta& j) {
  std::ostringstream os;
  os << "n=" << j.n << "\nrelevant=";
  for (std::size_t p = 0; p < j.relevant.size(); ++p) os << (p ? "," : "") << j.relevant[p] + 1;
  os << "\ntable=";
  for (auto b : j.table) os << (b ? '1' : '0');
  os << "\n";
  return os.str();
}

inline Junta parse_junta(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::optional<std::size_t> n;
  std::optional<std::vector<std::size_t>> vars;
  std::optional<std::vector<std::uint8_t>> table;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ContractViolation("junta file: expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    if (key == "n") {
      n = std::stoul(val);
    } else if (key == "relevant") {
      vars.emplace();
      std::istringstream vs(val);
      std::string tok;
      while (std::getline(vs, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        const auto idx = std::stoul(tok);
        if (idx == 0) throw ContractViolation("junta file: indices are 1-based");
        vars->push_back(idx - 1);
      }
    } else if (key == "table") {
      table.emplace();
      for (char c : val) {
        if (c != '0' && c != '1') throw ContractViolation("junta file: table must be 0/1");
        table->push_back(c == '1');
      }
    } else {
      throw ContractViolation("junta file: unknown key " + key);
    }
  }
  if (!n || !vars || !table) throw ContractViolation("junta file: missing n, relevant or table");
  return Junta::make(*n, std::move(*vars), std::move(*table));
}

inline std::string format_set(const AssignmentSet& s) {
  std::string out;
  out.reserve(s.size() * (s.n() + 1));
  for (std::size_t r = 0; r < s.size(); ++r) {
    for (std::size_t i = 0; i < s.n(); ++i) out.push_back(s.bit(r, i) ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

inline AssignmentSet parse_set(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::optional<AssignmentSet> out;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (!out) out.emplace(line.size());
    if (line.size() != out->n()) throw ContractViolation("assignment file: rows differ in length");
    out->push_back(Assignment::from_string(line));
  }
  if (!out) throw ContractViolation("assignment file: no rows");
  return *out;
}

inline std::string format_family(const HashFamily& h) {
  std::ostringstream os;
  for (const auto& m : h.maps) {
    for (std::size_t i = 0; i < m.size(); ++i) os << (i ? " " : "") << m[i] + 1;
    os << "\n";
  }
  return os.str();
}

/// Parses a hash family; q is the largest value present unless given.
inline HashFamily parse_family(const std::string& text, std::size_t q = 0) {
  std::istringstream is(text);
  std::string line;
  HashFamily h;
  std::size_t top = 0;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<std::uint32_t> m;
    long long v = 0;
    while (ls >> v) {
      if (v < 1) throw ContractViolation("hash family file: values are 1-based");
      m.push_back(static_cast<std::uint32_t>(v - 1));
      top = std::max<std::size_t>(top, static_cast<std::size_t>(v));
    }
    if (!ls.eof()) throw ContractViolation("hash family file: expected integers");
    if (!h.maps.empty() && m.size() != h.n) throw ContractViolation("hash family file: maps differ in length");
    h.n = m.size();
    h.maps.push_back(std::move(m));
  }
  if (h.maps.empty()) throw ContractViolation("hash family file: no maps");
  if (q != 0 && top > q) throw ContractViolation("hash family file: value exceeds q");
  h.q = q != 0 ? q : top;
  return h;
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ContractViolation("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ContractViolation("cannot write " + path);
  f << text;
}

}  // namespace junta::io
