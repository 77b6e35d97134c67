#pragma once

// Minimal reader for the GML subset used by public network collections:
// graph [ node [ id .. value .. ] edge [ source .. target .. ] ].
// Nodes are renumbered 0..n-1 in file order; edges are symmetrized.

#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "btsbm/error.hpp"
#include "btsbm/graph.hpp"

namespace btsbm {

struct GmlNetwork {
  std::vector<long long> ids;                    // original id of vertex k
  std::vector<std::optional<std::string>> values;  // "value" attribute, if any
  Graph graph;
  std::size_t duplicates_removed = 0;
  std::size_t self_loops_removed = 0;
};

namespace detail {

class GmlLexer {
 public:
  explicit GmlLexer(const std::string& text) : s_(text) {}

  /// Next token: '[' , ']', a quoted string (quotes stripped) or a bare word.
  std::optional<std::string> next(bool& quoted) {
    quoted = false;
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (c == '\n') ++line_;
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ >= s_.size()) return std::nullopt;
    const char c = s_[pos_];
    if (c == '[' || c == ']') {
      ++pos_;
      return std::string(1, c);
    }
    if (c == '"') {
      const auto end = s_.find('"', pos_ + 1);
      if (end == std::string::npos) throw DataError("GML line " + std::to_string(line_) + ": unterminated string");
      std::string tok = s_.substr(pos_ + 1, end - pos_ - 1);
      for (char ch : tok) line_ += ch == '\n';
      pos_ = end + 1;
      quoted = true;
      return tok;
    }
    const auto start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '[' &&
           s_[pos_] != ']') {
      ++pos_;
    }
    return s_.substr(start, pos_ - start);
  }

  std::size_t line() const { return line_; }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

struct GmlRecord {
  std::map<std::string, std::string> scalars;
};

}  // namespace detail

inline GmlNetwork parse_gml(const std::string& text) {
  detail::GmlLexer lex(text);
  bool quoted = false;
  auto fail = [&](const std::string& why) {
    throw DataError("GML line " + std::to_string(lex.line()) + ": " + why);
  };
  std::vector<detail::GmlRecord> nodes, edges;
  // Depth 1 is inside graph[ ]; depth 2 inside node[ ] or edge[ ].
  std::vector<std::string> stack;
  std::optional<std::string> key;
  detail::GmlRecord* current = nullptr;
  while (auto tok = lex.next(quoted)) {
    if (!quoted && *tok == "[") {
      if (!key) fail("'[' without a key");
      stack.push_back(*key);
      if (stack.size() == 2 && stack[0] == "graph") {
        if (*key == "node") current = &nodes.emplace_back();
        else if (*key == "edge") current = &edges.emplace_back();
      }
      key.reset();
    } else if (!quoted && *tok == "]") {
      if (stack.empty()) fail("unbalanced ']'");
      if (stack.size() == 2) current = nullptr;
      stack.pop_back();
    } else if (!key) {
      if (quoted) fail("expected a key, got a string");
      key = *tok;
    } else {
      if (current && stack.size() == 2) current->scalars[*key] = *tok;
      key.reset();
    }
  }
  if (!stack.empty()) fail("unbalanced '['");

  GmlNetwork net;
  std::map<long long, std::size_t> index;
  auto as_int = [&](const detail::GmlRecord& r, const char* field) {
    const auto it = r.scalars.find(field);
    if (it == r.scalars.end()) throw DataError(std::string("GML record without \"") + field + "\"");
    try {
      std::size_t used = 0;
      const long long v = std::stoll(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::logic_error&) {
      throw DataError(std::string("GML field \"") + field + "\" is not an integer: " + it->second);
    }
  };
  for (const auto& r : nodes) {
    const long long id = as_int(r, "id");
    if (!index.emplace(id, net.ids.size()).second) throw DataError("GML node id " + std::to_string(id) + " repeated");
    net.ids.push_back(id);
    const auto v = r.scalars.find("value");
    net.values.push_back(v == r.scalars.end() ? std::nullopt : std::optional<std::string>(v->second));
  }
  std::vector<Edge> raw;
  for (const auto& r : edges) {
    const long long s = as_int(r, "source"), t = as_int(r, "target");
    const auto a = index.find(s), b = index.find(t);
    if (a == index.end() || b == index.end()) throw DataError("GML edge references an unknown node");
    raw.push_back({static_cast<Vertex>(a->second), static_cast<Vertex>(b->second)});
  }
  auto norm = Graph::normalize(net.ids.size(), std::move(raw));
  net.graph = std::move(norm.graph);
  net.duplicates_removed = norm.duplicates_removed;
  net.self_loops_removed = norm.self_loops_removed;
  return net;
}

}  // namespace btsbm
