#pragma once

// Plain-text graph and label formats, plus JSON emission of dendrograms.
//
// Edge list: one "u v" pair per line, whitespace separated. Lines starting
// with '#' are comments, except a header "# n=<count>" that declares the
// vertex count (isolated trailing vertices are otherwise invisible).
//
// Labels: one "vertex label" pair per line; the label is any token.

#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "btsbm/clustering.hpp"
#include "btsbm/error.hpp"
#include "btsbm/graph.hpp"

namespace btsbm {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Matches "# n=<count>" (spaces allowed around '=').
inline std::optional<std::size_t> declared_count(const std::string& line) {
  std::string body = trim(line.substr(1));
  if (body.size() < 2 || body[0] != 'n') return std::nullopt;
  body = trim(body.substr(1));
  if (body.empty() || body[0] != '=') return std::nullopt;
  body = trim(body.substr(1));
  if (body.empty() || body.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
  return static_cast<std::size_t>(std::stoull(body));
}

inline std::size_t parse_vertex(const std::string& token, bool one_based, std::size_t line_no,
                                const std::string& source) {
  auto fail = [&](const std::string& why) {
    throw DataError(source + ":" + std::to_string(line_no) + ": " + why);
  };
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
    fail("expected a non-negative vertex id, got \"" + token + "\"");
  }
  unsigned long long v = 0;
  try {
    v = std::stoull(token);
  } catch (const std::out_of_range&) {
    fail("vertex id out of range");
  }
  if (one_based) {
    if (v == 0) fail("vertex id 0 in a one-based file");
    --v;
  }
  if (v >= std::numeric_limits<Vertex>::max()) fail("vertex id out of range");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

struct EdgeListResult {
  Graph graph;
  std::vector<std::string> warnings;
};

inline EdgeListResult parse_edge_list(std::istream& in, bool one_based, const std::string& source = "<input>") {
  std::optional<std::size_t> declared;
  std::vector<Edge> raw;
  std::size_t max_vertex_plus_one = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t[0] == '#' || t[0] == '%') {
      if (auto n = detail::declared_count(t)) declared = n;
      continue;
    }
    std::istringstream fields(t);
    std::string a, b, extra;
    if (!(fields >> a >> b)) {
      throw DataError(source + ":" + std::to_string(line_no) + ": expected two vertex ids");
    }
    if (fields >> extra && extra[0] != '#') {
      // A third column (weight) is tolerated only when numeric.
      if (extra.find_first_not_of("0123456789.eE+-") != std::string::npos) {
        throw DataError(source + ":" + std::to_string(line_no) + ": unexpected token \"" + extra + "\"");
      }
    }
    const auto u = detail::parse_vertex(a, one_based, line_no, source);
    const auto v = detail::parse_vertex(b, one_based, line_no, source);
    max_vertex_plus_one = std::max({max_vertex_plus_one, u + 1, v + 1});
    raw.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
  }
  std::size_t n = max_vertex_plus_one;
  if (declared) {
    if (*declared < max_vertex_plus_one) {
      throw DataError(source + ": header declares n=" + std::to_string(*declared) +
                      " but vertex " + std::to_string(max_vertex_plus_one - 1) + " appears");
    }
    n = *declared;
  }
  auto norm = Graph::normalize(n, std::move(raw));
  EdgeListResult r{std::move(norm.graph), {}};
  if (norm.duplicates_removed > 0) {
    r.warnings.push_back(source + ": collapsed " + std::to_string(norm.duplicates_removed) +
                         " duplicate edge(s)");
  }
  if (norm.self_loops_removed > 0) {
    r.warnings.push_back(source + ": dropped " + std::to_string(norm.self_loops_removed) + " self-loop(s)");
  }
  return r;
}

inline EdgeListResult read_edge_list(const std::string& path, bool one_based = false) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list " + path);
  return parse_edge_list(in, one_based, path);
}

/// Loads a graph; warnings go to `warnings` when given.
inline Graph load_edge_list(const std::string& path, bool one_based = false,
                            std::vector<std::string>* warnings = nullptr) {
  auto r = read_edge_list(path, one_based);
  if (warnings) warnings->insert(warnings->end(), r.warnings.begin(), r.warnings.end());
  return std::move(r.graph);
}

/// Zero-based edge list with a "# n=" header, so isolated vertices survive a round trip.
inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# n=" << g.n() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

/// Reads "vertex label" lines. Every vertex 0..n-1 must receive exactly one label.
inline std::vector<std::string> parse_labels(std::istream& in, std::size_t n, bool one_based = false,
                                             const std::string& source = "<labels>") {
  std::vector<std::optional<std::string>> labels(n);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream fields(t);
    std::string v_tok, label;
    if (!(fields >> v_tok >> label)) {
      throw DataError(source + ":" + std::to_string(line_no) + ": expected \"vertex label\"");
    }
    const auto v = detail::parse_vertex(v_tok, one_based, line_no, source);
    if (v >= n) {
      throw DataError(source + ":" + std::to_string(line_no) + ": vertex " + v_tok +
                      " outside 0.." + std::to_string(n) + "-1");
    }
    if (labels[v]) {
      throw DataError(source + ":" + std::to_string(line_no) + ": vertex " + v_tok + " labelled twice");
    }
    labels[v] = label;
  }
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (!labels[v]) throw DataError(source + ": no label for vertex " + std::to_string(v));
    out.push_back(*labels[v]);
  }
  return out;
}

inline std::vector<std::string> load_labels(const std::string& path, std::size_t n, bool one_based = false) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open labels file " + path);
  return parse_labels(in, n, one_based, path);
}

/// Labels of arbitrary length with inferred n (largest vertex id + 1).
inline std::vector<std::string> load_labels_inferred(const std::string& path, bool one_based = false) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open labels file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::size_t n = 0;
  {
    std::istringstream scan(buffer.str());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(scan, line)) {
      ++line_no;
      const std::string t = detail::trim(line);
      if (t.empty() || t[0] == '#') continue;
      std::istringstream fields(t);
      std::string v_tok;
      fields >> v_tok;
      n = std::max(n, detail::parse_vertex(v_tok, one_based, line_no, path) + 1);
    }
  }
  std::istringstream again(buffer.str());
  return parse_labels(again, n, one_based, path);
}

/// {code, vertices, fiedler_value?, next_eigenvalue?, provenance?, stop_reason?, children?}
inline nlohmann::ordered_json cluster_node_json(const ClusterNode& c) {
  nlohmann::ordered_json j;
  j["code"] = c.code.str();
  j["vertices"] = c.vertices;
  if (c.split) {
    j["fiedler_value"] = c.split->fiedler_value;
    if (c.split->next_eigenvalue) j["next_eigenvalue"] = *c.split->next_eigenvalue;
    j["provenance"] = to_string(c.split->provenance);
  }
  if (c.stop_reason) j["stop_reason"] = to_string(*c.stop_reason);
  if (!c.is_leaf()) {
    j["children"] = nlohmann::ordered_json::array({cluster_node_json(c.children[0]), cluster_node_json(c.children[1])});
  }
  return j;
}

inline nlohmann::ordered_json dendrogram_json(const Dendrogram& d) {
  nlohmann::ordered_json j;
  j["n"] = d.n;
  j["height"] = d.height();
  j["root"] = cluster_node_json(d.root);
  return j;
}

}  // namespace btsbm
