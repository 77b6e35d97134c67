#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "btsbm/error.hpp"

namespace btsbm {

using Vertex = std::uint32_t;

struct Edge {
  Vertex u;
  Vertex v;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected simple graph: vertex count plus a strictly sorted list of
/// edges (u, v) with u < v.
class Graph {
 public:
  Graph() = default;

  /// Takes edges that already satisfy the invariants; throws otherwise.
  Graph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      const auto& e = edges_[k];
      if (!(e.u < e.v) || e.v >= n_) {
        throw InvalidArgument("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                              ") violates 0 <= u < v < n");
      }
      if (k > 0 && !(edges_[k - 1] < e)) {
        throw InvalidArgument("edge list must be strictly sorted without duplicates");
      }
    }
  }

  struct Normalized;
  /// Orients, sorts and deduplicates arbitrary pairs; self-loops are dropped.
  static Normalized normalize(std::size_t n, std::vector<Edge> raw);

  std::size_t n() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
};

struct Graph::Normalized {
  Graph graph;
  std::size_t duplicates_removed = 0;
  std::size_t self_loops_removed = 0;
};

inline Graph::Normalized Graph::normalize(std::size_t n, std::vector<Edge> raw) {
  Normalized out;
  std::vector<Edge> kept;
  kept.reserve(raw.size());
  for (auto e : raw) {
    if (e.u == e.v) {
      ++out.self_loops_removed;
      continue;
    }
    if (e.u > e.v) std::swap(e.u, e.v);
    kept.push_back(e);
  }
  std::sort(kept.begin(), kept.end());
  const auto last = std::unique(kept.begin(), kept.end());
  out.duplicates_removed = static_cast<std::size_t>(kept.end() - last);
  kept.erase(last, kept.end());
  out.graph = Graph(n, std::move(kept));
  return out;
}

inline std::vector<std::size_t> degrees(const Graph& g) {
  std::vector<std::size_t> d(g.n(), 0);
  for (const auto& e : g.edges()) {
    ++d[e.u];
    ++d[e.v];
  }
  return d;
}

/// Compressed adjacency lists, neighbours sorted ascending.
struct Adjacency {
  std::vector<std::size_t> offsets;  // size n + 1
  std::vector<Vertex> neighbours;

  std::span<const Vertex> of(std::size_t v) const {
    return {neighbours.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }
  std::size_t degree(std::size_t v) const { return offsets[v + 1] - offsets[v]; }
};

inline Adjacency adjacency(const Graph& g) {
  Adjacency a;
  const auto d = degrees(g);
  a.offsets.assign(g.n() + 1, 0);
  for (std::size_t v = 0; v < g.n(); ++v) a.offsets[v + 1] = a.offsets[v] + d[v];
  a.neighbours.resize(a.offsets.back());
  std::vector<std::size_t> fill(a.offsets.begin(), a.offsets.end() - 1);
  // Edges are sorted by (u, v), so each list comes out sorted.
  for (const auto& e : g.edges()) a.neighbours[fill[e.u]++] = e.v;
  for (const auto& e : g.edges()) a.neighbours[fill[e.v]++] = e.u;
  for (std::size_t v = 0; v < g.n(); ++v) {
    std::sort(a.neighbours.begin() + static_cast<std::ptrdiff_t>(a.offsets[v]),
              a.neighbours.begin() + static_cast<std::ptrdiff_t>(a.offsets[v + 1]));
  }
  return a;
}

/// Subgraph induced by `vertices` (any order, no repeats). Local vertex k
/// corresponds to vertices[k].
inline Graph induced_subgraph(const Graph& g, std::span<const std::size_t> vertices) {
  constexpr std::size_t absent = static_cast<std::size_t>(-1);
  std::vector<std::size_t> local(g.n(), absent);
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    if (vertices[k] >= g.n() || local[vertices[k]] != absent) {
      throw InvalidArgument("induced_subgraph: vertex out of range or repeated");
    }
    local[vertices[k]] = k;
  }
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    const auto a = local[e.u];
    const auto b = local[e.v];
    if (a == absent || b == absent) continue;
    edges.push_back(a < b ? Edge{static_cast<Vertex>(a), static_cast<Vertex>(b)}
                          : Edge{static_cast<Vertex>(b), static_cast<Vertex>(a)});
  }
  std::sort(edges.begin(), edges.end());
  return Graph(vertices.size(), std::move(edges));
}

/// Connected components, each sorted ascending; components ordered by their
/// smallest vertex.
inline std::vector<std::vector<std::size_t>> connected_components(const Graph& g) {
  std::vector<std::size_t> parent(g.n());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges()) {
    const auto a = find(e.u), b = find(e.v);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::vector<std::size_t>> comps;
  std::vector<std::size_t> slot(g.n(), static_cast<std::size_t>(-1));
  for (std::size_t v = 0; v < g.n(); ++v) {
    const auto r = find(v);
    if (slot[r] == static_cast<std::size_t>(-1)) {
      slot[r] = comps.size();
      comps.emplace_back();
    }
    comps[slot[r]].push_back(v);
  }
  return comps;
}

}  // namespace btsbm
