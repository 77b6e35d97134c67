#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "btsbm/graph.hpp"
#include "btsbm/random.hpp"
#include "btsbm/tree_model.hpp"

namespace btsbm {

/// Row-major index of the pair (i, j), i < j, among all n(n-1)/2 pairs.
constexpr std::uint64_t pair_index(std::uint64_t i, std::uint64_t j, std::uint64_t n) noexcept {
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

/// Independent edge sampling with an arbitrary pair probability. Pair (i, j)
/// becomes an edge iff uniform_at(seed, pair_index(i, j, n)) < prob(i, j).
template <typename Prob>
  requires std::invocable<Prob&, std::size_t, std::size_t>
Graph sample_edges(std::size_t n, std::uint64_t seed, Prob&& prob) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (uniform_at(seed, pair_index(i, j, n)) < prob(i, j)) {
        edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>(j)});
      }
    }
  }
  return Graph(n, std::move(edges));
}

struct SampleSpec {
  const TreeModel& model;
  std::uint64_t seed;
};

/// One draw from the model; vertices follow the model's canonical ordering.
inline Graph sample_graph(const SampleSpec& spec) {
  const Eigen::MatrixXd b = block_matrix(spec.model);
  const Assignment a = assignment(spec.model);
  return sample_edges(spec.model.n(), spec.seed, [&](std::size_t i, std::size_t j) {
    return b(static_cast<Eigen::Index>(a.leaf[i]), static_cast<Eigen::Index>(a.leaf[j]));
  });
}

inline Graph sample_graph(const TreeModel& model, std::uint64_t seed) {
  return sample_graph(SampleSpec{model, seed});
}

}  // namespace btsbm
