#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "btsbm.hpp"

namespace testing_support {

using btsbm::TreeModel;
using btsbm::TreeSpec;

inline TreeModel two_leaf(double p_root, double p0, double p1, std::size_t n0, std::size_t n1) {
  return TreeModel(TreeSpec::internal(p_root, TreeSpec::leaf(p0, n0), TreeSpec::leaf(p1, n1)));
}

/// Four leaves, balanced: (00, 01 | 10, 11).
inline TreeModel four_leaf(double p_root, double p0, double p1, double p_leaf, std::size_t size) {
  return TreeModel(TreeSpec::internal(
      p_root, TreeSpec::internal(p0, TreeSpec::leaf(p_leaf, size), TreeSpec::leaf(p_leaf, size)),
      TreeSpec::internal(p1, TreeSpec::leaf(p_leaf, size), TreeSpec::leaf(p_leaf, size))));
}

/// Five leaves: 00, 010, 011 under "0" and 10, 11 under "1".
inline TreeModel five_leaf(double p_root, double p0, double p01, double p1, double p_leaf,
                           const std::vector<std::size_t>& sizes) {
  return TreeModel(TreeSpec::internal(
      p_root,
      TreeSpec::internal(p0, TreeSpec::leaf(p_leaf, sizes[0]),
                         TreeSpec::internal(p01, TreeSpec::leaf(p_leaf, sizes[1]), TreeSpec::leaf(p_leaf, sizes[2]))),
      TreeSpec::internal(p1, TreeSpec::leaf(p_leaf, sizes[3]), TreeSpec::leaf(p_leaf, sizes[4]))));
}

/// Random weakly assortative tree with k leaves and n vertices (n >= k).
/// Probabilities lie in (0.01, 0.9) and strictly increase from parent to child.
template <typename Rng>
TreeModel random_weak_tree(Rng& rng, std::size_t k, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Leaf sizes: one each, the rest spread uniformly.
  std::vector<std::size_t> sizes(k, 1);
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  for (std::size_t extra = n - k; extra > 0; --extra) ++sizes[pick(rng)];

  std::size_t next_leaf = 0;
  std::function<TreeSpec(std::size_t, double)> build = [&](std::size_t leaves, double floor) -> TreeSpec {
    const double p = floor + 0.005 + unit(rng) * (0.9 - 0.01 - floor) * 0.5;
    if (leaves == 1) return TreeSpec::leaf(p, sizes[next_leaf++]);
    std::uniform_int_distribution<std::size_t> split(1, leaves - 1);
    const std::size_t left = split(rng);
    TreeSpec l = build(left, p);
    TreeSpec r = build(leaves - left, p);
    return TreeSpec::internal(p, std::move(l), std::move(r));
  };
  return TreeModel(build(k, 0.01));
}

/// H(est | truth) and H(est) straight from the definition, iterating over
/// all (truth class, estimated class) pairs by label value.
template <typename A, typename B>
double brute_force_completeness(const std::vector<A>& truth, const std::vector<B>& est) {
  const double n = static_cast<double>(truth.size());
  std::map<A, double> class_size;
  std::map<B, double> cluster_size;
  std::map<std::pair<A, B>, double> joint;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    class_size[truth[i]] += 1;
    cluster_size[est[i]] += 1;
    joint[{truth[i], est[i]}] += 1;
  }
  double h_est = 0.0;
  for (const auto& [k, c] : cluster_size) h_est += -(c / n) * std::log(c / n);
  if (cluster_size.size() == 1) return 1.0;
  double h_cond = 0.0;
  for (const auto& [c, nc] : class_size) {
    for (const auto& [k, nk] : cluster_size) {
      const auto it = joint.find({c, k});
      if (it == joint.end()) continue;
      const double a = it->second;
      h_cond += -(a / n) * std::log(a / nc);
    }
  }
  return 1.0 - h_cond / h_est;
}

inline Eigen::MatrixXd dense_laplacian(const btsbm::Graph& g) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.n()), static_cast<Eigen::Index>(g.n()));
  for (const auto& e : g.edges()) {
    l(e.u, e.v) -= 1;
    l(e.v, e.u) -= 1;
    l(e.u, e.u) += 1;
    l(e.v, e.v) += 1;
  }
  return l;
}

inline btsbm::Graph complete_graph(std::size_t n) {
  return btsbm::sample_edges(n, 0, [](std::size_t, std::size_t) { return 1.0; });
}

inline btsbm::Graph from_pairs(std::size_t n, std::vector<btsbm::Edge> edges) {
  return btsbm::Graph::normalize(n, std::move(edges)).graph;
}

/// Two labelings describe the same partition (labels may be renamed).
template <typename A, typename B>
bool same_partition(const std::vector<A>& a, const std::vector<B>& b) {
  if (a.size() != b.size()) return false;
  std::map<A, B> fwd;
  std::map<B, A> bwd;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [f, fi] = fwd.emplace(a[i], b[i]);
    auto [r, ri] = bwd.emplace(b[i], a[i]);
    if (f->second != b[i] || r->second != a[i]) return false;
  }
  return true;
}

}  // namespace testing_support
