#pragma once

// Generalized binary-tree stochastic block model: a binary tree whose nodes
// carry connection probabilities and whose leaves carry community sizes.
//
// Vertices are numbered in contiguous blocks following the left-to-right
// depth-first order of the leaves, so the vertex set of every tree node
// (leaf or internal) is a half-open index range.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "btsbm/error.hpp"
#include "btsbm/node_code.hpp"

namespace btsbm {

/// Recursive, unvalidated description of a tree. A node with no children is
/// a leaf and must carry a positive size; an internal node has exactly two.
struct TreeSpec {
  double p = 0.0;
  std::size_t size = 0;
  std::vector<TreeSpec> children;

  static TreeSpec leaf(double p, std::size_t size) { return {p, size, {}}; }
  static TreeSpec internal(double p, TreeSpec left, TreeSpec right) {
    TreeSpec s{p, 0, {}};
    s.children.push_back(std::move(left));
    s.children.push_back(std::move(right));
    return s;
  }
};

class TreeModel {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  struct Node {
    NodeCode code;
    double p = 0.0;
    std::size_t size = 0;          // n_s: number of vertices below this node
    std::size_t first_vertex = 0;  // G_s = [first_vertex, first_vertex + size)
    std::size_t left = npos;       // child indices into nodes(); npos for leaves
    std::size_t right = npos;
    std::size_t parent = npos;

    bool is_leaf() const noexcept { return left == npos; }
    std::size_t end_vertex() const noexcept { return first_vertex + size; }
  };

  /// Validates structure (binary, leaf sizes >= 1, probabilities in (0,1))
  /// and throws DataError on the first problem found.
  explicit TreeModel(const TreeSpec& spec) {
    build(spec, NodeCode::root(), npos);
    for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i].code, i);
  }

  std::size_t n() const noexcept { return nodes_.front().size; }
  std::size_t num_leaves() const noexcept { return leaves_.size(); }

  /// All nodes in depth-first preorder; index 0 is the root.
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& root() const noexcept { return nodes_.front(); }

  /// Node indices of the leaves in left-to-right order.
  const std::vector<std::size_t>& leaves() const noexcept { return leaves_; }
  const Node& leaf(std::size_t k) const { return nodes_.at(leaves_.at(k)); }

  bool contains(const NodeCode& code) const { return index_.count(code) != 0; }

  const Node& at(const NodeCode& code) const {
    auto it = index_.find(code);
    if (it == index_.end()) {
      throw InvalidArgument("node code \"" + code.str() + "\" is not in the tree");
    }
    return nodes_[it->second];
  }
  std::size_t index_of(const NodeCode& code) const {
    (void)at(code);
    return index_.at(code);
  }

  const Node& left(const Node& s) const { return nodes_.at(s.left); }
  const Node& right(const Node& s) const { return nodes_.at(s.right); }

  double p(const NodeCode& code) const { return at(code).p; }
  std::size_t size(const NodeCode& code) const { return at(code).size; }

  /// Leaf position (0..K-1) of the community containing vertex v.
  std::size_t leaf_of_vertex(std::size_t v) const {
    if (v >= n()) throw InvalidArgument("vertex index out of range");
    // Leaves are sorted by first_vertex.
    std::size_t lo = 0, hi = leaves_.size();
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if (nodes_[leaves_[mid]].first_vertex <= v) lo = mid; else hi = mid;
    }
    return lo;
  }

  /// The model induced by the subtree rooted at `code`, with vertices
  /// renumbered from zero.
  TreeModel subtree(const NodeCode& code) const { return TreeModel(to_spec(index_of(code))); }

  TreeSpec to_spec() const { return to_spec(0); }

 private:
  std::size_t build(const TreeSpec& spec, const NodeCode& code, std::size_t parent) {
    if (!(spec.p > 0.0 && spec.p < 1.0) || !std::isfinite(spec.p)) {
      throw DataError("probability at node \"" + code.str() +
                      "\" must lie strictly inside (0,1), got " + std::to_string(spec.p));
    }
    const std::size_t idx = nodes_.size();
    Node node;
    node.code = code;
    node.p = spec.p;
    node.parent = parent;
    node.first_vertex = next_vertex_;
    nodes_.push_back(node);

    if (spec.children.empty()) {
      if (spec.size == 0) {
        throw DataError("leaf \"" + code.str() + "\" must have size >= 1");
      }
      nodes_[idx].size = spec.size;
      next_vertex_ += spec.size;
      leaves_.push_back(idx);
      return idx;
    }
    if (spec.children.size() != 2) {
      throw DataError("internal node \"" + code.str() + "\" must have exactly two children");
    }
    if (spec.size != 0) {
      throw DataError("internal node \"" + code.str() + "\" must not carry a size");
    }
    const std::size_t l = build(spec.children[0], code.left(), idx);
    const std::size_t r = build(spec.children[1], code.right(), idx);
    nodes_[idx].left = l;
    nodes_[idx].right = r;
    nodes_[idx].size = nodes_[l].size + nodes_[r].size;
    return idx;
  }

  TreeSpec to_spec(std::size_t idx) const {
    const Node& s = nodes_[idx];
    if (s.is_leaf()) return TreeSpec::leaf(s.p, s.size);
    return TreeSpec::internal(s.p, to_spec(s.left), to_spec(s.right));
  }

  std::vector<Node> nodes_;
  std::vector<std::size_t> leaves_;
  std::unordered_map<NodeCode, std::size_t> index_;
  std::size_t next_vertex_ = 0;
};

/// Internal nodes s with p_s >= min(p_L(s), p_R(s)). With `allow_equal`, only
/// strict violations (p_s > a child's probability) are reported.
inline std::vector<NodeCode> validate_weak_assortativity(const TreeModel& model,
                                                         bool allow_equal = false) {
  std::vector<NodeCode> violations;
  for (const auto& s : model.nodes()) {
    if (s.is_leaf()) continue;
    const double child_min = std::min(model.left(s).p, model.right(s).p);
    const bool bad = allow_equal ? s.p > child_min : s.p >= child_min;
    if (bad) violations.push_back(s.code);
  }
  return violations;
}

/// Community-wise connection probabilities, leaves in depth-first order.
inline Eigen::MatrixXd block_matrix(const TreeModel& model) {
  const std::size_t k = model.num_leaves();
  Eigen::MatrixXd b(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t c = a; c < k; ++c) {
      const NodeCode lca = lowest_common_ancestor(model.leaf(a).code, model.leaf(c).code);
      b(a, c) = b(c, a) = model.p(lca);
    }
  }
  return b;
}

struct Assignment {
  std::vector<NodeCode> labels;     // c(i): leaf code of vertex i
  std::vector<std::size_t> leaf;    // leaf position of vertex i in DFS order
};

inline Assignment assignment(const TreeModel& model) {
  Assignment a;
  a.labels.reserve(model.n());
  a.leaf.reserve(model.n());
  for (std::size_t k = 0; k < model.num_leaves(); ++k) {
    const auto& s = model.leaf(k);
    for (std::size_t v = s.first_vertex; v < s.end_vertex(); ++v) {
      a.labels.push_back(s.code);
      a.leaf.push_back(k);
    }
  }
  return a;
}

/// Labels of the first split: 0 on the left child's vertices, 1 on the right.
/// Requires at least two leaves.
inline std::vector<int> first_split_labels(const TreeModel& model) {
  const auto& root = model.root();
  if (root.is_leaf()) throw InvalidArgument("a single-community model has no first split");
  std::vector<int> labels(model.n(), 1);
  const auto& l = model.left(root);
  for (std::size_t v = l.first_vertex; v < l.end_vertex(); ++v) labels[v] = 0;
  return labels;
}

}  // namespace btsbm
