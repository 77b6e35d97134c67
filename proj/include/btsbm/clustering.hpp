#pragma once

// Spectral sign bi-partitioning and its recursive application.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "btsbm/eigensolver.hpp"
#include "btsbm/error.hpp"
#include "btsbm/graph.hpp"
#include "btsbm/node_code.hpp"
#include "btsbm/sparse_sym.hpp"

namespace btsbm {

/// Label 0 where u_i >= 0, label 1 otherwise.
inline std::vector<int> sign_split(std::span<const double> u) {
  std::vector<int> labels(u.size());
  std::transform(u.begin(), u.end(), labels.begin(), [](double x) { return x >= 0.0 ? 0 : 1; });
  return labels;
}

inline std::vector<int> sign_split(const Eigen::VectorXd& u) {
  return sign_split(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())));
}

/// Matrix whose eigenvector drives the split.
enum class SplitOperator {
  laplacian,   // Fiedler vector of L = D - A
  adjacency,   // eigenvector of the second largest eigenvalue of A
  normalized,  // second smallest eigenvector of I - D^{-1/2} A D^{-1/2}
};

inline const char* to_string(SplitOperator op) {
  switch (op) {
    case SplitOperator::adjacency: return "adjacency";
    case SplitOperator::normalized: return "normalized";
    default: return "laplacian";
  }
}

inline SplitOperator parse_split_operator(const std::string& s) {
  if (s == "laplacian" || s == "L") return SplitOperator::laplacian;
  if (s == "adjacency" || s == "A") return SplitOperator::adjacency;
  if (s == "normalized" || s == "N") return SplitOperator::normalized;
  throw InvalidArgument("unknown variant \"" + s + "\" (expected laplacian|adjacency|normalized)");
}

enum class Provenance { spectral, components };

inline const char* to_string(Provenance p) {
  return p == Provenance::spectral ? "spectral" : "components";
}

struct SplitResult {
  std::vector<int> assignment;  // over {0, 1}, indexed by local vertex
  double fiedler_value = 0.0;   // eigenvalue of the splitting vector (0 for components)
  std::optional<double> next_eigenvalue;  // lambda_3 when requested
  Provenance provenance = Provenance::spectral;
  Eigen::VectorXd vector;       // splitting eigenvector (empty for components)

  bool degenerate() const {
    const auto ones = std::count(assignment.begin(), assignment.end(), 1);
    return ones == 0 || static_cast<std::size_t>(ones) == assignment.size();
  }
};

struct BipartitionOptions {
  SolverOptions solver;
  SplitOperator op = SplitOperator::laplacian;
  std::size_t extra_eigenpairs = 0;  // 1 to also report lambda_3
};

namespace detail {

inline SplitResult component_split(std::size_t n, const std::vector<std::vector<std::size_t>>& comps,
                                   double eigenvalue) {
  std::size_t largest = 0;
  for (std::size_t c = 1; c < comps.size(); ++c) {
    if (comps[c].size() > comps[largest].size()) largest = c;
  }
  SplitResult r;
  r.assignment.assign(n, 1);
  for (auto v : comps[largest]) r.assignment[v] = 0;
  r.fiedler_value = eigenvalue;
  r.provenance = Provenance::components;
  return r;
}

}  // namespace detail

/// One application of the sign bi-partitioning step. Disconnected graphs are
/// split into the largest component (label 0) versus the rest.
inline SplitResult bipartition(const Graph& g, const BipartitionOptions& opts = {}) {
  if (g.n() < 2) throw InvalidArgument("bipartition needs at least two vertices");
  const std::size_t n = g.n();
  const std::size_t k = std::min(n, 2 + opts.extra_eigenpairs);

  if (opts.op == SplitOperator::laplacian) {
    auto outcome = fiedler_vector(laplacian(g), opts.solver, opts.extra_eigenpairs);
    if (auto* report = std::get_if<ConnectivityReport>(&outcome)) {
      return detail::component_split(n, report->components, report->second_eigenvalue);
    }
    auto& f = std::get<FiedlerResult>(outcome);
    SplitResult r;
    r.assignment = sign_split(f.vector);
    r.fiedler_value = f.value;
    if (f.spectrum.eigenvalues.size() > 2) r.next_eigenvalue = f.spectrum.eigenvalues[2];
    r.vector = std::move(f.vector);
    return r;
  }

  auto comps = connected_components(g);
  if (comps.size() > 1) return detail::component_split(n, comps, 0.0);

  SplitResult r;
  if (opts.op == SplitOperator::normalized) {
    const SpectralResult spec = smallest_eigenpairs(normalized_laplacian(g), k, opts.solver);
    r.fiedler_value = spec.eigenvalues[1];
    if (spec.eigenvalues.size() > 2) r.next_eigenvalue = spec.eigenvalues[2];
    r.vector = spec.eigenvectors.col(1);
  } else {
    // Second largest eigenvalue of A is the second smallest of -A.
    std::vector<SparseSym::Entry> entries;
    for (const auto& e : g.edges()) entries.push_back({e.v, e.u, -1.0});
    const SpectralResult spec = smallest_eigenpairs(SparseSym(n, std::move(entries)), k, opts.solver);
    r.fiedler_value = -spec.eigenvalues[1];
    if (spec.eigenvalues.size() > 2) r.next_eigenvalue = -spec.eigenvalues[2];
    r.vector = spec.eigenvectors.col(1);
  }
  r.assignment = sign_split(r.vector);
  return r;
}

enum class StopReason { max_depth, rule, degenerate, singleton };

inline const char* to_string(StopReason s) {
  switch (s) {
    case StopReason::max_depth: return "max_depth";
    case StopReason::rule: return "rule";
    case StopReason::degenerate: return "degenerate";
    default: return "singleton";
  }
}

/// What a stopping rule sees: the cluster's subgraph, its depth and the
/// split that would be applied.
struct StopContext {
  const Graph& subgraph;
  std::size_t depth;
  const SplitResult& proposed;
};

/// Decision procedure consulted before each split. None of the shipped rules
/// carries a consistency guarantee; they are heuristics.
struct StoppingRule {
  std::string name;
  std::function<bool(const StopContext&)> should_stop;
  std::size_t extra_eigenpairs = 0;

  /// Never stops; recursion is bounded by max_depth only.
  static StoppingRule fixed_depth() {
    return {"fixed", [](const StopContext&) { return false; }, 0};
  }
  static StoppingRule immediate() {
    return {"immediate", [](const StopContext&) { return true; }, 0};
  }
  /// Stops when the split would leave a side with fewer than k vertices.
  static StoppingRule min_cluster_size(std::size_t k) {
    return {"minsize:" + std::to_string(k),
            [k](const StopContext& ctx) {
              const auto ones = static_cast<std::size_t>(
                  std::count(ctx.proposed.assignment.begin(), ctx.proposed.assignment.end(), 1));
              const auto zeros = ctx.proposed.assignment.size() - ones;
              return std::min(ones, zeros) < k;
            },
            0};
  }
  /// Stops when (lambda_3 - lambda_2) / lambda_2 < tau.
  static StoppingRule eigen_gap(double tau) {
    std::ostringstream name;
    name << "eigengap:" << tau;
    return {name.str(),
            [tau](const StopContext& ctx) {
              const auto& p = ctx.proposed;
              if (p.provenance != Provenance::spectral || !p.next_eigenvalue || p.fiedler_value <= 0.0) {
                return false;
              }
              return (*p.next_eigenvalue - p.fiedler_value) / p.fiedler_value < tau;
            },
            1};
  }

  /// Parses "fixed", "minsize:<k>" or "eigengap:<tau>".
  static StoppingRule parse(const std::string& text) {
    if (text == "fixed") return fixed_depth();
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    try {
      if (head == "minsize" && !arg.empty()) {
        const long long k = std::stoll(arg);
        if (k < 1) throw InvalidArgument("minsize needs k >= 1");
        return min_cluster_size(static_cast<std::size_t>(k));
      }
      if (head == "eigengap") return eigen_gap(arg.empty() ? 0.2 : std::stod(arg));
    } catch (const std::logic_error&) {
      throw InvalidArgument("cannot parse stopping rule \"" + text + "\"");
    }
    throw InvalidArgument("unknown stopping rule \"" + text +
                          "\" (expected fixed|minsize:<k>|eigengap:<tau>)");
  }
};

struct ClusterNode {
  NodeCode code;
  std::vector<std::size_t> vertices;  // original vertex ids, ascending
  std::optional<SplitResult> split;   // internal nodes; degenerate leaves keep theirs too
  std::optional<StopReason> stop_reason;
  std::vector<ClusterNode> children;  // empty or exactly two

  bool is_leaf() const noexcept { return children.empty(); }
};

struct Dendrogram {
  std::size_t n = 0;
  ClusterNode root;

  std::size_t height() const {
    std::function<std::size_t(const ClusterNode&)> h = [&](const ClusterNode& c) -> std::size_t {
      if (c.is_leaf()) return 0;
      return 1 + std::max(h(c.children[0]), h(c.children[1]));
    };
    return h(root);
  }

  /// Looks up a node by code; nullptr when absent.
  const ClusterNode* find(const NodeCode& code) const {
    const ClusterNode* cur = &root;
    for (std::size_t i = 0; i < code.size(); ++i) {
      if (cur->is_leaf()) return nullptr;
      cur = &cur->children[static_cast<std::size_t>(code.bit(i))];
    }
    return cur;
  }
};

struct RecursiveOptions {
  std::size_t max_depth = 1;
  BipartitionOptions split;
};

namespace detail {

inline void grow(const Graph& g, ClusterNode& node, std::size_t depth, const StoppingRule& rule,
                 const RecursiveOptions& opts) {
  if (node.vertices.size() < 2) {
    node.stop_reason = StopReason::singleton;
    return;
  }
  if (depth >= opts.max_depth) {
    node.stop_reason = StopReason::max_depth;
    return;
  }
  const Graph sub = induced_subgraph(g, node.vertices);
  BipartitionOptions split_opts = opts.split;
  split_opts.extra_eigenpairs = std::max(split_opts.extra_eigenpairs, rule.extra_eigenpairs);
  SplitResult split = bipartition(sub, split_opts);
  if (split.degenerate()) {
    node.split = std::move(split);
    node.stop_reason = StopReason::degenerate;
    return;
  }
  if (rule.should_stop && rule.should_stop(StopContext{sub, depth, split})) {
    node.stop_reason = StopReason::rule;
    return;
  }
  ClusterNode left, right;
  left.code = node.code.left();
  right.code = node.code.right();
  for (std::size_t k = 0; k < node.vertices.size(); ++k) {
    (split.assignment[k] == 0 ? left : right).vertices.push_back(node.vertices[k]);
  }
  node.split = std::move(split);
  node.children.push_back(std::move(left));
  node.children.push_back(std::move(right));
  for (auto& child : node.children) grow(g, child, depth + 1, rule, opts);
}

}  // namespace detail

/// Depth-first recursive bi-partitioning. Vertex ids in the dendrogram are
/// the original ids of `g`.
inline Dendrogram recursive_bipartition(const Graph& g, const StoppingRule& rule,
                                        const RecursiveOptions& opts) {
  if (opts.max_depth < 1) throw InvalidArgument("max_depth must be positive");
  Dendrogram d;
  d.n = g.n();
  d.root.vertices.resize(g.n());
  std::iota(d.root.vertices.begin(), d.root.vertices.end(), std::size_t{0});
  detail::grow(g, d.root, 0, rule, opts);
  return d;
}

inline Dendrogram recursive_bipartition(const Graph& g, const StoppingRule& rule, std::size_t max_depth) {
  RecursiveOptions opts;
  opts.max_depth = max_depth;
  return recursive_bipartition(g, rule, opts);
}

/// Cluster code of every vertex with the dendrogram cut at `depth`.
inline std::vector<NodeCode> flat_clustering(const Dendrogram& d, std::size_t depth) {
  std::vector<NodeCode> labels(d.n);
  std::function<void(const ClusterNode&)> visit = [&](const ClusterNode& c) {
    if (c.is_leaf() || c.code.size() >= depth) {
      for (auto v : c.vertices) labels[v] = c.code;
      return;
    }
    for (const auto& child : c.children) visit(child);
  };
  visit(d.root);
  return labels;
}

}  // namespace btsbm
