#pragma once

// Population (expected) objects of a tree model and the closed-form
// eigenstructure of the population Laplacian L* = diag(P 1) - P.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "btsbm/error.hpp"
#include "btsbm/tree_model.hpp"

namespace btsbm {

inline constexpr std::size_t kDefaultDenseLimit = 5000;

namespace detail {
inline void check_dense_limit(const TreeModel& model, std::size_t limit) {
  if (model.n() > limit) {
    throw InvalidArgument("model has n = " + std::to_string(model.n()) +
                          " vertices, above the dense population limit of " +
                          std::to_string(limit));
  }
}
}  // namespace detail

/// P with P_ij = p at LCA(c(i), c(j)) for i != j and a zero diagonal.
inline Eigen::MatrixXd expected_adjacency(const TreeModel& model,
                                          std::size_t max_n = kDefaultDenseLimit) {
  detail::check_dense_limit(model, max_n);
  const Eigen::MatrixXd b = block_matrix(model);
  const Assignment a = assignment(model);
  const auto n = static_cast<Eigen::Index>(model.n());
  Eigen::MatrixXd p(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      p(i, j) = i == j ? 0.0 : b(a.leaf[i], a.leaf[j]);
    }
  }
  return p;
}

inline Eigen::MatrixXd population_laplacian(const TreeModel& model,
                                            std::size_t max_n = kDefaultDenseLimit) {
  const Eigen::MatrixXd p = expected_adjacency(model, max_n);
  Eigen::MatrixXd l = -p;
  l.diagonal() = p.rowwise().sum();
  return l;
}

/// lambda*(s) = n_s p_s + sum_{i=1}^{|s|} (n_{s_(i)} - n_{s_(i-1)}) p_{s_(i)}
inline double analytic_eigenvalue(const NodeCode& code, const TreeModel& model) {
  const auto& nodes = model.nodes();
  std::size_t cur = model.index_of(code);
  double value = static_cast<double>(nodes[cur].size) * nodes[cur].p;
  while (nodes[cur].parent != TreeModel::npos) {
    const auto& parent = nodes[nodes[cur].parent];
    value += static_cast<double>(parent.size - nodes[cur].size) * parent.p;
    cur = nodes[cur].parent;
  }
  return value;
}

/// Number of eigenvectors node `s` contributes: 1 for internal nodes,
/// n_s - 1 for leaves.
inline std::size_t analytic_multiplicity(const TreeModel::Node& s) {
  return s.is_leaf() ? s.size - 1 : 1;
}

/// Unit vector of an internal node: +sqrt(n_R/(n_L n_s)) on G_L(s),
/// -sqrt(n_L/(n_R n_s)) on G_R(s), zero elsewhere.
inline Eigen::VectorXd internal_node_vector(const TreeModel& model, const TreeModel::Node& s) {
  if (s.is_leaf()) throw InvalidArgument("internal_node_vector called on a leaf");
  const auto& l = model.left(s);
  const auto& r = model.right(s);
  const double nl = static_cast<double>(l.size);
  const double nr = static_cast<double>(r.size);
  const double ns = static_cast<double>(s.size);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.n()));
  u.segment(static_cast<Eigen::Index>(l.first_vertex), static_cast<Eigen::Index>(l.size))
      .setConstant(std::sqrt(nr / (nl * ns)));
  u.segment(static_cast<Eigen::Index>(r.first_vertex), static_cast<Eigen::Index>(r.size))
      .setConstant(-std::sqrt(nl / (nr * ns)));
  return u;
}

/// Helmert basis of the mean-zero subspace of R^m: column k (0-based) has
/// k+1 entries 1/sqrt((k+1)(k+2)), then -(k+1)/sqrt((k+1)(k+2)), then zeros.
inline Eigen::MatrixXd helmert_basis(std::size_t m) {
  const auto rows = static_cast<Eigen::Index>(m);
  const auto cols = static_cast<Eigen::Index>(m == 0 ? 0 : m - 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(rows, cols);
  for (Eigen::Index k = 0; k < cols; ++k) {
    const double kk = static_cast<double>(k + 1);
    const double scale = 1.0 / std::sqrt(kk * (kk + 1.0));
    h.col(k).head(k + 1).setConstant(scale);
    h(k + 1, k) = -kk * scale;
  }
  return h;
}

/// Orthonormal eigenbasis U(s) of one tree node, as an n x g(s) block.
inline Eigen::MatrixXd node_basis(const TreeModel& model, const TreeModel::Node& s) {
  const auto n = static_cast<Eigen::Index>(model.n());
  if (!s.is_leaf()) {
    Eigen::MatrixXd u(n, 1);
    u.col(0) = internal_node_vector(model, s);
    return u;
  }
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(analytic_multiplicity(s)));
  if (u.cols() > 0) {
    u.block(static_cast<Eigen::Index>(s.first_vertex), 0, static_cast<Eigen::Index>(s.size), u.cols()) =
        helmert_basis(s.size);
  }
  return u;
}

struct SpectrumEntry {
  std::vector<NodeCode> nodes;  // contributing tree nodes (several when merged)
  double eigenvalue = 0.0;
  std::size_t multiplicity = 0;
  Eigen::MatrixXd basis;        // n x multiplicity, orthonormal columns
};

struct PopulationSpectrum {
  std::size_t n = 0;
  double trivial_eigenvalue = 0.0;  // the null pair (0, 1/sqrt(n))
  Eigen::VectorXd trivial_vector;
  std::vector<SpectrumEntry> entries;  // ascending eigenvalue, zero excluded

  std::size_t total_multiplicity() const {
    std::size_t total = 1;
    for (const auto& e : entries) total += e.multiplicity;
    return total;
  }

  /// All n eigenvalues with multiplicity, ascending, including the zero.
  std::vector<double> eigenvalues() const {
    std::vector<double> out{trivial_eigenvalue};
    for (const auto& e : entries) out.insert(out.end(), e.multiplicity, e.eigenvalue);
    return out;
  }
};

/// Two eigenvalues are reported as one when they agree to 1e-12 relative.
inline bool same_eigenvalue(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({std::abs(a), std::abs(b), 1e-300});
}

inline PopulationSpectrum analytic_spectrum(const TreeModel& model,
                                            bool with_bases = true,
                                            std::size_t max_n = kDefaultDenseLimit) {
  if (with_bases) detail::check_dense_limit(model, max_n);
  struct Raw {
    double value;
    std::size_t node;
  };
  std::vector<Raw> raw;
  const auto& nodes = model.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (analytic_multiplicity(nodes[i]) == 0) continue;
    raw.push_back({analytic_eigenvalue(nodes[i].code, model), i});
  }
  std::stable_sort(raw.begin(), raw.end(),
                   [](const Raw& a, const Raw& b) { return a.value < b.value; });

  PopulationSpectrum spec;
  spec.n = model.n();
  const auto n = static_cast<Eigen::Index>(model.n());
  spec.trivial_vector = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));

  for (std::size_t i = 0; i < raw.size();) {
    std::size_t j = i;
    SpectrumEntry e;
    e.eigenvalue = raw[i].value;
    while (j < raw.size() && same_eigenvalue(raw[j].value, raw[i].value)) {
      e.nodes.push_back(nodes[raw[j].node].code);
      e.multiplicity += analytic_multiplicity(nodes[raw[j].node]);
      ++j;
    }
    if (with_bases) {
      e.basis.resize(n, static_cast<Eigen::Index>(e.multiplicity));
      Eigen::Index col = 0;
      for (std::size_t t = i; t < j; ++t) {
        Eigen::MatrixXd block = node_basis(model, nodes[raw[t].node]);
        e.basis.middleCols(col, block.cols()) = block;
        col += block.cols();
      }
    }
    spec.entries.push_back(std::move(e));
    i = j;
  }
  return spec;
}

struct FiedlerPair {
  double value = 0.0;
  Eigen::VectorXd vector;
};

/// (n p_root, u*) for a model with at least two leaves; u* is positive on
/// the left child's block and negative on the right child's block.
inline FiedlerPair population_fiedler(const TreeModel& model) {
  const auto& root = model.root();
  if (root.is_leaf()) {
    throw InvalidArgument("population Fiedler pair needs K >= 2 (single-community model)");
  }
  return {static_cast<double>(model.n()) * root.p, internal_node_vector(model, root)};
}

struct DensitySummary {
  double p_star = 0.0;        // max_ij p_ij
  double p_bar_star = 0.0;    // max_i (1/n) sum_j p_ij
  double p_lower_star = 0.0;  // min_i (1/n) sum_j p_ij
  double p_bar2_star = 0.0;   // max_i sqrt((1/n) sum_j p_ij^2)
};

/// Extremes of P (zero diagonal), evaluated per community rather than per
/// vertex since rows within a leaf block are identical.
inline DensitySummary density_summary(const TreeModel& model) {
  const Eigen::MatrixXd b = block_matrix(model);
  const std::size_t k = model.num_leaves();
  const double n = static_cast<double>(model.n());
  DensitySummary d;
  d.p_lower_star = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < k; ++a) {
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      const double count = static_cast<double>(model.leaf(c).size) - (a == c ? 1.0 : 0.0);
      sum += count * b(a, c);
      sum_sq += count * b(a, c) * b(a, c);
      if (count > 0) d.p_star = std::max(d.p_star, b(a, c));
    }
    d.p_bar_star = std::max(d.p_bar_star, sum / n);
    d.p_lower_star = std::min(d.p_lower_star, sum / n);
    d.p_bar2_star = std::max(d.p_bar2_star, std::sqrt(sum_sq / n));
  }
  return d;
}

}  // namespace btsbm
