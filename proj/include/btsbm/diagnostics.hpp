#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "btsbm/error.hpp"
#include "btsbm/graph.hpp"
#include "btsbm/population.hpp"
#include "btsbm/random.hpp"
#include "btsbm/sparse_sym.hpp"
#include "btsbm/tree_model.hpp"

namespace btsbm {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Matrix whose entries are affine in the root probability:
/// entry = constant + coefficient * p_root, both integers.
struct AffineMatrix {
  IntMatrix constant;
  IntMatrix coefficient;

  Eigen::MatrixXd evaluate(double p_root) const {
    return constant.cast<double>() + p_root * coefficient.cast<double>();
  }
};

struct DecompositionReport {
  std::size_t n0 = 0, n1 = 0;
  double p0 = 0.0, p1 = 0.0, p_root = 0.0;

  AffineMatrix l1_exact, l2_exact;
  Eigen::MatrixXd l1, l2, l3;
  Eigen::MatrixXd residual;  // L1 - L3, the combined remainder

  bool sum_is_exact = false;             // L1 + L2 == L entry by entry
  double lambda_second_l1 = 0.0;         // second smallest eigenvalue of L1
  double fiedler_residual = 0.0;         // |L1 u* - n p_root u*|_2
  double lambda_third_l3 = 0.0;          // third smallest eigenvalue of L3 (dense)
  double lambda_third_l3_closed = 0.0;   // min{n0 p0 + n1 p_root, n1 p1 + n0 p_root}
};

/// Splits the Laplacian of g along the model's first split into the
/// block-structured part L1 (within-block Laplacians plus the expected cross
/// term) and the cross-edge fluctuation L2, and builds the population-level
/// comparison matrix L3.
inline DecompositionReport laplacian_decomposition(const Graph& g, const TreeModel& model) {
  if (g.n() != model.n()) {
    throw InvalidArgument("laplacian_decomposition: graph has " + std::to_string(g.n()) +
                          " vertices but the model has " + std::to_string(model.n()));
  }
  const auto& root = model.root();
  if (root.is_leaf()) throw InvalidArgument("laplacian_decomposition needs K >= 2");
  const auto& left = model.left(root);
  const auto& right = model.right(root);
  if (left.first_vertex != 0 || right.first_vertex != left.size || right.end_vertex() != g.n()) {
    throw InvalidArgument("laplacian_decomposition: model vertex ordering is not block contiguous");
  }

  DecompositionReport r;
  r.n0 = left.size;
  r.n1 = right.size;
  r.p0 = left.p;
  r.p1 = right.p;
  r.p_root = root.p;
  const auto n = static_cast<Eigen::Index>(g.n());
  const auto n0 = static_cast<Eigen::Index>(r.n0);
  auto block = [&](Eigen::Index v) { return v < n0 ? 0 : 1; };

  IntMatrix lap = IntMatrix::Zero(n, n);
  IntMatrix c1 = IntMatrix::Zero(n, n), k1 = IntMatrix::Zero(n, n);
  IntMatrix c2 = IntMatrix::Zero(n, n), k2 = IntMatrix::Zero(n, n);
  for (const auto& e : g.edges()) {
    const auto u = static_cast<Eigen::Index>(e.u), v = static_cast<Eigen::Index>(e.v);
    lap(u, v) -= 1;
    lap(v, u) -= 1;
    lap(u, u) += 1;
    lap(v, v) += 1;
    if (block(u) == block(v)) {
      c1(u, v) -= 1;
      c1(v, u) -= 1;
      c1(u, u) += 1;
      c1(v, v) += 1;
    } else {
      c2(u, v) -= 1;
      c2(v, u) -= 1;
      c2(u, u) += 1;
      c2(v, v) += 1;
    }
  }
  const auto sn0 = static_cast<std::int64_t>(r.n0), sn1 = static_cast<std::int64_t>(r.n1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::int64_t other = block(i) == 0 ? sn1 : sn0;
    k1(i, i) += other;
    k2(i, i) -= other;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (block(i) != block(j)) {
        k1(i, j) -= 1;
        k2(i, j) += 1;
      }
    }
  }
  r.l1_exact = {std::move(c1), std::move(k1)};
  r.l2_exact = {std::move(c2), std::move(k2)};
  r.sum_is_exact = (r.l1_exact.constant + r.l2_exact.constant == lap) &&
                   (r.l1_exact.coefficient + r.l2_exact.coefficient).isZero();

  r.l1 = r.l1_exact.evaluate(r.p_root);
  r.l2 = r.l2_exact.evaluate(r.p_root);

  const double d0 = r.n0 * r.p0 + r.n1 * r.p_root;
  const double d1 = r.n1 * r.p1 + r.n0 * r.p_root;
  r.l3 = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (block(i) != block(j)) {
        r.l3(i, j) = -r.p_root;
      } else {
        r.l3(i, j) = -(block(i) == 0 ? r.p0 : r.p1);
      }
    }
    r.l3(i, i) += block(i) == 0 ? d0 : d1;
  }
  r.residual = r.l1 - r.l3;

  const Eigen::VectorXd u_star = internal_node_vector(model, root);
  const double target = static_cast<double>(g.n()) * r.p_root;
  r.fiedler_residual = (r.l1 * u_star - target * u_star).norm();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e1(r.l1, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e3(r.l3, Eigen::EigenvaluesOnly);
  r.lambda_second_l1 = n >= 2 ? e1.eigenvalues()[1] : 0.0;
  r.lambda_third_l3 = n >= 3 ? e3.eigenvalues()[2] : 0.0;
  r.lambda_third_l3_closed = std::min(d0, d1);
  return r;
}

struct ConditionReport {
  std::size_t n = 0, n0 = 0, n1 = 0;
  double eigen_gap_lhs = 0.0;      // min{n0 (p0 - p_root), n1 (p1 - p_root)}
  double eigen_gap_rhs_old = 0.0;  // sqrt(n p_bar* log n)
  double eigen_gap_ratio_old = 0.0;
  double c3_rhs = 0.0;             // sqrt((n1 p1 + n0 p0) log n)
  double c3_ratio = 0.0;           // eigen_gap_lhs / c3_rhs
  double c2_lhs = 0.0;             // (n (p_lower* - p_root))^4
  double c2_rhs = 0.0;             // (n p_bar*)^3 log n
  double c2_ratio = 0.0;
  std::size_t c1_num_leaves = 0;
  double c1_max_size_ratio = 0.0;  // max over internal nodes of max(nL/nR, nR/nL)

  // Proxies at ratio >= 1; the true constants are unknown.
  bool eigen_gap_holds() const { return eigen_gap_ratio_old >= 1.0; }
  bool c2_holds() const { return c2_ratio >= 1.0; }
  bool c3_holds() const { return c3_ratio >= 1.0; }
};

inline ConditionReport condition_report(const TreeModel& model) {
  const auto& root = model.root();
  if (root.is_leaf()) throw InvalidArgument("condition_report needs K >= 2");
  const auto& left = model.left(root);
  const auto& right = model.right(root);
  const auto dens = density_summary(model);

  ConditionReport c;
  c.n = model.n();
  c.n0 = left.size;
  c.n1 = right.size;
  const double n = static_cast<double>(c.n), n0 = static_cast<double>(c.n0),
               n1 = static_cast<double>(c.n1);
  const double log_n = std::log(n);
  auto ratio = [](double lhs, double rhs) {
    return rhs > 0 ? lhs / rhs : std::numeric_limits<double>::infinity();
  };

  c.eigen_gap_lhs = std::max(0.0, std::min(n0 * (left.p - root.p), n1 * (right.p - root.p)));
  c.eigen_gap_rhs_old = std::sqrt(n * dens.p_bar_star * log_n);
  c.eigen_gap_ratio_old = ratio(c.eigen_gap_lhs, c.eigen_gap_rhs_old);
  c.c3_rhs = std::sqrt((n1 * right.p + n0 * left.p) * log_n);
  c.c3_ratio = ratio(c.eigen_gap_lhs, c.c3_rhs);
  c.c2_lhs = std::pow(std::max(0.0, n * (dens.p_lower_star - root.p)), 4);
  c.c2_rhs = std::pow(n * dens.p_bar_star, 3) * log_n;
  c.c2_ratio = ratio(c.c2_lhs, c.c2_rhs);
  c.c1_num_leaves = model.num_leaves();
  for (const auto& s : model.nodes()) {
    if (s.is_leaf()) continue;
    const double a = static_cast<double>(model.left(s).size);
    const double b = static_cast<double>(model.right(s).size);
    c.c1_max_size_ratio = std::max({c.c1_max_size_ratio, a / b, b / a});
  }
  return c;
}

/// Spectral norm of L - L*. Computed from the full spectrum for n <= dense_limit,
/// otherwise by power iteration to relative tolerance `tolerance`.
inline double operator_distance(const SparseSym& l, const Eigen::MatrixXd& l_star,
                                double tolerance = 1e-8, std::size_t dense_limit = 2048) {
  const auto n = static_cast<Eigen::Index>(l.n());
  if (l_star.rows() != n || l_star.cols() != n) {
    throw InvalidArgument("operator_distance: dimension mismatch");
  }
  if (n == 0) return 0.0;
  if (l.n() <= dense_limit) {
    const Eigen::MatrixXd diff = l.to_dense() - l_star;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return l * x - l_star * x; };
  Eigen::VectorXd x(n);
  CounterRng rng(0x706f776572ULL);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.uniform() - 0.5;
  x.normalize();
  double estimate = 0.0;
  const std::size_t max_iter = 20000;
  for (std::size_t it = 0; it < max_iter; ++it) {
    // Iterate with the square so that +lambda and -lambda do not alternate.
    Eigen::VectorXd y = apply(x);
    const double next = y.norm();
    if (next == 0.0) return 0.0;
    Eigen::VectorXd z = apply(y);
    const double zn = z.norm();
    if (zn == 0.0) return next;
    x = z / zn;
    if (std::abs(next - estimate) <= tolerance * next) return next;
    estimate = next;
  }
  throw NumericalError("operator_distance: power iteration did not converge", estimate);
}

}  // namespace btsbm
