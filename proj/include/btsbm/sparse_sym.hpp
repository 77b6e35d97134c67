#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "btsbm/error.hpp"
#include "btsbm/graph.hpp"

namespace btsbm {

/// Symmetric sparse matrix stored as compressed rows of its lower triangle
/// (diagonal included). matvec applies the full matrix.
class SparseSym {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
  };

  SparseSym() = default;

  /// Builds from lower- or upper-triangle entries; (i, j) and (j, i) are the
  /// same position and duplicates are summed.
  SparseSym(std::size_t n, std::vector<Entry> entries) : n_(n) {
    for (auto& e : entries) {
      if (e.row >= n || e.col >= n) throw InvalidArgument("SparseSym entry out of range");
      if (e.col > e.row) std::swap(e.row, e.col);
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    row_ptr_.assign(n + 1, 0);
    std::size_t last_row = 0;
    for (const auto& e : entries) {
      if (!cols_.empty() && last_row == e.row && cols_.back() == e.col) {
        values_.back() += e.value;
        continue;
      }
      cols_.push_back(e.col);
      values_.push_back(e.value);
      ++row_ptr_[e.row + 1];
      last_row = e.row;
    }
    for (std::size_t i = 0; i < n; ++i) row_ptr_[i + 1] += row_ptr_[i];
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t stored_nonzeros() const noexcept { return values_.size(); }

  /// y = M x.
  void matvec(const double* x, double* y) const {
    std::fill(y, y + n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        const std::size_t j = cols_[k];
        const double v = values_[k];
        acc += v * x[j];
        if (j != i) y[j] += v * x[i];
      }
      y[i] += acc;
    }
  }

  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(x.size());
    matvec(x.data(), y.data());
    return y;
  }

  Eigen::MatrixXd to_dense() const {
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for_each([&](std::size_t i, std::size_t j, double v) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    });
    return m;
  }

  /// Calls f(i, j, value) for each stored entry, j <= i.
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) f(i, cols_[k], values_[k]);
    }
  }

  double diagonal(std::size_t i) const {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (cols_[k] == i) return values_[k];
    }
    return 0.0;
  }

  double max_abs_diagonal() const {
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i) m = std::max(m, std::abs(diagonal(i)));
    return m;
  }

  /// Infinity norm, an upper bound on the spectral radius.
  double max_abs_row_sum() const {
    std::vector<double> sums(n_, 0.0);
    for_each([&](std::size_t i, std::size_t j, double v) {
      sums[i] += std::abs(v);
      if (i != j) sums[j] += std::abs(v);
    });
    return sums.empty() ? 0.0 : *std::max_element(sums.begin(), sums.end());
  }

  /// Off-diagonal nonzero pattern as a graph.
  Graph pattern() const {
    std::vector<Edge> edges;
    for_each([&](std::size_t i, std::size_t j, double v) {
      if (i != j && v != 0.0) edges.push_back({static_cast<Vertex>(j), static_cast<Vertex>(i)});
    });
    std::sort(edges.begin(), edges.end());
    return Graph(n_, std::move(edges));
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
};

/// Unnormalized Laplacian L = D - A.
inline SparseSym laplacian(const Graph& g) {
  const auto d = degrees(g);
  std::vector<SparseSym::Entry> entries;
  entries.reserve(g.n() + g.num_edges());
  for (std::size_t i = 0; i < g.n(); ++i) entries.push_back({i, i, static_cast<double>(d[i])});
  for (const auto& e : g.edges()) entries.push_back({e.v, e.u, -1.0});
  return SparseSym(g.n(), std::move(entries));
}

inline SparseSym adjacency_matrix(const Graph& g) {
  std::vector<SparseSym::Entry> entries;
  entries.reserve(g.num_edges());
  for (const auto& e : g.edges()) entries.push_back({e.v, e.u, 1.0});
  return SparseSym(g.n(), std::move(entries));
}

/// N = I - D^{-1/2} A D^{-1/2}; every vertex must have positive degree.
inline SparseSym normalized_laplacian(const Graph& g) {
  const auto d = degrees(g);
  for (std::size_t i = 0; i < g.n(); ++i) {
    if (d[i] == 0) {
      throw DataError("normalized Laplacian undefined: vertex " + std::to_string(i) +
                      " has degree zero");
    }
  }
  std::vector<SparseSym::Entry> entries;
  entries.reserve(g.n() + g.num_edges());
  for (std::size_t i = 0; i < g.n(); ++i) entries.push_back({i, i, 1.0});
  for (const auto& e : g.edges()) {
    entries.push_back({e.v, e.u,
                       -1.0 / std::sqrt(static_cast<double>(d[e.u]) * static_cast<double>(d[e.v]))});
  }
  return SparseSym(g.n(), std::move(entries));
}

}  // namespace btsbm
