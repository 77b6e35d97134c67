#pragma once

// Smallest eigenpairs of symmetric matrices.
//
// Two backends:
//  * dense: Householder tridiagonalization, implicit-shift QR eigenvalues of
//    the tridiagonal, inverse iteration for the wanted eigenvectors and
//    back-transformation. Only the requested vectors are formed.
//  * iterative: Lanczos with full reorthogonalization. For Laplacian-type
//    operators (zero row sums, non-positive off-diagonal) the null direction
//    1/sqrt(n) is deflated explicitly and reported as eigenvalue 0.
//
// Eigenvalues are returned ascending. Every eigenvector is oriented so that
// its largest-magnitude coordinate is positive (ties go to the lowest index).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "btsbm/error.hpp"
#include "btsbm/graph.hpp"
#include "btsbm/random.hpp"
#include "btsbm/sparse_sym.hpp"

namespace btsbm {

enum class Backend { automatic, dense, iterative };

inline const char* to_string(Backend b) {
  switch (b) {
    case Backend::dense: return "dense";
    case Backend::iterative: return "iterative";
    default: return "auto";
  }
}

inline Backend parse_backend(const std::string& s) {
  if (s == "dense") return Backend::dense;
  if (s == "iterative" || s == "lanczos") return Backend::iterative;
  if (s == "auto") return Backend::automatic;
  throw InvalidArgument("unknown solver \"" + s + "\" (expected dense|iterative|auto)");
}

struct SolverOptions {
  Backend backend = Backend::automatic;
  std::size_t dense_threshold = 2048;  // automatic: dense when n <= threshold
  double tolerance = 1e-10;            // relative residual target
  std::size_t max_iterations = 0;      // Lanczos steps; 0 means n
  double zero_tolerance = 1e-8;        // times max |diagonal|
  std::uint64_t start_seed = 0x6c616e637a6f73ULL;
};

struct SpectralResult {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // n x k, orthonormal columns
  Backend backend = Backend::dense;
  double max_residual = 0.0;     // max_j |M v_j - l_j v_j| / max(scale, 1)
  std::size_t zero_multiplicity = 0;
  std::size_t iterations = 0;    // Lanczos steps (0 for dense)
};

namespace detail {

/// Flips v so its largest-|entry| coordinate is positive; near-ties (within
/// 1e-12 relative) resolve to the lowest index.
inline void orient(Eigen::Ref<Eigen::VectorXd> v) {
  if (v.size() == 0) return;
  const double big = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= big * (1.0 - 1e-12)) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

/// LU factorization with partial pivoting of (T - shift I), T symmetric
/// tridiagonal; same scheme as LAPACK dgttrf/dgtts2.
class ShiftedTridiagonalLU {
 public:
  ShiftedTridiagonalLU(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double shift,
                       double tiny)
      : m_(diag.size()),
        dl_(off),
        d_(diag.array() - shift),
        du_(off),
        du2_(Eigen::VectorXd::Zero(std::max<Eigen::Index>(m_ - 2, 0))),
        pivot_(static_cast<std::size_t>(std::max<Eigen::Index>(m_ - 1, 0)), false) {
    for (Eigen::Index i = 0; i + 1 < m_; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        if (d_[i] == 0.0) d_[i] = tiny;
        const double fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
      } else {
        const double fact = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = fact;
        const double temp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = temp - fact * d_[i + 1];
        if (i + 2 < m_) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
        pivot_[static_cast<std::size_t>(i)] = true;
      }
    }
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (d_[i] == 0.0) d_[i] = tiny;
    }
  }

  void solve(Eigen::VectorXd& b) const {
    for (Eigen::Index i = 0; i + 1 < m_; ++i) {
      if (!pivot_[static_cast<std::size_t>(i)]) {
        b[i + 1] -= dl_[i] * b[i];
      } else {
        const double temp = b[i] - dl_[i] * b[i + 1];
        b[i] = b[i + 1];
        b[i + 1] = temp;
      }
    }
    for (Eigen::Index i = m_ - 1; i >= 0; --i) {
      double acc = b[i];
      if (i + 1 < m_) acc -= du_[i] * b[i + 1];
      if (i + 2 < m_) acc -= du2_[i] * b[i + 2];
      b[i] = acc / d_[i];
    }
  }

 private:
  Eigen::Index m_;
  Eigen::VectorXd dl_, d_, du_, du2_;
  std::vector<bool> pivot_;
};

/// Eigenvectors of a symmetric tridiagonal matrix for given (ascending)
/// eigenvalues, by inverse iteration with reorthogonalization inside
/// clusters of close eigenvalues.
inline Eigen::MatrixXd tridiagonal_eigenvectors(const Eigen::VectorXd& diag,
                                                const Eigen::VectorXd& off,
                                                const Eigen::VectorXd& values,
                                                std::uint64_t seed) {
  const Eigen::Index m = diag.size();
  const Eigen::Index k = values.size();
  double norm = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double row = std::abs(diag[i]);
    if (i > 0) row += std::abs(off[i - 1]);
    if (i + 1 < m) row += std::abs(off[i]);
    norm = std::max(norm, row);
  }
  norm = std::max(norm, std::numeric_limits<double>::min());
  const double eps = std::numeric_limits<double>::epsilon();
  const double cluster_gap = 1e-3 * norm;
  const double perturb = 10.0 * eps * norm;

  Eigen::MatrixXd z(m, k);
  CounterRng rng(seed);
  Eigen::Index cluster_start = 0;
  double prev_shift = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < k; ++j) {
    double shift = values[j];
    if (j > 0 && values[j] - values[j - 1] > cluster_gap) cluster_start = j;
    if (j > cluster_start && shift <= prev_shift) shift = prev_shift + perturb;
    prev_shift = shift;

    ShiftedTridiagonalLU lu(diag, off, shift, eps * norm);
    Eigen::VectorXd x(m);
    for (Eigen::Index i = 0; i < m; ++i) x[i] = rng.uniform() - 0.5;
    x.normalize();
    for (int iter = 0; iter < 10; ++iter) {
      lu.solve(x);
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index c = cluster_start; c < j; ++c) x -= z.col(c).dot(x) * z.col(c);
      }
      const double growth = x.norm();
      x /= growth;
      // Large growth means the shift was (numerically) an eigenvalue.
      if (growth * eps * norm > 1e-3 && iter >= 1) break;
    }
    z.col(j) = x;
  }
  return z;
}

inline double residual_scale(double matrix_scale) { return std::max(matrix_scale, 1.0); }

inline bool is_laplacian_like(const SparseSym& m) {
  bool ok = true;
  std::vector<double> row(m.n(), 0.0);
  m.for_each([&](std::size_t i, std::size_t j, double v) {
    row[i] += v;
    if (i != j) {
      row[j] += v;
      if (v > 0) ok = false;
    }
  });
  const double scale = std::max(m.max_abs_diagonal(), 1.0);
  for (double r : row) {
    if (std::abs(r) > 1e-12 * scale) ok = false;
  }
  return ok;
}

inline void finalize(SpectralResult& r, double matrix_scale, double zero_tol,
                     const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply) {
  const double scale = residual_scale(matrix_scale);
  r.max_residual = 0.0;
  r.zero_multiplicity = 0;
  for (Eigen::Index j = 0; j < r.eigenvectors.cols(); ++j) {
    orient(r.eigenvectors.col(j));
    const Eigen::VectorXd v = r.eigenvectors.col(j);
    const double res = (apply(v) - r.eigenvalues[j] * v).norm() / scale;
    r.max_residual = std::max(r.max_residual, res);
    if (r.eigenvalues[j] < zero_tol) ++r.zero_multiplicity;
  }
}

}  // namespace detail

/// k smallest eigenpairs of a dense symmetric matrix.
inline SpectralResult dense_smallest_eigenpairs(const Eigen::MatrixXd& a, std::size_t k,
                                                const SolverOptions& opts = {}) {
  const auto n = a.rows();
  if (a.cols() != n) throw InvalidArgument("matrix must be square");
  if (k == 0 || static_cast<Eigen::Index>(k) > n) {
    throw InvalidArgument("requested " + std::to_string(k) + " eigenpairs of an " +
                          std::to_string(n) + "x" + std::to_string(n) + " matrix");
  }
  const auto kk = static_cast<Eigen::Index>(k);
  SpectralResult r;
  r.backend = Backend::dense;
  if (n <= 64 || 4 * kk >= n) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
    r.eigenvalues = es.eigenvalues().head(kk);
    r.eigenvectors = es.eigenvectors().leftCols(kk);
  } else {
    Eigen::Tridiagonalization<Eigen::MatrixXd> tri(a);
    const Eigen::VectorXd diag = tri.diagonal();
    const Eigen::VectorXd off = tri.subDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("tridiagonal QR did not converge");
    r.eigenvalues = es.eigenvalues().head(kk);
    const Eigen::MatrixXd z =
        detail::tridiagonal_eigenvectors(diag, off, r.eigenvalues, opts.start_seed);
    r.eigenvectors = tri.matrixQ() * z;
  }
  const double scale = a.cwiseAbs().rowwise().sum().maxCoeff();
  const double zero_tol = opts.zero_tolerance * std::max(a.diagonal().cwiseAbs().maxCoeff(), 1.0);
  detail::finalize(r, scale, zero_tol, [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(a * v); });
  if (r.max_residual > opts.tolerance) {
    throw NumericalError("dense eigensolver residual " + std::to_string(r.max_residual) +
                             " above tolerance",
                         r.max_residual);
  }
  return r;
}

/// k smallest eigenpairs by Lanczos with full reorthogonalization.
inline SpectralResult lanczos_smallest_eigenpairs(const SparseSym& m, std::size_t k,
                                                  const SolverOptions& opts = {}) {
  const auto n = static_cast<Eigen::Index>(m.n());
  if (k == 0 || static_cast<Eigen::Index>(k) > n) {
    throw InvalidArgument("requested " + std::to_string(k) + " eigenpairs of an " +
                          std::to_string(n) + "x" + std::to_string(n) + " matrix");
  }
  const double scale = m.max_abs_row_sum();
  const double rscale = detail::residual_scale(scale);
  const double zero_tol = opts.zero_tolerance * std::max(m.max_abs_diagonal(), 1.0);
  const bool deflate = detail::is_laplacian_like(m);
  const Eigen::Index locked = deflate ? 1 : 0;
  const Eigen::Index want = static_cast<Eigen::Index>(k) - locked;
  const Eigen::Index space = n - locked;  // dimension left for the Krylov basis
  Eigen::Index limit = opts.max_iterations == 0 ? space
                                                : std::min<Eigen::Index>(space, static_cast<Eigen::Index>(opts.max_iterations));
  limit = std::max(limit, want);

  const Eigen::VectorXd null_dir = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));

  SpectralResult r;
  r.backend = Backend::iterative;
  if (want == 0) {
    r.eigenvalues = Eigen::VectorXd::Zero(1);
    r.eigenvectors = null_dir;
    detail::finalize(r, scale, zero_tol, [&](const Eigen::VectorXd& v) { return m * v; });
    return r;
  }

  CounterRng rng(opts.start_seed);
  Eigen::MatrixXd basis(n, limit + 1);
  std::vector<double> alpha, beta;
  alpha.reserve(static_cast<std::size_t>(limit));
  beta.reserve(static_cast<std::size_t>(limit));

  // Orthogonalizes x against the null direction and basis columns [0, cols).
  auto orthogonalize = [&](Eigen::VectorXd& x, Eigen::Index cols) {
    for (int pass = 0; pass < 2; ++pass) {
      if (deflate) x -= null_dir.dot(x) * null_dir;
      if (cols > 0) {
        const Eigen::VectorXd coef = basis.leftCols(cols).transpose() * x;
        x -= basis.leftCols(cols) * coef;
      }
    }
  };
  auto fresh_vector = [&](Eigen::Index cols) -> std::optional<Eigen::VectorXd> {
    for (int attempt = 0; attempt < 4; ++attempt) {
      Eigen::VectorXd x(n);
      for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.uniform() - 0.5;
      const double before = x.norm();
      orthogonalize(x, cols);
      const double after = x.norm();
      if (after > 1e-8 * before) return x / after;
    }
    return std::nullopt;
  };

  auto start = fresh_vector(0);
  if (!start) throw NumericalError("Lanczos: could not build a start vector");
  basis.col(0) = *start;

  double best_residual = std::numeric_limits<double>::infinity();
  Eigen::Index next_check = std::min<Eigen::Index>(limit, std::max<Eigen::Index>(2 * want + 20, 40));
  Eigen::Index steps = 0;
  Eigen::VectorXd w(n);
  for (Eigen::Index j = 0; j < limit; ++j) {
    m.matvec(basis.col(j).data(), w.data());
    const double a = basis.col(j).dot(w);
    alpha.push_back(a);
    w -= a * basis.col(j);
    if (j > 0) w -= beta.back() * basis.col(j - 1);
    orthogonalize(w, j + 1);
    double b = w.norm();
    bool exhausted = false;
    if (b <= 1e-12 * rscale) {
      // Invariant subspace found; continue from a new orthogonal direction.
      b = 0.0;
      if (j + 1 < limit) {
        auto next = fresh_vector(j + 1);
        if (next) basis.col(j + 1) = *next; else exhausted = true;
      }
    } else {
      basis.col(j + 1) = w / b;
    }
    beta.push_back(b);
    steps = j + 1;

    const bool last = (steps == limit) || exhausted;
    if (steps < want || (!last && steps < next_check)) continue;
    next_check = std::min<Eigen::Index>(limit, steps + std::max<Eigen::Index>(20, steps / 4));

    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), steps);
    Eigen::VectorXd off = Eigen::Map<Eigen::VectorXd>(beta.data(), steps - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw NumericalError("Lanczos: tridiagonal eigensolve failed");

    double estimate = 0.0;
    for (Eigen::Index i = 0; i < want; ++i) {
      estimate = std::max(estimate, std::abs(b * es.eigenvectors()(steps - 1, i)) / rscale);
    }
    if (estimate > 0.1 * opts.tolerance && !last) continue;

    // Candidate Ritz pairs: verify true residuals.
    Eigen::MatrixXd ritz = basis.leftCols(steps) * es.eigenvectors().leftCols(want);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < want; ++i) {
      const Eigen::VectorXd v = ritz.col(i);
      worst = std::max(worst, (m * v - es.eigenvalues()[i] * v).norm() / rscale);
    }
    best_residual = std::min(best_residual, worst);
    if (worst <= opts.tolerance || last) {
      if (worst > opts.tolerance) break;
      r.eigenvalues.resize(want + locked);
      r.eigenvectors.resize(n, want + locked);
      if (deflate) {
        r.eigenvalues[0] = 0.0;
        r.eigenvectors.col(0) = null_dir;
      }
      r.eigenvalues.tail(want) = es.eigenvalues().head(want);
      r.eigenvectors.rightCols(want) = ritz;
      r.iterations = static_cast<std::size_t>(steps);
      detail::finalize(r, scale, zero_tol, [&](const Eigen::VectorXd& v) { return m * v; });
      return r;
    }
    if (exhausted) break;
  }
  throw NumericalError("Lanczos did not converge after " + std::to_string(steps) +
                           " steps (best relative residual " + std::to_string(best_residual) + ")",
                       best_residual);
}

inline Backend resolve_backend(std::size_t n, const SolverOptions& opts) {
  if (opts.backend != Backend::automatic) return opts.backend;
  return n <= opts.dense_threshold ? Backend::dense : Backend::iterative;
}

inline SpectralResult smallest_eigenpairs(const SparseSym& m, std::size_t k,
                                          const SolverOptions& opts = {}) {
  if (k == 0 || k > m.n()) {
    throw InvalidArgument("requested " + std::to_string(k) + " eigenpairs of an operator of size " +
                          std::to_string(m.n()));
  }
  if (resolve_backend(m.n(), opts) == Backend::dense) {
    return dense_smallest_eigenpairs(m.to_dense(), k, opts);
  }
  return lanczos_smallest_eigenpairs(m, k, opts);
}

struct FiedlerResult {
  double value = 0.0;
  Eigen::VectorXd vector;
  SpectralResult spectrum;  // the eigenpairs the value was read from
};

struct ConnectivityReport {
  std::vector<std::vector<std::size_t>> components;
  double second_eigenvalue = 0.0;
};

using FiedlerOutcome = std::variant<FiedlerResult, ConnectivityReport>;

/// Second-smallest eigenpair of a Laplacian, or the component listing when
/// the zero eigenvalue is not simple. `extra` requests further eigenpairs
/// (e.g. lambda_3 for gap heuristics) in the same solve.
inline FiedlerOutcome fiedler_vector(const SparseSym& laplacian_matrix, const SolverOptions& opts = {},
                                     std::size_t extra = 0) {
  const std::size_t n = laplacian_matrix.n();
  if (n < 2) throw InvalidArgument("Fiedler vector needs at least two vertices");
  const std::size_t k = std::min(n, 2 + extra);
  SpectralResult spec = smallest_eigenpairs(laplacian_matrix, k, opts);
  const double tol_zero = 1e-8 * std::max(laplacian_matrix.max_abs_diagonal(), 1.0);
  if (spec.eigenvalues[1] < tol_zero) {
    return ConnectivityReport{connected_components(laplacian_matrix.pattern()), spec.eigenvalues[1]};
  }
  FiedlerResult f;
  f.value = spec.eigenvalues[1];
  f.vector = spec.eigenvectors.col(1);
  f.spectrum = std::move(spec);
  return f;
}

}  // namespace btsbm
