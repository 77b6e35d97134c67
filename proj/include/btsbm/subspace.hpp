#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "btsbm/error.hpp"

namespace btsbm {

struct SinTheta {
  std::vector<double> sines;  // principal-angle sines, descending
  double operator_norm = 0.0;
};

/// Principal-angle sines between span(U) and span(V), both n x d with
/// orthonormal columns: the singular values of (I - U U^T) V.
inline SinTheta subspace_sin_theta(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw InvalidArgument("subspace_sin_theta: bases must have identical shapes (" +
                          std::to_string(u.rows()) + "x" + std::to_string(u.cols()) + " vs " +
                          std::to_string(v.rows()) + "x" + std::to_string(v.cols()) + ")");
  }
  SinTheta out;
  if (u.cols() == 0) return out;
  const Eigen::MatrixXd residual = v - u * (u.transpose() * v);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    out.sines.push_back(std::clamp(svd.singularValues()[i], 0.0, 1.0));
  }
  std::sort(out.sines.begin(), out.sines.end(), std::greater<>());
  out.operator_norm = out.sines.front();
  return out;
}

/// Orthogonal polar factor U V^T of M = U Sigma V^T. M must have full rank
/// (every singular value above 1e-12 sigma_max).
inline Eigen::MatrixXd matrix_sign(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument("matrix_sign needs a non-empty square matrix");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s.minCoeff() <= 1e-12 * s.maxCoeff() || s.maxCoeff() == 0.0) {
    throw InvalidArgument("matrix_sign: matrix is rank deficient");
  }
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace btsbm
