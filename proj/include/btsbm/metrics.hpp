#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "btsbm/error.hpp"

namespace btsbm {

namespace detail {

/// Maps arbitrary labels to 0..k-1 in order of first appearance.
template <typename Label>
std::vector<std::size_t> dense_labels(const std::vector<Label>& labels, std::size_t& count) {
  std::map<Label, std::size_t> ids;
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const auto& l : labels) {
    auto [it, inserted] = ids.emplace(l, ids.size());
    out.push_back(it->second);
  }
  count = ids.size();
  return out;
}

}  // namespace detail

/// Completeness of `est` with respect to `truth`:
///   1 - H(est | truth) / H(est), and 1 when H(est) = 0.
/// Natural logarithms, with 0 log 0 = 0.
template <typename TruthLabel, typename EstLabel>
double completeness_score(const std::vector<TruthLabel>& truth, const std::vector<EstLabel>& est) {
  if (truth.size() != est.size()) {
    throw InvalidArgument("completeness_score: label vectors differ in length (" +
                          std::to_string(truth.size()) + " vs " + std::to_string(est.size()) + ")");
  }
  if (truth.empty()) throw InvalidArgument("completeness_score: no vertices");
  std::size_t k_true = 0, k_est = 0;
  const auto t = detail::dense_labels(truth, k_true);
  const auto e = detail::dense_labels(est, k_est);
  if (k_est == 1) return 1.0;

  std::vector<double> joint(k_true * k_est, 0.0), row(k_true, 0.0), col(k_est, 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    joint[t[i] * k_est + e[i]] += 1.0;
    row[t[i]] += 1.0;
    col[e[i]] += 1.0;
  }
  const double n = static_cast<double>(t.size());
  double h_cond = 0.0;
  for (std::size_t a = 0; a < k_true; ++a) {
    for (std::size_t b = 0; b < k_est; ++b) {
      const double c = joint[a * k_est + b];
      if (c > 0) h_cond -= c / n * std::log(c / row[a]);
    }
  }
  double h_est = 0.0;
  for (double c : col) {
    if (c > 0) h_est -= c / n * std::log(c / n);
  }
  if (h_est <= 0.0) return 1.0;
  return std::clamp(1.0 - h_cond / h_est, 0.0, 1.0);
}

namespace detail {
inline int strict_sign(double x) { return (x > 0) - (x < 0); }

inline double alignment_sign(const Eigen::VectorXd& u, const Eigen::VectorXd& u_star) {
  return u.dot(u_star) < 0 ? -1.0 : 1.0;
}

inline void check_same_length(const Eigen::VectorXd& u, const Eigen::VectorXd& u_star, const char* who) {
  if (u.size() != u_star.size() || u.size() == 0) {
    throw InvalidArgument(std::string(who) + ": vectors must be non-empty and of equal length");
  }
}
}  // namespace detail

/// |M| / n where M = {i : sign(s u_i) != sign(u*_i)} and s = sign(u^T u*).
/// A zero in u counts as misclassified.
inline double misclassification_error(const Eigen::VectorXd& u, const Eigen::VectorXd& u_star) {
  detail::check_same_length(u, u_star, "misclassification_error");
  for (Eigen::Index i = 0; i < u_star.size(); ++i) {
    if (u_star[i] == 0.0) {
      throw InvalidArgument("misclassification_error: reference vector has a zero entry at " +
                            std::to_string(i));
    }
  }
  const double s = detail::alignment_sign(u, u_star);
  std::size_t wrong = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (detail::strict_sign(s * u[i]) != detail::strict_sign(u_star[i])) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(u.size());
}

struct PerturbationReport {
  double l2_aligned = 0.0;      // |u sign(u^T u*) - u*|_2
  double linf_aligned = 0.0;    // |u sign(u^T u*) - u*|_inf
  double sqrt_n_linf = 0.0;     // sqrt(n) * linf_aligned
  double sign_agreement = 0.0;  // fraction of coordinates with matching strict sign
  double threshold = 0.0;       // min{sqrt(n0/n1), sqrt(n1/n0)}
  double sqrt_n_min_abs_reference = 0.0;  // sqrt(n) min_i |u*_i|
};

inline PerturbationReport perturbation_report(const Eigen::VectorXd& u, const Eigen::VectorXd& u_star,
                                              std::size_t n0, std::size_t n1) {
  detail::check_same_length(u, u_star, "perturbation_report");
  if (n0 == 0 || n1 == 0) throw InvalidArgument("perturbation_report: block sizes must be positive");
  const double s = detail::alignment_sign(u, u_star);
  const Eigen::VectorXd diff = s * u - u_star;
  const double sqrt_n = std::sqrt(static_cast<double>(u.size()));
  PerturbationReport r;
  r.l2_aligned = diff.norm();
  r.linf_aligned = diff.cwiseAbs().maxCoeff();
  r.sqrt_n_linf = sqrt_n * r.linf_aligned;
  std::size_t agree = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (detail::strict_sign(s * u[i]) == detail::strict_sign(u_star[i])) ++agree;
  }
  r.sign_agreement = static_cast<double>(agree) / static_cast<double>(u.size());
  const double ratio = static_cast<double>(n0) / static_cast<double>(n1);
  r.threshold = std::min(std::sqrt(ratio), std::sqrt(1.0 / ratio));
  r.sqrt_n_min_abs_reference = sqrt_n * u_star.cwiseAbs().minCoeff();
  return r;
}

}  // namespace btsbm
