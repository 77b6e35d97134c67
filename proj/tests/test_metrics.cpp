#include <gtest/gtest.h>

#include <random>

#include "btsbm/diagnostics.hpp"
#include "btsbm/metrics.hpp"
#include "btsbm/sampling.hpp"
#include "support.hpp"

using namespace btsbm;
using testing_support::brute_force_completeness;

TEST(Completeness, Examples) {
  const std::vector<int> truth{1, 1, 2, 2};
  EXPECT_DOUBLE_EQ(completeness_score(truth, std::vector<char>{'a', 'a', 'a', 'a'}), 1.0);
  EXPECT_DOUBLE_EQ(completeness_score(truth, truth), 1.0);
  const double expected = 1 - (0.5 * std::log(2.0)) / (2 * std::log(2.0) - 0.75 * std::log(3.0));
  const double got = completeness_score(truth, std::vector<char>{'a', 'a', 'a', 'b'});
  EXPECT_NEAR(got, expected, 1e-15);
  EXPECT_NEAR(got, 0.3836, 1e-4);
}

TEST(Completeness, UnionsOfCommunitiesAreComplete) {
  const std::vector<int> truth{0, 0, 1, 1, 2, 2, 3, 3};
  EXPECT_DOUBLE_EQ(completeness_score(truth, std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(completeness_score(truth, std::vector<int>{5, 5, 7, 7, 7, 7, 5, 5}), 1.0);
}

TEST(Completeness, Errors) {
  EXPECT_THROW(completeness_score(std::vector<int>{1, 2}, std::vector<int>{1}), InvalidArgument);
  EXPECT_THROW(completeness_score(std::vector<int>{}, std::vector<int>{}), InvalidArgument);
}

TEST(Completeness, MatchesBruteForceAndIsPermutationInvariant) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 30;
    const int kt = 1 + static_cast<int>(rng() % 5), ke = 1 + static_cast<int>(rng() % 5);
    std::vector<int> truth(n), est(n);
    for (auto& x : truth) x = static_cast<int>(rng() % static_cast<unsigned>(kt));
    for (auto& x : est) x = static_cast<int>(rng() % static_cast<unsigned>(ke));
    const double score = completeness_score(truth, est);
    EXPECT_NEAR(score, brute_force_completeness(truth, est), 1e-12);
    EXPECT_GE(score, 0.0);
    EXPECT_LE(score, 1.0);
    std::vector<int> perm{0, 1, 2, 3, 4};
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::string> truth2(n), est2(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth2[i] = "c" + std::to_string(perm[static_cast<std::size_t>(truth[i])]);
      est2[i] = "k" + std::to_string(perm[static_cast<std::size_t>(est[i])]);
    }
    EXPECT_NEAR(completeness_score(truth2, est2), score, 1e-12);
  }
}

TEST(Misclassification, Examples) {
  Eigen::VectorXd u_star(10);
  for (int i = 0; i < 10; ++i) u_star[i] = (i < 5 ? 1 : -1) / std::sqrt(10.0);
  EXPECT_EQ(misclassification_error(u_star, u_star), 0.0);
  EXPECT_EQ(misclassification_error(-u_star, u_star), 0.0);
  Eigen::VectorXd u = u_star;
  u[3] = -u[3];
  EXPECT_DOUBLE_EQ(misclassification_error(u, u_star), 0.1);
  EXPECT_DOUBLE_EQ(misclassification_error(-u, u_star), 0.1);
  u_star[0] = 0;
  EXPECT_THROW(misclassification_error(u, u_star), InvalidArgument);
  EXPECT_THROW(misclassification_error(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(4)), InvalidArgument);
}

TEST(Perturbation, IdenticalAndFlipped) {
  Eigen::VectorXd u_star(4);
  u_star << 0.5, 0.5, -0.5, -0.5;
  for (const Eigen::VectorXd& u : {Eigen::VectorXd(u_star), Eigen::VectorXd(-u_star)}) {
    const auto r = perturbation_report(u, u_star, 2, 2);
    EXPECT_EQ(r.l2_aligned, 0.0);
    EXPECT_EQ(r.linf_aligned, 0.0);
    EXPECT_EQ(r.sqrt_n_linf, 0.0);
    EXPECT_EQ(r.sign_agreement, 1.0);
    EXPECT_EQ(r.threshold, 1.0);
  }
}

TEST(Perturbation, ClosedFormForPerturbedUnitVector) {
  const int n = 100;
  const double eps = 0.01, a = 0.1;
  Eigen::VectorXd u_star(n);
  for (int i = 0; i < n; ++i) u_star[i] = i < 50 ? a : -a;
  Eigen::VectorXd u = u_star;
  u[0] += eps;
  u.normalize();
  const double norm = std::sqrt(1 + 2 * a * eps + eps * eps);
  const double first = (a + eps) / norm - a, rest = a / norm - a;
  const auto r = perturbation_report(u, u_star, 50, 50);
  EXPECT_NEAR(r.l2_aligned, std::sqrt(first * first + (n - 1) * rest * rest), 1e-15);
  EXPECT_NEAR(r.linf_aligned, std::max(std::abs(first), std::abs(rest)), 1e-15);
  EXPECT_NEAR(r.sqrt_n_linf, 10 * std::max(std::abs(first), std::abs(rest)), 1e-14);
  EXPECT_EQ(r.sign_agreement, 1.0);
  EXPECT_EQ(r.threshold, 1.0);
  EXPECT_NEAR(r.sqrt_n_min_abs_reference, 1.0, 1e-15);
}

TEST(Perturbation, NormChainAndImplication) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 1.0);
  const auto m = testing_support::two_leaf(0.02, 0.3, 0.4, 30, 50);
  const Eigen::VectorXd u_star = population_fiedler(m).vector;
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXd u = u_star;
    const double scale = 0.02 * (t % 20);
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] += scale * noise(rng) / std::sqrt(80.0);
    u.normalize();
    const auto r = perturbation_report(u, u_star, 30, 50);
    EXPECT_LE(r.linf_aligned, r.l2_aligned + 1e-15);
    EXPECT_LE(r.l2_aligned, std::sqrt(80.0) * r.linf_aligned + 1e-15);
    if (r.sqrt_n_linf < r.sqrt_n_min_abs_reference) EXPECT_EQ(r.sign_agreement, 1.0);
    EXPECT_NEAR(r.threshold, std::sqrt(30.0 / 50.0), 1e-15);
  }
}

TEST(Decomposition, IdentitiesOnSampledGraphs) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto m = testing_support::two_leaf(0.03, 0.2 + 0.05 * static_cast<double>(s), 0.3, 90, 110);
    const auto g = sample_graph(m, s);
    const auto r = laplacian_decomposition(g, m);
    EXPECT_TRUE(r.sum_is_exact);
    EXPECT_EQ((r.l1_exact.constant + r.l2_exact.constant).cast<double>(), testing_support::dense_laplacian(g));
    EXPECT_LE(r.fiedler_residual, 1e-9 * 200);
    EXPECT_NEAR(r.lambda_third_l3, r.lambda_third_l3_closed, 1e-9);
    EXPECT_NEAR(r.lambda_third_l3_closed, std::min(90 * r.p0 + 110 * 0.03, 110 * 0.3 + 90 * 0.03), 1e-15);
    EXPECT_LT((r.l1 * Eigen::VectorXd::Ones(200)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((r.l3 * Eigen::VectorXd::Ones(200)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(r.l1.isApprox(r.l1.transpose(), 0.0));
    EXPECT_TRUE(r.l3.isApprox(r.l3.transpose(), 0.0));
    EXPECT_TRUE(r.residual.isApprox(r.l1 - r.l3));
    EXPECT_LE(r.lambda_second_l1, 200 * 0.03 + 1e-9);
  }
}

TEST(Decomposition, Preconditions) {
  const auto m = testing_support::two_leaf(0.03, 0.2, 0.3, 5, 5);
  EXPECT_THROW(laplacian_decomposition(Graph(9, {}), m), InvalidArgument);
  EXPECT_THROW(laplacian_decomposition(Graph(4, {}), TreeModel(TreeSpec::leaf(0.3, 4))), InvalidArgument);
}

TEST(ConditionReportTest, MultiScaleRegime) {
  auto regime = [](std::size_t n) {
    const double nd = static_cast<double>(n), l = std::log(nd) / nd;
    return condition_report(testing_support::four_leaf(l, 2 * l, 2 * l, 0.5, n / 4));
  };
  const auto c = regime(4000);
  EXPECT_LT(c.eigen_gap_ratio_old, 0.1);
  EXPECT_FALSE(c.eigen_gap_holds());
  EXPECT_GT(c.c2_ratio, 10.0);
  EXPECT_TRUE(c.c2_holds());
  // C3 stays at the constant 1/(2 sqrt 2) as n grows; the old ratio decays.
  EXPECT_NEAR(c.c3_ratio, 1 / (2 * std::sqrt(2.0)), 1e-12);
  const auto big = regime(40000);
  EXPECT_NEAR(big.c3_ratio, c.c3_ratio, 1e-12);
  EXPECT_LT(big.eigen_gap_ratio_old, c.eigen_gap_ratio_old);
  EXPECT_GT(c.c3_ratio, c.eigen_gap_ratio_old);
}

TEST(ConditionReportTest, BalancedStrongModel) {
  const auto c = condition_report(testing_support::four_leaf(0.01, 0.1, 0.1, 0.5, 100));
  const double lhs = 200 * (0.1 - 0.01), rhs = std::sqrt((200 * 0.1 + 200 * 0.1) * std::log(400.0));
  EXPECT_NEAR(c.eigen_gap_lhs, lhs, 1e-12);
  EXPECT_NEAR(c.c3_rhs, rhs, 1e-12);
  EXPECT_NEAR(c.c3_ratio, lhs / rhs, 1e-12);
  EXPECT_EQ(c.n0, 200u);
  EXPECT_EQ(c.c1_num_leaves, 4u);
  EXPECT_EQ(c.c1_max_size_ratio, 1.0);
  const auto d = density_summary(testing_support::four_leaf(0.01, 0.1, 0.1, 0.5, 100));
  EXPECT_NEAR(c.eigen_gap_rhs_old, std::sqrt(400 * d.p_bar_star * std::log(400.0)), 1e-12);
  EXPECT_NEAR(c.c2_rhs, std::pow(400 * d.p_bar_star, 3) * std::log(400.0), 1e-6);
  EXPECT_THROW(condition_report(TreeModel(TreeSpec::leaf(0.3, 4))), InvalidArgument);
}

TEST(ConditionReportTest, SymmetricArgumentsCoincide) {
  const auto m = testing_support::two_leaf(0.02, 0.2, 0.2, 60, 60);
  const auto c = condition_report(m);
  EXPECT_DOUBLE_EQ(c.eigen_gap_lhs, 60 * (0.2 - 0.02));
  EXPECT_GE(c.c2_lhs, 0.0);
  EXPECT_GE(c.c3_rhs, 0.0);
}

TEST(OperatorDistance, ZeroAndRankOne) {
  const auto g = sample_graph(testing_support::two_leaf(0.05, 0.3, 0.3, 20, 20), 1);
  const auto l = laplacian(g);
  EXPECT_NEAR(operator_distance(l, l.to_dense()), 0.0, 1e-12);
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(40, -1, 1).normalized();
  for (double c : {2.5, -3.0}) {
    const Eigen::MatrixXd shifted = l.to_dense() - c * v * v.transpose();
    EXPECT_NEAR(operator_distance(l, shifted), std::abs(c), 1e-10);
    EXPECT_NEAR(operator_distance(l, shifted, 1e-12, 0), std::abs(c), 1e-6);
  }
  EXPECT_THROW(operator_distance(l, Eigen::MatrixXd::Zero(3, 3)), InvalidArgument);
}

TEST(OperatorDistance, ScalesWithConcentrationReference) {
  // Mean distance over seeds against sqrt(max L*_ii log n) for growing density.
  std::vector<double> xs, ys;
  for (double scale : {0.25, 0.5, 1.0, 2.0}) {
    const auto m = testing_support::two_leaf(0.02 * scale, 0.1 * scale, 0.12 * scale, 100, 100);
    const Eigen::MatrixXd l_star = population_laplacian(m);
    double mean = 0;
    for (std::uint64_t s = 0; s < 50; ++s) mean += operator_distance(laplacian(sample_graph(m, s)), l_star);
    mean /= 50;
    const double ref = std::sqrt(l_star.diagonal().maxCoeff() * std::log(200.0));
    EXPECT_GT(mean / ref, 0.2);
    EXPECT_LT(mean / ref, 5.0);
    xs.push_back(std::log(ref));
    ys.push_back(std::log(mean));
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / 4, my = std::accumulate(ys.begin(), ys.end(), 0.0) / 4;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  EXPECT_GT(slope, 0.6);
  EXPECT_LT(slope, 1.4);
}
