#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "btsbm/experiment.hpp"
#include "support.hpp"

using namespace btsbm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("btsbm_test_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentSpec synthetic(const TreeModel& m, std::size_t trials, std::uint64_t seed) {
  ExperimentSpec s;
  s.model = m;
  s.trials = trials;
  s.master_seed = seed;
  s.solver.backend = Backend::dense;
  return s;
}

bool same_record(const TrialRecord& a, const TrialRecord& b) {
  return a.trial == b.trial && a.seed == b.seed && a.completeness == b.completeness &&
         a.misclassification == b.misclassification && a.sqrt_n_linf == b.sqrt_n_linf &&
         a.sign_agreement == b.sign_agreement && a.l2_aligned == b.l2_aligned &&
         a.fiedler_value == b.fiedler_value && a.exact_recovery == b.exact_recovery &&
         a.hierarchy_recovered == b.hierarchy_recovered;
}

}  // namespace

TEST(Quantile, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile({7}, 0.9), 7.0);
  EXPECT_DOUBLE_EQ(quantile({1, 5}, 1.0), 5.0);
}

TEST(HierarchyMatches, PlantedDendrogram) {
  const auto m = testing_support::four_leaf(0.01, 0.1, 0.1, 0.5, 50);
  const auto d = recursive_bipartition(sample_graph(m, 7), StoppingRule::fixed_depth(), 2);
  EXPECT_TRUE(hierarchy_matches(m, d));
  EXPECT_EQ(tree_height(m), 2u);
  const auto shallow = recursive_bipartition(sample_graph(m, 7), StoppingRule::fixed_depth(), 1);
  EXPECT_FALSE(hierarchy_matches(m, shallow));
}

TEST(SpecJson, ParsesAndResolvesPaths) {
  const nlohmann::json j = {{"kind", "real"}, {"dataset", "g.edges"}, {"labels", "/abs/g.labels"},
                            {"trials", 3},    {"master_seed", 9},      {"variant", "N"},
                            {"depth", 2},     {"out", "res"}};
  const auto s = experiment_from_json(j, "/base");
  EXPECT_EQ(s.kind, ExperimentKind::real);
  EXPECT_EQ(s.dataset, "/base/g.edges");
  EXPECT_EQ(s.labels, "/abs/g.labels");
  EXPECT_EQ(s.output_dir, "/base/res");
  EXPECT_EQ(s.trials, 3u);
  EXPECT_EQ(s.master_seed, 9u);
  EXPECT_EQ(s.variant, SplitOperator::normalized);
  EXPECT_THROW(experiment_from_json({{"kind", "synthetic"}}), DataError);
  EXPECT_THROW(experiment_from_json({{"kind", "other"}}), DataError);
  EXPECT_THROW(experiment_from_json({{"kind", "real"}, {"dataset", "a"}, {"labels", "b"}, {"trials", 0}}), DataError);
  EXPECT_THROW(experiment_from_json({{"kind", "real"}, {"dataset", "a"}, {"labels", "b"}, {"solver", "x"}}), DataError);
}

TEST(RunSynthetic, DeterministicAcrossRunsAndThreads) {
  const auto m = testing_support::two_leaf(0.05, 0.3, 0.3, 60, 60);
  auto s = synthetic(m, 1, 17);
  const auto a = run_synthetic(s), b = run_synthetic(s);
  EXPECT_TRUE(same_record(a.records[0], b.records[0]));
  s.trials = 6;
  s.threads = 1;
  const auto serial = run_synthetic(s);
  s.threads = 3;
  const auto parallel = run_synthetic(s);
  for (std::size_t t = 0; t < 6; ++t) {
    EXPECT_TRUE(same_record(serial.records[t], parallel.records[t]));
    EXPECT_EQ(serial.records[t].seed, trial_seed(17, t));
  }
}

TEST(RunSynthetic, OutputsAreByteReproducible) {
  const auto m = testing_support::two_leaf(0.05, 0.3, 0.3, 40, 50);
  auto s = synthetic(m, 4, 3);
  s.svg = true;
  s.output_dir = scratch("repro_a").string();
  run_synthetic(s);
  s.output_dir = scratch("repro_b").string();
  s.threads = 2;
  run_synthetic(s);
  for (const char* f : {"trials.csv", "summary.json", "fiedler.csv", "fiedler.svg"}) {
    const auto a = slurp(fs::path(scratch("x").parent_path()) / "btsbm_test_repro_a" / f);
    const auto b = slurp(fs::path(scratch("x").parent_path()) / "btsbm_test_repro_b" / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, b) << f;
  }
}

TEST(RunSynthetic, FiveCommunityFiedlerCsv) {
  const auto m = testing_support::five_leaf(0.02, 0.15, 0.2, 0.2, 0.5, {200, 200, 200, 200, 200});
  auto s = synthetic(m, 1, 1);
  s.output_dir = scratch("five").string();
  const auto r = run_synthetic(s);
  const auto csv = slurp(fs::path(s.output_dir) / "fiedler.csv");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "vertex,value,true_label");
  std::size_t rows = 0;
  std::set<std::string> labels;
  while (std::getline(in, line)) {
    ++rows;
    labels.insert(line.substr(line.rfind(',') + 1));
  }
  EXPECT_EQ(rows, 1000u);
  EXPECT_EQ(labels, (std::set<std::string>{"00", "010", "011", "10", "11"}));
  EXPECT_EQ(r.first_fiedler.size(), 1000u);
  const auto header = slurp(fs::path(s.output_dir) / "trials.csv").substr(0, 60);
  EXPECT_EQ(header.substr(0, header.find(',')), "trial");
}

TEST(RunSynthetic, StrongTwoBlockRecoveryRate) {
  const auto m = testing_support::two_leaf(0.02, 0.5, 0.5, 100, 100);
  const auto r = run_synthetic(synthetic(m, 100, 2024));
  EXPECT_GE(r.summary.exact_recoveries, 95u);
  EXPECT_EQ(r.summary.implication_violations, 0u);
  EXPECT_EQ(r.summary.trials, 100u);
}

TEST(RunSynthetic, SummaryRecomputableFromRecords) {
  const auto m = testing_support::two_leaf(0.05, 0.2, 0.25, 40, 40);
  const auto r = run_synthetic(synthetic(m, 12, 5));
  const auto again = summarize(r.records);
  EXPECT_EQ(summary_json(again).dump(), summary_json(r.summary).dump());
  double mean = 0;
  std::size_t exact = 0;
  for (const auto& t : r.records) {
    mean += t.completeness;
    exact += t.exact_recovery;
  }
  EXPECT_NEAR(r.summary.completeness.mean, mean / 12, 1e-15);
  EXPECT_EQ(r.summary.exact_recoveries, exact);
}

TEST(RunReal, KarateFirstSplit) {
  const std::string dir = BTSBM_TEST_DATA;
  ExperimentSpec s;
  s.kind = ExperimentKind::real;
  s.dataset = dir + "/karate.edges";
  s.labels = dir + "/karate.labels";
  s.depth = 2;
  s.output_dir = scratch("karate").string();
  const auto r = run_real(s);
  ASSERT_EQ(r.levels.size(), 2u);
  EXPECT_EQ(r.levels[0].clusters, 2u);
  EXPECT_NEAR(r.levels[0].completeness, 0.840, 0.02);
  EXPECT_EQ(r.levels[1].clusters, 4u);
  const auto csv = slurp(fs::path(s.output_dir) / "levels.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "level,clusters,completeness");
  const auto j = nlohmann::json::parse(slurp(fs::path(s.output_dir) / "dendrogram.json"));
  EXPECT_EQ(j["n"], 34);
}

TEST(RunReal, KarateVariants) {
  const std::string dir = BTSBM_TEST_DATA;
  const auto g = load_edge_list(dir + "/karate.edges");
  const auto truth = load_labels(dir + "/karate.labels", g.n());
  EXPECT_NEAR(run_real(g, truth, SplitOperator::adjacency, 1).levels[0].completeness, 1.0, 1e-12);
  EXPECT_NEAR(run_real(g, truth, SplitOperator::laplacian, 1).levels[0].completeness, 0.840, 5e-4);
  EXPECT_NEAR(run_real(g, truth, SplitOperator::normalized, 1).levels[0].completeness, 0.840, 5e-4);
}

TEST(RunReal, Errors) {
  const auto g = testing_support::from_pairs(3, {{0, 1}, {1, 2}});
  EXPECT_THROW(run_real(g, {"a", "b"}, SplitOperator::laplacian, 1), DataError);
  EXPECT_THROW(run_real(g, {"a", "b", "c"}, SplitOperator::laplacian, 0), InvalidArgument);
  const auto isolated = testing_support::from_pairs(4, {{0, 1}, {1, 2}, {0, 2}});
  EXPECT_THROW(run_real(isolated, {"a", "a", "b", "b"}, SplitOperator::normalized, 1), DataError);
}
