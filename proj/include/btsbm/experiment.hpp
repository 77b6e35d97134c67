#pragma once

// Monte Carlo and real-network experiment drivers.
//
// A synthetic experiment samples `trials` graphs from a model, splits each
// one recursively and compares the result with the planted hierarchy and the
// population Fiedler vector. A real experiment clusters one graph and scores
// every dendrogram level against ground-truth labels.
//
// Files written to the output directory (all byte-reproducible):
//   synthetic: trials.csv, summary.json, fiedler.csv, and fiedler.svg on request
//   real:      levels.csv, dendrogram.json
// Wall-clock times are kept in memory only.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "btsbm/clustering.hpp"
#include "btsbm/error.hpp"
#include "btsbm/io.hpp"
#include "btsbm/metrics.hpp"
#include "btsbm/model_io.hpp"
#include "btsbm/population.hpp"
#include "btsbm/random.hpp"
#include "btsbm/sampling.hpp"
#include "btsbm/tree_model.hpp"

namespace btsbm {

enum class ExperimentKind { synthetic, real };

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::synthetic;
  std::optional<TreeModel> model;  // synthetic
  std::string dataset;             // real: edge list
  std::string labels;              // real: "vertex label" file
  bool one_based = false;
  std::size_t trials = 1;
  std::uint64_t master_seed = 0;
  SolverOptions solver;
  SplitOperator variant = SplitOperator::laplacian;
  std::size_t depth = 0;  // 0: tree height (synthetic) or 1 (real)
  std::string output_dir;  // empty: nothing written
  std::size_t threads = 0;  // 0: hardware concurrency
  bool svg = false;
};

/// Reads a JSON experiment description. Relative paths resolve against the
/// directory containing the spec file when `base_dir` is given.
inline ExperimentSpec experiment_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return (path.is_absolute() || base_dir.empty() ? path : base_dir / path).string();
  };
  ExperimentSpec s;
  try {
    const std::string kind = j.value("kind", std::string("synthetic"));
    if (kind == "synthetic") {
      s.kind = ExperimentKind::synthetic;
      if (!j.contains("model")) throw DataError("synthetic experiment needs \"model\"");
      const auto& m = j.at("model");
      s.model = m.is_string() ? load_model(resolve(m.get<std::string>())) : model_from_json(m);
    } else if (kind == "real") {
      s.kind = ExperimentKind::real;
      s.dataset = resolve(j.at("dataset").get<std::string>());
      s.labels = resolve(j.at("labels").get<std::string>());
      s.one_based = j.value("one_based", false);
    } else {
      throw DataError("unknown experiment kind \"" + kind + "\" (expected synthetic|real)");
    }
    const long long trials = j.value("trials", 1LL);
    if (trials < 1) throw DataError("trials must be at least 1");
    s.trials = static_cast<std::size_t>(trials);
    s.master_seed = j.value("master_seed", std::uint64_t{0});
    s.solver.backend = parse_backend(j.value("solver", std::string("auto")));
    s.variant = parse_split_operator(j.value("variant", std::string("laplacian")));
    s.depth = j.value("depth", std::size_t{0});
    if (j.contains("out")) s.output_dir = resolve(j.at("out").get<std::string>());
    s.threads = j.value("threads", std::size_t{0});
    s.svg = j.value("svg", false);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed experiment spec: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(e.what());
  }
  return s;
}

inline ExperimentSpec load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open experiment spec " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  return experiment_from_json(j, std::filesystem::path(path).parent_path());
}

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double completeness = 0.0;      // first split vs planted communities
  double misclassification = 0.0; // first-split vector vs population Fiedler vector
  double sqrt_n_linf = 0.0;
  double threshold = 0.0;
  double sign_agreement = 0.0;
  double l2_aligned = 0.0;
  double fiedler_value = 0.0;
  bool exact_recovery = false;       // misclassification == 0
  bool hierarchy_recovered = false;  // every planted node reproduced
  double wall_seconds = 0.0;         // not written to files
};

struct FieldSummary {
  double mean = 0.0, min = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, max = 0.0;
};

/// Linear interpolation between order statistics (type 7).
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline FieldSummary summarize(const std::vector<double>& v) {
  FieldSummary s;
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  s.q25 = quantile(v, 0.25);
  s.median = quantile(v, 0.5);
  s.q75 = quantile(v, 0.75);
  return s;
}

struct SyntheticSummary {
  std::size_t trials = 0;
  std::size_t exact_recoveries = 0;
  std::size_t hierarchy_recoveries = 0;
  std::size_t bound_met = 0;              // trials with sqrt_n_linf < threshold
  std::size_t implication_violations = 0; // bound met but some sign wrong
  FieldSummary completeness, misclassification, sqrt_n_linf, sign_agreement, l2_aligned, fiedler_value;
};

inline SyntheticSummary summarize(const std::vector<TrialRecord>& records) {
  SyntheticSummary s;
  s.trials = records.size();
  std::vector<double> comp, mis, linf, agree, l2, fv;
  for (const auto& r : records) {
    s.exact_recoveries += r.exact_recovery;
    s.hierarchy_recoveries += r.hierarchy_recovered;
    if (r.sqrt_n_linf < r.threshold) {
      ++s.bound_met;
      if (r.sign_agreement != 1.0) ++s.implication_violations;
    }
    comp.push_back(r.completeness);
    mis.push_back(r.misclassification);
    linf.push_back(r.sqrt_n_linf);
    agree.push_back(r.sign_agreement);
    l2.push_back(r.l2_aligned);
    fv.push_back(r.fiedler_value);
  }
  s.completeness = summarize(comp);
  s.misclassification = summarize(mis);
  s.sqrt_n_linf = summarize(linf);
  s.sign_agreement = summarize(agree);
  s.l2_aligned = summarize(l2);
  s.fiedler_value = summarize(fv);
  return s;
}

/// True when every planted node's vertex set appears in the dendrogram at the
/// same depth, with children matched up to order.
inline bool hierarchy_matches(const TreeModel& model, const Dendrogram& d) {
  std::function<bool(const TreeModel::Node&, const ClusterNode&)> match =
      [&](const TreeModel::Node& s, const ClusterNode& c) {
        if (c.vertices.size() != s.size || c.vertices.front() != s.first_vertex ||
            c.vertices.back() + 1 != s.end_vertex()) {
          return false;
        }
        if (s.is_leaf()) return true;
        if (c.is_leaf()) return false;
        const auto& l = model.left(s);
        const auto& r = model.right(s);
        return (match(l, c.children[0]) && match(r, c.children[1])) ||
               (match(l, c.children[1]) && match(r, c.children[0]));
      };
  return match(model.root(), d.root);
}

inline std::size_t tree_height(const TreeModel& model) {
  std::size_t h = 0;
  for (const auto& s : model.nodes()) h = std::max(h, s.code.size());
  return h;
}

struct SyntheticResult {
  std::vector<TrialRecord> records;
  SyntheticSummary summary;
  std::vector<double> first_fiedler;  // aligned sample Fiedler vector of trial 0
};

namespace detail {

struct TrialOutput {
  TrialRecord record;
  Eigen::VectorXd aligned_vector;
};

inline TrialOutput run_trial(const ExperimentSpec& spec, const TreeModel& model, const FiedlerPair& pop,
                             const std::vector<NodeCode>& truth, std::size_t t) {
  const auto start = std::chrono::steady_clock::now();
  TrialOutput out;
  TrialRecord& r = out.record;
  r.trial = t;
  r.seed = trial_seed(spec.master_seed, t);
  const Graph g = sample_graph(model, r.seed);

  RecursiveOptions opts;
  opts.max_depth = spec.depth > 0 ? spec.depth : std::max<std::size_t>(1, tree_height(model));
  opts.split.solver = spec.solver;
  opts.split.op = spec.variant;
  const Dendrogram d = recursive_bipartition(g, StoppingRule::fixed_depth(), opts);

  r.completeness = completeness_score(truth, flat_clustering(d, 1));
  r.hierarchy_recovered = hierarchy_matches(model, d);
  const auto& split = *d.root.split;
  r.fiedler_value = split.fiedler_value;
  const auto n0 = model.left(model.root()).size, n1 = model.right(model.root()).size;
  if (split.vector.size() == static_cast<Eigen::Index>(g.n())) {
    r.misclassification = misclassification_error(split.vector, pop.vector);
    const auto pr = perturbation_report(split.vector, pop.vector, n0, n1);
    r.sqrt_n_linf = pr.sqrt_n_linf;
    r.threshold = pr.threshold;
    r.sign_agreement = pr.sign_agreement;
    r.l2_aligned = pr.l2_aligned;
    out.aligned_vector = split.vector.dot(pop.vector) < 0 ? Eigen::VectorXd(-split.vector) : split.vector;
  } else {
    // Split came from connected components; score the labels directly.
    Eigen::VectorXd pseudo(static_cast<Eigen::Index>(g.n()));
    for (std::size_t v = 0; v < g.n(); ++v) pseudo[static_cast<Eigen::Index>(v)] = split.assignment[v] == 0 ? 1.0 : -1.0;
    pseudo /= std::sqrt(static_cast<double>(g.n()));
    r.misclassification = misclassification_error(pseudo, pop.vector);
    const auto pr = perturbation_report(pseudo, pop.vector, n0, n1);
    r.sqrt_n_linf = std::numeric_limits<double>::infinity();
    r.threshold = pr.threshold;
    r.sign_agreement = pr.sign_agreement;
    r.l2_aligned = pr.l2_aligned;
    out.aligned_vector = pseudo;
  }
  r.exact_recovery = r.misclassification == 0.0;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline nlohmann::ordered_json field_json(const FieldSummary& f) {
  auto num = [](double x) -> nlohmann::ordered_json {
    if (!std::isfinite(x)) return format_double(x);
    return x;
  };
  nlohmann::ordered_json j;
  j["mean"] = num(f.mean);
  j["min"] = num(f.min);
  j["q25"] = num(f.q25);
  j["median"] = num(f.median);
  j["q75"] = num(f.q75);
  j["max"] = num(f.max);
  return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

/// Scatter of Fiedler coordinates by vertex, coloured by planted community.
inline std::string fiedler_svg(const std::vector<double>& values, const std::vector<NodeCode>& truth) {
  const double width = 640, height = 360, margin = 30;
  double lo = 0.0, hi = 0.0;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) hi = lo + 1.0;
  std::vector<NodeCode> codes(truth.begin(), truth.end());
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"360\">\n";
  const double y0 = margin + (height - 2 * margin) * (hi / (hi - lo));
  s += "<line x1=\"" + format_double(margin) + "\" y1=\"" + format_double(y0) + "\" x2=\"" +
       format_double(width - margin) + "\" y2=\"" + format_double(y0) + "\" stroke=\"#999\"/>\n";
  const double step = values.size() > 1 ? (width - 2 * margin) / static_cast<double>(values.size() - 1) : 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto k = static_cast<std::size_t>(std::lower_bound(codes.begin(), codes.end(), truth[i]) - codes.begin());
    const double x = margin + step * static_cast<double>(i);
    const double y = margin + (height - 2 * margin) * ((hi - values[i]) / (hi - lo));
    char buf[160];
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.5\" fill=\"%s\"/>\n", x, y,
                  palette[k % 10]);
    s += buf;
  }
  s += "</svg>\n";
  return s;
}

template <typename F>
void parallel_for(std::size_t count, std::size_t threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

inline std::string trials_csv(const std::vector<TrialRecord>& records) {
  using detail::format_double;
  std::string s =
      "trial,seed,completeness,misclassification,sqrt_n_linf,threshold,sign_agreement,l2_aligned,"
      "fiedler_value,exact_recovery,hierarchy_recovered\n";
  for (const auto& r : records) {
    s += std::to_string(r.trial) + "," + std::to_string(r.seed) + "," + format_double(r.completeness) + "," +
         format_double(r.misclassification) + "," + format_double(r.sqrt_n_linf) + "," +
         format_double(r.threshold) + "," + format_double(r.sign_agreement) + "," +
         format_double(r.l2_aligned) + "," + format_double(r.fiedler_value) + "," +
         (r.exact_recovery ? "1" : "0") + "," + (r.hierarchy_recovered ? "1" : "0") + "\n";
  }
  return s;
}

inline nlohmann::ordered_json summary_json(const SyntheticSummary& s) {
  nlohmann::ordered_json j;
  j["trials"] = s.trials;
  j["exact_recoveries"] = s.exact_recoveries;
  j["hierarchy_recoveries"] = s.hierarchy_recoveries;
  j["bound_met"] = s.bound_met;
  j["implication_violations"] = s.implication_violations;
  j["completeness"] = detail::field_json(s.completeness);
  j["misclassification"] = detail::field_json(s.misclassification);
  j["sqrt_n_linf"] = detail::field_json(s.sqrt_n_linf);
  j["sign_agreement"] = detail::field_json(s.sign_agreement);
  j["l2_aligned"] = detail::field_json(s.l2_aligned);
  j["fiedler_value"] = detail::field_json(s.fiedler_value);
  return j;
}

inline SyntheticResult run_synthetic(const ExperimentSpec& spec) {
  if (!spec.model) throw InvalidArgument("run_synthetic needs a model");
  if (spec.trials < 1) throw InvalidArgument("trials must be at least 1");
  const TreeModel& model = *spec.model;
  const FiedlerPair pop = population_fiedler(model);
  const std::vector<NodeCode> truth = assignment(model).labels;

  std::vector<detail::TrialOutput> outputs(spec.trials);
  detail::parallel_for(spec.trials, spec.threads,
                       [&](std::size_t t) { outputs[t] = detail::run_trial(spec, model, pop, truth, t); });

  SyntheticResult result;
  for (auto& o : outputs) result.records.push_back(o.record);
  result.summary = summarize(result.records);
  const auto& v = outputs.front().aligned_vector;
  result.first_fiedler.assign(v.data(), v.data() + v.size());

  if (!spec.output_dir.empty()) {
    const std::filesystem::path dir(spec.output_dir);
    std::filesystem::create_directories(dir);
    detail::write_text(dir / "trials.csv", trials_csv(result.records));
    detail::write_text(dir / "summary.json", summary_json(result.summary).dump(2) + "\n");
    std::string csv = "vertex,value,true_label\n";
    for (std::size_t i = 0; i < result.first_fiedler.size(); ++i) {
      csv += std::to_string(i) + "," + detail::format_double(result.first_fiedler[i]) + "," + truth[i].str() + "\n";
    }
    detail::write_text(dir / "fiedler.csv", csv);
    if (spec.svg) detail::write_text(dir / "fiedler.svg", detail::fiedler_svg(result.first_fiedler, truth));
  }
  return result;
}

struct LevelScore {
  std::size_t level = 0;
  std::size_t clusters = 0;
  double completeness = 0.0;
};

struct RealResult {
  std::size_t n = 0;
  std::size_t edges = 0;
  std::vector<std::string> warnings;
  std::vector<LevelScore> levels;
  Dendrogram dendrogram;
};

inline RealResult run_real(const Graph& g, const std::vector<std::string>& truth, SplitOperator variant,
                           std::size_t depth, const SolverOptions& solver = {}) {
  if (truth.size() != g.n()) {
    throw DataError("labels cover " + std::to_string(truth.size()) + " vertices but the graph has " +
                    std::to_string(g.n()));
  }
  if (depth < 1) throw InvalidArgument("depth must be positive");
  if (variant == SplitOperator::normalized) {
    const auto deg = degrees(g);
    const auto zero = std::find(deg.begin(), deg.end(), std::size_t{0});
    if (zero != deg.end()) {
      throw DataError("normalized variant: vertex " + std::to_string(zero - deg.begin()) + " has degree zero");
    }
  }
  RealResult r;
  r.n = g.n();
  r.edges = g.num_edges();
  RecursiveOptions opts;
  opts.max_depth = depth;
  opts.split.solver = solver;
  opts.split.op = variant;
  r.dendrogram = recursive_bipartition(g, StoppingRule::fixed_depth(), opts);
  for (std::size_t level = 1; level <= depth; ++level) {
    const auto est = flat_clustering(r.dendrogram, level);
    std::set<NodeCode> distinct(est.begin(), est.end());
    r.levels.push_back({level, distinct.size(), completeness_score(truth, est)});
  }
  return r;
}

inline std::string levels_csv(const std::vector<LevelScore>& levels) {
  std::string s = "level,clusters,completeness\n";
  for (const auto& l : levels) {
    s += std::to_string(l.level) + "," + std::to_string(l.clusters) + "," +
         detail::format_double(l.completeness) + "\n";
  }
  return s;
}

inline RealResult run_real(const ExperimentSpec& spec) {
  std::vector<std::string> warnings;
  const Graph g = load_edge_list(spec.dataset, spec.one_based, &warnings);
  const auto truth = load_labels(spec.labels, g.n(), spec.one_based);
  RealResult r = run_real(g, truth, spec.variant, spec.depth > 0 ? spec.depth : 1, spec.solver);
  r.warnings = std::move(warnings);
  if (!spec.output_dir.empty()) {
    const std::filesystem::path dir(spec.output_dir);
    std::filesystem::create_directories(dir);
    detail::write_text(dir / "levels.csv", levels_csv(r.levels));
    detail::write_text(dir / "dendrogram.json", dendrogram_json(r.dendrogram).dump(2) + "\n");
  }
  return r;
}

}  // namespace btsbm
