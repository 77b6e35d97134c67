// Command-line front end.
//
//   btsbm sample     --model tree.json [--labels-out f]   edge list of one draw
//   btsbm spectrum   --model tree.json                    analytic spectrum CSV
//   btsbm cluster    --input g.edges [--max-depth D] [--rule R] [--variant V]
//   btsbm metrics    --truth a.labels --est b.labels
//   btsbm experiment --spec exp.json [--threads T]
//   btsbm fetch      [--dataset NAME]... [--list]
//
// Global: --seed, --solver dense|iterative|auto, --out (default stdout, or
// the data/ directory for fetch), --allow-equal. Exit status: 0 ok, 1 usage, 2 data error,
// 3 numerical failure.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "btsbm.hpp"
#include "fetch.hpp"

namespace {

using namespace btsbm;

struct Globals {
  std::uint64_t seed = 0;
  std::string solver = "auto";
  std::string out;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* solver_opt = nullptr;
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw DataError("cannot write " + g.out);
  f << text;
}

SolverOptions solver_options(const Globals& g) {
  SolverOptions o;
  o.backend = parse_backend(g.solver);
  return o;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

std::string join_codes(const std::vector<NodeCode>& codes) {
  std::string out;
  for (const auto& c : codes) out += std::string(out.empty() ? "" : ", ") + (c.is_root() ? std::string("(root)") : c.str());
  return out;
}

/// Rejects models that are not weakly assortative. With `allow_equal`, ties
/// pass but are reported; returns true when any tie is present.
bool check_assortativity(const TreeModel& model, bool allow_equal) {
  const auto strict = validate_weak_assortativity(model, false);
  if (strict.empty()) return false;
  const auto hard = validate_weak_assortativity(model, true);
  if (!hard.empty() || !allow_equal) {
    throw DataError("model is not weakly assortative at node(s) " + join_codes(allow_equal ? hard : strict) +
                    (hard.empty() ? " (ties; pass --allow-equal to accept)" : ""));
  }
  std::cerr << "warning: probability ties at node(s) " << join_codes(strict)
            << "; analytic spectrum guarantees do not apply\n";
  return true;
}

std::string spectrum_csv(const TreeModel& model) {
  struct Row {
    double value;
    std::string code;
    std::size_t mult;
  };
  std::vector<Row> rows;
  for (const auto& s : model.nodes()) {
    const auto m = analytic_multiplicity(s);
    if (m > 0) rows.push_back({analytic_eigenvalue(s.code, model), s.code.str(), m});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.value != b.value ? a.value < b.value : a.code < b.code;
  });
  std::string csv = "node_code,eigenvalue,multiplicity\ntrivial,0,1\n";
  for (const auto& r : rows) csv += r.code + "," + detail::format_double(r.value) + "," + std::to_string(r.mult) + "\n";
  return csv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical spectral clustering under binary-tree block models"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  g.seed_opt = app.add_option("--seed", g.seed, "Random seed (sample) or master seed (experiment)");
  g.solver_opt = app.add_option("--solver", g.solver, "Eigensolver backend: dense|iterative|auto");
  app.add_option("--out", g.out, "Output file (directory for fetch)");
  bool allow_equal = false;
  app.add_flag("--allow-equal", allow_equal, "Accept parent/child probability ties in model files");

  std::string model_path, labels_out;
  auto* sample = app.add_subcommand("sample", "Draw one graph from a tree model");
  sample->add_option("--model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);
  sample->add_option("--labels-out", labels_out, "Also write planted leaf labels");

  auto* spectrum = app.add_subcommand("spectrum", "Analytic population Laplacian spectrum");
  spectrum->add_option("--model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);

  std::string input, rule = "fixed", variant = "laplacian";
  std::size_t max_depth = 1;
  bool one_based = false;
  auto* cluster = app.add_subcommand("cluster", "Recursive sign bi-partitioning of an edge list");
  cluster->add_option("--input", input, "Edge list")->required()->check(CLI::ExistingFile);
  cluster->add_option("--max-depth", max_depth, "Maximum dendrogram depth")->check(CLI::PositiveNumber);
  cluster->add_option("--rule", rule, "fixed|minsize:<k>|eigengap:<tau>");
  cluster->add_option("--variant", variant, "laplacian|adjacency|normalized (or L|A|N)");
  cluster->add_flag("--one-based", one_based, "Vertex ids start at 1");

  std::string truth_path, est_path;
  auto* metrics = app.add_subcommand("metrics", "Completeness of an estimated clustering");
  metrics->add_option("--truth", truth_path, "Ground-truth labels")->required()->check(CLI::ExistingFile);
  metrics->add_option("--est", est_path, "Estimated labels")->required()->check(CLI::ExistingFile);
  metrics->add_flag("--one-based", one_based, "Vertex ids start at 1");

  std::string spec_path;
  std::size_t threads = 0;
  CLI::Option* threads_opt = nullptr;
  auto* experiment = app.add_subcommand("experiment", "Run a synthetic or real-network experiment spec");
  experiment->add_option("--spec", spec_path, "Experiment JSON")->required()->check(CLI::ExistingFile);
  threads_opt = experiment->add_option("--threads", threads, "Worker threads (0: all cores)");

  std::vector<std::string> datasets;
  bool list = false;
  auto* fetch_cmd = app.add_subcommand("fetch", "Download public benchmark networks");
  fetch_cmd->add_option("--dataset", datasets, "Dataset name (repeatable; default all)");
  fetch_cmd->add_flag("--list", list, "List known datasets and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*sample) {
      const TreeModel model = load_model(model_path);
      check_assortativity(model, allow_equal);
      const Graph graph = sample_graph(model, g.seed);
      std::ostringstream os;
      write_edge_list(os, graph);
      emit(g, os.str());
      if (!labels_out.empty()) {
        std::ofstream f(labels_out, std::ios::binary);
        if (!f) throw DataError("cannot write " + labels_out);
        const auto a = assignment(model);
        for (std::size_t v = 0; v < a.labels.size(); ++v) f << v << ' ' << a.labels[v] << '\n';
      }
    } else if (*spectrum) {
      const TreeModel model = load_model(model_path);
      const bool ties = check_assortativity(model, allow_equal);
      emit(g, (ties ? "# ties allowed: multiplicities may merge and the Fiedler value need not be simple\n" : "") +
                  spectrum_csv(model));
    } else if (*cluster) {
      std::vector<std::string> warnings;
      const Graph graph = load_edge_list(input, one_based, &warnings);
      print_warnings(warnings);
      RecursiveOptions opts;
      opts.max_depth = max_depth;
      opts.split.solver = solver_options(g);
      opts.split.op = parse_split_operator(variant);
      const Dendrogram d = recursive_bipartition(graph, StoppingRule::parse(rule), opts);
      emit(g, dendrogram_json(d).dump(2) + "\n");
    } else if (*metrics) {
      const auto truth = load_labels_inferred(truth_path, one_based);
      const auto est = load_labels(est_path, truth.size(), one_based);
      nlohmann::ordered_json j;
      j["completeness"] = completeness_score(truth, est);
      j["n"] = truth.size();
      j["K_true"] = std::set<std::string>(truth.begin(), truth.end()).size();
      j["K_est"] = std::set<std::string>(est.begin(), est.end()).size();
      emit(g, j.dump(2) + "\n");
    } else if (*experiment) {
      ExperimentSpec spec = load_experiment(spec_path);
      if (*g.seed_opt) spec.master_seed = g.seed;
      if (*g.solver_opt) spec.solver.backend = parse_backend(g.solver);
      if (!g.out.empty()) spec.output_dir = g.out;
      if (*threads_opt) spec.threads = threads;
      if (spec.model) check_assortativity(*spec.model, allow_equal);
      if (spec.kind == ExperimentKind::synthetic) {
        const auto r = run_synthetic(spec);
        std::cout << summary_json(r.summary).dump(2) << '\n';
        double total = 0.0;
        for (const auto& t : r.records) total += t.wall_seconds;
        std::cerr << "trials: " << r.records.size() << ", summed trial time " << total << " s\n";
      } else {
        const auto r = run_real(spec);
        print_warnings(r.warnings);
        std::cout << levels_csv(r.levels);
      }
    } else if (*fetch_cmd) {
      if (list) {
        for (const auto& d : fetch::registry()) std::cout << d.name << '\t' << d.url << '\t' << d.note << '\n';
        return 0;
      }
      const std::filesystem::path dest = g.out.empty() ? "data" : g.out;
      std::vector<const fetch::Dataset*> wanted;
      if (datasets.empty()) {
        for (const auto& d : fetch::registry()) wanted.push_back(&d);
      } else {
        for (const auto& name : datasets) wanted.push_back(&fetch::find(name));
      }
      curl_global_init(CURL_GLOBAL_DEFAULT);
      int status = 0;
      for (const auto* d : wanted) {
        try {
          fetch::fetch_dataset(*d, dest, std::cout);
        } catch (const DataError& e) {
          std::cerr << "error: " << e.what() << '\n';
          status = 2;
        }
      }
      curl_global_cleanup();
      return status;
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << " (best residual " << e.best_residual() << ")\n";
    return 3;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
