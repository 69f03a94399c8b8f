#include "opttree/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "opttree/errors.hpp"
#include "opttree/io.hpp"
#include "opttree/objectives.hpp"
#include "opttree/oracle.hpp"
#include "opttree/solver.hpp"

namespace opttree {

namespace {

struct CommonOpts {
  std::string input;
  std::string format = "auto";
  int max_depth = 3;
  int max_nodes = -1;  // unset: every node the depth allows
  std::string cache_kind = "dataset";
  std::string feature_order = "in-order";
  std::string node_order = "dynamic";
  bool no_similarity = false;
  bool no_incremental = false;
  double time_limit = 0;
  std::string output = "text";
  std::uint64_t seed = 0;
  bool invert_dense = false;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_budgets) {
  cmd->add_option("data", o.input, "dataset file")->required();
  cmd->add_option("--format", o.format, "input format")
      ->check(CLI::IsMember({"auto", "dl-space", "csv"}));
  if (with_budgets) {
    cmd->add_option("--max-depth", o.max_depth, "depth budget (default 3)");
    cmd->add_option("--max-num-nodes,--max-nodes", o.max_nodes,
                    "feature node budget (default: all the depth allows)");
  }
  cmd->add_option("--cache-kind", o.cache_kind, "subproblem cache key")
      ->check(CLI::IsMember({"dataset", "branch"}));
  cmd->add_option("--feature-order", o.feature_order, "feature iteration order")
      ->check(CLI::IsMember({"in-order", "gini", "random"}));
  cmd->add_option("--node-order", o.node_order, "child exploration order")
      ->check(CLI::IsMember({"dynamic", "post-order"}));
  cmd->add_flag("--no-similarity-bound", o.no_similarity, "disable similarity lower bounds");
  cmd->add_flag("--no-incremental-frequency", o.no_incremental,
                "always rebuild frequency counters from scratch");
  cmd->add_option("--time", o.time_limit, "wall clock limit per solver session, seconds")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--output", o.output, "report format")
      ->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--seed", o.seed, "seed for randomized orders and tuning folds");
  cmd->add_flag("--invert-dense-features", o.invert_dense,
                "flip features present in more than half the instances");
  cmd->add_flag("--verbose", o.verbose, "extra search statistics in the report");
}

SolverOptions make_options(const CommonOpts& o) {
  SolverOptions s;
  s.cache_kind = o.cache_kind == "branch" ? CacheKind::branch : CacheKind::dataset;
  s.similarity_bound = !o.no_similarity;
  s.incremental_frequency = !o.no_incremental;
  if (o.node_order == "post-order") s.node_order = NodeOrder::post_order;
  if (o.feature_order == "gini") s.feature_order = FeatureOrder::gini;
  if (o.feature_order == "random") s.feature_order = FeatureOrder::random;
  s.seed = o.seed;
  s.time_limit_seconds = o.time_limit;
  return s;
}

struct LoadedData {
  BinaryDataset data;
  std::vector<std::int32_t> inverted;
};

DataFormat parse_format(const std::string& f) {
  if (f == "dl-space") return DataFormat::dl_space;
  if (f == "csv") return DataFormat::csv;
  return DataFormat::auto_detect;
}

LoadedData load(const CommonOpts& o) {
  LoadedData out{read_dataset(o.input, parse_format(o.format)), {}};
  if (o.invert_dense) {
    std::vector<bool> mask;
    out.data = invert_dense_features(out.data, mask);
    for (std::size_t f = 0; f < mask.size(); ++f) {
      if (mask[f]) out.inverted.push_back(static_cast<std::int32_t>(f));
    }
  }
  return out;
}

int node_budget(const CommonOpts& o) {
  return o.max_nodes >= 0 ? o.max_nodes : std::numeric_limits<int>::max();
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

nlohmann::json stats_json(const SolveStats& s) {
  return {{"cache_entries", s.cache_entries},
          {"cache_keys", s.cache_keys},
          {"two_level_solves", s.depth_two_calls},
          {"general_case_calls", s.general_case_calls},
          {"incremental_counter_builds", s.incremental_counter_builds},
          {"scratch_counter_builds", s.scratch_counter_builds},
          {"similarity_prunes", s.similarity_prunes},
          {"similarity_transfers", s.similarity_transfers},
          {"lower_bound_prunes", s.lower_bound_prunes},
          {"cache_probe_buffer_hits", s.cache_probe_buffer_hits}};
}

void stats_text(std::ostream& os, const SolveStats& s, bool verbose) {
  os << "cache entries: " << s.cache_entries << "\n";
  os << "two level solves: " << s.depth_two_calls << "\n";
  os << "counter builds: " << s.incremental_counter_builds << " incremental, "
     << s.scratch_counter_builds << " scratch\n";
  os << "similarity prunes: " << s.similarity_prunes << "\n";
  if (verbose) {
    os << "cache keys: " << s.cache_keys << "\n";
    os << "general case calls: " << s.general_case_calls << "\n";
    os << "lower bound prunes: " << s.lower_bound_prunes << "\n";
    os << "similarity transfers: " << s.similarity_transfers << "\n";
    os << "cache probe buffer hits: " << s.cache_probe_buffer_hits << "\n";
  }
}

nlohmann::json inverted_json(const LoadedData& loaded) {
  return nlohmann::json(loaded.inverted);
}

void inverted_text(std::ostream& os, const LoadedData& loaded) {
  os << "inverted features:";
  for (std::int32_t f : loaded.inverted) os << ' ' << f;
  os << "\n";
}

int report_timeout(const CommonOpts& o, const SolveStats& stats, double runtime) {
  if (o.output == "json") {
    nlohmann::json j{{"status", "timeout"},
                     {"runtime_seconds", runtime},
                     {"stats", stats_json(stats)}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "status: timeout\n";
    std::cout << "runtime seconds: " << runtime << "\n";
    stats_text(std::cout, stats, o.verbose);
  }
  return 3;
}

struct TreeReport {
  std::string status = "optimal";
  Count objective = 0;
  std::optional<Count> misclassifications;  // when objective is penalized
  std::optional<Count> alpha;
  int tree_nodes = 0;
  int tree_depth = 0;
  const DecisionTree* tree = nullptr;
};

int emit_tree_report(const CommonOpts& o, const LoadedData& loaded, const TreeReport& r,
                     const SolveStats& stats, double runtime) {
  const std::string tree_text = r.tree ? tree_to_json(*r.tree) : "";
  if (o.output == "json") {
    nlohmann::json j{{"status", r.status},
                     {"objective", r.objective},
                     {"tree_nodes", r.tree_nodes},
                     {"tree_depth", r.tree_depth},
                     {"runtime_seconds", runtime},
                     {"stats", stats_json(stats)}};
    if (r.misclassifications) j["misclassifications"] = *r.misclassifications;
    if (r.alpha) j["sparse_coefficient"] = *r.alpha;
    if (r.tree) j["tree"] = nlohmann::json::parse(tree_text);
    if (o.invert_dense) j["inverted_features"] = inverted_json(loaded);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "status: " << r.status << "\n";
    std::cout << "objective: " << r.objective << "\n";
    if (r.misclassifications) {
      std::cout << "misclassifications: " << *r.misclassifications << "\n";
    }
    if (r.alpha) std::cout << "sparse coefficient: " << *r.alpha << "\n";
    std::cout << "tree nodes: " << r.tree_nodes << "\n";
    std::cout << "tree depth: " << r.tree_depth << "\n";
    std::cout << "runtime seconds: " << runtime << "\n";
    stats_text(std::cout, stats, o.verbose);
    if (o.invert_dense) inverted_text(std::cout, loaded);
    if (r.tree) std::cout << "tree: " << tree_text << "\n";
  }
  return 0;
}

// The emitted objective must match an instance-by-instance replay of the
// emitted tree; a mismatch is a solver bug, not a reporting detail.
void verify_report(const DecisionTree& tree, const BinaryDataset& d, Count misclassifications) {
  if (tree.misclassified(d) != misclassifications) {
    throw InternalError("reported objective does not match the emitted tree");
  }
}

int run_solve(const CommonOpts& o) {
  const LoadedData loaded = load(o);
  SolveSession session(loaded.data, make_options(o));
  const auto t0 = Clock::now();
  QueryResult res = session.solve(o.max_depth, node_budget(o));
  const double runtime = seconds_since(t0);
  if (res.status == QueryResult::Status::timeout) {
    return report_timeout(o, session.stats(), runtime);
  }

  TreeReport r;
  r.objective = res.objective;
  r.tree_nodes = res.tree_nodes;
  r.tree_depth = res.tree_depth;
  r.tree = &*res.tree;
  verify_report(*res.tree, loaded.data, res.objective);
  return emit_tree_report(o, loaded, r, session.stats(), runtime);
}

int run_sparse(const CommonOpts& o, double alpha_raw) {
  if (alpha_raw < 0 || alpha_raw != std::floor(alpha_raw)) {
    throw InputError(
        "sparse coefficient must be a non-negative integer; "
        "scale the objective to avoid fractional penalties");
  }
  const Count alpha = static_cast<Count>(alpha_raw);
  const LoadedData loaded = load(o);
  SolveSession session(loaded.data, make_options(o));
  const auto t0 = Clock::now();
  SparseResult res = solve_sparse(session, o.max_depth, node_budget(o), alpha);
  const double runtime = seconds_since(t0);
  if (res.status == QueryResult::Status::timeout) {
    return report_timeout(o, session.stats(), runtime);
  }

  TreeReport r;
  r.objective = res.objective;
  r.misclassifications = res.misclassifications;
  r.alpha = alpha;
  r.tree_nodes = res.tree_nodes;
  r.tree_depth = res.tree_depth;
  r.tree = &*res.tree;
  verify_report(*res.tree, loaded.data, res.misclassifications);
  return emit_tree_report(o, loaded, r, session.stats(), runtime);
}

int run_lex(const CommonOpts& o) {
  const LoadedData loaded = load(o);
  SolveSession session(loaded.data, make_options(o));
  const auto t0 = Clock::now();
  LexResult res = solve_lexicographic(session, o.max_depth, node_budget(o));
  const double runtime = seconds_since(t0);
  if (res.status == QueryResult::Status::timeout) {
    return report_timeout(o, session.stats(), runtime);
  }

  TreeReport r;
  r.objective = res.misclassifications;
  r.tree_nodes = res.tree_nodes;
  r.tree_depth = res.tree_depth;
  r.tree = &*res.tree;
  verify_report(*res.tree, loaded.data, res.misclassifications);
  return emit_tree_report(o, loaded, r, session.stats(), runtime);
}

int run_sweep(const CommonOpts& o) {
  const LoadedData loaded = load(o);
  SolveSession session(loaded.data, make_options(o));
  int hi = o.max_nodes;
  if (hi < 0) {
    hi = SolveSession::normalize_budgets(o.max_depth, std::numeric_limits<int>::max()).second;
  }
  const auto t0 = Clock::now();
  SweepResult res = solve_budget_sweep(session, o.max_depth, 1, hi);
  const double runtime = seconds_since(t0);

  if (o.output == "json") {
    nlohmann::json points = nlohmann::json::array();
    for (const SweepPoint& p : res.points) {
      points.push_back({{"nodes", p.nodes}, {"objective", p.objective}});
    }
    nlohmann::json j{{"status", res.timed_out ? "timeout" : "optimal"},
                     {"max_depth", o.max_depth},
                     {"points", points},
                     {"runtime_seconds", runtime},
                     {"stats", stats_json(session.stats())}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "status: " << (res.timed_out ? "timeout" : "optimal") << "\n";
    std::cout << "nodes objective\n";
    for (const SweepPoint& p : res.points) {
      std::cout << p.nodes << ' ' << p.objective << "\n";
    }
    std::cout << "runtime seconds: " << runtime << "\n";
    stats_text(std::cout, session.stats(), o.verbose);
  }
  return res.timed_out ? 3 : 0;
}

struct GridCell {
  int depth = 0;
  int nodes = 0;
  double train_accuracy = 0;
  double test_accuracy = 0;
};

int run_tune(const CommonOpts& o, int folds) {
  if (o.max_depth < 1) throw InputError("tuning needs a depth budget of at least 1");
  const LoadedData loaded = load(o);
  const BinaryDataset& d = loaded.data;
  for (std::int32_t c = 0; c < d.class_count(); ++c) {
    if (d.class_size(c) < folds) {
      throw InputError("class " + std::to_string(c) + " has fewer instances than folds");
    }
  }

  const auto t0 = Clock::now();

  // Deterministic stratified folds: shuffle each class once, deal round-robin.
  std::mt19937_64 rng(o.seed);
  std::vector<std::vector<std::vector<std::int32_t>>> fold_ids(
      folds, std::vector<std::vector<std::int32_t>>(d.class_count()));
  for (std::int32_t c = 0; c < d.class_count(); ++c) {
    std::vector<std::int32_t> ids = d.ids(c);
    std::shuffle(ids.begin(), ids.end(), rng);
    for (std::size_t j = 0; j < ids.size(); ++j) {
      fold_ids[j % folds][c].push_back(ids[j]);
    }
  }

  std::vector<BinaryDataset> train, test;
  for (int i = 0; i < folds; ++i) {
    std::vector<std::vector<std::int32_t>> test_part = fold_ids[i];
    std::vector<std::vector<std::int32_t>> train_part(d.class_count());
    for (int j = 0; j < folds; ++j) {
      if (j == i) continue;
      for (std::int32_t c = 0; c < d.class_count(); ++c) {
        train_part[c].insert(train_part[c].end(), fold_ids[j][c].begin(), fold_ids[j][c].end());
      }
    }
    for (auto& part : train_part) std::sort(part.begin(), part.end());
    for (auto& part : test_part) std::sort(part.begin(), part.end());
    train.push_back(BinaryDataset::from_ids(d.store_ptr(), std::move(train_part)));
    test.push_back(BinaryDataset::from_ids(d.store_ptr(), std::move(test_part)));
  }

  std::vector<GridCell> grid;
  for (int depth = 1; depth <= o.max_depth; ++depth) {
    const int cap = SolveSession::normalize_budgets(depth, std::numeric_limits<int>::max()).second;
    const int hi = o.max_nodes >= 0 ? std::min(o.max_nodes, cap) : cap;
    for (int nodes = depth; nodes <= hi; ++nodes) {
      grid.push_back({depth, nodes, 0, 0});
    }
  }
  if (grid.empty()) throw InputError("the budget grid is empty");

  // One session per fold; every grid cell extends that fold's cache.
  std::vector<SolveSession> sessions;
  sessions.reserve(folds);
  for (int i = 0; i < folds; ++i) sessions.emplace_back(train[i], make_options(o));

  for (GridCell& cell : grid) {
    double train_acc = 0, test_acc = 0;
    for (int i = 0; i < folds; ++i) {
      QueryResult res = sessions[i].solve(cell.depth, cell.nodes);
      if (res.status == QueryResult::Status::timeout) {
        return report_timeout(o, sessions[i].stats(), seconds_since(t0));
      }
      train_acc += 1.0 - static_cast<double>(res.objective) / static_cast<double>(train[i].size());
      Count correct = 0;
      for (std::int32_t c = 0; c < d.class_count(); ++c) {
        for (std::int32_t id : test[i].ids(c)) {
          if (res.tree->classify_instance(d.store(), id) == c) ++correct;
        }
      }
      test_acc += static_cast<double>(correct) / static_cast<double>(test[i].size());
    }
    cell.train_accuracy = train_acc / folds;
    cell.test_accuracy = test_acc / folds;
  }

  // Grid is ordered by depth then nodes, so strict improvement implements the
  // tie-break: smaller depth, then fewer nodes.
  const GridCell* best = &grid.front();
  for (const GridCell& cell : grid) {
    if (cell.test_accuracy > best->test_accuracy) best = &cell;
  }

  SolveSession final_session(d, make_options(o));
  QueryResult final = final_session.solve(best->depth, best->nodes);
  if (final.status == QueryResult::Status::timeout) {
    return report_timeout(o, final_session.stats(), seconds_since(t0));
  }
  verify_report(*final.tree, d, final.objective);
  const double runtime = seconds_since(t0);
  const double train_accuracy =
      1.0 - static_cast<double>(final.objective) / static_cast<double>(d.size());

  const std::string tree_text = tree_to_json(*final.tree);
  const char* tie_break = "smaller depth, then fewer nodes";
  if (o.output == "json") {
    nlohmann::json cells = nlohmann::json::array();
    for (const GridCell& cell : grid) {
      cells.push_back({{"depth", cell.depth},
                       {"nodes", cell.nodes},
                       {"mean_train_accuracy", cell.train_accuracy},
                       {"mean_test_accuracy", cell.test_accuracy}});
    }
    nlohmann::json j{{"status", "optimal"},
                     {"folds", folds},
                     {"tie_break", tie_break},
                     {"grid", cells},
                     {"best_depth", best->depth},
                     {"best_nodes", best->nodes},
                     {"objective", final.objective},
                     {"train_accuracy", train_accuracy},
                     {"tree", nlohmann::json::parse(tree_text)},
                     {"runtime_seconds", runtime}};
    if (o.invert_dense) j["inverted_features"] = inverted_json(loaded);
    std::cout << j.dump(2) << "\n";
  } else {
    const auto old_precision = std::cout.precision(10);
    std::cout << "folds: " << folds << "\n";
    std::cout << "tie break: " << tie_break << "\n";
    std::cout << "depth nodes train_accuracy test_accuracy\n";
    for (const GridCell& cell : grid) {
      std::cout << cell.depth << ' ' << cell.nodes << ' ' << cell.train_accuracy << ' '
                << cell.test_accuracy << "\n";
    }
    std::cout << "best depth: " << best->depth << "\n";
    std::cout << "best nodes: " << best->nodes << "\n";
    std::cout << "objective: " << final.objective << "\n";
    std::cout << "train accuracy: " << train_accuracy << "\n";
    std::cout << "runtime seconds: " << runtime << "\n";
    if (o.invert_dense) inverted_text(std::cout, loaded);
    std::cout << "tree: " << tree_text << "\n";
    std::cout.precision(old_precision);
  }
  return 0;
}

int run_oracle(const CommonOpts& o) {
  const LoadedData loaded = load(o);
  int nodes = o.max_nodes;
  if (nodes < 0) {
    nodes = SolveSession::normalize_budgets(o.max_depth, std::numeric_limits<int>::max()).second;
  }
  const testsupport::OracleResult res = testsupport::oracle_solve(loaded.data, o.max_depth, nodes);
  if (o.output == "json") {
    nlohmann::json j{{"objective", res.best_score},
                     {"best_node_count", res.best_node_count},
                     {"score_by_nodes", res.score_by_nodes}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "objective: " << res.best_score << "\n";
    std::cout << "best node count: " << res.best_node_count << "\n";
    std::cout << "score by nodes:";
    for (Count s : res.score_by_nodes) std::cout << ' ' << s;
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"optimal classification trees on binary features"};
  app.require_subcommand(1);

  CommonOpts solve_o, sparse_o, lex_o, sweep_o, tune_o, oracle_o;
  double alpha = 1;
  int folds = 5;

  CLI::App* solve_cmd = app.add_subcommand("solve", "minimize misclassifications");
  add_common(solve_cmd, solve_o, true);

  CLI::App* sparse_cmd =
      app.add_subcommand("sparse", "minimize misclassifications plus a per-node penalty");
  add_common(sparse_cmd, sparse_o, true);
  sparse_cmd->add_option("--sparse-coefficient", alpha, "penalty per feature node (default 1)");

  CLI::App* lex_cmd =
      app.add_subcommand("lex", "minimize misclassifications, then the node count");
  add_common(lex_cmd, lex_o, true);

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "optimal score for every node budget up to the maximum");
  add_common(sweep_cmd, sweep_o, true);

  CLI::App* tune_cmd =
      app.add_subcommand("tune", "cross-validated budget search, then retrain on all data");
  add_common(tune_cmd, tune_o, true);
  tune_cmd->add_option("--folds", folds, "stratified folds (default 5)")
      ->check(CLI::Range(2, 1000));

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "brute-force reference scores");
  oracle_cmd->group("");
  add_common(oracle_cmd, oracle_o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve_cmd->parsed()) return run_solve(solve_o);
    if (sparse_cmd->parsed()) return run_sparse(sparse_o, alpha);
    if (lex_cmd->parsed()) return run_lex(lex_o);
    if (sweep_cmd->parsed()) return run_sweep(sweep_o);
    if (tune_cmd->parsed()) return run_tune(tune_o, folds);
    if (oracle_cmd->parsed()) return run_oracle(oracle_o);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const TimeoutError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}

}  // namespace opttree
