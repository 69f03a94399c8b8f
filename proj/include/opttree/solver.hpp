#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "opttree/cache.hpp"
#include "opttree/dataset.hpp"
#include "opttree/depth_two.hpp"
#include "opttree/freq_counter.hpp"
#include "opttree/similarity.hpp"
#include "opttree/tree.hpp"

namespace opttree {

enum class FeatureOrder { in_order, gini, random };
enum class NodeOrder { dynamic, post_order };

struct SolverOptions {
  CacheKind cache_kind = CacheKind::dataset;
  bool similarity_bound = true;
  bool incremental_frequency = true;
  bool cache_probe_buffer = true;
  // Leave on. Off routes depth <= 2 through the generic recursion, which is
  // much slower and only useful for cross-checking the closed-form search.
  bool specialized_depth_two = true;
  NodeOrder node_order = NodeOrder::dynamic;
  FeatureOrder feature_order = FeatureOrder::in_order;
  std::uint64_t seed = 0;
  double time_limit_seconds = 0;  // 0: unlimited
};

struct SolveStats {
  std::int64_t depth_two_calls = 0;
  std::int64_t general_case_calls = 0;
  std::int64_t lower_bound_prunes = 0;
  std::int64_t similarity_prunes = 0;
  std::int64_t similarity_transfers = 0;
  std::int64_t scratch_counter_builds = 0;
  std::int64_t incremental_counter_builds = 0;
  std::int64_t cache_probe_buffer_hits = 0;
  std::size_t cache_entries = 0;
  std::size_t cache_keys = 0;
};

struct QueryResult {
  enum class Status { optimal, infeasible, timeout };
  Status status = Status::optimal;
  Count objective = 0;  // misclassifications, when optimal
  int tree_nodes = 0;
  int tree_depth = 0;
  std::optional<DecisionTree> tree;
};

Count leaf_misclassification(const BinaryDataset& d);

// Feature iteration order for one search node. gini ranks features by the
// weighted impurity of the split they induce on d; random shuffles with the
// caller's generator; in_order is the identity.
std::vector<std::int32_t> order_features(const BinaryDataset& d, FeatureOrder order,
                                         std::mt19937_64* rng);

// Dynamic child order: the side whose bare leaf misclassifies more is solved
// first, so its tighter budget fails fast. Ties go right.
inline bool left_child_first(Count left_leaf, Count right_leaf) {
  return left_leaf > right_leaf;
}

// One dataset, one cache, any number of optimality queries against it.
// Queries share everything previously proven, so sweeping budgets or
// re-asking under a different objective reuses earlier work. Sessions are
// single-threaded.
class SolveSession {
 public:
  explicit SolveSession(BinaryDataset root, SolverOptions options = {});

  // Optimal tree for the budgets, or infeasible when `ub` is given and no
  // tree scores <= ub. materialize=false skips building the tree object.
  QueryResult solve(int max_depth, int max_nodes, std::optional<Count> ub = std::nullopt,
                    bool materialize = true);

  // Rebuilds the optimal tree for budgets already solved in this session.
  DecisionTree reconstruct(int max_depth, int max_nodes);

  const BinaryDataset& root() const { return root_; }
  const SolverOptions& options() const { return options_; }
  SolveStats stats() const;
  SubtreeCache& cache() { return cache_; }

  // Clamps to the representable range: at most 2^depth - 1 nodes, and no
  // more depth than nodes.
  static std::pair<int, int> normalize_budgets(int depth, int nodes);
  // Child node budget range (n_min, n_max) under a root with these budgets.
  static std::pair<int, int> child_budget_range(int depth, int nodes);

 private:
  struct Outcome {
    bool feasible = false;
    Count score = 0;
    std::int32_t feature = -1;
    std::int32_t left_budget = 0;
    std::int32_t right_budget = 0;
    std::int32_t tree_nodes = 0;
    std::int32_t tree_depth = 0;
  };
  struct ChildProblem {
    const BinaryDataset& data;
    const Branch& branch;
    int depth;
    int nodes;
  };

  Outcome solve_subtree(const BinaryDataset& d, const Branch& b, int depth, int nodes, Count ub);
  Outcome depth_two_case(const BinaryDataset& d, const Branch& b, int depth, int nodes, Count ub);
  Outcome general_case(const BinaryDataset& d, const Branch& b, int depth, int nodes, Count ub);
  std::pair<Outcome, Count> solve_for_root_feature(std::int32_t feature,
                                                   const BinaryDataset& left,
                                                   const BinaryDataset& right,
                                                   const Branch& left_branch,
                                                   const Branch& right_branch, int depth,
                                                   int left_nodes, int right_nodes, Count ub);
  Count child_lower_bound(const ChildProblem& p);
  void store_depth_two(const BinaryDataset& d, const Branch& b, int depth,
                       const Depth2Solution& sol);
  std::int32_t rebuild_node(DecisionTree& tree, const BinaryDataset& d, const Branch& b,
                            int depth, int nodes);
  std::int32_t rebuild_two_level(DecisionTree& tree, const BinaryDataset& d,
                                 const Depth2Candidate& cand);
  static OptimalRecord to_record(const Outcome& out);
  static Outcome from_record(const OptimalRecord& rec);
  static Outcome leaf_outcome(Count score);
  void check_deadline();

  BinaryDataset root_;
  SolverOptions options_;
  SubtreeCache cache_;
  SimilarityTracker similarity_;
  CounterStore counters_;
  Depth2Workspace workspace_;
  std::mt19937_64 rng_;
  std::vector<std::int32_t> identity_order_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  SolveStats local_stats_;
};

}  // namespace opttree
