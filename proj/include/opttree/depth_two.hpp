#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "opttree/freq_counter.hpp"

namespace opttree {

// Misclassifications left in the instance set matching the given literals
// when that set becomes a leaf: total matching minus the best single class.
Count classification_score(const FrequencyCounter& fq, Literal a);
Count classification_score(const FrequencyCounter& fq, Literal a, Literal b);

// Best tree found for one exact shape. root < 0 encodes the bare leaf; left
// and right are child features, -1 when that side is a leaf.
struct Depth2Candidate {
  Count score = 0;
  std::int32_t root = -1;
  std::int32_t left = -1;
  std::int32_t right = -1;
  bool valid = false;

  int node_count() const { return (root >= 0) + (left >= 0) + (right >= 0); }
  int depth() const { return root < 0 ? 0 : (left < 0 && right < 0 ? 1 : 2); }
};

// Results for every node budget a two-level search covers. All budgets come
// out of one counting pass, whatever budget the caller asked for.
struct Depth2Solution {
  Count leaf_score = 0;
  Depth2Candidate one_node;
  Depth2Candidate two_node;
  Depth2Candidate three_node;

  // Best candidate using at most max_nodes nodes, preferring lower score,
  // then fewer nodes. Always valid (the leaf is always available).
  Depth2Candidate best_for_budget(int max_nodes) const;
};

// Reusable scratch for solve_depth_two.
struct Depth2Workspace {
  struct ChildBest {
    Count score = 0;
    std::int32_t child = -1;
  };
  std::vector<ChildBest> best_left;
  std::vector<ChildBest> best_right;
  std::vector<Count> single_counts;
};

// Optimal trees of depth at most `depth_budget` (1 or 2) over d. Depth 1 runs
// on single-feature counts alone; depth 2 pulls pair counters through the
// store so successive calls can patch instead of recount.
Depth2Solution solve_depth_two(const BinaryDataset& d, int depth_budget, CounterStore& store,
                               Depth2Workspace& ws, bool allow_incremental);

}  // namespace opttree
