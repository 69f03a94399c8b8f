#pragma once

#include <optional>
#include <vector>

#include "opttree/solver.hpp"
#include "opttree/tree.hpp"

namespace opttree {

// Misclassifications plus a per-node penalty. alpha must be a non-negative
// integer; scale the objective if fractional penalties are needed.
struct SparseResult {
  QueryResult::Status status = QueryResult::Status::optimal;
  Count objective = 0;  // misclassifications + alpha * feature nodes
  Count misclassifications = 0;
  int tree_nodes = 0;
  int tree_depth = 0;
  std::optional<DecisionTree> tree;
};

SparseResult solve_sparse(SolveSession& session, int max_depth, int max_nodes, Count alpha);

// Minimal misclassifications first, then the fewest feature nodes reaching
// that score.
struct LexResult {
  QueryResult::Status status = QueryResult::Status::optimal;
  Count misclassifications = 0;
  int tree_nodes = 0;
  int tree_depth = 0;
  std::optional<DecisionTree> tree;
};

LexResult solve_lexicographic(SolveSession& session, int max_depth, int max_nodes);

// Optimal score at every node budget in [node_from, node_to]. Ascending, so
// each solve extends the previous one's cache.
struct SweepPoint {
  int nodes = 0;
  Count objective = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  bool timed_out = false;
};

SweepResult solve_budget_sweep(SolveSession& session, int max_depth, int node_from, int node_to);

}  // namespace opttree
