#include "opttree/objectives.hpp"

#include <algorithm>

#include "opttree/errors.hpp"

namespace opttree {

SparseResult solve_sparse(SolveSession& session, int max_depth, int max_nodes, Count alpha) {
  if (alpha < 0) throw InputError("sparse coefficient must be non-negative");
  const auto [depth, nodes] = SolveSession::normalize_budgets(max_depth, max_nodes);
  const Count leaf = session.root().leaf_misclassification();

  // The bare leaf seeds the incumbent; every node budget then only has to
  // beat objective - alpha * budget. Once that allowance goes negative no
  // larger budget can win and the scan stops.
  Count best_objective = leaf;
  int best_depth = 0;
  int best_nodes = 0;
  for (int n = 1; n <= nodes; ++n) {
    const int d = std::min(depth, n);
    const Count ub = best_objective - alpha * n - 1;
    if (ub < 0) break;
    const QueryResult res = session.solve(d, n, ub, false);
    if (res.status == QueryResult::Status::timeout) {
      SparseResult out;
      out.status = QueryResult::Status::timeout;
      return out;
    }
    if (res.status == QueryResult::Status::infeasible) continue;
    const Count candidate = res.objective + alpha * res.tree_nodes;
    if (candidate < best_objective) {
      // Re-solve the winner at the node count the price was computed with,
      // not the looser budget n, so the final tree reproduces the objective.
      best_objective = candidate;
      best_nodes = res.tree_nodes;
      best_depth = std::min(d, res.tree_nodes);
    }
  }

  SparseResult out;
  out.objective = best_objective;
  if (best_nodes == 0) {
    out.misclassifications = leaf;
    out.tree = DecisionTree::leaf(session.root().majority_class());
    return out;
  }
  QueryResult final = session.solve(best_depth, best_nodes, std::nullopt, true);
  if (final.status != QueryResult::Status::optimal) {
    throw InternalError("winning sparse budget stopped being solvable");
  }
  if (final.objective + alpha * final.tree_nodes != best_objective) {
    throw InternalError("sparse rebuild does not reproduce the objective");
  }
  out.misclassifications = final.objective;
  out.tree_nodes = final.tree_nodes;
  out.tree_depth = final.tree_depth;
  out.tree = std::move(final.tree);
  return out;
}

LexResult solve_lexicographic(SolveSession& session, int max_depth, int max_nodes) {
  const auto [depth, nodes] = SolveSession::normalize_budgets(max_depth, max_nodes);
  const Count leaf = session.root().leaf_misclassification();

  LexResult out;
  if (depth == 0 || nodes == 0) {
    out.misclassifications = leaf;
    out.tree = DecisionTree::leaf(session.root().majority_class());
    return out;
  }

  const QueryResult base = session.solve(depth, nodes, std::nullopt, false);
  if (base.status == QueryResult::Status::timeout) {
    out.status = QueryResult::Status::timeout;
    return out;
  }
  const Count target = base.objective;

  // Walk the node budget down while the best score still holds. Scores only
  // rise as the budget shrinks, so the first failure ends the walk. Each
  // feasible answer may use fewer nodes than allowed; jump straight there.
  int winner = base.tree_nodes;
  int probe = base.tree_nodes - 1;
  while (probe >= 1) {
    const QueryResult res = session.solve(std::min(depth, probe), probe, target, false);
    if (res.status == QueryResult::Status::timeout) {
      out.status = QueryResult::Status::timeout;
      return out;
    }
    if (res.status == QueryResult::Status::infeasible) break;
    winner = res.tree_nodes;
    probe = res.tree_nodes - 1;
  }

  if (winner == 0 || leaf <= target) {
    out.misclassifications = leaf;
    out.tree = DecisionTree::leaf(session.root().majority_class());
    return out;
  }
  QueryResult final = session.solve(std::min(depth, winner), winner, std::nullopt, true);
  if (final.status != QueryResult::Status::optimal || final.objective != target) {
    throw InternalError("node minimization lost the optimal score");
  }
  out.misclassifications = final.objective;
  out.tree_nodes = final.tree_nodes;
  out.tree_depth = final.tree_depth;
  out.tree = std::move(final.tree);
  return out;
}

SweepResult solve_budget_sweep(SolveSession& session, int max_depth, int node_from, int node_to) {
  if (node_from < 0 || node_to < node_from) throw InputError("bad node budget range");
  SweepResult out;
  out.points.reserve(static_cast<std::size_t>(node_to - node_from) + 1);
  for (int n = node_from; n <= node_to; ++n) {
    const QueryResult res = session.solve(max_depth, n, std::nullopt, false);
    if (res.status == QueryResult::Status::timeout) {
      out.timed_out = true;
      break;
    }
    out.points.push_back({n, res.objective});
  }
  return out;
}

}  // namespace opttree
