#include "opttree/oracle.hpp"

#include <algorithm>

#include "opttree/errors.hpp"

namespace opttree::testsupport {

namespace {

Count enumerate(const BinaryDataset& d, int depth, int nodes) {
  const Count cap = (Count{1} << depth) - 1;
  if (nodes > cap) nodes = static_cast<int>(cap);
  if (depth > nodes) depth = nodes;

  const Count leaf = d.leaf_misclassification();
  if (depth == 0 || nodes == 0) return leaf;

  Count best = leaf;
  for (std::int32_t f = 0; f < d.feature_count(); ++f) {
    const BinaryDataset left = d.split({f, false});
    const BinaryDataset right = d.split({f, true});
    for (int i = 0; i < nodes; ++i) {
      const Count score =
          enumerate(left, depth - 1, nodes - 1 - i) + enumerate(right, depth - 1, i);
      best = std::min(best, score);
    }
  }
  return best;
}

}  // namespace

Count OracleResult::best_sparse_score(Count alpha) const {
  Count best = score_by_nodes.empty() ? 0 : score_by_nodes[0];
  for (std::size_t k = 0; k < score_by_nodes.size(); ++k) {
    best = std::min(best, score_by_nodes[k] + alpha * static_cast<Count>(k));
  }
  return best;
}

OracleResult oracle_solve(const BinaryDataset& d, int depth, int nodes) {
  if (depth < 0 || nodes < 0) throw InputError("budgets must be non-negative");
  if (d.feature_count() > 10) throw InputError("oracle handles at most 10 features");
  if (depth > 3) throw InputError("oracle handles depth at most 3");
  if (nodes > 7) throw InputError("oracle handles at most 7 nodes");

  OracleResult res;
  res.score_by_nodes.resize(static_cast<std::size_t>(nodes) + 1);
  for (int k = 0; k <= nodes; ++k) {
    res.score_by_nodes[k] = enumerate(d, depth, k);
  }
  res.best_score = res.score_by_nodes[nodes];
  res.best_node_count = nodes;
  for (int k = 0; k <= nodes; ++k) {
    if (res.score_by_nodes[k] == res.best_score) {
      res.best_node_count = k;
      break;
    }
  }
  return res;
}

}  // namespace opttree::testsupport
