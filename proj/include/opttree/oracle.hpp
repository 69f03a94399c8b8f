#pragma once

#include <vector>

#include "opttree/dataset.hpp"

namespace opttree::testsupport {

// Ground truth from bare enumeration. score_by_nodes[k] is the exact optimal
// misclassification count with at most k feature nodes (and the depth budget
// given to oracle_solve), so penalized and node-minimal answers fall out of
// the same table.
struct OracleResult {
  Count best_score = 0;
  Count best_node_count = 0;
  std::vector<Count> score_by_nodes;

  Count best_sparse_score(Count alpha) const;
};

// Exhaustive recursion: best of the bare leaf and, per feature, every way of
// splitting the node budget between the two sides. No cache, no bounds, no
// shared logic with the solver beyond dataset splitting. Guarded to stay
// tractable: F <= 10, depth <= 3, nodes <= 7.
OracleResult oracle_solve(const BinaryDataset& d, int depth, int nodes);

}  // namespace opttree::testsupport
