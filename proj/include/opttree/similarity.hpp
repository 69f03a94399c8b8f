#pragma once

#include <array>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "opttree/cache.hpp"
#include "opttree/dataset.hpp"

namespace opttree {

// Remembers the last two exhaustively solved subproblems per depth budget.
// A new subproblem at the same depth inherits a misclassification bound from
// each remembered dataset: removing an instance costs at most one
// misclassification, adding one costs none, so the old optimum minus the
// number of removed instances still holds.
class SimilarityTracker {
 public:
  struct UpdateResult {
    bool optimal_available = false;  // an exact optimum for (depth, nodes) surfaced
    bool transferred = false;        // an equal dataset's entries were copied over
    Count injected_bound = 0;        // strongest bound pushed into the cache, 0 if none
  };

  // Feeds bounds (or, for an equal stored dataset, whole cache rows) for the
  // subproblem (d, b, depth, nodes) into the cache.
  UpdateResult update_cache(SubtreeCache& cache, const BinaryDataset& d, const Branch& b,
                            int depth, int nodes);

  // Called after a subproblem at this depth was searched exhaustively. The
  // dataset lands in the slot it most resembles (least churn to reach it),
  // carrying every optimum the cache currently holds for it.
  void replace(SubtreeCache& cache, const BinaryDataset& d, const Branch& b, int depth);

  // The bound itself: old optimum minus removed instances, floored at zero.
  static Count bound_from(Count old_optimum, Count removed);

 private:
  struct Slot {
    BinaryDataset data;
    Branch branch;
    std::map<std::pair<int, int>, Count> optima;  // (depth, nodes) -> score
  };

  std::vector<std::array<std::optional<Slot>, 2>> by_depth_;
};

}  // namespace opttree
