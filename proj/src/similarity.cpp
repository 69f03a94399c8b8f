#include "opttree/similarity.hpp"

#include <algorithm>
#include <limits>

namespace opttree {

Count SimilarityTracker::bound_from(Count old_optimum, Count removed) {
  return std::max<Count>(0, old_optimum - removed);
}

SimilarityTracker::UpdateResult SimilarityTracker::update_cache(SubtreeCache& cache,
                                                                const BinaryDataset& d,
                                                                const Branch& b, int depth,
                                                                int nodes) {
  UpdateResult res;
  if (static_cast<std::size_t>(depth) >= by_depth_.size()) return res;

  bool any_equal = false;
  Count best_bound = 0;
  for (const auto& slot : by_depth_[depth]) {
    if (!slot) continue;
    const DatasetDelta delta = dataset_diff(d, slot->data);
    if (delta.added.empty() && delta.removed.empty()) {
      // Same instance set reached along another path: everything already
      // proven there holds here verbatim.
      cache.transfer(slot->data, slot->branch, d, b);
      res.transferred = true;
      any_equal = true;
      continue;
    }
    const auto it = slot->optima.find({depth, nodes});
    if (it != slot->optima.end()) {
      best_bound = std::max(best_bound, bound_from(it->second, delta.removed.size()));
    }
  }

  if (best_bound > 0) {
    cache.store_lower_bound(d, b, depth, nodes, best_bound);
    res.injected_bound = best_bound;
  }
  if (any_equal) {
    res.optimal_available = cache.optimal(d, b, depth, nodes).has_value();
  }
  return res;
}

void SimilarityTracker::replace(SubtreeCache& cache, const BinaryDataset& d, const Branch& b,
                                int depth) {
  if (static_cast<std::size_t>(depth) >= by_depth_.size()) {
    by_depth_.resize(static_cast<std::size_t>(depth) + 1);
  }

  Slot fresh;
  fresh.data = d;
  fresh.branch = b;
  for (const CacheEntry& e : cache.entries_for(d, b)) {
    if (e.optimal) fresh.optima[{e.depth, e.nodes}] = e.optimal->score;
  }

  auto& slots = by_depth_[depth];
  int target = -1;
  for (int s = 0; s < 2 && target < 0; ++s) {
    if (!slots[s]) target = s;
  }
  if (target < 0) {
    // Both occupied: overwrite the most similar one.
    Count best_cost = std::numeric_limits<Count>::max();
    target = 0;
    for (int s = 0; s < 2; ++s) {
      const DatasetDelta delta = dataset_diff(d, slots[s]->data);
      const Count cost = delta.added.size() + delta.removed.size();
      if (cost < best_cost) {
        best_cost = cost;
        target = s;
      }
    }
  }
  slots[target] = std::move(fresh);
}

}  // namespace opttree
