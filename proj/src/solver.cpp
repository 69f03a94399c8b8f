#include "opttree/solver.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "opttree/errors.hpp"

namespace opttree {

namespace {
constexpr Count kInf = std::numeric_limits<Count>::max();
}

Count leaf_misclassification(const BinaryDataset& d) { return d.leaf_misclassification(); }

std::vector<std::int32_t> order_features(const BinaryDataset& d, FeatureOrder order,
                                         std::mt19937_64* rng) {
  const std::int32_t features = d.feature_count();
  std::vector<std::int32_t> perm(features);
  std::iota(perm.begin(), perm.end(), 0);
  if (order == FeatureOrder::in_order) return perm;

  if (order == FeatureOrder::random) {
    if (!rng) throw InternalError("random feature order needs a generator");
    std::shuffle(perm.begin(), perm.end(), *rng);
    return perm;
  }

  // Weighted Gini impurity of the two sides of a root split on each feature,
  // cleanest split first. Ties keep index order.
  const std::int32_t classes = d.class_count();
  std::vector<Count> counts(static_cast<std::size_t>(classes) * features, 0);
  std::vector<std::int32_t> present;
  for (std::int32_t c = 0; c < classes; ++c) {
    Count* row = counts.data() + static_cast<std::size_t>(c) * features;
    for (std::int32_t id : d.ids(c)) {
      present.clear();
      d.store().append_present_features(id, present);
      for (std::int32_t f : present) ++row[f];
    }
  }
  const Count total = d.size();
  std::vector<double> impurity(features, 0.0);
  for (std::int32_t f = 0; f < features; ++f) {
    Count right_n = 0;
    for (std::int32_t c = 0; c < classes; ++c) {
      right_n += counts[static_cast<std::size_t>(c) * features + f];
    }
    const Count left_n = total - right_n;
    double right_gini = 0.0, left_gini = 0.0;
    if (right_n > 0) {
      double acc = 0.0;
      for (std::int32_t c = 0; c < classes; ++c) {
        const double p = static_cast<double>(counts[static_cast<std::size_t>(c) * features + f]) /
                         static_cast<double>(right_n);
        acc += p * p;
      }
      right_gini = 1.0 - acc;
    }
    if (left_n > 0) {
      double acc = 0.0;
      for (std::int32_t c = 0; c < classes; ++c) {
        const double p =
            static_cast<double>(d.class_size(c) -
                                counts[static_cast<std::size_t>(c) * features + f]) /
            static_cast<double>(left_n);
        acc += p * p;
      }
      left_gini = 1.0 - acc;
    }
    impurity[f] = static_cast<double>(left_n) * left_gini + static_cast<double>(right_n) * right_gini;
  }
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::int32_t a, std::int32_t b) { return impurity[a] < impurity[b]; });
  return perm;
}

SolveSession::SolveSession(BinaryDataset root, SolverOptions options)
    : root_(std::move(root)),
      options_(options),
      cache_(options.cache_kind, options.cache_probe_buffer),
      counters_(root_.feature_count(), root_.class_count()),
      rng_(options.seed),
      identity_order_(root_.feature_count()) {
  std::iota(identity_order_.begin(), identity_order_.end(), 0);
  if (options_.time_limit_seconds > 0) {
    deadline_ = std::chrono::steady_clock::now() +
                std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(options_.time_limit_seconds));
  }
}

std::pair<int, int> SolveSession::normalize_budgets(int depth, int nodes) {
  if (depth < 0 || nodes < 0) throw InputError("budgets must be non-negative");
  if (depth > 25) throw InputError("depth budget too large");
  const Count cap = (Count{1} << depth) - 1;
  if (nodes > cap) nodes = static_cast<int>(cap);
  if (depth > nodes) depth = nodes;
  return {depth, nodes};
}

std::pair<int, int> SolveSession::child_budget_range(int depth, int nodes) {
  const Count cap = (Count{1} << (depth - 1)) - 1;
  const int n_max = static_cast<int>(std::min<Count>(cap, nodes - 1));
  return {nodes - 1 - n_max, n_max};
}

void SolveSession::check_deadline() {
  if (deadline_ && std::chrono::steady_clock::now() > *deadline_) throw TimeoutError();
}

SolveSession::Outcome SolveSession::leaf_outcome(Count score) {
  Outcome out;
  out.feasible = true;
  out.score = score;
  return out;
}

OptimalRecord SolveSession::to_record(const Outcome& out) {
  return {out.feature, out.left_budget, out.right_budget,
          out.score,   out.tree_nodes,  out.tree_depth};
}

SolveSession::Outcome SolveSession::from_record(const OptimalRecord& rec) {
  Outcome out;
  out.feasible = true;
  out.score = rec.score;
  out.feature = rec.feature;
  out.left_budget = rec.left_budget;
  out.right_budget = rec.right_budget;
  out.tree_nodes = rec.tree_nodes;
  out.tree_depth = rec.tree_depth;
  return out;
}

QueryResult SolveSession::solve(int max_depth, int max_nodes, std::optional<Count> ub,
                                bool materialize) {
  const auto [depth, nodes] = normalize_budgets(max_depth, max_nodes);
  const Count leaf = root_.leaf_misclassification();
  const Count budget = ub ? std::min(*ub, leaf) : leaf;

  QueryResult res;
  Outcome out;
  try {
    if (depth == 0 || nodes == 0) {
      out = leaf <= budget ? leaf_outcome(leaf) : Outcome{};
    } else {
      out = solve_subtree(root_, Branch{}, depth, nodes, budget);
    }
  } catch (const TimeoutError&) {
    res.status = QueryResult::Status::timeout;
    return res;
  }

  if (!out.feasible) {
    res.status = QueryResult::Status::infeasible;
    return res;
  }
  res.objective = out.score;
  res.tree_nodes = out.tree_nodes;
  res.tree_depth = out.tree_depth;
  if (materialize) {
    DecisionTree tree = reconstruct(depth, nodes);
    if (tree.misclassified(root_) != out.score) {
      throw InternalError("materialized tree does not reproduce its score");
    }
    // Cache records may describe a different same-score tree than the rebuild
    // walks into; the reported shape follows the tree actually returned.
    res.tree_nodes = tree.feature_node_count();
    res.tree_depth = tree.depth();
    res.tree = std::move(tree);
  }
  return res;
}

SolveSession::Outcome SolveSession::solve_subtree(const BinaryDataset& d, const Branch& b,
                                                  int depth, int nodes, Count ub) {
  if (ub < 0) return {};
  if (depth == 0 || nodes == 0) {
    const Count leaf = d.leaf_misclassification();
    return leaf <= ub ? leaf_outcome(leaf) : Outcome{};
  }

  if (auto rec = cache_.optimal(d, b, depth, nodes)) {
    return rec->score <= ub ? from_record(*rec) : Outcome{};
  }

  if (options_.similarity_bound) {
    const auto update = similarity_.update_cache(cache_, d, b, depth, nodes);
    if (update.transferred) ++local_stats_.similarity_transfers;
    if (update.optimal_available) {
      const auto rec = cache_.optimal(d, b, depth, nodes);
      if (!rec) throw InternalError("transferred optimum is missing from the cache");
      return rec->score <= ub ? from_record(*rec) : Outcome{};
    }
    if (update.injected_bound > ub) ++local_stats_.similarity_prunes;
  }

  const Count lb = cache_.lower_bound(d, b, depth, nodes);
  if (lb > ub) {
    ++local_stats_.lower_bound_prunes;
    return {};
  }

  const Count leaf = d.leaf_misclassification();
  if (lb == leaf) {
    // The bare leaf meets the strongest known bound; no split can beat it.
    OptimalRecord rec;
    rec.score = leaf;
    cache_.store_optimal(d, b, depth, nodes, rec);
    return leaf_outcome(leaf);
  }

  if (options_.specialized_depth_two && depth <= 2) {
    return depth_two_case(d, b, depth, nodes, ub);
  }
  return general_case(d, b, depth, nodes, ub);
}

void SolveSession::store_depth_two(const BinaryDataset& d, const Branch& b, int depth,
                                   const Depth2Solution& sol) {
  const auto record_of = [](const Depth2Candidate& c) {
    OptimalRecord rec;
    rec.feature = c.root;
    rec.left_budget = c.left >= 0 ? 1 : 0;
    rec.right_budget = c.right >= 0 ? 1 : 0;
    rec.score = c.score;
    rec.tree_nodes = c.node_count();
    rec.tree_depth = c.depth();
    return rec;
  };
  cache_.store_optimal(d, b, 1, 1, record_of(sol.best_for_budget(1)));
  if (depth == 2) {
    cache_.store_optimal(d, b, 2, 2, record_of(sol.best_for_budget(2)));
    cache_.store_optimal(d, b, 2, 3, record_of(sol.best_for_budget(3)));
  }
}

SolveSession::Outcome SolveSession::depth_two_case(const BinaryDataset& d, const Branch& b,
                                                   int depth, int nodes, Count ub) {
  ++local_stats_.depth_two_calls;
  const Depth2Solution sol =
      solve_depth_two(d, depth, counters_, workspace_, options_.incremental_frequency);
  store_depth_two(d, b, depth, sol);
  const auto rec = cache_.optimal(d, b, depth, nodes);
  if (!rec) throw InternalError("two-level solve left no usable cache record");
  return rec->score <= ub ? from_record(*rec) : Outcome{};
}

Count SolveSession::child_lower_bound(const ChildProblem& p) {
  if (p.depth == 0 || p.nodes == 0) return p.data.leaf_misclassification();
  return cache_.lower_bound(p.data, p.branch, p.depth, p.nodes);
}

std::pair<SolveSession::Outcome, Count> SolveSession::solve_for_root_feature(
    std::int32_t feature, const BinaryDataset& left, const BinaryDataset& right,
    const Branch& left_branch, const Branch& right_branch, int depth, int left_nodes,
    int right_nodes, Count ub) {
  const ChildProblem left_problem{left, left_branch, std::min(depth - 1, left_nodes), left_nodes};
  const ChildProblem right_problem{right, right_branch, std::min(depth - 1, right_nodes),
                                   right_nodes};

  bool left_first = true;
  if (options_.node_order == NodeOrder::dynamic) {
    left_first = left_child_first(left.leaf_misclassification(), right.leaf_misclassification());
  }
  const ChildProblem& first = left_first ? left_problem : right_problem;
  const ChildProblem& second = left_first ? right_problem : left_problem;

  const auto local_bound = [&] {
    return child_lower_bound(left_problem) + child_lower_bound(right_problem);
  };

  const Outcome first_out = solve_subtree(first.data, first.branch, first.depth, first.nodes,
                                          ub - child_lower_bound(second));
  if (!first_out.feasible) return {Outcome{}, local_bound()};

  const Outcome second_out =
      solve_subtree(second.data, second.branch, second.depth, second.nodes, ub - first_out.score);
  if (!second_out.feasible) return {Outcome{}, local_bound()};

  const Outcome& left_out = left_first ? first_out : second_out;
  const Outcome& right_out = left_first ? second_out : first_out;
  Outcome combined;
  combined.feasible = true;
  combined.score = left_out.score + right_out.score;
  combined.feature = feature;
  combined.left_budget = left_nodes;
  combined.right_budget = right_nodes;
  combined.tree_nodes = 1 + left_out.tree_nodes + right_out.tree_nodes;
  combined.tree_depth = 1 + std::max(left_out.tree_depth, right_out.tree_depth);
  return {combined, combined.score};
}

SolveSession::Outcome SolveSession::general_case(const BinaryDataset& d, const Branch& b,
                                                 int depth, int nodes, Count ub) {
  ++local_stats_.general_case_calls;
  const Count leaf = d.leaf_misclassification();
  Outcome best = leaf <= ub ? leaf_outcome(leaf) : Outcome{};
  const Count lb = cache_.lower_bound(d, b, depth, nodes);
  Count refuted_bound = kInf;
  const auto [n_min, n_max] = child_budget_range(depth, nodes);

  const std::vector<std::int32_t>* order = &identity_order_;
  std::vector<std::int32_t> reordered;
  if (options_.feature_order != FeatureOrder::in_order) {
    reordered = order_features(d, options_.feature_order, &rng_);
    order = &reordered;
  }

  for (const std::int32_t f : *order) {
    check_deadline();
    if (best.feasible && best.score == lb) break;

    BinaryDataset left = d.split({f, false});
    if (left.empty() || left.size() == d.size()) continue;
    BinaryDataset right = d.split({f, true});
    const auto [left_branch, right_branch] = b.child_branches(f);

    for (int nl = n_min; nl <= n_max; ++nl) {
      const int nr = nodes - 1 - nl;
      const Count budget = best.feasible ? std::min(ub, best.score - 1) : ub;
      auto [out, local_lb] = solve_for_root_feature(f, left, right, left_branch, right_branch,
                                                    depth, nl, nr, budget);
      if (out.feasible) {
        best = out;
      } else {
        refuted_bound = std::min(refuted_bound, local_lb);
      }
    }
  }

  if (best.feasible) {
    cache_.store_optimal(d, b, depth, nodes, to_record(best));
  } else {
    Count new_lb = std::max(lb, ub + 1);
    if (refuted_bound < kInf) new_lb = std::max(new_lb, refuted_bound);
    cache_.store_lower_bound(d, b, depth, nodes, new_lb);
  }
  if (options_.similarity_bound) similarity_.replace(cache_, d, b, depth);
  return best;
}

DecisionTree SolveSession::reconstruct(int max_depth, int max_nodes) {
  const auto [depth, nodes] = normalize_budgets(max_depth, max_nodes);
  if (depth == 0 || nodes == 0) return DecisionTree::leaf(root_.majority_class());
  DecisionTree tree;
  tree.set_root(rebuild_node(tree, root_, Branch{}, depth, nodes));
  return tree;
}

std::int32_t SolveSession::rebuild_node(DecisionTree& tree, const BinaryDataset& d,
                                        const Branch& b, int depth, int nodes) {
  if (depth == 0 || nodes == 0) return tree.add_leaf(d.majority_class());
  const auto rec = cache_.optimal(d, b, depth, nodes);
  if (!rec) throw InternalError("missing cache record during tree rebuild");
  if (rec->feature < 0) return tree.add_leaf(d.majority_class());

  if (options_.specialized_depth_two && depth <= 2 &&
      (rec->left_budget > 0 || rec->right_budget > 0)) {
    // Children of two-level subtrees are never cached; recompute the shape.
    // The record may describe a tie-equivalent tree found by the general
    // recursion, so only the score has to line up, not the split feature.
    const Depth2Solution sol =
        solve_depth_two(d, depth, counters_, workspace_, options_.incremental_frequency);
    const Depth2Candidate cand = sol.best_for_budget(nodes);
    if (cand.score != rec->score) {
      throw InternalError("two-level recomputation diverged from the cached record");
    }
    return rebuild_two_level(tree, d, cand);
  }

  const BinaryDataset left = d.split({rec->feature, false});
  const BinaryDataset right = d.split({rec->feature, true});
  const auto [left_branch, right_branch] = b.child_branches(rec->feature);
  const std::int32_t left_idx = rebuild_node(tree, left, left_branch,
                                             std::min(depth - 1, static_cast<int>(rec->left_budget)),
                                             rec->left_budget);
  const std::int32_t right_idx =
      rebuild_node(tree, right, right_branch,
                   std::min(depth - 1, static_cast<int>(rec->right_budget)), rec->right_budget);
  return tree.add_node(rec->feature, left_idx, right_idx);
}

std::int32_t SolveSession::rebuild_two_level(DecisionTree& tree, const BinaryDataset& d,
                                             const Depth2Candidate& cand) {
  const BinaryDataset left = d.split({cand.root, false});
  const BinaryDataset right = d.split({cand.root, true});

  const auto side = [&](const BinaryDataset& part, std::int32_t child) {
    if (child < 0) return tree.add_leaf(part.majority_class());
    const BinaryDataset off = part.split({child, false});
    const BinaryDataset on = part.split({child, true});
    const std::int32_t off_leaf = tree.add_leaf(off.majority_class());
    const std::int32_t on_leaf = tree.add_leaf(on.majority_class());
    return tree.add_node(child, off_leaf, on_leaf);
  };

  const std::int32_t left_idx = side(left, cand.left);
  const std::int32_t right_idx = side(right, cand.right);
  return tree.add_node(cand.root, left_idx, right_idx);
}

SolveStats SolveSession::stats() const {
  SolveStats s = local_stats_;
  s.scratch_counter_builds = counters_.stats().scratch_builds;
  s.incremental_counter_builds = counters_.stats().incremental_builds;
  s.cache_probe_buffer_hits = cache_.probe_buffer_hits();
  s.cache_entries = cache_.entry_count();
  s.cache_keys = cache_.key_count();
  return s;
}

}  // namespace opttree
