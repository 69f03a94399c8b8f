#include "opttree/depth_two.hpp"

#include <algorithm>
#include <limits>

#include "opttree/errors.hpp"

namespace opttree {

namespace {

constexpr Count kInf = std::numeric_limits<Count>::max();

void consider(Depth2Candidate& best, const Depth2Candidate& cand) {
  if (cand.valid && cand.score < best.score) best = cand;
}

// Best split of the whole set on a single feature, given per-class totals and
// a single-feature count accessor. Ties keep the smallest feature index.
template <class SingleFn>
Depth2Candidate best_single_split(std::int32_t features, std::int32_t classes,
                                  const std::vector<Count>& totals, SingleFn single) {
  Depth2Candidate best;
  best.score = kInf;
  for (std::int32_t f = 0; f < features; ++f) {
    Count left_sum = 0, left_max = 0, right_sum = 0, right_max = 0;
    for (std::int32_t c = 0; c < classes; ++c) {
      const Count r = single(c, f);
      const Count l = totals[c] - r;
      right_sum += r;
      right_max = std::max(right_max, r);
      left_sum += l;
      left_max = std::max(left_max, l);
    }
    const Count score = (left_sum - left_max) + (right_sum - right_max);
    if (score < best.score) {
      best = {score, f, -1, -1, true};
    }
  }
  return best;
}

}  // namespace

Count classification_score(const FrequencyCounter& fq, Literal a) {
  Count sum = 0, largest = 0;
  for (std::int32_t c = 0; c < fq.class_count(); ++c) {
    const Count v = fq.derived(c, a);
    sum += v;
    largest = std::max(largest, v);
  }
  return sum - largest;
}

Count classification_score(const FrequencyCounter& fq, Literal a, Literal b) {
  Count sum = 0, largest = 0;
  for (std::int32_t c = 0; c < fq.class_count(); ++c) {
    const Count v = fq.derived(c, a, b);
    sum += v;
    largest = std::max(largest, v);
  }
  return sum - largest;
}

Depth2Candidate Depth2Solution::best_for_budget(int max_nodes) const {
  Depth2Candidate best{leaf_score, -1, -1, -1, true};
  if (max_nodes >= 1) consider(best, one_node);
  if (max_nodes >= 2) consider(best, two_node);
  if (max_nodes >= 3) consider(best, three_node);
  return best;
}

Depth2Solution solve_depth_two(const BinaryDataset& d, int depth_budget, CounterStore& store,
                               Depth2Workspace& ws, bool allow_incremental) {
  if (d.empty()) throw InputError("two-level solver needs a nonempty dataset");
  if (depth_budget < 1 || depth_budget > 2) {
    throw InputError("two-level solver handles depth budgets 1 and 2");
  }

  const std::int32_t features = d.feature_count();
  const std::int32_t classes = d.class_count();

  Depth2Solution sol;
  sol.leaf_score = d.leaf_misclassification();

  if (depth_budget == 1) {
    // Single-feature counts are enough here; skip the pair tables entirely.
    ws.single_counts.assign(static_cast<std::size_t>(classes) * features, 0);
    std::vector<std::int32_t> present;
    std::vector<Count> totals(classes);
    for (std::int32_t c = 0; c < classes; ++c) {
      totals[c] = d.class_size(c);
      Count* row = ws.single_counts.data() + static_cast<std::size_t>(c) * features;
      for (std::int32_t id : d.ids(c)) {
        present.clear();
        d.store().append_present_features(id, present);
        for (std::int32_t f : present) ++row[f];
      }
    }
    sol.one_node = best_single_split(features, classes, totals, [&](std::int32_t c, std::int32_t f) {
      return ws.single_counts[static_cast<std::size_t>(c) * features + f];
    });
    return sol;
  }

  const FrequencyCounter& fq = store.refresh(d, allow_incremental);
  std::vector<Count> totals(classes);
  for (std::int32_t c = 0; c < classes; ++c) totals[c] = fq.class_total(c);

  sol.one_node = best_single_split(
      features, classes, totals,
      [&](std::int32_t c, std::int32_t f) { return fq.single(c, f); });

  if (features < 2) return sol;

  // For every ordered (root, child) pick the best child per side. Each
  // unordered pair is visited once and scored in both roles; per root the
  // child indices still arrive ascending, so strict improvement keeps the
  // same winner as the naive root-major double loop.
  ws.best_left.assign(features, {kInf, -1});
  ws.best_right.assign(features, {kInf, -1});
  auto improve = [](Depth2Workspace::ChildBest& slot, Count score, std::int32_t child) {
    if (score < slot.score) slot = {score, child};
  };

  for (std::int32_t i = 0; i < features; ++i) {
    for (std::int32_t j = i + 1; j < features; ++j) {
      // Polarity combinations per class: both features, i only, j only, neither.
      Count both_sum = 0, both_max = 0;
      Count ionly_sum = 0, ionly_max = 0;
      Count jonly_sum = 0, jonly_max = 0;
      Count neither_sum = 0, neither_max = 0;
      for (std::int32_t c = 0; c < classes; ++c) {
        const Count both = fq.pair(c, i, j);
        const Count ionly = fq.single(c, i) - both;
        const Count jonly = fq.single(c, j) - both;
        const Count neither = totals[c] - fq.single(c, i) - fq.single(c, j) + both;
        both_sum += both;
        both_max = std::max(both_max, both);
        ionly_sum += ionly;
        ionly_max = std::max(ionly_max, ionly);
        jonly_sum += jonly;
        jonly_max = std::max(jonly_max, jonly);
        neither_sum += neither;
        neither_max = std::max(neither_max, neither);
      }
      const Count cs_both = both_sum - both_max;
      const Count cs_ionly = ionly_sum - ionly_max;
      const Count cs_jonly = jonly_sum - jonly_max;
      const Count cs_neither = neither_sum - neither_max;

      // Root i: left subtree sees no i and splits on j, right subtree sees i.
      improve(ws.best_left[i], cs_neither + cs_jonly, j);
      improve(ws.best_right[i], cs_ionly + cs_both, j);
      // Root j, child i.
      improve(ws.best_left[j], cs_neither + cs_ionly, i);
      improve(ws.best_right[j], cs_jonly + cs_both, i);
    }
  }

  Depth2Candidate two, three;
  two.score = kInf;
  three.score = kInf;
  for (std::int32_t f = 0; f < features; ++f) {
    const auto& bl = ws.best_left[f];
    const auto& br = ws.best_right[f];

    // Leaf scores of the two sides of a root split on f.
    Count pos_sum = 0, pos_max = 0, neg_sum = 0, neg_max = 0;
    for (std::int32_t c = 0; c < classes; ++c) {
      const Count r = fq.single(c, f);
      const Count l = totals[c] - r;
      pos_sum += r;
      pos_max = std::max(pos_max, r);
      neg_sum += l;
      neg_max = std::max(neg_max, l);
    }
    const Count leaf_pos = pos_sum - pos_max;
    const Count leaf_neg = neg_sum - neg_max;

    if (bl.child >= 0 && br.child >= 0 && bl.score + br.score < three.score) {
      three = {bl.score + br.score, f, bl.child, br.child, true};
    }
    if (bl.child >= 0 && bl.score + leaf_pos < two.score) {
      two = {bl.score + leaf_pos, f, bl.child, -1, true};
    }
    if (br.child >= 0 && leaf_neg + br.score < two.score) {
      two = {leaf_neg + br.score, f, -1, br.child, true};
    }
  }
  sol.two_node = two;
  sol.three_node = three;
  return sol;
}

}  // namespace opttree
