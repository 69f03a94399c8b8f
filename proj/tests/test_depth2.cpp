#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "opttree/datagen.hpp"
#include "opttree/depth_two.hpp"
#include "opttree/errors.hpp"
#include "opttree/oracle.hpp"

using namespace opttree;
using testsupport::dataset_from_rows;
using testsupport::make_random_dataset;
using testsupport::oracle_solve;
using testsupport::xor_dataset;

namespace {

Depth2Solution solve(const BinaryDataset& d, int depth_budget) {
  CounterStore store(d.feature_count(), d.class_count());
  Depth2Workspace ws;
  return solve_depth_two(d, depth_budget, store, ws, true);
}

// Leaf error of a set: everything not in its biggest class.
Count leaf_error(const BinaryDataset& d) { return d.leaf_misclassification(); }

// Straight from the definition: split on every feature, score children as
// leaves or re-split them, keep the tie-break order of the fast path (roots
// ascending, left child before right, children ascending, strict improvement).
struct ReferenceDepth2 {
  Depth2Candidate one, two, three;

  explicit ReferenceDepth2(const BinaryDataset& d) {
    one.score = two.score = three.score = std::numeric_limits<Count>::max();
    const std::int32_t features = d.feature_count();
    for (std::int32_t f = 0; f < features; ++f) {
      const BinaryDataset left = d.split({f, false});
      const BinaryDataset right = d.split({f, true});
      const Count left_leaf = leaf_error(left);
      const Count right_leaf = leaf_error(right);
      if (left_leaf + right_leaf < one.score) {
        one = {left_leaf + right_leaf, f, -1, -1, true};
      }

      Count best_left = std::numeric_limits<Count>::max();
      Count best_right = std::numeric_limits<Count>::max();
      std::int32_t best_left_child = -1, best_right_child = -1;
      for (std::int32_t g = 0; g < features; ++g) {
        if (g == f) continue;
        const Count left_split =
            leaf_error(left.split({g, false})) + leaf_error(left.split({g, true}));
        if (left_split < best_left) {
          best_left = left_split;
          best_left_child = g;
        }
        const Count right_split =
            leaf_error(right.split({g, false})) + leaf_error(right.split({g, true}));
        if (right_split < best_right) {
          best_right = right_split;
          best_right_child = g;
        }
      }
      if (best_left_child >= 0 && best_right_child >= 0 &&
          best_left + best_right < three.score) {
        three = {best_left + best_right, f, best_left_child, best_right_child, true};
      }
      if (best_left_child >= 0 && best_left + right_leaf < two.score) {
        two = {best_left + right_leaf, f, best_left_child, -1, true};
      }
      if (best_right_child >= 0 && left_leaf + best_right < two.score) {
        two = {left_leaf + best_right, f, -1, best_right_child, true};
      }
    }
  }
};

bool same_candidate(const Depth2Candidate& a, const Depth2Candidate& b) {
  if (!a.valid && !b.valid) return true;
  return a.valid == b.valid && a.score == b.score && a.root == b.root && a.left == b.left &&
         a.right == b.right;
}

}  // namespace

TEST_CASE("classification score is leftover mass outside the top class") {
  // Conditioned on f0: 4 / 7 / 2 over the classes. Conditioned on f0 and
  // f1 together: 4 / 4 / 2. Conditioned on f1 absent: 0 / 3 / 5.
  std::vector<std::pair<std::int32_t, std::vector<int>>> rows;
  for (int i = 0; i < 4; ++i) rows.push_back({0, {1, 1}});
  for (int i = 0; i < 4; ++i) rows.push_back({1, {1, 1}});
  for (int i = 0; i < 2; ++i) rows.push_back({2, {1, 1}});
  for (int i = 0; i < 3; ++i) rows.push_back({1, {1, 0}});
  for (int i = 0; i < 5; ++i) rows.push_back({2, {0, 0}});
  const BinaryDataset d = dataset_from_rows(rows);

  FrequencyCounter fq(d.feature_count(), d.class_count());
  fq.build(d);

  CHECK(classification_score(fq, {0, true}) == 6);
  CHECK(classification_score(fq, {1, false}) == 3);
  CHECK(classification_score(fq, {0, true}, {1, true}) == 6);
  CHECK(classification_score(fq, {0, false}) == 0);
  CHECK(classification_score(fq, {0, true}, {1, false}) == 0);
  CHECK(classification_score(fq, {0, false}, {1, true}) == 0);
}

TEST_CASE("parity data needs all three nodes") {
  const BinaryDataset d = xor_dataset();
  const Depth2Solution sol = solve(d, 2);

  CHECK(sol.leaf_score == 2);
  CHECK(sol.one_node.valid);
  CHECK(sol.one_node.score == 2);
  CHECK(sol.two_node.valid);
  CHECK(sol.two_node.score == 1);
  REQUIRE(sol.three_node.valid);
  CHECK(sol.three_node.score == 0);
  CHECK(sol.three_node.root == 0);
  CHECK(sol.three_node.left == 1);
  CHECK(sol.three_node.right == 1);

  CHECK(sol.best_for_budget(0).score == 2);
  CHECK(sol.best_for_budget(0).node_count() == 0);
  CHECK(sol.best_for_budget(1).score == 2);
  CHECK(sol.best_for_budget(1).node_count() == 0);
  CHECK(sol.best_for_budget(2).score == 1);
  CHECK(sol.best_for_budget(3).score == 0);
}

TEST_CASE("a single separating feature wins every budget") {
  const BinaryDataset d = dataset_from_rows({{0, {0, 0}},
                                             {0, {0, 1}},
                                             {1, {1, 0}},
                                             {1, {1, 1}},
                                             {0, {0, 1}},
                                             {1, {1, 1}}});
  const Depth2Solution sol = solve(d, 2);

  CHECK(sol.one_node.score == 0);
  CHECK(sol.one_node.root == 0);
  for (int budget = 1; budget <= 3; ++budget) {
    const Depth2Candidate best = sol.best_for_budget(budget);
    CHECK(best.score == 0);
    CHECK(best.node_count() == 1);
    CHECK(best.root == 0);
  }
}

TEST_CASE("two-level scores match exhaustive enumeration") {
  std::mt19937_64 rng(20260815);
  for (int round = 0; round < 60; ++round) {
    const std::int32_t features = 2 + static_cast<std::int32_t>(rng() % 6);
    const std::int32_t instances = 4 + static_cast<std::int32_t>(rng() % 48);
    const std::int32_t classes = 2 + static_cast<std::int32_t>(rng() % 2);
    const BinaryDataset d = make_random_dataset(rng, instances, features, classes, 0.5);

    const Depth2Solution sol = solve(d, 2);
    for (int budget = 1; budget <= 3; ++budget) {
      const auto truth = oracle_solve(d, 2, budget);
      CAPTURE(round);
      CAPTURE(budget);
      CHECK(sol.best_for_budget(budget).score == truth.best_score);
    }
  }
}

TEST_CASE("candidate tuples match a naive reference, tie-breaks included") {
  std::mt19937_64 rng(97);
  for (int round = 0; round < 40; ++round) {
    const std::int32_t features = 2 + static_cast<std::int32_t>(rng() % 7);
    const std::int32_t instances = 3 + static_cast<std::int32_t>(rng() % 40);
    const std::int32_t classes = 2 + static_cast<std::int32_t>(rng() % 2);
    const BinaryDataset d = make_random_dataset(rng, instances, features, classes, 0.45);

    const Depth2Solution sol = solve(d, 2);
    const ReferenceDepth2 ref(d);
    CAPTURE(round);
    CHECK(same_candidate(sol.one_node, ref.one));
    CHECK(same_candidate(sol.two_node, ref.two));
    CHECK(same_candidate(sol.three_node, ref.three));
  }
}

TEST_CASE("depth budget one uses single counts and matches enumeration") {
  std::mt19937_64 rng(404);
  for (int round = 0; round < 30; ++round) {
    const std::int32_t features = 2 + static_cast<std::int32_t>(rng() % 6);
    const std::int32_t instances = 4 + static_cast<std::int32_t>(rng() % 32);
    const BinaryDataset d = make_random_dataset(rng, instances, features, 2, 0.5);

    const Depth2Solution sol = solve(d, 1);
    CHECK(sol.one_node.valid);
    CHECK(sol.one_node.score == oracle_solve(d, 1, 1).best_score);
    CHECK_FALSE(sol.two_node.valid);
    CHECK_FALSE(sol.three_node.valid);
  }
}

TEST_CASE("rejects budgets outside one and two and empty input") {
  const BinaryDataset d = xor_dataset();
  CounterStore store(d.feature_count(), d.class_count());
  Depth2Workspace ws;
  CHECK_THROWS_AS(solve_depth_two(d, 0, store, ws, true), InputError);
  CHECK_THROWS_AS(solve_depth_two(d, 3, store, ws, true), InputError);

  const BinaryDataset empty = BinaryDataset::from_ids(d.store_ptr(), {{}, {}});
  CHECK_THROWS_AS(solve_depth_two(empty, 2, store, ws, true), InputError);
}
