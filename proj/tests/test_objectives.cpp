#include <cstdint>
#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "opttree/datagen.hpp"
#include "opttree/errors.hpp"
#include "opttree/objectives.hpp"
#include "opttree/oracle.hpp"

using namespace opttree;
using testsupport::dataset_from_rows;
using testsupport::make_random_dataset;
using testsupport::oracle_solve;
using testsupport::xor_dataset;

TEST_CASE("a zero penalty reduces to plain misclassification") {
  std::mt19937_64 rng(150);
  for (int round = 0; round < 10; ++round) {
    const BinaryDataset d = make_random_dataset(rng, 24, 4, 2, 0.5);
    SolveSession session(d);
    const SparseResult res = solve_sparse(session, 3, 7, 0);
    CHECK(res.objective == oracle_solve(d, 3, 7).best_score);
    CHECK(res.misclassifications == res.objective);
    REQUIRE(res.tree.has_value());
    CHECK(res.tree->misclassified(d) == res.misclassifications);
  }
}

TEST_CASE("a crushing penalty keeps the bare leaf") {
  const BinaryDataset d = xor_dataset();
  SolveSession session(d);
  const SparseResult res = solve_sparse(session, 2, 3, d.leaf_misclassification() + 1);
  CHECK(res.tree_nodes == 0);
  CHECK(res.objective == d.leaf_misclassification());
  REQUIRE(res.tree.has_value());
  CHECK(res.tree->feature_node_count() == 0);
}

TEST_CASE("penalized objectives match enumeration and the tree pays for itself") {
  std::mt19937_64 rng(2222);
  for (int round = 0; round < 25; ++round) {
    const BinaryDataset d = make_random_dataset(rng, 4 + static_cast<std::int32_t>(rng() % 30),
                                                2 + static_cast<std::int32_t>(rng() % 4), 2, 0.5);
    const auto truth = oracle_solve(d, 3, 7);
    for (const Count alpha : {Count{0}, Count{1}, Count{2}, Count{5}}) {
      SolveSession session(d);
      const SparseResult res = solve_sparse(session, 3, 7, alpha);
      CAPTURE(round);
      CAPTURE(alpha);
      CHECK(res.objective == truth.best_sparse_score(alpha));
      REQUIRE(res.tree.has_value());
      CHECK(res.tree->misclassified(d) + alpha * res.tree->feature_node_count() ==
            res.objective);
      CHECK(res.tree->feature_node_count() == res.tree_nodes);
    }
  }
}

TEST_CASE("heavier penalties never grow the tree") {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 8; ++round) {
    const BinaryDataset d = make_random_dataset(rng, 28, 4, 2, 0.5);
    int prev_nodes = -1;
    for (const Count alpha : {Count{0}, Count{1}, Count{3}, Count{8}}) {
      SolveSession session(d);
      const SparseResult res = solve_sparse(session, 3, 7, alpha);
      if (prev_nodes >= 0) CHECK(res.tree_nodes <= prev_nodes);
      prev_nodes = res.tree_nodes;
    }
  }
}

TEST_CASE("negative penalties are rejected") {
  SolveSession session(xor_dataset());
  CHECK_THROWS_AS(solve_sparse(session, 2, 3, -1), InputError);
}

TEST_CASE("node minimization strips budget the score does not need") {
  // Feature 0 alone separates; a seven-node budget must shrink to one node.
  const BinaryDataset d = dataset_from_rows(
      {{0, {0, 1, 0}}, {1, {1, 1, 0}}, {1, {1, 0, 1}}, {0, {0, 0, 1}}, {1, {1, 1, 1}}});
  SolveSession session(d);
  const LexResult res = solve_lexicographic(session, 3, 7);
  CHECK(res.misclassifications == 0);
  CHECK(res.tree_nodes == 1);
  REQUIRE(res.tree.has_value());
  CHECK(res.tree->feature_node_count() == 1);

  // Parity keeps all three nodes; nothing smaller reaches score zero.
  SolveSession parity(xor_dataset());
  const LexResult full = solve_lexicographic(parity, 2, 3);
  CHECK(full.misclassifications == 0);
  CHECK(full.tree_nodes == 3);
}

TEST_CASE("lexicographic answers match enumeration on both objectives") {
  std::mt19937_64 rng(5150);
  for (int round = 0; round < 25; ++round) {
    const BinaryDataset d = make_random_dataset(rng, 4 + static_cast<std::int32_t>(rng() % 28),
                                                2 + static_cast<std::int32_t>(rng() % 4), 2, 0.5);
    const auto truth = oracle_solve(d, 3, 7);
    SolveSession session(d);
    const LexResult res = solve_lexicographic(session, 3, 7);
    CAPTURE(round);
    CHECK(res.misclassifications == truth.best_score);
    CHECK(res.tree_nodes == truth.best_node_count);
    REQUIRE(res.tree.has_value());
    CHECK(res.tree->misclassified(d) == truth.best_score);
    CHECK(res.tree->feature_node_count() == truth.best_node_count);
  }
}

TEST_CASE("a budget sweep reports the whole frontier") {
  SolveSession session(xor_dataset());
  const SweepResult res = solve_budget_sweep(session, 2, 1, 3);
  REQUIRE(res.points.size() == 3);
  CHECK_FALSE(res.timed_out);
  CHECK(res.points[0].nodes == 1);
  CHECK(res.points[0].objective == 2);
  CHECK(res.points[1].objective == 1);
  CHECK(res.points[2].objective == 0);

  CHECK_THROWS_AS(solve_budget_sweep(session, 2, 3, 1), InputError);
  CHECK_THROWS_AS(solve_budget_sweep(session, 2, -1, 3), InputError);
}

TEST_CASE("sweep scores fall monotonically and match single solves") {
  std::mt19937_64 rng(606);
  for (int round = 0; round < 6; ++round) {
    const BinaryDataset d = make_random_dataset(rng, 30, 5, 2, 0.5);
    SolveSession session(d);
    const SweepResult res = solve_budget_sweep(session, 3, 1, 7);
    REQUIRE(res.points.size() == 7);
    for (std::size_t i = 0; i < res.points.size(); ++i) {
      if (i > 0) CHECK(res.points[i].objective <= res.points[i - 1].objective);
      CHECK(res.points[i].objective == oracle_solve(d, 3, res.points[i].nodes).best_score);
    }
  }
}

TEST_CASE("a repeated sweep runs entirely from cache") {
  std::mt19937_64 rng(8080);
  const BinaryDataset d = make_random_dataset(rng, 32, 5, 2, 0.5);
  SolveSession session(d);
  const SweepResult first = solve_budget_sweep(session, 3, 1, 7);
  const std::int64_t searches = session.stats().general_case_calls;

  const SweepResult again = solve_budget_sweep(session, 3, 1, 7);
  CHECK(session.stats().general_case_calls == searches);
  REQUIRE(again.points.size() == first.points.size());
  for (std::size_t i = 0; i < first.points.size(); ++i) {
    CHECK(again.points[i].objective == first.points[i].objective);
  }
}

TEST_CASE("a warmed session answers penalized queries like a cold one") {
  std::mt19937_64 rng(9091);
  for (int round = 0; round < 6; ++round) {
    const BinaryDataset d = make_random_dataset(rng, 26, 4, 2, 0.5);

    SolveSession warm(d);
    solve_budget_sweep(warm, 3, 1, 7);
    for (const Count alpha : {Count{1}, Count{3}}) {
      SolveSession cold(d);
      CAPTURE(round);
      CAPTURE(alpha);
      CHECK(solve_sparse(warm, 3, 7, alpha).objective ==
            solve_sparse(cold, 3, 7, alpha).objective);
    }
  }
}

TEST_CASE("sweeps and penalized solves propagate timeouts") {
  SolverOptions o;
  o.time_limit_seconds = 1e-9;
  std::mt19937_64 rng(4242);
  const BinaryDataset d = make_random_dataset(rng, 40, 6, 2, 0.5);

  SolveSession sweep_session(d, o);
  CHECK(solve_budget_sweep(sweep_session, 3, 1, 7).timed_out);

  SolveSession sparse_session(d, o);
  CHECK(solve_sparse(sparse_session, 3, 7, 1).status == QueryResult::Status::timeout);

  SolveSession lex_session(d, o);
  CHECK(solve_lexicographic(lex_session, 3, 7).status == QueryResult::Status::timeout);
}
