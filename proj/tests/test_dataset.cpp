#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "opttree/datagen.hpp"
#include "opttree/dataset.hpp"
#include "opttree/errors.hpp"

using namespace opttree;
using testsupport::dataset_from_rows;
using testsupport::xor_dataset;

TEST_CASE("literals encode feature and polarity") {
  CHECK(Literal{3, true}.encode() == 7);
  CHECK(Literal{3, false}.encode() == 6);
  CHECK(Literal::decode(7) == Literal{3, true});
  CHECK(Literal::decode(6) == Literal{3, false});
}

TEST_CASE("branches stay sorted and reject duplicate features") {
  Branch b;
  b = b.with_literal({4, true});
  b = b.with_literal({1, false});
  CHECK(b.encoded() == std::vector<std::int32_t>{2, 9});
  CHECK_THROWS_AS(b.with_literal({4, false}), InternalError);

  const auto [off, on] = b.child_branches(7);
  CHECK(off.encoded() == std::vector<std::int32_t>{2, 9, 14});
  CHECK(on.encoded() == std::vector<std::int32_t>{2, 9, 15});
}

TEST_CASE("splitting the parity set on the first feature") {
  const BinaryDataset d = xor_dataset();
  const BinaryDataset on = d.split({0, true});
  CHECK(on.size() == 2);
  CHECK(on.ids(0) == std::vector<std::int32_t>{3});
  CHECK(on.ids(1) == std::vector<std::int32_t>{2});
}

TEST_CASE("splitting on an all-absent feature leaves one side empty") {
  const BinaryDataset d = dataset_from_rows({{0, {1, 0}}, {1, {1, 0}}, {1, {0, 0}}});
  CHECK(d.split({1, true}).empty());
  CHECK(d.split({1, false}).size() == 3);
}

TEST_CASE("split is a partition") {
  std::mt19937_64 rng(7);
  const BinaryDataset d = testsupport::make_random_dataset(rng, 64, 8, 3, 0.5);
  const BinaryDataset off = d.split({3, false});
  const BinaryDataset on = d.split({3, true});
  CHECK(off.size() + on.size() == d.size());
  for (std::int32_t c = 0; c < d.class_count(); ++c) {
    std::vector<std::int32_t> merged = off.ids(c);
    merged.insert(merged.end(), on.ids(c).begin(), on.ids(c).end());
    std::sort(merged.begin(), merged.end());
    CHECK(merged == d.ids(c));
    for (std::int32_t id : off.ids(c)) {
      CHECK(!std::binary_search(on.ids(c).begin(), on.ids(c).end(), id));
    }
  }
}

TEST_CASE("out-of-range split feature is rejected") {
  CHECK_THROWS_AS(xor_dataset().split({2, true}), InputError);
  CHECK_THROWS_AS(xor_dataset().split({-1, false}), InputError);
}

TEST_CASE("majority and leaf score") {
  const BinaryDataset d = dataset_from_rows(
      {{0, {0}}, {0, {0}}, {0, {0}}, {1, {0}}, {1, {1}}, {1, {1}}, {1, {1}}, {1, {1}}});
  CHECK(d.majority_class() == 1);
  CHECK(d.leaf_misclassification() == 3);

  BinaryDataset empty = BinaryDataset::from_ids(xor_dataset().store_ptr(), {{}, {}});
  CHECK(empty.leaf_misclassification() == 0);
  CHECK(empty.majority_class() == 0);
}

TEST_CASE("three-class leaf score is total minus majority") {
  std::vector<std::pair<std::int32_t, std::vector<int>>> rows;
  for (int i = 0; i < 4; ++i) rows.push_back({0, {0}});
  for (int i = 0; i < 4; ++i) rows.push_back({1, {0}});
  for (int i = 0; i < 2; ++i) rows.push_back({2, {0}});
  const BinaryDataset d = dataset_from_rows(rows);
  CHECK(d.leaf_misclassification() == 6);
  CHECK(d.majority_class() == 0);
}

TEST_CASE("diff of id sets") {
  const BinaryDataset root = dataset_from_rows({{0, {0}},
                                                {0, {0}},
                                                {0, {0}},
                                                {0, {0}},
                                                {0, {0}},
                                                {0, {0}},
                                                {0, {0}},
                                                {0, {0}},
                                                {0, {0}},
                                                {0, {0}}});
  const auto subset = [&](std::vector<std::int32_t> ids) {
    return BinaryDataset::from_ids(root.store_ptr(), {std::move(ids)});
  };

  const DatasetDelta same = dataset_diff(subset({1, 2, 5}), subset({1, 2, 5}));
  CHECK(same.added.empty());
  CHECK(same.removed.empty());

  const DatasetDelta from_empty = dataset_diff(subset({1, 2, 5}), subset({}));
  CHECK(from_empty.added.ids(0) == std::vector<std::int32_t>{1, 2, 5});
  CHECK(from_empty.removed.empty());

  const DatasetDelta mixed = dataset_diff(subset({1, 2, 5}), subset({2, 5, 9}));
  CHECK(mixed.added.ids(0) == std::vector<std::int32_t>{1});
  CHECK(mixed.removed.ids(0) == std::vector<std::int32_t>{9});
}

TEST_CASE("diff rejects views of different stores") {
  const BinaryDataset a = xor_dataset();
  const BinaryDataset b = xor_dataset();
  CHECK_THROWS_AS(dataset_diff(a, b), InternalError);
}

TEST_CASE("id array hashing") {
  CHECK(hash_int_array(nullptr, 0) == 0);
  const std::int32_t five = 5;
  CHECK(hash_int_array(&five, 1) == 0x9e3779ffull);

  const std::vector<std::int32_t> ab{1, 2};
  const std::vector<std::int32_t> ba{2, 1};
  CHECK(hash_int_array(ab) == hash_int_array(ab));
  CHECK(hash_int_array(ab) != hash_int_array(ba));
}

TEST_CASE("dataset hash folds the flat id array") {
  const BinaryDataset root = dataset_from_rows(
      {{0, {0}}, {0, {0}}, {0, {0}}, {0, {0}}, {0, {0}}, {0, {1}}, {0, {0}}});
  const BinaryDataset just_five = BinaryDataset::from_ids(root.store_ptr(), {{5}});
  CHECK(just_five.hash() == 0x9e3779ffull);

  // The same instance set reached by different split sequences hashes alike.
  const BinaryDataset via_split = root.split({0, true});
  CHECK(via_split.ids(0) == std::vector<std::int32_t>{5});
  CHECK(via_split.hash() == just_five.hash());
}

TEST_CASE("dataset equality compares exact id sets") {
  std::mt19937_64 rng(11);
  const BinaryDataset d = testsupport::make_random_dataset(rng, 32, 6, 2, 0.5);
  CHECK(datasets_equal(d, d));

  const auto subset = [&](std::vector<std::int32_t> ids) {
    return BinaryDataset::from_ids(d.store_ptr(), {std::move(ids), {}});
  };
  CHECK(!datasets_equal(subset({1, 2}), subset({1, 2, 3})));
  CHECK(!datasets_equal(subset({1, 2, 4}), subset({1, 2, 3})));
  CHECK(datasets_equal(subset({1, 2, 3}), subset({1, 2, 3})));
}

TEST_CASE("store rejects out-of-range labels") {
  CHECK_THROWS_AS(DataStore(1, 1, {0, 1}, {0, 0}), InputError);
  CHECK_THROWS_AS(DataStore(1, 2, {0, -1}, {0, 0}), InputError);
}
