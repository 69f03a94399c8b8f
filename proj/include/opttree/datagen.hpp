#pragma once

#include <random>
#include <vector>

#include "opttree/dataset.hpp"

namespace opttree::testsupport {

// Uniform random instances: each feature present with probability `density`,
// labels uniform over the classes.
BinaryDataset make_random_dataset(std::mt19937_64& rng, std::int32_t instances,
                                  std::int32_t features, std::int32_t classes, double density);

// Categorical data in one-hot encoding: each group holds the indicator
// columns of one categorical attribute, exactly one set per instance. Labels
// come from a randomly planted tree over the columns, then `noise` of them
// are re-rolled. Mimics the shape of binarized benchmark sets.
BinaryDataset make_onehot_dataset(std::mt19937_64& rng, std::int32_t instances,
                                  const std::vector<std::int32_t>& group_sizes,
                                  std::int32_t classes, int planted_depth, double noise);

// Same instances repeated `k` times (ids renumbered). Optimal
// misclassification counts scale by exactly k.
BinaryDataset duplicate_dataset(const BinaryDataset& d, int k);

}  // namespace opttree::testsupport
