#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "opttree/dataset.hpp"

namespace opttree::testsupport {

// (label, feature bits) rows, ids in row order.
inline BinaryDataset dataset_from_rows(
    const std::vector<std::pair<std::int32_t, std::vector<int>>>& rows) {
  const std::int32_t features = static_cast<std::int32_t>(rows.front().second.size());
  std::int32_t classes = 1;
  const std::size_t words = (static_cast<std::size_t>(features) + 63) / 64;
  std::vector<std::uint64_t> bits(rows.size() * words, 0);
  std::vector<std::int32_t> labels;
  for (std::size_t id = 0; id < rows.size(); ++id) {
    labels.push_back(rows[id].first);
    classes = std::max(classes, rows[id].first + 1);
    for (std::int32_t f = 0; f < features; ++f) {
      if (rows[id].second[f]) {
        bits[id * words + f / 64] |= std::uint64_t{1} << (f % 64);
      }
    }
  }
  auto store =
      std::make_shared<DataStore>(features, classes, std::move(labels), std::move(bits));
  return BinaryDataset::full(std::move(store));
}

// Labels follow the parity of the two feature bits.
inline BinaryDataset xor_dataset() {
  return dataset_from_rows({{0, {0, 0}}, {1, {0, 1}}, {1, {1, 0}}, {0, {1, 1}}});
}

}  // namespace opttree::testsupport
