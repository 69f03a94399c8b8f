#include "opttree/datagen.hpp"

#include <algorithm>
#include <memory>

#include "opttree/errors.hpp"

namespace opttree::testsupport {

namespace {

void set_bit(std::vector<std::uint64_t>& bits, std::size_t words, std::int32_t id,
             std::int32_t feature) {
  bits[static_cast<std::size_t>(id) * words + feature / 64] |= std::uint64_t{1}
                                                               << (feature % 64);
}

}  // namespace

BinaryDataset make_random_dataset(std::mt19937_64& rng, std::int32_t instances,
                                  std::int32_t features, std::int32_t classes, double density) {
  if (instances <= 0 || features <= 0 || classes <= 0) throw InputError("bad dataset shape");
  const std::size_t words = (static_cast<std::size_t>(features) + 63) / 64;
  std::vector<std::uint64_t> bits(static_cast<std::size_t>(instances) * words, 0);
  std::vector<std::int32_t> labels(instances);
  std::uniform_int_distribution<std::int32_t> label_dist(0, classes - 1);
  std::bernoulli_distribution bit_dist(density);
  for (std::int32_t id = 0; id < instances; ++id) {
    labels[id] = label_dist(rng);
    for (std::int32_t f = 0; f < features; ++f) {
      if (bit_dist(rng)) set_bit(bits, words, id, f);
    }
  }
  auto store =
      std::make_shared<DataStore>(features, classes, std::move(labels), std::move(bits));
  return BinaryDataset::full(std::move(store));
}

BinaryDataset make_onehot_dataset(std::mt19937_64& rng, std::int32_t instances,
                                  const std::vector<std::int32_t>& group_sizes,
                                  std::int32_t classes, int planted_depth, double noise) {
  if (instances <= 0 || classes <= 0 || group_sizes.empty()) throw InputError("bad dataset shape");
  std::int32_t features = 0;
  for (std::int32_t g : group_sizes) {
    if (g <= 0) throw InputError("group sizes must be positive");
    features += g;
  }
  if (planted_depth < 0 || planted_depth > 20) throw InputError("bad planted depth");

  const std::size_t words = (static_cast<std::size_t>(features) + 63) / 64;
  std::vector<std::uint64_t> bits(static_cast<std::size_t>(instances) * words, 0);
  std::uniform_int_distribution<std::int32_t> feature_dist(0, features - 1);
  std::uniform_int_distribution<std::int32_t> label_dist(0, classes - 1);
  std::bernoulli_distribution noise_dist(noise);

  // Heap-layout complete tree: internal node i tests plant_feature[i], leaves
  // follow the internal nodes.
  const std::size_t internal = (std::size_t{1} << planted_depth) - 1;
  std::vector<std::int32_t> plant_feature(internal);
  for (auto& f : plant_feature) f = feature_dist(rng);
  std::vector<std::int32_t> plant_label(std::size_t{1} << planted_depth);
  for (auto& c : plant_label) c = label_dist(rng);

  std::vector<std::int32_t> labels(instances);
  for (std::int32_t id = 0; id < instances; ++id) {
    std::int32_t offset = 0;
    for (std::int32_t g : group_sizes) {
      std::uniform_int_distribution<std::int32_t> cat(0, g - 1);
      set_bit(bits, words, id, offset + cat(rng));
      offset += g;
    }
    std::size_t at = 0;
    for (int step = 0; step < planted_depth; ++step) {
      const std::int32_t f = plant_feature[at];
      const bool present =
          (bits[static_cast<std::size_t>(id) * words + f / 64] >> (f % 64)) & 1u;
      at = 2 * at + (present ? 2 : 1);
    }
    labels[id] = plant_label[at - internal];
    if (noise_dist(rng)) labels[id] = label_dist(rng);
  }

  auto store =
      std::make_shared<DataStore>(features, classes, std::move(labels), std::move(bits));
  return BinaryDataset::full(std::move(store));
}

BinaryDataset duplicate_dataset(const BinaryDataset& d, int k) {
  if (k <= 0) throw InputError("duplication factor must be positive");
  std::vector<std::int32_t> ids;
  for (std::int32_t c = 0; c < d.class_count(); ++c) {
    ids.insert(ids.end(), d.ids(c).begin(), d.ids(c).end());
  }
  std::sort(ids.begin(), ids.end());

  const std::int32_t features = d.feature_count();
  const std::size_t words = (static_cast<std::size_t>(features) + 63) / 64;
  const std::size_t copies = ids.size() * static_cast<std::size_t>(k);
  std::vector<std::uint64_t> bits(copies * words, 0);
  std::vector<std::int32_t> labels(copies);
  std::vector<std::int32_t> present;

  std::int32_t next = 0;
  for (int rep = 0; rep < k; ++rep) {
    for (std::int32_t id : ids) {
      labels[next] = d.store().label(id);
      present.clear();
      d.store().append_present_features(id, present);
      for (std::int32_t f : present) set_bit(bits, words, next, f);
      ++next;
    }
  }
  auto store = std::make_shared<DataStore>(features, d.class_count(), std::move(labels),
                                           std::move(bits));
  return BinaryDataset::full(std::move(store));
}

}  // namespace opttree::testsupport
