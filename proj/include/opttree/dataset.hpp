#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace opttree {

// Instance counts, misclassification scores and bounds.
using Count = std::int64_t;

// One feature test on a path. Encoded as 2*feature+1 (feature present) or
// 2*feature (feature absent) so a whole path packs into a flat int array.
struct Literal {
  std::int32_t feature = 0;
  bool present = false;

  std::int32_t encode() const { return 2 * feature + (present ? 1 : 0); }
  static Literal decode(std::int32_t v) { return {v / 2, (v & 1) != 0}; }
  friend bool operator==(const Literal&, const Literal&) = default;
};

// Hash of Alg.-style integer arrays: seeded with the length, then one
// xor/shift fold per element, all in wrapping 64-bit arithmetic.
std::uint64_t hash_int_array(const std::int32_t* a, std::size_t n);
std::uint64_t hash_int_array(const std::vector<std::int32_t>& a);

// The path from the root to a node, kept as literals sorted by encoded value.
// Two paths that test the same feature set with the same polarities compare
// equal regardless of the order the tests were applied in.
class Branch {
 public:
  Branch() = default;

  std::size_t size() const { return lits_.size(); }
  const std::vector<std::int32_t>& encoded() const { return lits_; }

  Branch with_literal(Literal lit) const;
  // The two paths below a node that tests `feature`: absent side, present side.
  std::pair<Branch, Branch> child_branches(std::int32_t feature) const;

  std::uint64_t hash() const { return hash_int_array(lits_); }
  friend bool operator==(const Branch&, const Branch&) = default;

 private:
  std::vector<std::int32_t> lits_;
};

// Immutable root table holding every instance's feature bits and label.
// Instance ids are row indices in input order.
class DataStore {
 public:
  DataStore(std::int32_t feature_count, std::int32_t class_count,
            std::vector<std::int32_t> labels, std::vector<std::uint64_t> bits);

  std::int32_t feature_count() const { return features_; }
  std::int32_t class_count() const { return classes_; }
  std::int32_t size() const { return static_cast<std::int32_t>(labels_.size()); }
  std::int32_t label(std::int32_t id) const { return labels_[id]; }

  bool feature_present(std::int32_t id, std::int32_t feature) const {
    const std::uint64_t word = bits_[static_cast<std::size_t>(id) * words_ + feature / 64];
    return (word >> (feature % 64)) & 1u;
  }
  // Appends the indices of the features set for `id`, ascending.
  void append_present_features(std::int32_t id, std::vector<std::int32_t>& out) const;

  std::size_t words_per_instance() const { return words_; }

 private:
  std::int32_t features_;
  std::int32_t classes_;
  std::size_t words_;
  std::vector<std::int32_t> labels_;
  std::vector<std::uint64_t> bits_;
};

// A subset of the store grouped by class, ids ascending within each class.
// Views are immutable; splits produce new views sharing the same store.
class BinaryDataset {
 public:
  BinaryDataset() = default;

  static BinaryDataset full(std::shared_ptr<const DataStore> store);
  static BinaryDataset from_ids(std::shared_ptr<const DataStore> store,
                                std::vector<std::vector<std::int32_t>> ids_per_class);

  Count size() const { return total_; }
  bool empty() const { return total_ == 0; }
  Count class_size(std::int32_t c) const { return static_cast<Count>(ids_[c].size()); }
  const std::vector<std::int32_t>& ids(std::int32_t c) const { return ids_[c]; }

  std::int32_t feature_count() const { return store_->feature_count(); }
  std::int32_t class_count() const { return store_->class_count(); }
  const DataStore& store() const { return *store_; }
  const std::shared_ptr<const DataStore>& store_ptr() const { return store_; }

  // Majority label; ties go to the smaller class index, empty sets to class 0.
  std::int32_t majority_class() const;
  Count leaf_misclassification() const;

  BinaryDataset split(Literal lit) const;

  // Hash over all instance ids, class 0 first, as one flat int array.
  // Memoized on first use; views are meant for single-threaded sessions.
  std::uint64_t hash() const;

 private:
  std::shared_ptr<const DataStore> store_;
  std::vector<std::vector<std::int32_t>> ids_;
  Count total_ = 0;
  mutable std::optional<std::uint64_t> hash_;
};

// Set differences per class: `added` holds instances of d_new missing from
// d_old, `removed` the reverse. Both views share d_new's store.
struct DatasetDelta {
  BinaryDataset added;
  BinaryDataset removed;
};

DatasetDelta dataset_diff(const BinaryDataset& d_new, const BinaryDataset& d_old);
bool datasets_equal(const BinaryDataset& a, const BinaryDataset& b);

}  // namespace opttree
