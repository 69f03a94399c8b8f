#include "opttree/dataset.hpp"

#include <algorithm>

#include "opttree/errors.hpp"

namespace opttree {

std::uint64_t hash_int_array(const std::int32_t* a, std::size_t n) {
  std::uint64_t k = n;
  for (std::size_t i = 0; i < n; ++i) {
    k ^= static_cast<std::uint64_t>(a[i]) + 0x9e3779b9ull + (k << 6) + (k >> 2);
  }
  return k;
}

std::uint64_t hash_int_array(const std::vector<std::int32_t>& a) {
  return hash_int_array(a.data(), a.size());
}

Branch Branch::with_literal(Literal lit) const {
  Branch out;
  out.lits_.reserve(lits_.size() + 1);
  const std::int32_t v = lit.encode();
  bool placed = false;
  for (std::int32_t existing : lits_) {
    if (existing / 2 == lit.feature) {
      throw InternalError("branch already tests this feature");
    }
    if (!placed && v < existing) {
      out.lits_.push_back(v);
      placed = true;
    }
    out.lits_.push_back(existing);
  }
  if (!placed) out.lits_.push_back(v);
  return out;
}

std::pair<Branch, Branch> Branch::child_branches(std::int32_t feature) const {
  return {with_literal({feature, false}), with_literal({feature, true})};
}

DataStore::DataStore(std::int32_t feature_count, std::int32_t class_count,
                     std::vector<std::int32_t> labels, std::vector<std::uint64_t> bits)
    : features_(feature_count),
      classes_(class_count),
      words_(static_cast<std::size_t>((feature_count + 63) / 64)),
      labels_(std::move(labels)),
      bits_(std::move(bits)) {
  if (features_ < 0 || classes_ < 1) {
    throw InputError("data store needs a non-negative feature count and at least one class");
  }
  if (bits_.size() != labels_.size() * words_) {
    throw InternalError("data store bit table size mismatch");
  }
  for (std::int32_t lbl : labels_) {
    if (lbl < 0 || lbl >= classes_) throw InputError("label out of range");
  }
}

void DataStore::append_present_features(std::int32_t id, std::vector<std::int32_t>& out) const {
  const std::uint64_t* row = bits_.data() + static_cast<std::size_t>(id) * words_;
  for (std::size_t w = 0; w < words_; ++w) {
    std::uint64_t word = row[w];
    while (word) {
      const int bit = __builtin_ctzll(word);
      out.push_back(static_cast<std::int32_t>(w * 64 + bit));
      word &= word - 1;
    }
  }
}

BinaryDataset BinaryDataset::full(std::shared_ptr<const DataStore> store) {
  std::vector<std::vector<std::int32_t>> ids(store->class_count());
  for (std::int32_t id = 0; id < store->size(); ++id) {
    ids[store->label(id)].push_back(id);
  }
  return from_ids(std::move(store), std::move(ids));
}

BinaryDataset BinaryDataset::from_ids(std::shared_ptr<const DataStore> store,
                                      std::vector<std::vector<std::int32_t>> ids_per_class) {
  if (static_cast<std::int32_t>(ids_per_class.size()) != store->class_count()) {
    throw InternalError("id list count does not match class count");
  }
  BinaryDataset d;
  d.store_ = std::move(store);
  d.ids_ = std::move(ids_per_class);
  d.total_ = 0;
  for (const auto& v : d.ids_) d.total_ += static_cast<Count>(v.size());
  return d;
}

std::int32_t BinaryDataset::majority_class() const {
  std::int32_t best = 0;
  Count best_count = -1;
  for (std::int32_t c = 0; c < class_count(); ++c) {
    if (class_size(c) > best_count) {
      best_count = class_size(c);
      best = c;
    }
  }
  return best;
}

Count BinaryDataset::leaf_misclassification() const {
  Count largest = 0;
  for (std::int32_t c = 0; c < class_count(); ++c) {
    largest = std::max(largest, class_size(c));
  }
  return total_ - largest;
}

BinaryDataset BinaryDataset::split(Literal lit) const {
  if (lit.feature < 0 || lit.feature >= feature_count()) {
    throw InputError("split feature out of range");
  }
  std::vector<std::vector<std::int32_t>> keep(ids_.size());
  for (std::size_t c = 0; c < ids_.size(); ++c) {
    for (std::int32_t id : ids_[c]) {
      if (store_->feature_present(id, lit.feature) == lit.present) {
        keep[c].push_back(id);
      }
    }
  }
  return from_ids(store_, std::move(keep));
}

std::uint64_t BinaryDataset::hash() const {
  if (!hash_) {
    std::uint64_t k = static_cast<std::uint64_t>(total_);
    for (const auto& v : ids_) {
      for (std::int32_t id : v) {
        k ^= static_cast<std::uint64_t>(id) + 0x9e3779b9ull + (k << 6) + (k >> 2);
      }
    }
    hash_ = k;
  }
  return *hash_;
}

DatasetDelta dataset_diff(const BinaryDataset& d_new, const BinaryDataset& d_old) {
  if (d_new.store_ptr() != d_old.store_ptr()) {
    throw InternalError("diff across different data stores");
  }
  const std::int32_t classes = d_new.class_count();
  std::vector<std::vector<std::int32_t>> added(classes), removed(classes);
  for (std::int32_t c = 0; c < classes; ++c) {
    const auto& a = d_new.ids(c);
    const auto& b = d_old.ids(c);
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a[i] < b[j])) {
        added[c].push_back(a[i++]);
      } else if (i == a.size() || b[j] < a[i]) {
        removed[c].push_back(b[j++]);
      } else {
        ++i;
        ++j;
      }
    }
  }
  return {BinaryDataset::from_ids(d_new.store_ptr(), std::move(added)),
          BinaryDataset::from_ids(d_new.store_ptr(), std::move(removed))};
}

bool datasets_equal(const BinaryDataset& a, const BinaryDataset& b) {
  if (a.size() != b.size()) return false;
  for (std::int32_t c = 0; c < a.class_count(); ++c) {
    if (a.class_size(c) != b.class_size(c)) return false;
  }
  if (a.hash() != b.hash()) return false;
  for (std::int32_t c = 0; c < a.class_count(); ++c) {
    if (a.ids(c) != b.ids(c)) return false;
  }
  return true;
}

}  // namespace opttree
