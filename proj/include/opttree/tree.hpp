#pragma once

#include <cstdint>
#include <vector>

#include "opttree/dataset.hpp"

namespace opttree {

// One node of a materialized tree. feature >= 0 tests that feature (left
// child: feature absent, right child: present); feature == -1 is a leaf
// predicting `label`.
struct TreeNode {
  std::int32_t feature = -1;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t label = -1;
};

class DecisionTree {
 public:
  DecisionTree() = default;

  static DecisionTree leaf(std::int32_t label);

  std::int32_t add_leaf(std::int32_t label);
  std::int32_t add_node(std::int32_t feature, std::int32_t left, std::int32_t right);
  void set_root(std::int32_t idx) { root_ = idx; }

  std::int32_t root() const { return root_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  bool empty() const { return nodes_.empty(); }

  int feature_node_count() const;
  int depth() const;

  template <class HasFeature>
  std::int32_t classify(HasFeature&& has_feature) const {
    std::int32_t at = root_;
    while (nodes_[at].feature >= 0) {
      at = has_feature(nodes_[at].feature) ? nodes_[at].right : nodes_[at].left;
    }
    return nodes_[at].label;
  }

  std::int32_t classify_instance(const DataStore& store, std::int32_t id) const {
    return classify([&](std::int32_t f) { return store.feature_present(id, f); });
  }

  Count misclassified(const BinaryDataset& d) const;

  // True when some internal node routes every reaching instance to one side.
  bool has_empty_split(const BinaryDataset& d) const;

 private:
  int depth_below(std::int32_t idx) const;
  bool empty_split_below(std::int32_t idx, const BinaryDataset& d) const;

  std::vector<TreeNode> nodes_;
  std::int32_t root_ = -1;
};

}  // namespace opttree
