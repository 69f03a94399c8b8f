#include "opttree/tree.hpp"

#include <algorithm>

#include "opttree/errors.hpp"

namespace opttree {

DecisionTree DecisionTree::leaf(std::int32_t label) {
  DecisionTree t;
  t.set_root(t.add_leaf(label));
  return t;
}

std::int32_t DecisionTree::add_leaf(std::int32_t label) {
  nodes_.push_back({-1, -1, -1, label});
  return static_cast<std::int32_t>(nodes_.size()) - 1;
}

std::int32_t DecisionTree::add_node(std::int32_t feature, std::int32_t left, std::int32_t right) {
  if (feature < 0) throw InternalError("internal tree node needs a feature");
  nodes_.push_back({feature, left, right, -1});
  return static_cast<std::int32_t>(nodes_.size()) - 1;
}

int DecisionTree::feature_node_count() const {
  int n = 0;
  for (const TreeNode& node : nodes_) n += node.feature >= 0;
  return n;
}

int DecisionTree::depth_below(std::int32_t idx) const {
  const TreeNode& n = nodes_[idx];
  if (n.feature < 0) return 0;
  return 1 + std::max(depth_below(n.left), depth_below(n.right));
}

int DecisionTree::depth() const { return root_ < 0 ? 0 : depth_below(root_); }

Count DecisionTree::misclassified(const BinaryDataset& d) const {
  Count wrong = 0;
  for (std::int32_t c = 0; c < d.class_count(); ++c) {
    for (std::int32_t id : d.ids(c)) {
      wrong += classify_instance(d.store(), id) != c;
    }
  }
  return wrong;
}

bool DecisionTree::empty_split_below(std::int32_t idx, const BinaryDataset& d) const {
  const TreeNode& n = nodes_[idx];
  if (n.feature < 0) return false;
  const BinaryDataset left = d.split({n.feature, false});
  const BinaryDataset right = d.split({n.feature, true});
  if (left.empty() || right.empty()) return true;
  return empty_split_below(n.left, left) || empty_split_below(n.right, right);
}

bool DecisionTree::has_empty_split(const BinaryDataset& d) const {
  return root_ >= 0 && empty_split_below(root_, d);
}

}  // namespace opttree
