#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "opttree/dataset.hpp"
#include "opttree/tree.hpp"

namespace opttree {

enum class DataFormat { auto_detect, dl_space, csv };

// dl-space: one instance per line, whitespace-separated integers, label
// first, then one 0/1 token per feature. csv: header row skipped, label in
// the last column. auto_detect picks csv for .csv paths or a comma in the
// first line. Class count is max label + 1. Instance ids follow file order.
BinaryDataset read_dataset(const std::string& path, DataFormat format = DataFormat::auto_detect);

BinaryDataset parse_dl_space(std::istream& in, const std::string& name);
BinaryDataset parse_csv(std::istream& in, const std::string& name);

// Instances ascending by id, one per line: label, then the feature bits.
void write_dl_space(std::ostream& out, const BinaryDataset& d);

// Flips every feature present in more than half the instances, so frequent
// features become rare ones. `inverted` receives one flag per feature; the
// mask is needed to read trees against the original polarity.
BinaryDataset invert_dense_features(const BinaryDataset& d, std::vector<bool>& inverted);

// Nested objects: {"feature": i, "left": ..., "right": ...} for a test on
// feature i (left = absent), {"class": c} for a leaf.
std::string tree_to_json(const DecisionTree& t);
DecisionTree tree_from_json(const std::string& text);

}  // namespace opttree
