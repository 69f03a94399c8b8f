#include "opttree/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "opttree/errors.hpp"

namespace opttree {

namespace {

struct RawData {
  std::vector<std::int32_t> labels;
  std::vector<std::vector<bool>> rows;
};

std::int64_t parse_int(const std::string& token, const std::string& name, int line, int column) {
  std::int64_t value = 0;
  const char* first = token.data();
  const char* last = first + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw InputError(name + ":" + std::to_string(line) + ":" + std::to_string(column) +
                     ": expected an integer, got \"" + token + "\"");
  }
  return value;
}

void append_instance(RawData& raw, const std::vector<std::string>& tokens, std::size_t label_at,
                     const std::string& name, int line) {
  std::vector<bool> row;
  row.reserve(tokens.size() - 1);
  std::int32_t label = -1;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::int64_t value = parse_int(tokens[i], name, line, static_cast<int>(i) + 1);
    if (i == label_at) {
      if (value < 0) {
        throw InputError(name + ":" + std::to_string(line) + ": negative class label");
      }
      label = static_cast<std::int32_t>(value);
    } else {
      if (value != 0 && value != 1) {
        throw InputError(name + ":" + std::to_string(line) + ":" + std::to_string(i + 1) +
                         ": feature values must be 0 or 1, got \"" + tokens[i] + "\"");
      }
      row.push_back(value == 1);
    }
  }
  if (!raw.rows.empty() && row.size() != raw.rows.front().size()) {
    throw InputError(name + ":" + std::to_string(line) + ": expected " +
                     std::to_string(raw.rows.front().size() + 1) + " columns, got " +
                     std::to_string(tokens.size()));
  }
  raw.labels.push_back(label);
  raw.rows.push_back(std::move(row));
}

BinaryDataset finish(RawData&& raw, const std::string& name) {
  if (raw.rows.empty()) throw InputError(name + ": no instances");
  const std::int32_t features = static_cast<std::int32_t>(raw.rows.front().size());
  if (features == 0) throw InputError(name + ": no feature columns");
  const std::int32_t classes = *std::max_element(raw.labels.begin(), raw.labels.end()) + 1;

  const std::size_t words = (static_cast<std::size_t>(features) + 63) / 64;
  std::vector<std::uint64_t> bits(raw.rows.size() * words, 0);
  for (std::size_t id = 0; id < raw.rows.size(); ++id) {
    for (std::int32_t f = 0; f < features; ++f) {
      if (raw.rows[id][f]) {
        bits[id * words + f / 64] |= std::uint64_t{1} << (f % 64);
      }
    }
  }
  auto store = std::make_shared<DataStore>(features, classes, std::move(raw.labels),
                                           std::move(bits));
  return BinaryDataset::full(std::move(store));
}

std::string trimmed(const std::string& s) {
  const auto from = s.find_first_not_of(" \t\r\n");
  if (from == std::string::npos) return "";
  const auto to = s.find_last_not_of(" \t\r\n");
  return s.substr(from, to - from + 1);
}

}  // namespace

BinaryDataset parse_dl_space(std::istream& in, const std::string& name) {
  RawData raw;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    std::string token;
    while (fields >> token) tokens.push_back(token);
    if (tokens.empty()) continue;
    if (tokens.size() < 2) {
      throw InputError(name + ":" + std::to_string(line_no) +
                       ": a line needs a label and at least one feature");
    }
    append_instance(raw, tokens, 0, name, line_no);
  }
  return finish(std::move(raw), name);
}

BinaryDataset parse_csv(std::istream& in, const std::string& name) {
  RawData raw;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> tokens;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      tokens.push_back(trimmed(line.substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (tokens.size() < 2) {
      throw InputError(name + ":" + std::to_string(line_no) +
                       ": a row needs at least one feature column and the label");
    }
    append_instance(raw, tokens, tokens.size() - 1, name, line_no);
  }
  return finish(std::move(raw), name);
}

BinaryDataset read_dataset(const std::string& path, DataFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();

  if (format == DataFormat::auto_detect) {
    const bool csv_ext = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
    std::string first_line;
    std::getline(buffer, first_line);
    buffer.clear();
    buffer.seekg(0);
    format = (csv_ext || first_line.find(',') != std::string::npos) ? DataFormat::csv
                                                                    : DataFormat::dl_space;
  }
  return format == DataFormat::csv ? parse_csv(buffer, path) : parse_dl_space(buffer, path);
}

void write_dl_space(std::ostream& out, const BinaryDataset& d) {
  std::vector<std::int32_t> ids;
  for (std::int32_t c = 0; c < d.class_count(); ++c) {
    ids.insert(ids.end(), d.ids(c).begin(), d.ids(c).end());
  }
  std::sort(ids.begin(), ids.end());
  for (std::int32_t id : ids) {
    out << d.store().label(id);
    for (std::int32_t f = 0; f < d.feature_count(); ++f) {
      out << ' ' << (d.store().feature_present(id, f) ? 1 : 0);
    }
    out << '\n';
  }
}

BinaryDataset invert_dense_features(const BinaryDataset& d, std::vector<bool>& inverted) {
  const std::int32_t features = d.feature_count();
  const Count total = d.size();
  std::vector<Count> present_count(features, 0);
  std::vector<std::int32_t> ids;
  for (std::int32_t c = 0; c < d.class_count(); ++c) {
    ids.insert(ids.end(), d.ids(c).begin(), d.ids(c).end());
  }
  std::sort(ids.begin(), ids.end());

  std::vector<std::int32_t> present;
  for (std::int32_t id : ids) {
    present.clear();
    d.store().append_present_features(id, present);
    for (std::int32_t f : present) ++present_count[f];
  }
  inverted.assign(features, false);
  for (std::int32_t f = 0; f < features; ++f) {
    inverted[f] = 2 * present_count[f] > total;
  }

  const std::size_t words = (static_cast<std::size_t>(features) + 63) / 64;
  std::vector<std::uint64_t> bits(ids.size() * words, 0);
  std::vector<std::int32_t> labels(ids.size());
  for (std::size_t at = 0; at < ids.size(); ++at) {
    labels[at] = d.store().label(ids[at]);
    for (std::int32_t f = 0; f < features; ++f) {
      if (d.store().feature_present(ids[at], f) != inverted[f]) {
        bits[at * words + f / 64] |= std::uint64_t{1} << (f % 64);
      }
    }
  }
  auto store = std::make_shared<DataStore>(features, d.class_count(), std::move(labels),
                                           std::move(bits));
  return BinaryDataset::full(std::move(store));
}

namespace {

nlohmann::json node_to_json(const DecisionTree& t, std::int32_t at) {
  const TreeNode& node = t.nodes()[at];
  if (node.feature < 0) return nlohmann::json{{"class", node.label}};
  return nlohmann::json{{"feature", node.feature},
                        {"left", node_to_json(t, node.left)},
                        {"right", node_to_json(t, node.right)}};
}

std::int32_t node_from_json(const nlohmann::json& j, DecisionTree& t) {
  if (!j.is_object()) throw InputError("tree json: expected an object");
  if (j.contains("class")) {
    if (!j["class"].is_number_integer() || j["class"].get<std::int64_t>() < 0) {
      throw InputError("tree json: class must be a non-negative integer");
    }
    return t.add_leaf(j["class"].get<std::int32_t>());
  }
  if (!j.contains("feature") || !j.contains("left") || !j.contains("right")) {
    throw InputError("tree json: node needs feature, left and right");
  }
  if (!j["feature"].is_number_integer() || j["feature"].get<std::int64_t>() < 0) {
    throw InputError("tree json: feature must be a non-negative integer");
  }
  const std::int32_t left = node_from_json(j["left"], t);
  const std::int32_t right = node_from_json(j["right"], t);
  return t.add_node(j["feature"].get<std::int32_t>(), left, right);
}

}  // namespace

std::string tree_to_json(const DecisionTree& t) {
  if (t.empty()) throw InputError("cannot serialize an empty tree");
  return node_to_json(t, t.root()).dump();
}

DecisionTree tree_from_json(const std::string& text) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("tree json: ") + e.what());
  }
  DecisionTree t;
  t.set_root(node_from_json(parsed, t));
  return t;
}

}  // namespace opttree
