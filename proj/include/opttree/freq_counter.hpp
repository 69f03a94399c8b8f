#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "opttree/dataset.hpp"

namespace opttree {

// Per-class occurrence counts over one dataset: how many instances of each
// class have feature f, and how many have both f_i and f_j (i < j). The three
// other polarity combinations are derived algebraically, so only the
// positive-positive tables are stored.
class FrequencyCounter {
 public:
  FrequencyCounter(std::int32_t feature_count, std::int32_t class_count);

  void build(const BinaryDataset& d);
  // Patches counts by adding/removing instances. The result must equal a
  // fresh build of the patched dataset; decrementing a count below zero
  // signals a caller bug.
  void apply_delta(const BinaryDataset& added, const BinaryDataset& removed);

  Count class_total(std::int32_t c) const { return totals_[c]; }
  Count single(std::int32_t c, std::int32_t f) const {
    return single_[static_cast<std::size_t>(c) * features_ + f];
  }
  Count pair(std::int32_t c, std::int32_t f1, std::int32_t f2) const;

  // Instances of class c matching one literal or a pair of literals over
  // distinct features, derived from the stored positive counts.
  Count derived(std::int32_t c, Literal a) const;
  Count derived(std::int32_t c, Literal a, Literal b) const;

  std::int32_t feature_count() const { return features_; }
  std::int32_t class_count() const { return classes_; }

  struct Fingerprint {
    std::uint64_t hash = 0;
    Count size = 0;
    bool set = false;
    friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
  };
  const Fingerprint& fingerprint() const { return fingerprint_; }
  void stamp(const BinaryDataset& d) { fingerprint_ = {d.hash(), d.size(), true}; }

  // Count tables and fingerprint, field by field. Ignores scratch storage.
  bool same_counts(const FrequencyCounter& o) const;

 private:
  std::size_t tri_index(std::int32_t i, std::int32_t j) const;
  void apply_instances(const BinaryDataset& d, Count sign);

  std::int32_t features_;
  std::int32_t classes_;
  std::vector<Count> totals_;  // [c]
  std::vector<Count> single_;  // [c * F + f]
  std::vector<Count> pair_;    // [c * F*(F-1)/2 + tri(i, j)], i < j
  Fingerprint fingerprint_;
  std::vector<std::int32_t> scratch_;
};

// Keeps the two most recently used counters. A refresh patches whichever
// stored counter has the smallest symmetric difference to the requested
// dataset, or rebuilds from scratch when no stored counter is closer than
// rebuilding. The produced counter replaces the slot it was derived from.
class CounterStore {
 public:
  CounterStore(std::int32_t feature_count, std::int32_t class_count);

  struct Stats {
    std::int64_t scratch_builds = 0;
    std::int64_t incremental_builds = 0;
    std::int64_t instances_patched = 0;
  };

  const FrequencyCounter& refresh(const BinaryDataset& d, bool allow_incremental);
  const Stats& stats() const { return stats_; }

 private:
  struct Slot {
    std::optional<BinaryDataset> data;
    std::optional<FrequencyCounter> counter;
  };

  std::int32_t features_;
  std::int32_t classes_;
  std::array<Slot, 2> slots_;
  Stats stats_;
};

}  // namespace opttree
