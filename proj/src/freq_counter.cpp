#include "opttree/freq_counter.hpp"

#include <limits>

#include "opttree/errors.hpp"

namespace opttree {

FrequencyCounter::FrequencyCounter(std::int32_t feature_count, std::int32_t class_count)
    : features_(feature_count), classes_(class_count) {
  if (feature_count < 0 || class_count < 1) {
    throw InputError("counter needs a non-negative feature count and at least one class");
  }
  const std::size_t f = static_cast<std::size_t>(feature_count);
  totals_.assign(classes_, 0);
  single_.assign(static_cast<std::size_t>(classes_) * f, 0);
  pair_.assign(static_cast<std::size_t>(classes_) * (f * (f - (f > 0 ? 1 : 0)) / 2), 0);
}

std::size_t FrequencyCounter::tri_index(std::int32_t i, std::int32_t j) const {
  // Row-major upper triangle without the diagonal, i < j.
  const std::size_t fi = static_cast<std::size_t>(i);
  return fi * features_ - fi * (fi + 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

Count FrequencyCounter::pair(std::int32_t c, std::int32_t f1, std::int32_t f2) const {
  if (f1 == f2) throw InputError("pair count needs two distinct features");
  if (f1 > f2) std::swap(f1, f2);
  const std::size_t stride = static_cast<std::size_t>(features_) * (features_ - 1) / 2;
  return pair_[static_cast<std::size_t>(c) * stride + tri_index(f1, f2)];
}

Count FrequencyCounter::derived(std::int32_t c, Literal a) const {
  return a.present ? single(c, a.feature) : totals_[c] - single(c, a.feature);
}

Count FrequencyCounter::derived(std::int32_t c, Literal a, Literal b) const {
  if (a.feature == b.feature) throw InputError("derived count needs two distinct features");
  const Count both = pair(c, a.feature, b.feature);
  const Count fa = single(c, a.feature);
  const Count fb = single(c, b.feature);
  if (a.present && b.present) return both;
  if (a.present) return fa - both;
  if (b.present) return fb - both;
  return totals_[c] - fa - fb + both;
}

void FrequencyCounter::apply_instances(const BinaryDataset& d, Count sign) {
  const std::size_t stride = static_cast<std::size_t>(features_) * (features_ - 1) / 2;
  for (std::int32_t c = 0; c < classes_; ++c) {
    Count* singles = single_.data() + static_cast<std::size_t>(c) * features_;
    Count* pairs = pair_.data() + static_cast<std::size_t>(c) * stride;
    for (std::int32_t id : d.ids(c)) {
      scratch_.clear();
      d.store().append_present_features(id, scratch_);
      for (std::size_t x = 0; x < scratch_.size(); ++x) {
        const std::int32_t fi = scratch_[x];
        singles[fi] += sign;
        if (sign < 0 && singles[fi] < 0) {
          throw InternalError("feature count decremented below zero");
        }
        if (x + 1 == scratch_.size()) break;
        // Cells for (fi, fj) with fj > fi are contiguous in the triangle.
        Count* row = pairs + tri_index(fi, fi + 1);
        for (std::size_t y = x + 1; y < scratch_.size(); ++y) {
          Count& cell = row[scratch_[y] - fi - 1];
          cell += sign;
          if (sign < 0 && cell < 0) {
            throw InternalError("pair count decremented below zero");
          }
        }
      }
      totals_[c] += sign;
      if (sign < 0 && totals_[c] < 0) {
        throw InternalError("class total decremented below zero");
      }
    }
  }
}

void FrequencyCounter::build(const BinaryDataset& d) {
  if (d.feature_count() != features_ || d.class_count() != classes_) {
    throw InputError("counter shape does not match dataset");
  }
  std::fill(totals_.begin(), totals_.end(), 0);
  std::fill(single_.begin(), single_.end(), 0);
  std::fill(pair_.begin(), pair_.end(), 0);
  apply_instances(d, +1);
  stamp(d);
}

void FrequencyCounter::apply_delta(const BinaryDataset& added, const BinaryDataset& removed) {
  apply_instances(added, +1);
  apply_instances(removed, -1);
  fingerprint_ = {};
}

bool FrequencyCounter::same_counts(const FrequencyCounter& o) const {
  return features_ == o.features_ && classes_ == o.classes_ && totals_ == o.totals_ &&
         single_ == o.single_ && pair_ == o.pair_ && fingerprint_ == o.fingerprint_;
}

CounterStore::CounterStore(std::int32_t feature_count, std::int32_t class_count)
    : features_(feature_count), classes_(class_count) {}

const FrequencyCounter& CounterStore::refresh(const BinaryDataset& d, bool allow_incremental) {
  if (d.feature_count() != features_ || d.class_count() != classes_) {
    throw InputError("counter store shape does not match dataset");
  }
  int chosen = -1;
  Count chosen_cost = std::numeric_limits<Count>::max();
  DatasetDelta chosen_delta;

  if (allow_incremental) {
    for (int s = 0; s < 2; ++s) {
      if (!slots_[s].data) continue;
      DatasetDelta delta = dataset_diff(d, *slots_[s].data);
      const Count cost = delta.added.size() + delta.removed.size();
      if (cost < chosen_cost) {
        chosen_cost = cost;
        chosen = s;
        chosen_delta = std::move(delta);
      }
    }
  }

  const bool incremental = chosen >= 0 && chosen_cost < d.size();
  if (incremental) {
    Slot& slot = slots_[chosen];
    slot.counter->apply_delta(chosen_delta.added, chosen_delta.removed);
    slot.counter->stamp(d);
    slot.data = d;
    ++stats_.incremental_builds;
    stats_.instances_patched += chosen_cost;
    return *slot.counter;
  }

  // From scratch. A free slot is filled first; with both occupied the one
  // closest to d gives way, keeping the pair spread over recent datasets.
  int target = !slots_[0].data ? 0 : (!slots_[1].data ? 1 : chosen);
  if (target < 0) target = 0;
  Slot& slot = slots_[target];
  if (!slot.counter || slot.counter->feature_count() != d.feature_count() ||
      slot.counter->class_count() != d.class_count()) {
    slot.counter.emplace(d.feature_count(), d.class_count());
  }
  slot.counter->build(d);
  slot.data = d;
  ++stats_.scratch_builds;
  return *slot.counter;
}

}  // namespace opttree
