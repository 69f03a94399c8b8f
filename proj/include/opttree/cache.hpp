#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "opttree/dataset.hpp"

namespace opttree {

enum class CacheKind { dataset, branch };

// The root of an optimal subtree: its split feature (or -1 for a bare leaf),
// the node budgets handed to each child, and what the subtree actually used.
// Children are not stored; they are looked up (or recomputed, for two-level
// subtrees) when the final tree is materialized.
struct OptimalRecord {
  std::int32_t feature = -1;
  std::int32_t left_budget = 0;
  std::int32_t right_budget = 0;
  Count score = 0;
  std::int32_t tree_nodes = 0;
  std::int32_t tree_depth = 0;
};

struct CacheEntry {
  std::int32_t depth = 0;
  std::int32_t nodes = 0;
  Count lower_bound = 0;
  std::optional<OptimalRecord> optimal;
};

// Memo table for subproblems, keyed either by the branch (path literals) or
// by the instance set itself. Dataset keying is the stronger dedup: different
// paths reaching the same instances share one entry set. Entries only ever
// grow; nothing is evicted.
class SubtreeCache {
 public:
  explicit SubtreeCache(CacheKind kind, bool probe_buffer = true);

  CacheKind kind() const { return kind_; }

  // Strongest known lower bound for the subproblem at exactly (depth, nodes),
  // taking entries whose budgets dominate. Zero when nothing is known.
  Count lower_bound(const BinaryDataset& d, const Branch& b, int depth, int nodes);

  // Optimal record valid for (depth, nodes) if one is known: the exact entry,
  // or a dominating entry whose stored tree fits the smaller budget too.
  std::optional<OptimalRecord> optimal(const BinaryDataset& d, const Branch& b, int depth,
                                       int nodes);

  // Records an optimum proven for (depth, nodes). Budget pairs between what
  // the tree uses and what was allowed share the same optimum, so all of them
  // are populated. Conflicting optima for the same budgets signal a bug.
  void store_optimal(const BinaryDataset& d, const Branch& b, int depth, int nodes,
                     const OptimalRecord& rec);

  // Raises the lower bound for exactly (depth, nodes); never lowers it.
  void store_lower_bound(const BinaryDataset& d, const Branch& b, int depth, int nodes, Count lb);

  // Copies everything known about `from` onto `to`. The two keys must
  // describe equal instance sets.
  void transfer(const BinaryDataset& from_d, const Branch& from_b, const BinaryDataset& to_d,
                const Branch& to_b);

  std::size_t entry_count() const;
  std::size_t key_count() const;
  std::int64_t probe_buffer_hits() const { return buffer_hits_; }

  // Copy of everything cached for one subproblem key.
  std::vector<CacheEntry> entries_for(const BinaryDataset& d, const Branch& b);

  // Every entry with enough key material to rebuild its subproblem.
  struct AuditRow {
    std::vector<std::int32_t> branch_literals;            // branch mode
    std::vector<std::vector<std::int32_t>> ids_per_class;  // dataset mode
    CacheEntry entry;
  };
  std::vector<AuditRow> snapshot() const;

 private:
  using EntrySet = std::vector<CacheEntry>;

  struct DatasetKey {
    std::uint64_t hash = 0;
    Count total = 0;
    std::vector<std::vector<std::int32_t>> ids;
  };
  struct DatasetKeyHash {
    using is_transparent = void;
    std::size_t operator()(const DatasetKey& k) const { return k.hash; }
    std::size_t operator()(const BinaryDataset& d) const { return d.hash(); }
  };
  struct DatasetKeyEq {
    using is_transparent = void;
    bool operator()(const DatasetKey& a, const DatasetKey& b) const;
    bool operator()(const BinaryDataset& a, const DatasetKey& b) const;
    bool operator()(const DatasetKey& a, const BinaryDataset& b) const;
  };
  struct BranchKeyHash {
    std::size_t operator()(const std::vector<std::int32_t>& v) const { return hash_int_array(v); }
  };

  using DatasetTable = std::unordered_map<DatasetKey, EntrySet, DatasetKeyHash, DatasetKeyEq>;
  using BranchTable =
      std::unordered_map<std::vector<std::int32_t>, EntrySet, BranchKeyHash>;

  // Last two resolved keys. Consecutive operations on one subproblem (bound
  // probe, optimum probe, store) skip the table walk. Entry sets live in
  // node-based maps, so the pointers stay valid across rehashes.
  struct BufferSlot {
    bool valid = false;
    std::size_t table = 0;
    std::uint64_t hash = 0;
    const void* key = nullptr;
    EntrySet* entries = nullptr;
  };

  EntrySet* find_entries(const BinaryDataset& d, const Branch& b);
  EntrySet& ensure_entries(const BinaryDataset& d, const Branch& b);
  EntrySet* buffered(std::size_t table, std::uint64_t hash, const BinaryDataset& d,
                     const Branch& b);
  void remember(std::size_t table, std::uint64_t hash, const void* key, EntrySet* entries);
  static bool merge_entry(EntrySet& into, const CacheEntry& e);
  static CacheEntry* find_exact(EntrySet& es, int depth, int nodes);

  CacheKind kind_;
  bool use_buffer_;
  std::vector<DatasetTable> by_size_;    // dataset mode, indexed by instance count
  std::vector<BranchTable> by_length_;   // branch mode, indexed by literal count
  BufferSlot buffer_[2];
  std::size_t entries_ = 0;
  std::int64_t buffer_hits_ = 0;
};

}  // namespace opttree
