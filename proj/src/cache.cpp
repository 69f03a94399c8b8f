#include "opttree/cache.hpp"

#include <algorithm>
#include <limits>

#include "opttree/errors.hpp"

namespace opttree {

namespace {

Count node_cap(int depth) {
  return depth >= 31 ? std::numeric_limits<std::int32_t>::max()
                     : (Count{1} << depth) - 1;
}

}  // namespace

SubtreeCache::SubtreeCache(CacheKind kind, bool probe_buffer)
    : kind_(kind), use_buffer_(probe_buffer) {}

bool SubtreeCache::DatasetKeyEq::operator()(const DatasetKey& a, const DatasetKey& b) const {
  return a.total == b.total && a.hash == b.hash && a.ids == b.ids;
}

bool SubtreeCache::DatasetKeyEq::operator()(const BinaryDataset& a, const DatasetKey& b) const {
  if (a.size() != b.total || a.hash() != b.hash) return false;
  if (static_cast<std::size_t>(a.class_count()) != b.ids.size()) return false;
  for (std::int32_t c = 0; c < a.class_count(); ++c) {
    if (a.ids(c) != b.ids[c]) return false;
  }
  return true;
}

bool SubtreeCache::DatasetKeyEq::operator()(const DatasetKey& a, const BinaryDataset& b) const {
  return operator()(b, a);
}

SubtreeCache::EntrySet* SubtreeCache::buffered(std::size_t table, std::uint64_t hash,
                                               const BinaryDataset& d, const Branch& b) {
  for (int s = 0; s < 2; ++s) {
    BufferSlot& slot = buffer_[s];
    if (!slot.valid || slot.table != table || slot.hash != hash) continue;
    bool match = false;
    if (kind_ == CacheKind::dataset) {
      match = DatasetKeyEq{}(d, *static_cast<const DatasetKey*>(slot.key));
    } else {
      match = b.encoded() == *static_cast<const std::vector<std::int32_t>*>(slot.key);
    }
    if (match) {
      ++buffer_hits_;
      if (s == 1) std::swap(buffer_[0], buffer_[1]);
      return buffer_[0].entries;
    }
  }
  return nullptr;
}

void SubtreeCache::remember(std::size_t table, std::uint64_t hash, const void* key,
                            EntrySet* entries) {
  if (!use_buffer_) return;
  if (buffer_[0].valid && buffer_[0].entries == entries) return;
  buffer_[1] = buffer_[0];
  buffer_[0] = {true, table, hash, key, entries};
}

SubtreeCache::EntrySet* SubtreeCache::find_entries(const BinaryDataset& d, const Branch& b) {
  if (kind_ == CacheKind::dataset) {
    const std::size_t table = static_cast<std::size_t>(d.size());
    const std::uint64_t hash = d.hash();
    if (use_buffer_) {
      if (EntrySet* es = buffered(table, hash, d, b)) return es;
    }
    if (table >= by_size_.size()) return nullptr;
    auto it = by_size_[table].find(d);
    if (it == by_size_[table].end()) return nullptr;
    remember(table, hash, &it->first, &it->second);
    return &it->second;
  }
  const std::size_t table = b.size();
  const std::uint64_t hash = b.hash();
  if (use_buffer_) {
    if (EntrySet* es = buffered(table, hash, d, b)) return es;
  }
  if (table >= by_length_.size()) return nullptr;
  auto it = by_length_[table].find(b.encoded());
  if (it == by_length_[table].end()) return nullptr;
  remember(table, hash, &it->first, &it->second);
  return &it->second;
}

SubtreeCache::EntrySet& SubtreeCache::ensure_entries(const BinaryDataset& d, const Branch& b) {
  if (EntrySet* es = find_entries(d, b)) return *es;
  if (kind_ == CacheKind::dataset) {
    const std::size_t table = static_cast<std::size_t>(d.size());
    if (table >= by_size_.size()) by_size_.resize(table + 1);
    DatasetKey key;
    key.hash = d.hash();
    key.total = d.size();
    key.ids.reserve(d.class_count());
    for (std::int32_t c = 0; c < d.class_count(); ++c) key.ids.push_back(d.ids(c));
    auto [it, inserted] = by_size_[table].emplace(std::move(key), EntrySet{});
    remember(table, it->first.hash, &it->first, &it->second);
    return it->second;
  }
  const std::size_t table = b.size();
  if (table >= by_length_.size()) by_length_.resize(table + 1);
  auto [it, inserted] = by_length_[table].emplace(b.encoded(), EntrySet{});
  remember(table, hash_int_array(it->first), &it->first, &it->second);
  return it->second;
}

CacheEntry* SubtreeCache::find_exact(EntrySet& es, int depth, int nodes) {
  for (CacheEntry& e : es) {
    if (e.depth == depth && e.nodes == nodes) return &e;
  }
  return nullptr;
}

Count SubtreeCache::lower_bound(const BinaryDataset& d, const Branch& b, int depth, int nodes) {
  EntrySet* es = find_entries(d, b);
  if (!es) return 0;
  Count best = 0;
  for (const CacheEntry& e : *es) {
    if (e.depth >= depth && e.nodes >= nodes) best = std::max(best, e.lower_bound);
  }
  return best;
}

std::optional<OptimalRecord> SubtreeCache::optimal(const BinaryDataset& d, const Branch& b,
                                                   int depth, int nodes) {
  EntrySet* es = find_entries(d, b);
  if (!es) return std::nullopt;
  if (CacheEntry* e = find_exact(*es, depth, nodes); e && e->optimal) return e->optimal;
  // A tree proven optimal under larger budgets answers the smaller query when
  // it happens to fit the smaller budgets too.
  for (const CacheEntry& e : *es) {
    if (e.depth >= depth && e.nodes >= nodes && e.optimal &&
        e.optimal->tree_depth <= depth && e.optimal->tree_nodes <= nodes) {
      return e.optimal;
    }
  }
  return std::nullopt;
}

void SubtreeCache::store_optimal(const BinaryDataset& d, const Branch& b, int depth, int nodes,
                                 const OptimalRecord& rec) {
  if (depth < 1 || nodes < 1) throw InternalError("optimal stored under a zero budget");
  if (rec.score < 0 || rec.tree_depth > depth || rec.tree_nodes > nodes) {
    throw InternalError("optimal record does not fit its budgets");
  }
  EntrySet& es = ensure_entries(d, b);
  // The same tree is optimal for every budget pair between what it uses and
  // what was allowed, normalized pairs only (d' <= i <= 2^d' - 1).
  for (int dd = std::max(1, static_cast<int>(rec.tree_depth)); dd <= depth; ++dd) {
    const int lo = std::max({1, static_cast<int>(rec.tree_nodes), dd});
    const int hi = static_cast<int>(std::min<Count>(nodes, node_cap(dd)));
    for (int i = lo; i <= hi; ++i) {
      if (CacheEntry* e = find_exact(es, dd, i)) {
        if (e->optimal) {
          if (e->optimal->score != rec.score) {
            throw InternalError("conflicting optimal scores for one subproblem");
          }
          continue;
        }
        if (e->lower_bound > rec.score) {
          throw InternalError("stored lower bound exceeds proven optimum");
        }
        e->optimal = rec;
        e->lower_bound = rec.score;
      } else {
        es.push_back({dd, i, rec.score, rec});
        ++entries_;
      }
    }
  }
}

void SubtreeCache::store_lower_bound(const BinaryDataset& d, const Branch& b, int depth,
                                     int nodes, Count lb) {
  if (lb <= 0) return;
  if (depth < 1 || nodes < 1) throw InternalError("bound stored under a zero budget");
  EntrySet& es = ensure_entries(d, b);
  if (CacheEntry* e = find_exact(es, depth, nodes)) {
    if (e->optimal && lb > e->optimal->score) {
      throw InternalError("lower bound exceeds proven optimum");
    }
    e->lower_bound = std::max(e->lower_bound, lb);
  } else {
    es.push_back({depth, nodes, lb, std::nullopt});
    ++entries_;
  }
}

void SubtreeCache::transfer(const BinaryDataset& from_d, const Branch& from_b,
                            const BinaryDataset& to_d, const Branch& to_b) {
  if (!datasets_equal(from_d, to_d)) {
    throw InputError("transfer between unequal instance sets");
  }
  EntrySet* from = find_entries(from_d, from_b);
  if (!from) return;
  EntrySet& to = ensure_entries(to_d, to_b);
  if (&to == from) return;
  for (const CacheEntry& e : *from) {
    if (merge_entry(to, e)) ++entries_;
  }
}

bool SubtreeCache::merge_entry(EntrySet& into, const CacheEntry& e) {
  if (CacheEntry* mine = find_exact(into, e.depth, e.nodes)) {
    if (e.optimal && mine->optimal && e.optimal->score != mine->optimal->score) {
      throw InternalError("conflicting optimal scores for one subproblem");
    }
    if (e.optimal && !mine->optimal) {
      if (mine->lower_bound > e.optimal->score) {
        throw InternalError("lower bound exceeds proven optimum");
      }
      mine->optimal = e.optimal;
    }
    mine->lower_bound = std::max(mine->lower_bound, e.lower_bound);
    return false;
  }
  into.push_back(e);
  return true;
}

std::vector<CacheEntry> SubtreeCache::entries_for(const BinaryDataset& d, const Branch& b) {
  EntrySet* es = find_entries(d, b);
  return es ? *es : std::vector<CacheEntry>{};
}

std::size_t SubtreeCache::entry_count() const { return entries_; }

std::size_t SubtreeCache::key_count() const {
  std::size_t n = 0;
  for (const auto& t : by_size_) n += t.size();
  for (const auto& t : by_length_) n += t.size();
  return n;
}

std::vector<SubtreeCache::AuditRow> SubtreeCache::snapshot() const {
  std::vector<AuditRow> rows;
  for (const auto& t : by_size_) {
    for (const auto& [key, es] : t) {
      for (const CacheEntry& e : es) rows.push_back({{}, key.ids, e});
    }
  }
  for (const auto& t : by_length_) {
    for (const auto& [key, es] : t) {
      for (const CacheEntry& e : es) rows.push_back({key, {}, e});
    }
  }
  return rows;
}

}  // namespace opttree
