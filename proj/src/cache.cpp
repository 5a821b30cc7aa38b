#include "odatax/cache.hpp"

#include <chrono>

namespace odatax {

namespace {

void collect_touched(const std::vector<ExpandNode>& expand, const EntitySetDef* set,
                     const EntityModel& model, std::set<std::string>& out) {
    for (const auto& node : expand) {
        const RelationDef* rel = set ? set->find_relation(node.relation) : nullptr;
        if (!rel) continue;
        out.insert(rel->target_set);
        collect_touched(node.children, model.find_set(rel->target_set), model, out);
    }
}

void collect_filter_fields(const FilterPtr& node, std::set<std::string>& out) {
    if (!node) return;
    switch (node->kind) {
    case FilterExpr::Kind::Comparison:
    case FilterExpr::Kind::StringFn:
        for (const auto& segment : node->field.segments) out.insert(segment);
        return;
    default:
        for (const auto& child : node->children) collect_filter_fields(child, out);
        return;
    }
}

double default_clock() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

} // namespace

std::set<std::string> touched_sets(const Query& q, const EntityModel& model) {
    std::set<std::string> out{q.entity_set};
    collect_touched(q.expand, model.find_set(q.entity_set), model, out);
    return out;
}

bool cacheability(const Query& q, std::optional<bool> hint_cacheable, const CachePolicy& policy,
                  const EntityModel& model) {
    if (hint_cacheable && !*hint_cacheable) return false;
    for (const auto& set : touched_sets(q, model)) {
        if (policy.non_cacheable_sets.count(set)) return false;
    }
    std::set<std::string> fields;
    collect_filter_fields(q.filter, fields);
    for (const auto& field : fields) {
        if (policy.non_cacheable_fields.count(field)) return false;
    }
    return true;
}

std::vector<std::pair<std::string, std::string>> response_headers(bool cacheable,
                                                                  const std::string& key,
                                                                  long long ttl_seconds) {
    std::vector<std::pair<std::string, std::string>> headers;
    if (cacheable) {
        headers.emplace_back("X-ODataX-Cacheable", "true");
        headers.emplace_back("X-ODataX-Cache-Key", key);
        headers.emplace_back("Cache-Control", "max-age=" + std::to_string(ttl_seconds));
        headers.emplace_back("Vary", "Accept, Accept-Language");
    } else {
        headers.emplace_back("X-ODataX-Cacheable", "false");
        headers.emplace_back("Cache-Control", "no-store");
    }
    return headers;
}

QueryCache::QueryCache(size_t capacity, ClockFn clock)
    : capacity_(capacity == 0 ? 1 : capacity),
      clock_(clock ? std::move(clock) : ClockFn(default_clock)) {}

std::optional<CacheEntry> QueryCache::lookup(const std::string& key) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        ++misses_;
        return std::nullopt;
    }
    double now = clock_();
    const CacheEntry& entry = it->second.entry;
    if (entry.stored_at + static_cast<double>(entry.ttl_seconds) <= now) {
        erase_locked(key);
        ++misses_;
        return std::nullopt;
    }
    lru_.erase(it->second.lru_pos);
    lru_.push_front(key);
    it->second.lru_pos = lru_.begin();
    ++hits_;
    return entry;
}

void QueryCache::store(CacheEntry entry) {
    std::lock_guard<std::mutex> lock(mutex_);
    entry.stored_at = clock_();
    erase_locked(entry.key);
    while (entries_.size() >= capacity_) evict_locked();
    lru_.push_front(entry.key);
    std::string key = entry.key;
    for (const auto& set : entry.touched_sets) set_index_[set].insert(key);
    entries_[key] = Slot{std::move(entry), lru_.begin()};
}

size_t QueryCache::invalidate_entity_set(const std::string& set_name) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = set_index_.find(set_name);
    if (it == set_index_.end()) return 0;
    // erase_locked edits set_index_, so work from a copy of the key list.
    std::set<std::string> keys = it->second;
    for (const auto& key : keys) erase_locked(key);
    return keys.size();
}

void QueryCache::clear() {
    std::lock_guard<std::mutex> lock(mutex_);
    entries_.clear();
    lru_.clear();
    set_index_.clear();
}

size_t QueryCache::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
}

long long QueryCache::hits() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return hits_;
}

long long QueryCache::misses() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return misses_;
}

long long QueryCache::lookups() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return hits_ + misses_;
}

void QueryCache::evict_locked() {
    if (lru_.empty()) return;
    erase_locked(lru_.back());
}

void QueryCache::erase_locked(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return;
    for (const auto& set : it->second.entry.touched_sets) {
        auto idx = set_index_.find(set);
        if (idx != set_index_.end()) {
            idx->second.erase(key);
            if (idx->second.empty()) set_index_.erase(idx);
        }
    }
    lru_.erase(it->second.lru_pos);
    entries_.erase(it);
}

} // namespace odatax
