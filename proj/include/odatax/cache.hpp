#pragma once

#include <functional>
#include <list>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "odatax/ast.hpp"
#include "odatax/model.hpp"

namespace odatax {

struct CacheEntry {
    std::string key; // 64-hex canonical query hash
    std::string body;
    std::string content_type;
    double stored_at = 0.0; // seconds on the injected clock
    long long ttl_seconds = 0;
    std::set<std::string> touched_sets; // primary set plus every expand target
};

struct CachePolicy {
    long long default_ttl_seconds = 300;
    std::set<std::string> non_cacheable_sets;
    std::set<std::string> non_cacheable_fields;
};

// A query may be cached unless it touches an excluded set, filters on a
// user-specific field, or a named-query definition says otherwise.
bool cacheability(const Query& q, std::optional<bool> hint_cacheable, const CachePolicy& policy,
                  const EntityModel& model);

// The sets a query reads: its entity set plus all expand targets,
// recursively. Doubles as the invalidation index for stored entries.
std::set<std::string> touched_sets(const Query& q, const EntityModel& model);

// Exact response header block. Cacheable responses advertise the key and
// TTL; non-cacheable responses forbid storage outright.
std::vector<std::pair<std::string, std::string>> response_headers(bool cacheable,
                                                                  const std::string& key,
                                                                  long long ttl_seconds);

// Thread-safe LRU cache with per-entry TTL and an entity-set index for
// mutation invalidation. All operations are linearizable under one lock;
// the clock is injected so expiry is testable.
class QueryCache {
public:
    using ClockFn = std::function<double()>; // seconds, monotonic

    explicit QueryCache(size_t capacity = 10000, ClockFn clock = {});

    std::optional<CacheEntry> lookup(const std::string& key);
    void store(CacheEntry entry);
    size_t invalidate_entity_set(const std::string& set_name);
    void clear();

    size_t size() const;
    long long hits() const;
    long long misses() const;
    long long lookups() const;

private:
    void evict_locked();
    void erase_locked(const std::string& key);

    struct Slot {
        CacheEntry entry;
        std::list<std::string>::iterator lru_pos;
    };

    size_t capacity_;
    ClockFn clock_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, Slot> entries_;
    std::list<std::string> lru_; // front = most recent
    std::unordered_map<std::string, std::set<std::string>> set_index_; // set -> keys
    long long hits_ = 0;
    long long misses_ = 0;
};

} // namespace odatax
