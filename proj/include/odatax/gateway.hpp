#pragma once

#include <atomic>
#include <deque>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "odatax/cache.hpp"
#include "odatax/canonical.hpp"
#include "odatax/config.hpp"
#include "odatax/cost.hpp"
#include "odatax/evaluate.hpp"
#include "odatax/named_queries.hpp"
#include "odatax/parser_simplified.hpp"
#include "odatax/parser_traditional.hpp"
#include "odatax/stats.hpp"
#include "odatax/store.hpp"

namespace odatax {

struct HttpRequest {
    std::string method = "GET";
    std::string target; // raw path, optionally with ?query
    std::string body;
    std::string content_type = "application/json";
    std::vector<std::pair<std::string, std::string>> headers;
};

struct HttpResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
    std::vector<std::pair<std::string, std::string>> headers;
};

// Percent-decodes one URL component; '+' becomes a space. Malformed escapes
// raise InvalidQuery.
std::string url_decode(const std::string& s);

// Re-encodes a serialized query string for forwarding: values get spaces and
// the few separator-colliding bytes escaped, names and structure stay as-is.
std::string encode_query_values(const std::string& raw_query);

// How a read request resolves before any cache or cost work: the merged
// query, its canonical twin, the forwardable serialization and cache key,
// and the execution hints that apply. Each dialect's own option order
// survives into `merged`; only a filter drawn from both dialects at once is
// conjoined in canonical order.
struct ResolvedRead {
    Query merged;
    Query canonical;
    std::string forward_query; // canonical serialization, unencoded
    std::string cache_key;
    bool cacheable = true;
    std::optional<double> cost_limit;
    std::vector<std::string> warnings;
    bool used_named_query = false;
};

// Pure translation helper shared by the CLI and the request pipeline:
// parses traditional and simplified parameters from a raw (already decoded
// where needed) query string and merges them. No named-query expansion.
Query translate_fragments(const std::string& entity_set, const std::string& raw_query,
                          const EntityModel& model, std::vector<std::string>* warnings);

// Serialized traditional form of a query string, for the `translate`
// command. Keeps the author's condition order.
std::string translate_query(const std::string& entity_set, const std::string& raw_query,
                            const EntityModel& model);

// The middleware. Owns cache, registry, statistics and (in mock mode) the
// entity store; handle() implements the full read/write/admin HTTP surface
// without binding a socket, so tests and the benchmark drive it in-process.
class Gateway {
public:
    using ForwardFn = std::function<HttpResponse(const HttpRequest&)>;
    using TraceFn = std::function<void(const nlohmann::json&)>;

    explicit Gateway(GatewayConfig config, QueryCache::ClockFn clock = {});

    HttpResponse handle(const HttpRequest& request);

    // Pipeline steps 1-6 for one read request; exposed for the conformance
    // runner and tests.
    ResolvedRead resolve_read(const std::string& entity_set,
                              const std::string& raw_query) const;

    void set_forward_fn(ForwardFn fn) { forward_fn_ = std::move(fn); }
    void set_trace_fn(TraceFn fn) { trace_fn_ = std::move(fn); }

    const EntityModel& model() const { return model_; }
    const GatewayConfig& config() const { return config_; }
    QueryRegistry& registry() { return registry_; }
    EntityStore* store() { return store_.get(); }
    std::shared_ptr<const StatisticsCatalog> stats() const;
    QueryCache& cache() { return cache_; }

    void rebuild_stats();

    long long backend_calls() const { return backend_calls_.load(); }
    long long rejections() const { return rejections_.load(); }
    long long requests() const { return requests_.load(); }
    nlohmann::json metrics() const;

private:
    HttpResponse handle_read(const std::string& entity_set, const std::string& raw_query);
    HttpResponse handle_write(const std::string& method, const std::string& entity_set,
                              std::optional<long long> id, const std::string& raw_query,
                              const std::string& body);
    HttpResponse handle_admin(const std::string& method, const std::string& path);
    HttpResponse backend_read(const ResolvedRead& plan);
    void record_estimate(const std::string& forward_query, long long estimated,
                         long long actual);
    void trace(const nlohmann::json& line);

    GatewayConfig config_;
    EntityModel model_;
    std::shared_ptr<EntityStore> store_; // mock mode only
    QueryRegistry registry_;
    QueryCache cache_;
    ForwardFn forward_fn_;
    TraceFn trace_fn_;

    mutable std::mutex stats_mutex_;
    std::shared_ptr<const StatisticsCatalog> stats_;
    std::atomic<bool> rebuild_running_{false};

    std::atomic<long long> backend_calls_{0};
    std::atomic<long long> rejections_{0};
    std::atomic<long long> requests_{0};
    std::atomic<long long> trace_counter_{0};
    // Gateway-level cache accounting: a miss is only counted once the cost
    // check accepts, so hits + misses always equals the accepted reads.
    std::atomic<long long> cache_hits_{0};
    std::atomic<long long> cache_misses_{0};
    std::atomic<long long> cache_bypass_{0};

    mutable std::mutex trace_mutex_;
    std::shared_ptr<std::ofstream> trace_stream_;

    mutable std::mutex estimate_log_mutex_;
    std::deque<nlohmann::json> estimate_log_; // last 100 estimated-vs-actual pairs
};

} // namespace odatax
