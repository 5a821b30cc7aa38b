#include "odatax/gateway.hpp"

#include <algorithm>
#include <chrono>

#include "odatax/datagen.hpp"
#include "odatax/errors.hpp"
#include "odatax/serialize.hpp"

namespace odatax {

namespace {

const std::set<std::string> kReservedPlainNames = {"filter", "sort", "select",
                                                   "top",    "skip", "query"};

bool is_simplified_name(const std::string& name) {
    return name == "filter" || name == "sort" || name == "select" || name == "top" ||
           name == "skip";
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

// Splits a raw query string on '&' and the first '=' of each part, then
// percent-decodes names and values separately ('&' and '=' inside values
// must arrive encoded, as in any URL).
std::vector<std::pair<std::string, std::string>> decode_params(const std::string& raw) {
    std::vector<std::pair<std::string, std::string>> out;
    size_t start = 0;
    while (start <= raw.size()) {
        size_t amp = raw.find('&', start);
        std::string part = raw.substr(start, amp == std::string::npos ? std::string::npos
                                                                      : amp - start);
        if (!part.empty()) {
            size_t eq = part.find('=');
            if (eq == std::string::npos) {
                out.emplace_back(url_decode(part), "");
            } else {
                out.emplace_back(url_decode(part.substr(0, eq)), url_decode(part.substr(eq + 1)));
            }
        }
        if (amp == std::string::npos) break;
        start = amp + 1;
    }
    return out;
}

nlohmann::json error_body(const std::string& code, const std::string& message) {
    return nlohmann::json{{"error", {{"code", code}, {"message", message}}}};
}

HttpResponse json_response(int status, const nlohmann::json& body) {
    HttpResponse resp;
    resp.status = status;
    resp.body = body.dump();
    return resp;
}

int status_for(const Error& e) {
    const std::string& code = e.code();
    if (code == "UnknownEntitySet" || code == "UnknownNamedQuery" || code == "NotFound") {
        return 404;
    }
    return 400;
}

HttpResponse error_response(const Error& e) {
    nlohmann::json body = error_body(e.code(), e.what());
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
        body["error"]["position"] = pe->position();
        if (!pe->expected().empty()) body["error"]["expected"] = pe->expected();
    }
    return json_response(status_for(e), body);
}

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Rows in a backend response body, for the estimated-vs-actual log. Mock
// bodies are {"value": [...]}; anything else yields -1 (unknown).
long long count_rows(const std::string& body) {
    auto doc = nlohmann::json::parse(body, nullptr, false);
    if (doc.is_discarded()) return -1;
    if (doc.is_array()) return static_cast<long long>(doc.size());
    if (doc.is_object() && doc.contains("value") && doc.at("value").is_array()) {
        return static_cast<long long>(doc.at("value").size());
    }
    return -1;
}

} // namespace

std::string url_decode(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '+') {
            out += ' ';
        } else if (c == '%') {
            if (i + 2 >= s.size()) {
                throw ParseError(s, i, "two hex digits", "truncated percent escape");
            }
            int hi = hex_digit(s[i + 1]);
            int lo = hex_digit(s[i + 2]);
            if (hi < 0 || lo < 0) {
                throw ParseError(s, i, "two hex digits", "malformed percent escape");
            }
            out += static_cast<char>(hi * 16 + lo);
            i += 2;
        } else {
            out += c;
        }
    }
    return out;
}

std::string encode_query_values(const std::string& raw_query) {
    std::string out;
    out.reserve(raw_query.size());
    bool in_value = false;
    for (char c : raw_query) {
        if (!in_value) {
            if (c == '=') in_value = true;
            out += c;
            continue;
        }
        if (c == '&') {
            in_value = false;
            out += c;
            continue;
        }
        switch (c) {
        case ' ': out += "%20"; break;
        case '%': out += "%25"; break;
        case '+': out += "%2B"; break;
        case '#': out += "%23"; break;
        default: out += c; break;
        }
    }
    return out;
}

Query translate_fragments(const std::string& entity_set, const std::string& raw_query,
                          const EntityModel& model, std::vector<std::string>* warnings) {
    auto options = split_query_options(raw_query);
    std::vector<std::pair<std::string, std::string>> traditional;
    std::vector<std::pair<std::string, std::string>> simplified;
    for (const auto& [name, value] : options) {
        if (!name.empty() && name[0] == '$') {
            traditional.emplace_back(name, value);
        } else if (is_simplified_name(name)) {
            simplified.emplace_back(name, value);
        }
    }
    Query trad = parse_traditional(entity_set, traditional, &model);
    Query simp = parse_simplified(entity_set, simplified, &model);
    MergeResult merged = merge(trad, simp);
    if (warnings) {
        warnings->insert(warnings->end(), merged.warnings.begin(), merged.warnings.end());
    }
    return merged.query;
}

std::string translate_query(const std::string& entity_set, const std::string& raw_query,
                            const EntityModel& model) {
    Query q = translate_fragments(entity_set, raw_query, model, nullptr);
    return serialize_odata(q);
}

Gateway::Gateway(GatewayConfig config, QueryCache::ClockFn clock)
    : config_(std::move(config)), cache_(config_.cache_capacity, std::move(clock)) {
    if (config_.backend_mode == GatewayConfig::BackendMode::Mock) {
        std::string generated = config_.generate_dataset_name;
        std::vector<std::string> files;
        for (const auto& entry : config_.data_files) {
            if (entry.rfind("generate:", 0) == 0) {
                generated = entry.substr(9);
            } else {
                files.push_back(entry);
            }
        }
        if (!generated.empty()) {
            GeneratedDataset dataset = generate_dataset(generated);
            store_ = make_store(dataset);
            model_ = dataset.model;
            config_.generate_dataset_name = generated;
        } else {
            if (config_.model_file.empty()) {
                throw Error("InvalidConfig", "mock mode needs a model file or a dataset name");
            }
            store_ = EntityStore::load_dataset(config_.model_file, files);
            model_ = store_->model();
        }
    } else {
        if (config_.model_file.empty()) {
            throw Error("InvalidConfig", "proxy mode needs a model file for query parsing");
        }
        model_ = EntityModel::load_file(config_.model_file);
    }

    if (!config_.registry_file.empty()) {
        registry_.load_registry(config_.registry_file);
    }

    if (config_.stats_file.empty() || config_.stats_file == "rebuild-on-start") {
        if (store_) {
            stats_ = std::make_shared<const StatisticsCatalog>(build_stats(*store_));
        } else {
            stats_ = std::make_shared<const StatisticsCatalog>();
        }
    } else {
        stats_ = std::make_shared<const StatisticsCatalog>(
            StatisticsCatalog::load_file(config_.stats_file));
    }

    if (!config_.trace_file.empty()) {
        auto stream = std::make_shared<std::ofstream>(config_.trace_file, std::ios::app);
        if (!*stream) {
            throw Error("InvalidConfig", "cannot open trace file: " + config_.trace_file);
        }
        trace_stream_ = stream;
    }
}

std::shared_ptr<const StatisticsCatalog> Gateway::stats() const {
    std::lock_guard<std::mutex> lock(stats_mutex_);
    return stats_;
}

void Gateway::rebuild_stats() {
    if (!store_) {
        throw Error("NoDataset", "statistics rebuild needs the built-in dataset backend");
    }
    auto fresh = std::make_shared<const StatisticsCatalog>(build_stats(*store_));
    std::lock_guard<std::mutex> lock(stats_mutex_);
    stats_ = std::move(fresh);
}

ResolvedRead Gateway::resolve_read(const std::string& entity_set,
                                   const std::string& raw_query) const {
    ResolvedRead out;
    auto params = decode_params(raw_query);

    std::vector<std::pair<std::string, std::string>> traditional;
    std::vector<std::pair<std::string, std::string>> simplified;
    std::map<std::string, std::string> extras; // non-reserved plain params
    std::optional<std::string> named;
    for (const auto& [name, value] : params) {
        if (!name.empty() && name[0] == '$') {
            traditional.emplace_back(name, value);
        } else if (name == "query") {
            if (named) throw duplicate_option("query");
            named = value;
        } else if (is_simplified_name(name)) {
            simplified.emplace_back(name, value);
        } else {
            extras.emplace(name, value);
        }
    }

    std::optional<bool> cacheable_hint;
    Query trad;
    if (named && config_.features.named_queries) {
        if (!traditional.empty()) {
            throw Error("InvalidQuery",
                        "'$'-prefixed options cannot be combined with a named query; put "
                        "everything in the template or use simplified parameters");
        }
        ExpandedQuery expanded = registry_.expand(*named, extras, entity_set, &model_);
        trad = expanded.query;
        cacheable_hint = expanded.cacheable;
        out.cost_limit = expanded.cost_limit;
        out.used_named_query = true;
        extras.clear(); // consumed as template arguments
    } else {
        if (named) {
            out.warnings.push_back("parameter 'query' ignored: named queries are disabled");
        }
        trad = parse_traditional(entity_set, traditional, &model_);
    }
    for (const auto& [name, value] : extras) {
        out.warnings.push_back("parameter '" + name + "' ignored: not a recognized option");
    }

    Query simp;
    if (config_.features.simplified_syntax) {
        simp = parse_simplified(entity_set, simplified, &model_);
    } else {
        simp.entity_set = entity_set;
        for (const auto& [name, value] : simplified) {
            out.warnings.push_back("parameter '" + name +
                                   "' ignored: simplified syntax is disabled");
        }
    }

    MergeResult merged = merge(trad, simp);
    out.merged = merged.query;
    out.warnings.insert(out.warnings.end(), merged.warnings.begin(), merged.warnings.end());
    out.canonical = canonicalize(out.merged);
    out.forward_query = serialize_odata(out.canonical);
    out.cache_key = cache_key(out.canonical);
    out.cacheable = cacheability(out.canonical, cacheable_hint, config_.cache_policy, model_);
    return out;
}

HttpResponse Gateway::handle(const HttpRequest& request) {
    std::string path = request.target;
    std::string raw_query;
    size_t qmark = path.find('?');
    if (qmark != std::string::npos) {
        raw_query = path.substr(qmark + 1);
        path = path.substr(0, qmark);
    }

    try {
        if (path.rfind("/odatax-admin/", 0) == 0) {
            return handle_admin(request.method, path.substr(14));
        }
        if (path.rfind("/odatax/", 0) != 0) {
            return json_response(404, error_body("NotFound", "unknown path: " + path));
        }
        requests_.fetch_add(1);
        std::string rest = path.substr(8);
        std::string set_name;
        std::optional<long long> id;
        size_t slash = rest.find('/');
        if (slash == std::string::npos) {
            set_name = url_decode(rest);
        } else {
            set_name = url_decode(rest.substr(0, slash));
            std::string id_text = rest.substr(slash + 1);
            if (id_text.empty() || id_text.find('/') != std::string::npos ||
                id_text.find_first_not_of("0123456789") != std::string::npos) {
                return json_response(404, error_body("NotFound", "unknown path: " + path));
            }
            id = std::stoll(id_text);
        }
        if (set_name.empty()) {
            return json_response(404, error_body("NotFound", "entity set missing from path"));
        }

        if (request.method == "GET") {
            if (id) {
                return json_response(
                    404, error_body("NotFound", "reads address the entity set, not an id"));
            }
            return handle_read(set_name, raw_query);
        }
        if (request.method == "POST" || request.method == "PUT" || request.method == "PATCH" ||
            request.method == "DELETE") {
            return handle_write(request.method, set_name, id, raw_query, request.body);
        }
        return json_response(405, error_body("MethodNotAllowed",
                                             "unsupported method: " + request.method));
    } catch (const Error& e) {
        return error_response(e);
    } catch (const std::exception& e) {
        return json_response(500, error_body("InternalError", e.what()));
    }
}

HttpResponse Gateway::handle_read(const std::string& entity_set, const std::string& raw_query) {
    long long request_id = trace_counter_.fetch_add(1) + 1;
    nlohmann::json line;
    line["requestId"] = request_id;
    line["entitySet"] = entity_set;
    line["params"] = raw_query;

    ResolvedRead plan;
    try {
        plan = resolve_read(entity_set, raw_query);
    } catch (const Error& e) {
        line["decision"] = "error";
        line["error"] = e.code();
        trace(line);
        return error_response(e);
    }
    line["resolved"] = plan.forward_query;
    line["warnings"] = plan.warnings;

    bool cache_on = config_.features.cache;
    bool use_cache = cache_on && plan.cacheable;
    line["cacheOutcome"] = use_cache ? "miss" : "bypass";

    if (use_cache) {
        auto entry = cache_.lookup(plan.cache_key);
        if (entry) {
            cache_hits_.fetch_add(1);
            HttpResponse resp;
            resp.status = 200;
            resp.body = entry->body;
            resp.content_type = entry->content_type;
            resp.headers = response_headers(true, plan.cache_key, entry->ttl_seconds);
            resp.headers.emplace_back("X-ODataX-Cache", "hit");
            line["cacheOutcome"] = "hit";
            line["costEstimate"] = nullptr; // cost check bypassed on hits
            line["decision"] = "served-cache";
            trace(line);
            return resp;
        }
    }

    std::optional<CostEstimate> est;
    if (config_.features.cost_check) {
        double threshold = plan.cost_limit.value_or(config_.cost_threshold);
        auto catalog = stats();
        est = estimate(plan.canonical, *catalog, config_.weights, threshold);
        line["costEstimate"] = est->total;
        CostDecision decision = check(*est);
        if (!decision.accepted) {
            rejections_.fetch_add(1);
            line["decision"] = "rejected-cost";
            trace(line);
            HttpResponse resp;
            resp.status = 400;
            resp.body = decision.payload.dump();
            return resp;
        }
    } else {
        line["costEstimate"] = nullptr;
    }

    double started = now_ms();
    HttpResponse backend = backend_read(plan);
    line["upstreamLatencyMs"] = now_ms() - started;
    if (backend.status >= 400) {
        line["decision"] = "error";
        trace(line);
        return backend;
    }

    if (est) {
        record_estimate(plan.forward_query, est->projected_rows, count_rows(backend.body));
    }

    HttpResponse resp;
    resp.status = 200;
    resp.body = backend.body;
    resp.content_type = backend.content_type;
    if (use_cache) {
        cache_misses_.fetch_add(1);
        CacheEntry entry;
        entry.key = plan.cache_key;
        entry.body = resp.body;
        entry.content_type = resp.content_type;
        entry.ttl_seconds = config_.cache_policy.default_ttl_seconds;
        entry.touched_sets = touched_sets(plan.canonical, model_);
        cache_.store(std::move(entry));
        resp.headers = response_headers(true, plan.cache_key,
                                        config_.cache_policy.default_ttl_seconds);
        resp.headers.emplace_back("X-ODataX-Cache", "miss");
    } else if (cache_on) {
        cache_bypass_.fetch_add(1);
        resp.headers = response_headers(false, plan.cache_key, 0);
        resp.headers.emplace_back("X-ODataX-Cache", "miss");
    }
    // Cache feature off: no cache headers at all; the response is plain.
    line["decision"] = "forwarded";
    trace(line);
    return resp;
}

HttpResponse Gateway::backend_read(const ResolvedRead& plan) {
    backend_calls_.fetch_add(1);
    if (config_.backend_mode == GatewayConfig::BackendMode::Mock) {
        auto state = store_->snapshot();
        nlohmann::json rows = evaluate(plan.canonical, *state, model_);
        HttpResponse resp;
        resp.status = 200;
        resp.body = nlohmann::json{{"value", rows}}.dump();
        return resp;
    }
    if (!forward_fn_) {
        return json_response(502, error_body("UpstreamFailure", "no upstream transport configured"));
    }
    HttpRequest fwd;
    fwd.method = "GET";
    fwd.target = "/" + plan.canonical.entity_set;
    if (!plan.forward_query.empty()) {
        fwd.target += "?" + encode_query_values(plan.forward_query);
    }
    try {
        HttpResponse resp = forward_fn_(fwd);
        if (resp.status <= 0) {
            return json_response(502, error_body("UpstreamFailure", "upstream unreachable"));
        }
        return resp;
    } catch (const std::exception& e) {
        return json_response(502, error_body("UpstreamFailure", e.what()));
    }
}

HttpResponse Gateway::handle_write(const std::string& method, const std::string& entity_set,
                                   std::optional<long long> id, const std::string& raw_query,
                                   const std::string& body) {
    (void)raw_query;
    if (!model_.find_set(entity_set)) {
        // Unknown set: nothing it could have touched, so no invalidation.
        return json_response(404, error_body("UnknownEntitySet",
                                             "unknown entity set: " + entity_set));
    }

    HttpResponse resp;
    if (config_.backend_mode == GatewayConfig::BackendMode::Proxy) {
        if (!forward_fn_) {
            resp = json_response(502,
                                 error_body("UpstreamFailure", "no upstream transport configured"));
        } else {
            HttpRequest fwd;
            fwd.method = method;
            fwd.target = "/" + entity_set + (id ? "/" + std::to_string(*id) : "");
            fwd.body = body;
            backend_calls_.fetch_add(1);
            try {
                resp = forward_fn_(fwd);
                if (resp.status <= 0) {
                    resp = json_response(502, error_body("UpstreamFailure", "upstream unreachable"));
                }
            } catch (const std::exception& e) {
                resp = json_response(502, error_body("UpstreamFailure", e.what()));
            }
        }
    } else {
        try {
            if (method == "POST") {
                if (id) throw Error("InvalidQuery", "POST targets the collection, not an id");
                nlohmann::json record = nlohmann::json::parse(body.empty() ? "{}" : body);
                resp = json_response(201, store_->insert(entity_set, record));
            } else if (method == "PATCH") {
                if (!id) throw Error("InvalidQuery", "PATCH needs an entity id in the path");
                nlohmann::json fields = nlohmann::json::parse(body.empty() ? "{}" : body);
                resp = json_response(200, store_->patch(entity_set, *id, fields));
            } else if (method == "PUT") {
                if (!id) throw Error("InvalidQuery", "PUT needs an entity id in the path");
                nlohmann::json record = nlohmann::json::parse(body.empty() ? "{}" : body);
                resp = json_response(200, store_->put(entity_set, *id, record));
            } else { // DELETE
                if (!id) throw Error("InvalidQuery", "DELETE needs an entity id in the path");
                store_->remove(entity_set, *id);
                resp.status = 204;
                resp.body.clear();
            }
        } catch (const Error& e) {
            resp = error_response(e);
        } catch (const nlohmann::json::exception& e) {
            resp = json_response(400, error_body("InvalidBody", e.what()));
        }
    }

    // The write may have landed even when the response is an error, so the
    // set's cached entries are dropped either way.
    size_t invalidated = cache_.invalidate_entity_set(entity_set);

    nlohmann::json line;
    line["requestId"] = trace_counter_.fetch_add(1) + 1;
    line["entitySet"] = entity_set;
    line["method"] = method;
    line["decision"] = resp.status < 400 ? "forwarded" : "error";
    line["invalidated"] = invalidated;
    trace(line);
    return resp;
}

HttpResponse Gateway::handle_admin(const std::string& method, const std::string& path) {
    if (path == "stats" && method == "GET") {
        auto catalog = stats();
        nlohmann::json sets = nlohmann::json::object();
        for (const auto& [name, set] : catalog->sets) {
            nlohmann::json relations = nlohmann::json::object();
            for (const auto& [rel, rs] : set.relations) {
                relations[rel] = {{"avgCardinality", rs.avg_cardinality},
                                  {"targetSet", rs.target_set}};
            }
            nlohmann::json numeric = nlohmann::json::array();
            for (const auto& [col, unused] : set.numeric_columns) numeric.push_back(col);
            nlohmann::json strings = nlohmann::json::array();
            for (const auto& [col, unused] : set.string_columns) strings.push_back(col);
            sets[name] = {{"rowCount", set.row_count},
                          {"numericColumns", numeric},
                          {"stringColumns", strings},
                          {"relations", relations}};
        }
        return json_response(200, nlohmann::json{{"sets", sets}});
    }
    if (path == "stats/rebuild" && method == "POST") {
        bool expected = false;
        if (!rebuild_running_.compare_exchange_strong(expected, true)) {
            return json_response(409, error_body("RebuildInProgress",
                                                 "a statistics rebuild is already running"));
        }
        try {
            rebuild_stats();
        } catch (const Error& e) {
            rebuild_running_.store(false);
            return error_response(e);
        }
        rebuild_running_.store(false);
        auto catalog = stats();
        return json_response(200, nlohmann::json{{"rebuilt", true},
                                                 {"sets", catalog->sets.size()}});
    }
    if (path == "queries" && method == "GET") {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& def : registry_.list()) out.push_back(def.to_json());
        return json_response(200, out);
    }
    if (path == "metrics" && method == "GET") {
        return json_response(200, metrics());
    }
    return json_response(404, error_body("NotFound", "unknown admin endpoint: " + path));
}

nlohmann::json Gateway::metrics() const {
    long long hits = cache_hits_.load();
    long long misses = cache_misses_.load();
    long long looked = hits + misses;
    nlohmann::json out;
    out["requests"] = requests_.load();
    out["cacheHits"] = hits;
    out["cacheMisses"] = misses;
    out["cacheBypass"] = cache_bypass_.load();
    out["hitRate"] = looked > 0 ? static_cast<double>(hits) / static_cast<double>(looked) : 0.0;
    out["rejections"] = rejections_.load();
    out["backendCalls"] = backend_calls_.load();
    out["cacheSize"] = cache_.size();
    {
        std::lock_guard<std::mutex> lock(estimate_log_mutex_);
        out["estimateLog"] = nlohmann::json(estimate_log_);
    }
    return out;
}

void Gateway::record_estimate(const std::string& forward_query, long long estimated,
                              long long actual) {
    std::lock_guard<std::mutex> lock(estimate_log_mutex_);
    estimate_log_.push_back(
        {{"query", forward_query}, {"estimated", estimated}, {"actualRows", actual}});
    while (estimate_log_.size() > 100) estimate_log_.pop_front();
}

void Gateway::trace(const nlohmann::json& line) {
    if (trace_fn_) trace_fn_(line);
    if (trace_stream_) {
        std::lock_guard<std::mutex> lock(trace_mutex_);
        *trace_stream_ << line.dump() << "\n";
        trace_stream_->flush();
    }
}

} // namespace odatax
