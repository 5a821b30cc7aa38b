#include "odatax/config.hpp"

#include <fstream>

#include "odatax/errors.hpp"

namespace odatax {

namespace {

std::set<std::string> string_set(const nlohmann::json& arr) {
    std::set<std::string> out;
    for (const auto& item : arr) out.insert(item.get<std::string>());
    return out;
}

} // namespace

GatewayConfig GatewayConfig::from_json(const nlohmann::json& doc) {
    GatewayConfig cfg;
    if (doc.contains("listen")) cfg.listen = doc.at("listen").get<std::string>();

    bool has_upstream = doc.contains("upstream") && !doc.at("upstream").get<std::string>().empty();
    bool has_mock = doc.contains("model") || doc.contains("data") || doc.contains("dataset");
    if (has_upstream && has_mock) {
        throw Error("InvalidConfig", "choose either an upstream URL or a mock dataset, not both");
    }
    if (has_upstream) {
        cfg.backend_mode = BackendMode::Proxy;
        cfg.upstream = doc.at("upstream").get<std::string>();
    } else {
        cfg.backend_mode = BackendMode::Mock;
        if (doc.contains("model")) cfg.model_file = doc.at("model").get<std::string>();
        if (doc.contains("data")) {
            for (const auto& item : doc.at("data")) cfg.data_files.push_back(item.get<std::string>());
        }
        if (doc.contains("dataset")) {
            cfg.generate_dataset_name = doc.at("dataset").get<std::string>();
        }
    }

    if (doc.contains("costThreshold")) {
        cfg.cost_threshold = doc.at("costThreshold").get<double>();
        if (!(cfg.cost_threshold > 0)) {
            throw Error("InvalidConfig", "costThreshold must be positive");
        }
    }
    if (doc.contains("weights")) {
        const auto& w = doc.at("weights");
        if (w.contains("filter")) cfg.weights.w_filter = w.at("filter").get<double>();
        if (w.contains("expand")) cfg.weights.w_expand = w.at("expand").get<double>();
        if (w.contains("size")) cfg.weights.w_size = w.at("size").get<double>();
    }
    if (doc.contains("cache")) {
        const auto& c = doc.at("cache");
        if (c.contains("defaultTtlSeconds")) {
            cfg.cache_policy.default_ttl_seconds = c.at("defaultTtlSeconds").get<long long>();
        }
        if (c.contains("nonCacheableSets")) {
            cfg.cache_policy.non_cacheable_sets = string_set(c.at("nonCacheableSets"));
        }
        if (c.contains("nonCacheableFields")) {
            cfg.cache_policy.non_cacheable_fields = string_set(c.at("nonCacheableFields"));
        }
        if (c.contains("capacity")) cfg.cache_capacity = c.at("capacity").get<size_t>();
    }
    if (doc.contains("registry")) cfg.registry_file = doc.at("registry").get<std::string>();
    if (doc.contains("stats")) cfg.stats_file = doc.at("stats").get<std::string>();
    if (doc.contains("trace")) cfg.trace_file = doc.at("trace").get<std::string>();
    if (doc.contains("features")) {
        const auto& f = doc.at("features");
        if (f.contains("simplifiedSyntax")) {
            cfg.features.simplified_syntax = f.at("simplifiedSyntax").get<bool>();
        }
        if (f.contains("namedQueries")) cfg.features.named_queries = f.at("namedQueries").get<bool>();
        if (f.contains("costCheck")) cfg.features.cost_check = f.at("costCheck").get<bool>();
        if (f.contains("cache")) cfg.features.cache = f.at("cache").get<bool>();
    }
    return cfg;
}

GatewayConfig GatewayConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("InvalidConfig", "cannot open config file: " + path);
    nlohmann::json doc;
    in >> doc;
    return from_json(doc);
}

nlohmann::json GatewayConfig::to_json() const {
    nlohmann::json doc;
    doc["listen"] = listen;
    if (backend_mode == BackendMode::Proxy) {
        doc["upstream"] = upstream;
    } else {
        if (!model_file.empty()) doc["model"] = model_file;
        if (!data_files.empty()) doc["data"] = data_files;
        if (!generate_dataset_name.empty()) doc["dataset"] = generate_dataset_name;
    }
    doc["costThreshold"] = cost_threshold;
    doc["weights"] = {{"filter", weights.w_filter}, {"expand", weights.w_expand}, {"size", weights.w_size}};
    nlohmann::json cache;
    cache["defaultTtlSeconds"] = cache_policy.default_ttl_seconds;
    cache["nonCacheableSets"] = cache_policy.non_cacheable_sets;
    cache["nonCacheableFields"] = cache_policy.non_cacheable_fields;
    cache["capacity"] = cache_capacity;
    doc["cache"] = cache;
    if (!registry_file.empty()) doc["registry"] = registry_file;
    if (!stats_file.empty()) doc["stats"] = stats_file;
    if (!trace_file.empty()) doc["trace"] = trace_file;
    doc["features"] = {{"simplifiedSyntax", features.simplified_syntax},
                       {"namedQueries", features.named_queries},
                       {"costCheck", features.cost_check},
                       {"cache", features.cache}};
    return doc;
}

} // namespace odatax
