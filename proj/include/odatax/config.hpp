#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "odatax/cache.hpp"
#include "odatax/cost.hpp"

namespace odatax {

// Which protocol additions are active. Everything can be switched off,
// leaving a plain pass-through for traditional queries.
struct FeatureToggles {
    bool simplified_syntax = true;
    bool named_queries = true;
    bool cost_check = true;
    bool cache = true;
};

struct GatewayConfig {
    std::string listen = "127.0.0.1:8080";

    // Exactly one backend mode.
    enum class BackendMode { Mock, Proxy };
    BackendMode backend_mode = BackendMode::Mock;
    std::string upstream;                // proxy mode: base URL
    std::string model_file;              // mock mode (optional for generated datasets)
    std::vector<std::string> data_files; // mock mode; "generate:<name>" builds in-process
    std::string generate_dataset_name;   // set when data is generated, e.g. "ecommerce-small"

    double cost_threshold = kDefaultCostThreshold;
    CostWeights weights;
    CachePolicy cache_policy;
    size_t cache_capacity = 10000;

    std::string registry_file; // named queries, optional
    std::string stats_file;    // "" or "rebuild-on-start" -> full scan at startup (mock)
    std::string trace_file;    // one JSON line per request when set

    FeatureToggles features;

    static GatewayConfig from_json(const nlohmann::json& doc);
    static GatewayConfig load_file(const std::string& path);
    nlohmann::json to_json() const;
};

} // namespace odatax
