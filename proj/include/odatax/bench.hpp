#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "odatax/config.hpp"

namespace odatax {

struct BenchOptions {
    long long requests = 10000;
    double zipf_s = 1.1;
    std::uint32_t seed = 42;
    GatewayConfig config; // defaulted by bench_default_config() when empty
    bool use_default_config = true;
};

// Mock-backend gateway config the benchmark runs against: generated
// e-commerce dataset, stats rebuilt on start, InStock filters marked
// user-specific (non-cacheable).
GatewayConfig bench_default_config();

struct BenchReport {
    long long requests = 0;
    double zipf_s = 0.0;
    std::uint32_t seed = 0;

    long long reads = 0;
    long long mutations = 0;
    long long cache_hits = 0;
    long long cache_misses = 0;
    long long backend_calls = 0;
    long long rejections = 0;

    double hit_rate = 0.0;               // hits / (hits + misses)
    double backend_load_reduction = 0.0; // 1 - backend_calls / reads
    double rejection_rate = 0.0;         // rejections / reads
    double mean_compression_ratio = 0.0; // over the documented sample

    nlohmann::ordered_json to_json() const;
};

// Replays a seeded Zipf-distributed read workload with 1% interleaved
// mutations through a fresh gateway. Deterministic per (requests, s, seed).
BenchReport run_bench(const BenchOptions& options);

// The documented 12-query sample used for the compression measurement.
struct CompressionSample {
    std::string name;
    std::string entity_set;
    std::string simplified; // raw simplified query string
};

const std::vector<CompressionSample>& compression_sample();

struct CompressionMeasurement {
    std::string name;
    size_t simplified_length = 0;
    size_t traditional_length = 0; // /Set?<encoded traditional serialization>
    double reduction = 0.0;        // 1 - simplified/traditional
};

// Measures one sample entry against a model: simplified form as written,
// traditional form as the full encoded request path.
CompressionMeasurement measure_compression(const CompressionSample& sample,
                                           const EntityModel& model);

} // namespace odatax
