#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "odatax/gateway.hpp"

namespace odatax {

// One golden conformance case: raw request params plus what must come out.
struct GoldenCase {
    std::string name;
    std::string entity_set;
    std::string query;                          // raw query string after '?'
    std::string expected_traditional;           // translated form, author order; "" = skip
    bool expect_cache_key = false;              // key must be present and 64-hex
    std::vector<long long> expected_ids;        // result Id sequence, empty = skip
    bool check_ids = false;
    std::string expected_error;                 // error code, "" = expect success
};

struct ConformanceResult {
    size_t total = 0;
    size_t passed = 0;
    std::vector<std::string> failures; // one diff line per mismatch
    bool ok() const { return failures.empty(); }
};

std::vector<GoldenCase> load_corpus(const std::string& path);

// Runs every case through the gateway (mock mode): resolves the query,
// compares the canonical serialization, key presence, result ids and error
// codes against expectations.
ConformanceResult run_conformance(const std::vector<GoldenCase>& corpus, Gateway& gateway);

} // namespace odatax
