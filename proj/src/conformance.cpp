#include "odatax/conformance.hpp"

#include <fstream>

#include "odatax/canonical.hpp"
#include "odatax/errors.hpp"
#include "odatax/evaluate.hpp"
#include "odatax/serialize.hpp"

namespace odatax {

namespace {

bool is_hex_key(const std::string& key) {
    if (key.size() != 64) return false;
    for (char c : key) {
        bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
        if (!ok) return false;
    }
    return true;
}

// A case is traditional-only when every parameter is a $-option; those get
// the extra pass-through checks (canonical identity, direct-eval equality).
bool traditional_only(const std::string& raw_query) {
    if (raw_query.empty()) return false;
    size_t start = 0;
    while (start <= raw_query.size()) {
        size_t amp = raw_query.find('&', start);
        std::string part = raw_query.substr(
            start, amp == std::string::npos ? std::string::npos : amp - start);
        if (!part.empty() && part[0] != '$') return false;
        if (amp == std::string::npos) break;
        start = amp + 1;
    }
    return true;
}

std::vector<long long> result_ids(const nlohmann::json& body) {
    std::vector<long long> ids;
    if (body.is_object() && body.contains("value")) {
        for (const auto& row : body.at("value")) {
            if (row.contains("Id")) ids.push_back(row.at("Id").get<long long>());
        }
    }
    return ids;
}

std::string join_ids(const std::vector<long long>& ids) {
    std::string out = "[";
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(ids[i]);
    }
    return out + "]";
}

} // namespace

std::vector<GoldenCase> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("InvalidCorpus", "cannot open corpus file: " + path);
    nlohmann::json doc;
    in >> doc;
    if (!doc.is_array()) throw Error("InvalidCorpus", "corpus must be a JSON array");
    std::vector<GoldenCase> out;
    for (const auto& item : doc) {
        GoldenCase c;
        c.name = item.at("name").get<std::string>();
        c.entity_set = item.at("entitySet").get<std::string>();
        c.query = item.at("query").get<std::string>();
        if (item.contains("expectedTraditional")) {
            c.expected_traditional = item.at("expectedTraditional").get<std::string>();
        }
        if (item.contains("expectCacheKey")) {
            c.expect_cache_key = item.at("expectCacheKey").get<bool>();
        }
        if (item.contains("expectedIds")) {
            c.check_ids = true;
            for (const auto& id : item.at("expectedIds")) {
                c.expected_ids.push_back(id.get<long long>());
            }
        }
        if (item.contains("expectedError")) {
            c.expected_error = item.at("expectedError").get<std::string>();
        }
        out.push_back(std::move(c));
    }
    return out;
}

ConformanceResult run_conformance(const std::vector<GoldenCase>& corpus, Gateway& gateway) {
    ConformanceResult result;
    result.total = corpus.size();

    for (const auto& c : corpus) {
        std::vector<std::string> problems;

        HttpRequest req;
        req.target = "/odatax/" + c.entity_set + (c.query.empty() ? "" : "?" + c.query);
        HttpResponse resp = gateway.handle(req);

        if (!c.expected_error.empty()) {
            if (resp.status < 400) {
                problems.push_back("expected error '" + c.expected_error + "', got status " +
                                   std::to_string(resp.status));
            } else {
                auto body = nlohmann::json::parse(resp.body, nullptr, false);
                std::string code = body.is_discarded()
                                       ? ""
                                       : body.value("error", nlohmann::json::object())
                                             .value("code", std::string());
                if (code != c.expected_error) {
                    problems.push_back("expected error '" + c.expected_error + "', got '" +
                                       code + "'");
                }
            }
        } else if (resp.status != 200) {
            problems.push_back("expected success, got status " + std::to_string(resp.status) +
                               " body " + resp.body);
        } else {
            ResolvedRead plan = gateway.resolve_read(c.entity_set, c.query);

            if (!c.expected_traditional.empty()) {
                std::string got = serialize_odata(plan.merged);
                if (got != c.expected_traditional) {
                    problems.push_back("expected traditional '" + c.expected_traditional +
                                       "', got '" + got + "'");
                }
            }
            if (c.expect_cache_key && !is_hex_key(plan.cache_key)) {
                problems.push_back("cache key not 64-hex: '" + plan.cache_key + "'");
            }

            nlohmann::json body = nlohmann::json::parse(resp.body);
            if (c.check_ids) {
                auto ids = result_ids(body);
                if (ids != c.expected_ids) {
                    problems.push_back("expected ids " + join_ids(c.expected_ids) + ", got " +
                                       join_ids(ids));
                }
            }

            if (traditional_only(c.query) && gateway.store() != nullptr) {
                // Pass-through checks: the gateway must forward the same
                // canonical form and return the same rows as evaluating the
                // query directly.
                Query direct = parse_traditional(c.entity_set, split_query_options(c.query),
                                                 &gateway.model());
                std::string direct_canonical = serialize_odata(canonicalize(direct));
                if (direct_canonical != plan.forward_query) {
                    problems.push_back("canonical form drift: direct '" + direct_canonical +
                                       "' vs forwarded '" + plan.forward_query + "'");
                }
                auto state = gateway.store()->snapshot();
                nlohmann::json direct_rows = evaluate(canonicalize(direct), *state,
                                                      gateway.model());
                if (body.at("value") != direct_rows) {
                    problems.push_back("gateway result differs from direct evaluation");
                }
            }
        }

        if (problems.empty()) {
            ++result.passed;
        } else {
            for (const auto& p : problems) {
                result.failures.push_back(c.name + ": " + p);
            }
        }
    }
    return result;
}

} // namespace odatax
