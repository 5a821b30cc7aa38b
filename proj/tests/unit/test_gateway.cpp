#include "doctest.h"

#include "helpers.hpp"
#include "odatax/errors.hpp"
#include "odatax/gateway.hpp"
#include "odatax/serialize.hpp"

using namespace odatax;

namespace {

GatewayConfig base_config() {
    std::string dir = testfix::catalog_dataset_dir();
    GatewayConfig cfg;
    cfg.model_file = dir + "/model.json";
    cfg.data_files = {dir + "/Products.json", dir + "/Reviews.json", dir + "/Authors.json"};
    cfg.stats_file = "rebuild-on-start";
    return cfg;
}

NamedQueryDef by_category_def() {
    NamedQueryDef def;
    def.name = "byCategory";
    def.template_text = "$filter=Category eq '{category}'&$orderby=Rating desc&$top=10";
    def.parameters = {"category"};
    def.cacheable = true;
    return def;
}

HttpResponse get(Gateway& gw, const std::string& target) {
    HttpRequest req;
    req.method = "GET";
    req.target = target;
    return gw.handle(req);
}

HttpResponse send(Gateway& gw, const std::string& method, const std::string& target,
                  const std::string& body = "") {
    HttpRequest req;
    req.method = method;
    req.target = target;
    req.body = body;
    return gw.handle(req);
}

std::string header(const HttpResponse& resp, const std::string& name) {
    for (const auto& [n, v] : resp.headers) {
        if (n == name) return v;
    }
    return "";
}

bool has_header(const HttpResponse& resp, const std::string& name) {
    for (const auto& [n, v] : resp.headers) {
        if (n == name) return true;
    }
    return false;
}

std::vector<long long> body_ids(const HttpResponse& resp) {
    std::vector<long long> out;
    auto doc = nlohmann::json::parse(resp.body);
    for (const auto& row : doc.at("value")) out.push_back(row.at("Id").get<long long>());
    return out;
}

std::string error_code(const HttpResponse& resp) {
    return nlohmann::json::parse(resp.body).at("error").at("code").get<std::string>();
}

using Ids = std::vector<long long>;

} // namespace

TEST_CASE("url decoding handles escapes, plus and malformed input") {
    CHECK(url_decode("a%20b+c") == "a b c");
    CHECK(url_decode("%24filter") == "$filter");
    CHECK(url_decode("100%25") == "100%");
    CHECK(url_decode("") == "");
    CHECK_THROWS_AS(url_decode("bad%2"), ParseError);
    CHECK_THROWS_AS(url_decode("bad%zz"), ParseError);
}

TEST_CASE("forwarding encodes values but not structure") {
    CHECK(encode_query_values("$filter=Price gt 100&$top=5") ==
          "$filter=Price%20gt%20100&$top=5");
    CHECK(encode_query_values("$filter=Name eq 'a+b'") == "$filter=Name%20eq%20'a%2Bb'");
    CHECK(encode_query_values("$filter=Name eq '50%'") == "$filter=Name%20eq%20'50%25'");
    CHECK(encode_query_values("$filter=Name eq '#1'") == "$filter=Name%20eq%20'%231'");
}

TEST_CASE("reads answer from the dataset with cache headers") {
    Gateway gw(base_config());
    HttpResponse resp = get(gw, "/odatax/Products?$filter=Price lt 20");
    CHECK(resp.status == 200);
    CHECK(body_ids(resp) == Ids{1, 2, 5, 8});
    CHECK(header(resp, "X-ODataX-Cacheable") == "true");
    CHECK(header(resp, "X-ODataX-Cache") == "miss");
    CHECK(header(resp, "Cache-Control") == "max-age=300");
    CHECK(header(resp, "Vary") == "Accept, Accept-Language");
    std::string key = header(resp, "X-ODataX-Cache-Key");
    CHECK(key.size() == 64);
    CHECK(key.find_first_not_of("0123456789abcdef") == std::string::npos);

    // The second identical read is served from the cache.
    HttpResponse again = get(gw, "/odatax/Products?$filter=Price lt 20");
    CHECK(again.status == 200);
    CHECK(again.body == resp.body);
    CHECK(header(again, "X-ODataX-Cache") == "hit");
    CHECK(gw.backend_calls() == 1);

    // A differently spelled but equivalent query hits the same entry.
    HttpResponse spelled = get(gw, "/odatax/Products?$filter=price lt 020.0");
    CHECK(header(spelled, "X-ODataX-Cache") == "hit");
    CHECK(header(spelled, "X-ODataX-Cache-Key") == key);
    CHECK(gw.backend_calls() == 1);
}

TEST_CASE("simplified parameters work on the wire") {
    Gateway gw(base_config());
    HttpResponse resp = get(gw, "/odatax/Products?filter=price<20,category:Tools&sort=-price");
    CHECK(resp.status == 200);
    CHECK(body_ids(resp) == Ids{2, 1, 8});
}

TEST_CASE("both syntaxes in one request conjoin") {
    Gateway gw(base_config());
    HttpResponse resp = get(gw, "/odatax/Products?$filter=Category eq 'Tools'&filter=price<15");
    CHECK(resp.status == 200);
    CHECK(body_ids(resp) == Ids{1, 8});
}

TEST_CASE("resolution reports canonical form, key and warnings") {
    Gateway gw(base_config());
    ResolvedRead plan = gw.resolve_read("Products",
                                        "$filter=Price lt 20 and Category eq 'Tools'&bogus=1");
    CHECK(serialize_odata(plan.merged) == "$filter=Price lt 20 and Category eq 'Tools'");
    CHECK(plan.forward_query == "$filter=Category eq 'Tools' and Price lt 20");
    CHECK(plan.cache_key.size() == 64);
    CHECK(plan.cacheable);
    CHECK_FALSE(plan.used_named_query);
    REQUIRE(plan.warnings.size() == 1);
    CHECK(plan.warnings[0] == "parameter 'bogus' ignored: not a recognized option");
}

TEST_CASE("named queries expand server-side") {
    Gateway gw(base_config());
    gw.registry().register_query(by_category_def());

    HttpResponse resp = get(gw, "/odatax/Products?query=byCategory&category=Books");
    CHECK(resp.status == 200);
    CHECK(body_ids(resp) == Ids{3, 4}); // Books by rating descending

    ResolvedRead plan = gw.resolve_read("Products", "query=byCategory&category=Books");
    CHECK(plan.used_named_query);
    CHECK(plan.cacheable); // from the definition
    CHECK(serialize_odata(plan.merged) ==
          "$filter=Category eq 'Books'&$orderby=Rating desc&$top=10");
}

TEST_CASE("named queries reject dollar options but accept simplified ones") {
    Gateway gw(base_config());
    gw.registry().register_query(by_category_def());

    HttpResponse mixed = get(gw, "/odatax/Products?query=byCategory&category=Books&$top=3");
    CHECK(mixed.status == 400);
    CHECK(error_code(mixed) == "InvalidQuery");

    // Simplified options merge in; the template's $top wins over a simplified top.
    HttpResponse simp = get(gw, "/odatax/Products?query=byCategory&category=Home&filter=price<100");
    CHECK(simp.status == 200);
    CHECK(body_ids(simp) == Ids{5, 7}); // Home under 100, rating desc, nulls last

    HttpResponse unknown = get(gw, "/odatax/Products?query=nope");
    CHECK(unknown.status == 404);
    CHECK(error_code(unknown) == "UnknownNamedQuery");

    HttpResponse missing = get(gw, "/odatax/Products?query=byCategory");
    CHECK(missing.status == 400);
    CHECK(error_code(missing) == "MissingParameter");
}

TEST_CASE("expensive queries are rejected with the cost payload") {
    GatewayConfig cfg = base_config();
    cfg.cost_threshold = 3.0;
    Gateway gw(cfg);

    HttpResponse resp = get(gw, "/odatax/Products?$filter=contains(Name,'a')");
    CHECK(resp.status == 400);
    auto doc = nlohmann::json::parse(resp.body);
    CHECK(doc["error"]["code"] == "QueryTooExpensive");
    CHECK(doc["error"]["details"].contains("filterCost"));
    CHECK(doc["error"]["details"].contains("projectedRows"));
    CHECK(gw.rejections() == 1);
    CHECK(gw.backend_calls() == 0);
    // A rejected read is neither a hit nor a miss.
    auto metrics = gw.metrics();
    CHECK(metrics["cacheHits"] == 0);
    CHECK(metrics["cacheMisses"] == 0);

    // Cheap queries still pass.
    CHECK(get(gw, "/odatax/Products?$filter=Price lt 20&$top=2").status == 200);
}

TEST_CASE("a named query's cost limit overrides the global threshold") {
    GatewayConfig cfg = base_config();
    cfg.cost_threshold = 3.0; // would reject the contains filter
    Gateway gw(cfg);

    NamedQueryDef generous;
    generous.name = "nameSearch";
    generous.template_text = "$filter=contains(Name,'{needle}')";
    generous.parameters = {"needle"};
    generous.cost_limit = 1000.0;
    gw.registry().register_query(generous);

    CHECK(get(gw, "/odatax/Products?query=nameSearch&needle=a").status == 200);

    NamedQueryDef strict;
    strict.name = "everything";
    strict.template_text = "$orderby=Price desc";
    strict.cost_limit = 0.001; // even a trivial query exceeds this
    gw.registry().register_query(strict);
    HttpResponse rejected = get(gw, "/odatax/Products?query=everything");
    CHECK(rejected.status == 400);
    CHECK(error_code(rejected) == "QueryTooExpensive");
}

TEST_CASE("writes invalidate cached reads of the touched set") {
    Gateway gw(base_config());
    CHECK(header(get(gw, "/odatax/Products?$filter=Price lt 20"), "X-ODataX-Cache") == "miss");
    CHECK(header(get(gw, "/odatax/Products?$filter=Price lt 20"), "X-ODataX-Cache") == "hit");

    HttpResponse patched = send(gw, "PATCH", "/odatax/Products/8", R"({"Price": 25.0})");
    CHECK(patched.status == 200);

    HttpResponse after = get(gw, "/odatax/Products?$filter=Price lt 20");
    CHECK(header(after, "X-ODataX-Cache") == "miss"); // entry was dropped
    CHECK(body_ids(after) == Ids{1, 2, 5});           // and the data changed
}

TEST_CASE("writes to expand targets invalidate joined reads only") {
    Gateway gw(base_config());
    get(gw, "/odatax/Products?$expand=Reviews");
    get(gw, "/odatax/Products?$filter=Price lt 20");
    CHECK(gw.cache().size() == 2);

    send(gw, "PATCH", "/odatax/Reviews/1", R"({"Helpful": 11})");

    // The expand read touched Reviews; the plain read did not.
    CHECK(header(get(gw, "/odatax/Products?$expand=Reviews"), "X-ODataX-Cache") == "miss");
    CHECK(header(get(gw, "/odatax/Products?$filter=Price lt 20"), "X-ODataX-Cache") == "hit");
}

TEST_CASE("failed writes still invalidate their set") {
    Gateway gw(base_config());
    get(gw, "/odatax/Products?$top=1");
    CHECK(gw.cache().size() == 1);
    HttpResponse bad = send(gw, "PATCH", "/odatax/Products/1", "this is not json");
    CHECK(bad.status == 400);
    CHECK(error_code(bad) == "InvalidBody");
    CHECK(gw.cache().size() == 0);

    // A write to an unknown set touches nothing and invalidates nothing.
    get(gw, "/odatax/Products?$top=1");
    HttpResponse missing = send(gw, "POST", "/odatax/Widgets", "{}");
    CHECK(missing.status == 404);
    CHECK(gw.cache().size() == 1);
}

TEST_CASE("the write surface maps onto store mutations") {
    Gateway gw(base_config());

    HttpResponse created = send(gw, "POST", "/odatax/Products",
                                R"({"Id": 9, "Name": "Shelf", "Price": 34.5,
                                    "Category": "Home", "InStock": true})");
    CHECK(created.status == 201);
    CHECK(nlohmann::json::parse(created.body)["Name"] == "Shelf");

    HttpResponse put = send(gw, "PUT", "/odatax/Products/9",
                            R"({"Id": 9, "Name": "Shelf XL", "Price": 44.5,
                                "Category": "Home", "InStock": true})");
    CHECK(put.status == 200);

    HttpResponse gone = send(gw, "DELETE", "/odatax/Products/9");
    CHECK(gone.status == 204);
    CHECK(gone.body.empty());

    CHECK(body_ids(get(gw, "/odatax/Products?$filter=Id eq 9")) == Ids{});

    // Path/method mismatches.
    CHECK(send(gw, "POST", "/odatax/Products/3", "{}").status == 400);
    CHECK(send(gw, "PATCH", "/odatax/Products", "{}").status == 400);
    CHECK(send(gw, "DELETE", "/odatax/Products").status == 400);
    CHECK(send(gw, "DELETE", "/odatax/Products/99").status == 404);
}

TEST_CASE("path and method errors use the expected statuses") {
    Gateway gw(base_config());
    CHECK(get(gw, "/odatax/Nothing").status == 404);
    CHECK(error_code(get(gw, "/odatax/Nothing")) == "UnknownEntitySet");
    CHECK(get(gw, "/odatax/Products/1").status == 404); // reads address the set
    CHECK(get(gw, "/odatax/Products/abc").status == 404);
    CHECK(get(gw, "/elsewhere").status == 404);
    CHECK(send(gw, "HEAD", "/odatax/Products").status == 405);
    CHECK(error_code(send(gw, "HEAD", "/odatax/Products")) == "MethodNotAllowed");

    HttpResponse parse_fail = get(gw, "/odatax/Products?$filter=Price lt");
    CHECK(parse_fail.status == 400);
    auto doc = nlohmann::json::parse(parse_fail.body);
    CHECK(doc["error"]["code"] == "InvalidQuery");
    CHECK(doc["error"].contains("position"));
}

TEST_CASE("disabling the cache removes every cache artifact") {
    GatewayConfig cfg = base_config();
    cfg.features.cache = false;
    Gateway gw(cfg);
    HttpResponse resp = get(gw, "/odatax/Products?$top=2");
    CHECK(resp.status == 200);
    CHECK_FALSE(has_header(resp, "X-ODataX-Cacheable"));
    CHECK_FALSE(has_header(resp, "X-ODataX-Cache"));
    CHECK_FALSE(has_header(resp, "Cache-Control"));
    CHECK(get(gw, "/odatax/Products?$top=2").status == 200);
    CHECK(gw.backend_calls() == 2); // every read reaches the backend
    CHECK(gw.cache().size() == 0);
}

TEST_CASE("disabling simplified syntax ignores those parameters") {
    GatewayConfig cfg = base_config();
    cfg.features.simplified_syntax = false;
    Gateway gw(cfg);
    HttpResponse resp = get(gw, "/odatax/Products?filter=price<20");
    CHECK(resp.status == 200);
    CHECK(body_ids(resp).size() == 8); // the filter did not apply

    ResolvedRead plan = gw.resolve_read("Products", "filter=price<20");
    REQUIRE(plan.warnings.size() == 1);
    CHECK(plan.warnings[0] == "parameter 'filter' ignored: simplified syntax is disabled");
}

TEST_CASE("disabling named queries leaves query= unresolved") {
    GatewayConfig cfg = base_config();
    cfg.features.named_queries = false;
    Gateway gw(cfg);
    gw.registry().register_query(by_category_def());
    HttpResponse resp = get(gw, "/odatax/Products?query=byCategory&category=Books");
    CHECK(resp.status == 200);
    CHECK(body_ids(resp).size() == 8); // no expansion happened

    ResolvedRead plan = gw.resolve_read("Products", "query=byCategory&category=Books");
    CHECK_FALSE(plan.used_named_query);
    REQUIRE(plan.warnings.size() == 2);
    CHECK(plan.warnings[0] == "parameter 'query' ignored: named queries are disabled");
}

TEST_CASE("disabling the cost check admits anything") {
    GatewayConfig cfg = base_config();
    cfg.cost_threshold = 0.001;
    cfg.features.cost_check = false;
    Gateway gw(cfg);
    CHECK(get(gw, "/odatax/Products?$filter=contains(Name,'a')").status == 200);
    CHECK(gw.rejections() == 0);
}

TEST_CASE("non-cacheable policies bypass storage but still respond") {
    GatewayConfig cfg = base_config();
    cfg.cache_policy.non_cacheable_fields = {"InStock"};
    Gateway gw(cfg);
    HttpResponse resp = get(gw, "/odatax/Products?$filter=InStock eq true");
    CHECK(resp.status == 200);
    CHECK(header(resp, "X-ODataX-Cacheable") == "false");
    CHECK(header(resp, "Cache-Control") == "no-store");
    CHECK(header(resp, "X-ODataX-Cache") == "miss");
    CHECK_FALSE(has_header(resp, "X-ODataX-Cache-Key"));
    CHECK(gw.cache().size() == 0);
    CHECK(gw.metrics()["cacheBypass"] == 1);
}

TEST_CASE("admin endpoints expose stats, queries and metrics") {
    Gateway gw(base_config());
    gw.registry().register_query(by_category_def());

    HttpResponse stats = send(gw, "GET", "/odatax-admin/stats");
    CHECK(stats.status == 200);
    auto sdoc = nlohmann::json::parse(stats.body);
    CHECK(sdoc["sets"]["Products"]["rowCount"] == 8);
    CHECK(sdoc["sets"]["Products"]["relations"]["Reviews"]["targetSet"] == "Reviews");

    HttpResponse rebuild = send(gw, "POST", "/odatax-admin/stats/rebuild");
    CHECK(rebuild.status == 200);
    CHECK(nlohmann::json::parse(rebuild.body)["sets"] == 3);

    HttpResponse queries = send(gw, "GET", "/odatax-admin/queries");
    CHECK(queries.status == 200);
    auto qdoc = nlohmann::json::parse(queries.body);
    REQUIRE(qdoc.is_array());
    CHECK(qdoc[0]["name"] == "byCategory");

    get(gw, "/odatax/Products?$top=1");
    get(gw, "/odatax/Products?$top=1");
    HttpResponse metrics = send(gw, "GET", "/odatax-admin/metrics");
    auto mdoc = nlohmann::json::parse(metrics.body);
    CHECK(mdoc["requests"] == 2);
    CHECK(mdoc["cacheHits"] == 1);
    CHECK(mdoc["cacheMisses"] == 1);
    CHECK(mdoc["hitRate"] == 0.5);
    CHECK(mdoc["backendCalls"] == 1);
    CHECK(mdoc["estimateLog"].size() == 1);
    CHECK(mdoc["estimateLog"][0]["actualRows"] == 1);

    CHECK(send(gw, "GET", "/odatax-admin/unknown").status == 404);
    // Admin traffic does not count as data-plane requests.
    CHECK(nlohmann::json::parse(send(gw, "GET", "/odatax-admin/metrics").body)["requests"] == 2);
}

TEST_CASE("proxy mode forwards canonical, encoded queries") {
    std::string dir = testfix::catalog_dataset_dir();
    GatewayConfig cfg;
    cfg.backend_mode = GatewayConfig::BackendMode::Proxy;
    cfg.upstream = "http://backend.example";
    cfg.model_file = dir + "/model.json";
    Gateway gw(cfg);

    std::vector<HttpRequest> seen;
    gw.set_forward_fn([&seen](const HttpRequest& req) {
        seen.push_back(req);
        HttpResponse resp;
        resp.status = 200;
        resp.body = R"({"value": [{"Id": 1}]})";
        return resp;
    });

    HttpResponse resp = get(gw, "/odatax/Products?filter=price>100, category:Books&sort=-price");
    CHECK(resp.status == 200);
    REQUIRE(seen.size() == 1);
    CHECK(seen[0].method == "GET");
    CHECK(seen[0].target ==
          "/Products?$filter=Category%20eq%20'Books'%20and%20Price%20gt%20100"
          "&$orderby=Price%20desc");

    // Writes forward verbatim and invalidate.
    send(gw, "PATCH", "/odatax/Products/1", R"({"Price": 1})");
    REQUIRE(seen.size() == 2);
    CHECK(seen[1].method == "PATCH");
    CHECK(seen[1].target == "/Products/1");
}

TEST_CASE("upstream failures surface as 502") {
    std::string dir = testfix::catalog_dataset_dir();
    GatewayConfig cfg;
    cfg.backend_mode = GatewayConfig::BackendMode::Proxy;
    cfg.upstream = "http://backend.example";
    cfg.model_file = dir + "/model.json";
    Gateway gw(cfg);

    // No transport configured at all.
    HttpResponse none = get(gw, "/odatax/Products");
    CHECK(none.status == 502);
    CHECK(error_code(none) == "UpstreamFailure");

    gw.set_forward_fn([](const HttpRequest&) -> HttpResponse {
        throw std::runtime_error("connection refused");
    });
    HttpResponse thrown = get(gw, "/odatax/Products");
    CHECK(thrown.status == 502);
    CHECK(error_code(thrown) == "UpstreamFailure");

    // Upstream error statuses pass through untouched.
    gw.set_forward_fn([](const HttpRequest&) {
        HttpResponse resp;
        resp.status = 503;
        resp.body = "overloaded";
        return resp;
    });
    CHECK(get(gw, "/odatax/Products").status == 503);
}

TEST_CASE("trace lines describe each decision") {
    Gateway gw(base_config());
    std::vector<nlohmann::json> lines;
    gw.set_trace_fn([&lines](const nlohmann::json& line) { lines.push_back(line); });

    get(gw, "/odatax/Products?$top=1");
    get(gw, "/odatax/Products?$top=1");
    send(gw, "PATCH", "/odatax/Products/1", R"({"Price": 9.5})");
    get(gw, "/odatax/Products?$filter=Price lt");

    REQUIRE(lines.size() == 4);
    CHECK(lines[0]["decision"] == "forwarded");
    CHECK(lines[0]["cacheOutcome"] == "miss");
    CHECK(lines[0]["entitySet"] == "Products");
    CHECK(lines[0]["resolved"] == "$top=1");
    CHECK(lines[1]["decision"] == "served-cache");
    CHECK(lines[1]["cacheOutcome"] == "hit");
    CHECK(lines[2]["method"] == "PATCH");
    CHECK(lines[2]["invalidated"] == 1);
    CHECK(lines[3]["decision"] == "error");
    CHECK(lines[3]["error"] == "InvalidQuery");
    // Request ids increase monotonically.
    CHECK(lines[0]["requestId"].get<long long>() < lines[1]["requestId"].get<long long>());
}

TEST_CASE("ttl expiry falls back to the backend") {
    auto now = std::make_shared<double>(0.0);
    GatewayConfig cfg = base_config();
    cfg.cache_policy.default_ttl_seconds = 60;
    Gateway gw(cfg, [now]() { return *now; });

    CHECK(header(get(gw, "/odatax/Products?$top=1"), "X-ODataX-Cache") == "miss");
    *now = 59.0;
    CHECK(header(get(gw, "/odatax/Products?$top=1"), "X-ODataX-Cache") == "hit");
    *now = 60.0;
    CHECK(header(get(gw, "/odatax/Products?$top=1"), "X-ODataX-Cache") == "miss");
    CHECK(gw.backend_calls() == 2);
}
