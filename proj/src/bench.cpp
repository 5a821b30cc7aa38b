#include "odatax/bench.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "odatax/gateway.hpp"
#include "odatax/serialize.hpp"

namespace odatax {

namespace {

// Same engine contract as the dataset generator: raw mt19937 draws so the
// workload replays identically on every platform.
class WorkloadRng {
public:
    explicit WorkloadRng(std::uint32_t seed) : gen_(seed) {}
    std::uint32_t next() { return gen_(); }
    double uniform() { return static_cast<double>(next()) / 4294967296.0; }

private:
    std::mt19937 gen_;
};

struct BenchPattern {
    std::string set;
    std::string query;
};

std::string num(double v) {
    // Trims trailing zeros so 3.5 prints as "3.5" and 4 as "4".
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

const std::vector<std::string>& category_names() {
    static const std::vector<std::string> names = {"Electronics", "Books",  "Clothing",
                                                   "Home",        "Sports", "Toys",
                                                   "Garden",      "Automotive"};
    return names;
}

// Catalog-browsing traffic over Products: filters on category, price bands,
// ratings, name search, review expansion. All cacheable.
std::vector<BenchPattern> products_pool() {
    std::vector<BenchPattern> out;
    for (const auto& cat : category_names()) {
        for (double t : {20.0, 50.0, 100.0, 200.0, 400.0}) {
            out.push_back({"Products", "filter=category:" + cat + ",price<" + num(t) +
                                           "&sort=-rating"});
        }
    }
    for (const auto& cat : category_names()) {
        for (double r : {3.0, 3.5, 4.0, 4.5}) {
            out.push_back(
                {"Products", "filter=category:" + cat + ",rating>=" + num(r) + "&sort=-price"});
        }
    }
    for (const auto& cat : category_names()) {
        out.push_back({"Products", "filter=category:" + cat + "&sort=-rating&top=25"});
    }
    for (double lo : {10.0, 25.0, 50.0, 100.0, 200.0, 400.0}) {
        out.push_back({"Products", "$filter=Price ge " + num(lo) + " and Price le " +
                                       num(lo * 2) + "&$orderby=Price asc&$top=50"});
    }
    for (const char* noun : {"widget", "gadget", "lamp", "speaker", "jacket", "racket", "novel",
                             "planter", "wrench", "monitor", "kettle", "backpack", "drone",
                             "tripod", "desk", "charger"}) {
        out.push_back({"Products", std::string("$filter=contains(Name,'") + noun +
                                       "')&$orderby=Rating desc&$top=20"});
    }
    for (double r : {4.0, 4.2, 4.5, 4.8}) {
        out.push_back({"Products", "$filter=Rating ge " + num(r) + "&$expand=Reviews&$top=10"});
    }
    for (double p : {500.0, 800.0, 1000.0, 1200.0}) {
        out.push_back({"Products", "$expand=Reviews($expand=Author)&$filter=Price gt " + num(p) +
                                       "&$top=5"});
    }
    for (const char* adj : {"classic", "modern", "compact", "deluxe", "rugged", "sleek",
                            "vintage", "smart", "eco", "pro", "ultra", "mini", "grand", "swift",
                            "quiet", "bold"}) {
        out.push_back({"Products",
                       std::string("$filter=contains(Name,'") + adj + "') and Price lt 300"});
    }
    return out;
}

// Availability-dependent traffic: every pattern filters on InStock, which
// the bench cache policy marks user-specific, so these always bypass.
std::vector<BenchPattern> stock_pool() {
    std::vector<BenchPattern> out;
    for (const auto& cat : category_names()) {
        out.push_back({"Products", "filter=instock=true,category:" + cat + "&sort=-rating"});
    }
    for (const auto& cat : category_names()) {
        for (double t : {50.0, 150.0}) {
            out.push_back({"Products",
                           "filter=instock=true,category:" + cat + ",price<" + num(t)});
        }
    }
    for (double t : {20.0, 50.0, 100.0, 200.0, 400.0, 800.0}) {
        out.push_back({"Products", "filter=instock=true,price>=" + num(t) + "&sort=price"});
    }
    for (double r : {3.0, 3.5, 4.0, 4.5}) {
        out.push_back(
            {"Products", "filter=instock=true,rating>=" + num(r) + "&sort=-rating&top=40"});
    }
    for (int skip : {0, 30, 60, 90, 120, 150}) {
        out.push_back({"Products", "filter=instock=true&sort=-rating&top=30&skip=" +
                                       std::to_string(skip)});
    }
    return out;
}

// Reviews and Authors traffic; mutations never touch these sets, so their
// entries survive the whole run.
std::vector<BenchPattern> secondary_pool() {
    std::vector<BenchPattern> out;
    for (double r : {3.0, 3.5, 4.0, 4.5, 5.0}) {
        out.push_back({"Reviews", "filter=rating>=" + num(r) + "&sort=-helpful&top=20"});
    }
    for (int h : {5, 10, 20, 50}) {
        out.push_back(
            {"Reviews", "filter=helpful>" + std::to_string(h) + "&sort=-helpful&top=50"});
    }
    for (int h : {10, 25, 40}) {
        out.push_back({"Reviews", "$filter=Helpful ge " + std::to_string(h) +
                                      "&$expand=Author&$orderby=Helpful desc&$top=25"});
    }
    for (int r = 1; r <= 4; ++r) {
        out.push_back({"Reviews", "$filter=Rating ge " + std::to_string(r) + " and Rating lt " +
                                      std::to_string(r + 1) + "&$top=30"});
    }
    for (const char* cc : {"US", "DE", "FR", "JP", "BR", "IN", "GB", "CA", "AU", "MX", "ES",
                           "IT", "NL", "SE", "PL", "KR", "ZA", "AR", "NO", "CH"}) {
        out.push_back({"Authors", std::string("filter=country:") + cc + "&sort=name"});
    }
    for (const char* prefix : {"A", "B", "C", "D"}) {
        out.push_back(
            {"Authors", std::string("$filter=startswith(Name,'") + prefix + "')&$top=15"});
    }
    return out;
}

// Deeply parenthesized string-function chains: leaf cost 5 doubled per
// nesting level, seven leaves at depth four = 561 > the 500 threshold, so
// the gateway rejects these before they ever reach the backend.
std::vector<BenchPattern> expensive_pool() {
    std::vector<BenchPattern> out;
    for (const char* tail : {"omega", "sigma", "kappa", "theta", "lambda", "delta"}) {
        std::string chain = "contains(Name,'alpha') and contains(Name,'beta') and "
                            "contains(Name,'gamma') and contains(Name,'epsilon') and "
                            "contains(Name,'zeta') and contains(Name,'eta') and "
                            "contains(Name,'";
        chain += tail;
        chain += "')";
        out.push_back({"Products", "$filter=((((" + chain + "))))"});
    }
    return out;
}

// The 200-pattern table, popularity rank = position. Rank classes are fixed
// so the traffic mix is stable: every third rank up to 119 is an InStock
// (bypass) pattern, every fourth remaining rank reads Reviews/Authors, six
// deep ranks are too expensive to run, everything else is cacheable
// Products browsing.
std::vector<BenchPattern> build_patterns() {
    auto products = products_pool();
    auto stock = stock_pool();
    auto secondary = secondary_pool();
    auto expensive = expensive_pool();
    const std::set<int> expensive_ranks = {152, 160, 168, 176, 184, 192};

    std::vector<BenchPattern> ranked;
    ranked.reserve(200);
    size_t pi = 0, si = 0, oi = 0, ei = 0;
    for (int k = 1; k <= 200; ++k) {
        if (k % 3 == 2 && k <= 119) {
            ranked.push_back(stock.at(si++));
        } else if (expensive_ranks.count(k)) {
            ranked.push_back(expensive.at(ei++));
        } else if (k % 4 == 3) {
            ranked.push_back(secondary.at(oi++));
        } else {
            ranked.push_back(products.at(pi++));
        }
    }
    return ranked;
}

} // namespace

GatewayConfig bench_default_config() {
    GatewayConfig cfg;
    cfg.backend_mode = GatewayConfig::BackendMode::Mock;
    cfg.generate_dataset_name = "ecommerce-small";
    cfg.stats_file = "rebuild-on-start";
    cfg.cache_policy.non_cacheable_fields = {"InStock"};
    return cfg;
}

const std::vector<CompressionSample>& compression_sample() {
    static const std::vector<CompressionSample> sample = {
        {"books-under-20", "Products", "filter=price<20,category:Books"},
        {"books-over-100-by-price", "Products",
         "filter=price>100, category:Books&sort=-price"},
        {"budget-books-by-rating", "Products",
         "filter=price>20,price<60,category:Books,rating>=4"},
        {"top-rated-toys", "Products", "filter=rating>=4,price<50,category:Toys&sort=-rating"},
        {"midrange-sports", "Products",
         "filter=price>=25,price<=75,category:Sports&sort=-price"},
        {"garden-deals", "Products", "filter=category:Garden,price<40,rating>3&sort=price"},
        {"cheap-clothing-in-stock", "Products",
         "filter=category:Clothing,price<30,instock=true"},
        {"helpful-positive-reviews", "Reviews", "filter=rating>=4,helpful>10&sort=-helpful"},
        {"five-star-reviews", "Reviews", "filter=rating=5,helpful>=20&sort=-helpful"},
        {"german-authors", "Authors", "filter=country:DE&sort=-name"},
        {"clearance-garden", "Products",
         "filter=category:Garden,price<=25,instock=true&sort=price"},
        {"home-essentials", "Products",
         "filter=category:Home,price<100,instock=true&sort=-rating"},
    };
    return sample;
}

CompressionMeasurement measure_compression(const CompressionSample& sample,
                                           const EntityModel& model) {
    CompressionMeasurement m;
    m.name = sample.name;
    m.simplified_length = sample.simplified.size();
    Query q = translate_fragments(sample.entity_set, sample.simplified, model, nullptr);
    std::string request = "/" + sample.entity_set + "?" + encode_query_values(serialize_odata(q));
    m.traditional_length = request.size();
    m.reduction = 1.0 - static_cast<double>(m.simplified_length) /
                            static_cast<double>(m.traditional_length);
    return m;
}

nlohmann::ordered_json BenchReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["workload"] = {{"requests", requests}, {"zipf", zipf_s}, {"seed", seed}};
    doc["reads"] = reads;
    doc["mutations"] = mutations;
    doc["cacheHits"] = cache_hits;
    doc["cacheMisses"] = cache_misses;
    doc["backendCalls"] = backend_calls;
    doc["rejections"] = rejections;
    doc["hitRate"] = hit_rate;
    doc["backendLoadReduction"] = backend_load_reduction;
    doc["rejectionRate"] = rejection_rate;
    doc["meanCompressionRatio"] = mean_compression_ratio;
    return doc;
}

BenchReport run_bench(const BenchOptions& options) {
    GatewayConfig cfg = options.use_default_config ? bench_default_config() : options.config;

    // Deterministic cache clock: one tick per call, far below the TTL, so
    // wall-clock speed never changes the outcome.
    auto tick = std::make_shared<double>(0.0);
    Gateway gw(cfg, [tick]() { return *tick += 0.001; });

    auto patterns = build_patterns();
    std::vector<double> cumulative(patterns.size());
    double h = 0.0;
    for (size_t i = 0; i < patterns.size(); ++i) {
        h += std::pow(static_cast<double>(i + 1), -options.zipf_s);
        cumulative[i] = h;
    }

    WorkloadRng rng(options.seed);
    BenchReport report;
    report.requests = options.requests;
    report.zipf_s = options.zipf_s;
    report.seed = options.seed;

    for (long long n = 0; n < options.requests; ++n) {
        if (n % 100 == 99) { // 1% interleaved mutations
            long long id = 1 + static_cast<long long>(rng.next() % 10000);
            double cents = static_cast<double>(500 + rng.next() % 139500);
            nlohmann::json body = {{"Price", cents / 100.0}};
            HttpRequest req;
            req.method = "PATCH";
            req.target = "/odatax/Products/" + std::to_string(id);
            req.body = body.dump();
            gw.handle(req);
            ++report.mutations;
            continue;
        }
        double u = rng.uniform() * h;
        size_t idx = static_cast<size_t>(
            std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        if (idx >= patterns.size()) idx = patterns.size() - 1;
        HttpRequest req;
        req.target = "/odatax/" + patterns[idx].set + "?" + patterns[idx].query;
        gw.handle(req);
        ++report.reads;
    }

    nlohmann::json m = gw.metrics();
    report.cache_hits = m.at("cacheHits").get<long long>();
    report.cache_misses = m.at("cacheMisses").get<long long>();
    report.backend_calls = m.at("backendCalls").get<long long>();
    report.rejections = m.at("rejections").get<long long>();

    long long looked = report.cache_hits + report.cache_misses;
    report.hit_rate = looked > 0 ? static_cast<double>(report.cache_hits) / looked : 0.0;
    report.backend_load_reduction =
        report.reads > 0
            ? 1.0 - static_cast<double>(report.backend_calls) / static_cast<double>(report.reads)
            : 0.0;
    report.rejection_rate =
        report.reads > 0
            ? static_cast<double>(report.rejections) / static_cast<double>(report.reads)
            : 0.0;

    double sum = 0.0;
    for (const auto& s : compression_sample()) {
        sum += measure_compression(s, gw.model()).reduction;
    }
    report.mean_compression_ratio = sum / static_cast<double>(compression_sample().size());
    return report;
}

} // namespace odatax
