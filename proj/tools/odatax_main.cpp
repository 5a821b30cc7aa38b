// odatax: translate and estimate queries, serve the gateway, replay the
// benchmark workload, build statistics, validate named-query registries,
// and write the bundled datasets to disk.

#include <csignal>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "httplib.h"

#include "odatax/bench.hpp"
#include "odatax/canonical.hpp"
#include "odatax/config.hpp"
#include "odatax/cost.hpp"
#include "odatax/datagen.hpp"
#include "odatax/errors.hpp"
#include "odatax/gateway.hpp"
#include "odatax/named_queries.hpp"
#include "odatax/serialize.hpp"
#include "odatax/stats.hpp"
#include "odatax/store.hpp"

namespace {

using namespace odatax;

constexpr int kExitUsage = 1;
constexpr int kExitBadQuery = 2;
constexpr int kExitRejected = 3;

bool is_query_error(const std::string& code) {
    return code == "InvalidQuery" || code == "DuplicateOption" || code == "RangeError" ||
           code == "DuplicateField" || code == "UnsupportedConstruct" ||
           code == "TypeMismatch";
}

EntityModel load_model(const std::string& model_file, const std::string& dataset) {
    if (!model_file.empty()) return EntityModel::load_file(model_file);
    return dataset_model(dataset);
}

int cmd_translate(const std::string& query, const std::string& set,
                  const std::string& model_file, const std::string& dataset) {
    if (query.empty()) {
        std::cerr << "missing parameter: query string\n";
        return kExitBadQuery;
    }
    try {
        EntityModel model = load_model(model_file, dataset);
        std::cout << translate_query(set, query, model) << "\n";
        return 0;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n" << e.caret_diagnostic() << "\n";
        return kExitBadQuery;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_query_error(e.code()) ? kExitBadQuery : kExitUsage;
    }
}

int cmd_estimate(const std::string& query, const std::string& set,
                 const std::string& model_file, const std::string& dataset,
                 const std::string& stats_file, bool no_stats, const CostWeights& weights,
                 double threshold) {
    try {
        EntityModel model = load_model(model_file, dataset);
        StatisticsCatalog stats;
        if (!stats_file.empty()) {
            stats = StatisticsCatalog::load_file(stats_file);
        } else if (!no_stats && model_file.empty()) {
            // Bundled dataset without an explicit stats file: build exact
            // statistics from the generated records.
            stats = build_stats(*make_store(generate_dataset(dataset)));
        }
        Query q = canonicalize(translate_fragments(set, query, model, nullptr));
        CostEstimate est = estimate(q, stats, weights, threshold);
        std::cout << estimate_to_json(est).dump(2) << "\n";
        CostDecision decision = check(est);
        if (!decision.accepted) {
            std::cout << decision.payload.dump(2) << "\n";
            return kExitRejected;
        }
        return 0;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n" << e.caret_diagnostic() << "\n";
        return kExitBadQuery;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_query_error(e.code()) ? kExitBadQuery : kExitUsage;
    }
}

httplib::Server* g_server = nullptr;

void handle_interrupt(int) {
    if (g_server) g_server->stop();
}

HttpResponse forward_over_http(const std::string& upstream, const HttpRequest& r) {
    httplib::Client client(upstream);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(30, 0);
    httplib::Result result;
    if (r.method == "GET") {
        result = client.Get(r.target);
    } else if (r.method == "POST") {
        result = client.Post(r.target, r.body, r.content_type);
    } else if (r.method == "PUT") {
        result = client.Put(r.target, r.body, r.content_type);
    } else if (r.method == "PATCH") {
        result = client.Patch(r.target, r.body, r.content_type);
    } else if (r.method == "DELETE") {
        result = client.Delete(r.target);
    } else {
        throw std::runtime_error("unsupported upstream method: " + r.method);
    }
    if (!result) {
        throw std::runtime_error("upstream unreachable: " + httplib::to_string(result.error()));
    }
    HttpResponse out;
    out.status = result->status;
    out.body = result->body;
    if (result->has_header("Content-Type")) {
        out.content_type = result->get_header_value("Content-Type");
    }
    return out;
}

int cmd_serve(std::string config_path) {
    if (const char* env = std::getenv("ODATAX_CONFIG")) {
        config_path = env; // environment wins over the flag
    }
    try {
        GatewayConfig cfg = config_path.empty() ? GatewayConfig{}
                                                : GatewayConfig::load_file(config_path);
        if (config_path.empty() && cfg.generate_dataset_name.empty() &&
            cfg.model_file.empty()) {
            cfg.generate_dataset_name = "ecommerce-small"; // usable out of the box
        }
        Gateway gateway(cfg);
        if (cfg.backend_mode == GatewayConfig::BackendMode::Proxy) {
            std::string upstream = cfg.upstream;
            gateway.set_forward_fn([upstream](const HttpRequest& r) {
                return forward_over_http(upstream, r);
            });
        }

        std::string host = "127.0.0.1";
        int port = 8080;
        size_t colon = cfg.listen.rfind(':');
        if (colon != std::string::npos) {
            host = cfg.listen.substr(0, colon);
            port = std::stoi(cfg.listen.substr(colon + 1));
        }

        httplib::Server server;
        auto handler = [&gateway](const httplib::Request& req, httplib::Response& res) {
            HttpRequest hreq;
            hreq.method = req.method;
            hreq.target = req.target.empty() ? req.path : req.target;
            hreq.body = req.body;
            if (req.has_header("Content-Type")) {
                hreq.content_type = req.get_header_value("Content-Type");
            }
            HttpResponse hres = gateway.handle(hreq);
            res.status = hres.status;
            for (const auto& [name, value] : hres.headers) res.set_header(name, value);
            res.set_content(hres.body, hres.content_type);
        };
        server.Get(".*", handler);
        server.Post(".*", handler);
        server.Put(".*", handler);
        server.Patch(".*", handler);
        server.Delete(".*", handler);

        g_server = &server;
        std::signal(SIGINT, handle_interrupt);
        std::signal(SIGTERM, handle_interrupt);

        if (!server.bind_to_port(host, port)) {
            std::cerr << "error: cannot bind " << host << ":" << port << "\n";
            return kExitUsage;
        }
        std::cout << "listening on http://" << host << ":" << port << std::endl;
        server.listen_after_bind();
        g_server = nullptr;
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

int cmd_bench(long long requests, double zipf, std::uint32_t seed,
              const std::string& config_path) {
    try {
        BenchOptions options;
        options.requests = requests;
        options.zipf_s = zipf;
        options.seed = seed;
        if (!config_path.empty()) {
            options.config = GatewayConfig::load_file(config_path);
            if (options.config.backend_mode != GatewayConfig::BackendMode::Mock) {
                std::cerr << "error: bench needs a mock-backend config\n";
                return kExitUsage;
            }
            options.use_default_config = false;
        }
        BenchReport report = run_bench(options);
        std::cout << report.to_json().dump(2) << "\n";
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

int cmd_stats_build(const std::string& model_file, const std::vector<std::string>& data_files,
                    const std::string& out_file) {
    try {
        auto store = EntityStore::load_dataset(model_file, data_files);
        StatisticsCatalog catalog = build_stats(*store);
        std::ofstream out(out_file);
        if (!out) {
            std::cerr << "error: cannot write " << out_file << "\n";
            return kExitUsage;
        }
        out << catalog.to_json().dump(2) << "\n";
        std::cout << "wrote statistics for " << catalog.sets.size() << " entity sets to "
                  << out_file << "\n";
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

int cmd_queries_check(const std::string& registry_file) {
    try {
        QueryRegistry registry;
        size_t n = registry.load_registry(registry_file);
        nlohmann::json out{{"queries", n}, {"valid", true}};
        std::cout << out.dump() << "\n";
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

int cmd_datagen(const std::string& name, const std::string& out_dir, std::uint32_t seed) {
    try {
        GeneratedDataset dataset = generate_dataset(name, seed);
        write_dataset(dataset, out_dir);
        std::cout << "wrote " << dataset.name << " (" << dataset.records.size()
                  << " entity sets) to " << out_dir << "\n";
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ODataX gateway and query tools"};
    app.require_subcommand(1);

    // translate
    std::string tr_query, tr_set = "Products", tr_model, tr_dataset = "ecommerce-small";
    auto* translate = app.add_subcommand("translate", "Translate a query to OData v4 syntax");
    translate->add_option("query", tr_query, "Raw query string (simplified and/or $-options)");
    translate->add_option("--set", tr_set, "Entity set name")->capture_default_str();
    translate->add_option("--model", tr_model, "Entity model JSON file");
    translate->add_option("--dataset", tr_dataset, "Bundled dataset model to use instead")
        ->capture_default_str();

    // estimate
    std::string es_query, es_set = "Products", es_model, es_dataset = "ecommerce-small";
    std::string es_stats;
    bool es_no_stats = false;
    CostWeights es_weights;
    double es_threshold = kDefaultCostThreshold;
    auto* estimate_cmd = app.add_subcommand("estimate", "Estimate query cost before execution");
    estimate_cmd->add_option("query", es_query, "Raw query string");
    estimate_cmd->add_option("--set", es_set, "Entity set name")->capture_default_str();
    estimate_cmd->add_option("--model", es_model, "Entity model JSON file");
    estimate_cmd->add_option("--dataset", es_dataset, "Bundled dataset to use instead")
        ->capture_default_str();
    estimate_cmd->add_option("--stats", es_stats, "Statistics catalog JSON file");
    estimate_cmd->add_flag("--no-stats", es_no_stats, "Use pinned default selectivities only");
    estimate_cmd->add_option("--w-filter", es_weights.w_filter, "Filter cost weight")
        ->capture_default_str();
    estimate_cmd->add_option("--w-expand", es_weights.w_expand, "Expand cost weight")
        ->capture_default_str();
    estimate_cmd->add_option("--w-size", es_weights.w_size, "Size cost weight")
        ->capture_default_str();
    estimate_cmd
        ->add_option("--rows-per-cost-unit", es_weights.rows_per_cost_unit,
                     "Projected rows per size cost unit")
        ->capture_default_str();
    estimate_cmd->add_option("--threshold", es_threshold, "Rejection threshold")
        ->capture_default_str();

    // serve
    std::string sv_config;
    auto* serve = app.add_subcommand("serve", "Run the gateway HTTP service");
    serve->add_option("config", sv_config, "Gateway config JSON (ODATAX_CONFIG overrides)");

    // bench
    long long bn_requests = 10000;
    double bn_zipf = 1.1;
    std::uint32_t bn_seed = 42;
    std::string bn_config;
    auto* bench = app.add_subcommand("bench", "Replay the seeded cache/cost workload");
    bench->add_option("--queries,--requests", bn_requests, "Number of requests")
        ->capture_default_str();
    bench->add_option("--zipf", bn_zipf, "Zipf locality parameter")->capture_default_str();
    bench->add_option("--seed", bn_seed, "Workload seed")->capture_default_str();
    bench->add_option("--config", bn_config, "Mock-backend gateway config JSON");

    // stats build
    auto* stats = app.add_subcommand("stats", "Statistics catalog commands");
    stats->require_subcommand(1);
    std::string sb_model, sb_out;
    std::vector<std::string> sb_data;
    auto* stats_build = stats->add_subcommand("build", "Full-scan statistics from data files");
    stats_build->add_option("model", sb_model, "Entity model JSON file")->required();
    stats_build->add_option("data", sb_data, "Entity set data files");
    stats_build->add_option("-o,--out", sb_out, "Output statistics file")->required();

    // queries check
    auto* queries = app.add_subcommand("queries", "Named-query registry commands");
    queries->require_subcommand(1);
    std::string qc_registry;
    auto* queries_check = queries->add_subcommand("check", "Validate a registry file");
    queries_check->add_option("registry", qc_registry, "Registry JSON file")->required();

    // datagen
    std::string dg_name, dg_out = "data";
    std::uint32_t dg_seed = 42;
    auto* datagen = app.add_subcommand("datagen", "Write a bundled dataset to disk");
    datagen->add_option("name", dg_name, "ecommerce-small | social-small | erp-small")
        ->required();
    datagen->add_option("-o,--out", dg_out, "Output directory")->capture_default_str();
    datagen->add_option("--seed", dg_seed, "Generator seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (*translate) return cmd_translate(tr_query, tr_set, tr_model, tr_dataset);
    if (*estimate_cmd) {
        return cmd_estimate(es_query, es_set, es_model, es_dataset, es_stats, es_no_stats,
                            es_weights, es_threshold);
    }
    if (*serve) return cmd_serve(sv_config);
    if (*bench) return cmd_bench(bn_requests, bn_zipf, bn_seed, bn_config);
    if (*stats_build) return cmd_stats_build(sb_model, sb_data, sb_out);
    if (*queries_check) return cmd_queries_check(qc_registry);
    if (*datagen) return cmd_datagen(dg_name, dg_out, dg_seed);
    return kExitUsage;
}
