#include "odatax/stats.hpp"

#include <algorithm>
#include <fstream>

#include "odatax/errors.hpp"
#include "odatax/store.hpp"

namespace odatax {

long long NumericColumnStats::total_rows() const {
    long long total = 0;
    for (long long c : counts) total += c;
    return total;
}

double NumericColumnStats::rows_below(double x) const {
    if (counts.empty()) return 0.0;
    if (x <= boundaries.front()) return 0.0;
    if (x > boundaries.back()) return static_cast<double>(total_rows());
    double below = 0.0;
    for (size_t i = 0; i < counts.size(); ++i) {
        double lo = boundaries[i];
        double hi = boundaries[i + 1];
        if (x > hi) {
            below += static_cast<double>(counts[i]);
            continue;
        }
        if (hi > lo) {
            below += static_cast<double>(counts[i]) * (x - lo) / (hi - lo);
        }
        // Zero-width bucket: the mass sits exactly at x, none of it below.
        break;
    }
    return below;
}

const EntitySetStats* StatisticsCatalog::find_set(const std::string& name) const {
    auto it = sets.find(name);
    return it == sets.end() ? nullptr : &it->second;
}

StatisticsCatalog StatisticsCatalog::from_json(const nlohmann::json& doc) {
    StatisticsCatalog catalog;
    for (const auto& [set_name, set_doc] : doc.at("sets").items()) {
        EntitySetStats set_stats;
        set_stats.row_count = set_doc.at("rowCount").get<long long>();
        // .value() returns by value; bind each section before iterating so
        // items() never refers to a dead temporary.
        const nlohmann::json numeric_cols =
            set_doc.value("numericColumns", nlohmann::json::object());
        for (const auto& [col, col_doc] : numeric_cols.items()) {
            NumericColumnStats ns;
            ns.boundaries = col_doc.at("boundaries").get<std::vector<double>>();
            ns.counts = col_doc.at("counts").get<std::vector<long long>>();
            if (ns.boundaries.size() != ns.counts.size() + 1) {
                throw Error("InvalidStats", "histogram shape mismatch for column '" + col + "'");
            }
            set_stats.numeric_columns[col] = std::move(ns);
        }
        const nlohmann::json string_cols =
            set_doc.value("stringColumns", nlohmann::json::object());
        for (const auto& [col, col_doc] : string_cols.items()) {
            StringColumnStats ss;
            for (const auto& [value, freq] : col_doc.at("topK").items()) {
                ss.top_k[value] = freq.get<long long>();
            }
            ss.residual_rows = col_doc.value("residualRows", 0LL);
            ss.residual_distinct = col_doc.value("residualDistinct", 0LL);
            set_stats.string_columns[col] = std::move(ss);
        }
        const nlohmann::json relation_docs =
            set_doc.value("relations", nlohmann::json::object());
        for (const auto& [rel, rel_doc] : relation_docs.items()) {
            RelationStats rs;
            rs.cardinality = rel_doc.value("cardinality", "one-to-many") == "one-to-one"
                                 ? Cardinality::OneToOne
                                 : Cardinality::OneToMany;
            rs.avg_cardinality = rel_doc.at("avgCardinality").get<double>();
            rs.target_set = rel_doc.value("target", "");
            set_stats.relations[rel] = rs;
        }
        catalog.sets[set_name] = std::move(set_stats);
    }
    return catalog;
}

StatisticsCatalog StatisticsCatalog::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("FileError", "cannot open stats file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error("InvalidStats", "stats file '" + path + "' is not valid JSON: " + e.what());
    }
    return from_json(doc);
}

nlohmann::json StatisticsCatalog::to_json() const {
    nlohmann::json sets_doc = nlohmann::json::object();
    for (const auto& [set_name, set_stats] : sets) {
        nlohmann::json numeric = nlohmann::json::object();
        for (const auto& [col, ns] : set_stats.numeric_columns) {
            numeric[col] = {{"boundaries", ns.boundaries}, {"counts", ns.counts}};
        }
        nlohmann::json strings = nlohmann::json::object();
        for (const auto& [col, ss] : set_stats.string_columns) {
            nlohmann::json top_k = nlohmann::json::object();
            for (const auto& [value, freq] : ss.top_k) top_k[value] = freq;
            strings[col] = {{"topK", top_k},
                            {"residualRows", ss.residual_rows},
                            {"residualDistinct", ss.residual_distinct}};
        }
        nlohmann::json relations = nlohmann::json::object();
        for (const auto& [rel, rs] : set_stats.relations) {
            relations[rel] = {{"cardinality", to_string(rs.cardinality)},
                              {"avgCardinality", rs.avg_cardinality},
                              {"target", rs.target_set}};
        }
        sets_doc[set_name] = {{"rowCount", set_stats.row_count},
                              {"numericColumns", numeric},
                              {"stringColumns", strings},
                              {"relations", relations}};
    }
    return {{"sets", sets_doc}};
}

namespace {

NumericColumnStats build_histogram(std::vector<double>& values, int bucket_count) {
    NumericColumnStats ns;
    if (values.empty()) return ns;
    std::sort(values.begin(), values.end());
    size_t n = values.size();
    size_t buckets = std::min<size_t>(bucket_count, n);
    ns.boundaries.push_back(values.front());
    for (size_t b = 0; b < buckets; ++b) {
        size_t start = b * n / buckets;
        size_t end = (b + 1) * n / buckets;
        ns.counts.push_back(static_cast<long long>(end - start));
        // Upper edge: the next run's first value, or the overall max for
        // the last bucket. Linear interpolation treats the bucket as
        // spanning this closed interval.
        ns.boundaries.push_back(b + 1 < buckets ? values[end] : values[n - 1]);
    }
    return ns;
}

StringColumnStats build_string_stats(const std::map<std::string, long long>& freq, int top_k) {
    StringColumnStats ss;
    // Highest frequency first; ties resolved lexicographically so the
    // catalog is deterministic.
    std::vector<std::pair<std::string, long long>> ranked(freq.begin(), freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    for (size_t i = 0; i < ranked.size(); ++i) {
        if (static_cast<int>(i) < top_k) {
            ss.top_k[ranked[i].first] = ranked[i].second;
        } else {
            ss.residual_rows += ranked[i].second;
            ss.residual_distinct += 1;
        }
    }
    return ss;
}

} // namespace

StatisticsCatalog build_stats(const EntityStore& store, int bucket_count, int top_k) {
    StatisticsCatalog catalog;
    auto state = store.snapshot();
    for (const auto& set_def : store.model().sets) {
        EntitySetStats set_stats;
        auto it = state->find(set_def.name);
        const EntitySetData* data = it == state->end() ? nullptr : it->second.get();
        set_stats.row_count = data ? static_cast<long long>(data->entities.size()) : 0;

        for (const auto& prop : set_def.properties) {
            if (prop.type == PropertyType::Number) {
                std::vector<double> values;
                if (data) {
                    values.reserve(data->entities.size());
                    for (const auto& e : data->entities) {
                        auto f = e.fields.find(prop.name);
                        if (f != e.fields.end() && std::holds_alternative<double>(f->second)) {
                            values.push_back(std::get<double>(f->second));
                        }
                    }
                }
                NumericColumnStats ns = build_histogram(values, bucket_count);
                if (!ns.counts.empty()) set_stats.numeric_columns[prop.name] = std::move(ns);
            } else if (prop.type == PropertyType::String) {
                std::map<std::string, long long> freq;
                if (data) {
                    for (const auto& e : data->entities) {
                        auto f = e.fields.find(prop.name);
                        if (f != e.fields.end() &&
                            std::holds_alternative<std::string>(f->second)) {
                            freq[std::get<std::string>(f->second)] += 1;
                        }
                    }
                }
                if (!freq.empty()) {
                    set_stats.string_columns[prop.name] = build_string_stats(freq, top_k);
                }
            }
        }

        for (const auto& rel : set_def.relations) {
            RelationStats rs;
            rs.cardinality = rel.cardinality;
            rs.target_set = rel.target_set;
            long long links = 0;
            if (data) {
                for (const auto& e : data->entities) {
                    auto l = e.links.find(rel.name);
                    if (l != e.links.end()) links += static_cast<long long>(l->second.size());
                }
            }
            rs.avg_cardinality =
                set_stats.row_count > 0
                    ? static_cast<double>(links) / static_cast<double>(set_stats.row_count)
                    : 0.0;
            set_stats.relations[rel.name] = rs;
        }

        catalog.sets[set_def.name] = std::move(set_stats);
    }
    return catalog;
}

} // namespace odatax
