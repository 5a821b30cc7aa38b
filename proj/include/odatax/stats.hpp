#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "odatax/model.hpp"

namespace odatax {

class EntityStore;

// Pinned statistics shape defaults. Exposed so callers can build coarser or
// finer catalogs; every bundled artifact uses these values.
inline constexpr int kHistogramBuckets = 32;
inline constexpr int kTopKValues = 100;

// Equi-depth histogram over one numeric column: bucket i spans
// [boundaries[i], boundaries[i+1]] and holds counts[i] rows, so counts sum
// to the column's row count and each bucket holds a near-equal share.
struct NumericColumnStats {
    std::vector<double> boundaries; // size = counts.size() + 1, non-decreasing
    std::vector<long long> counts;

    long long total_rows() const;
    // Estimated number of rows with value < x, linear within the bucket
    // that contains x.
    double rows_below(double x) const;
};

// Frequency sketch over one string column: the K most frequent values
// exactly, everything else folded into residual totals.
struct StringColumnStats {
    std::map<std::string, long long> top_k;
    long long residual_rows = 0;
    long long residual_distinct = 0;
};

struct RelationStats {
    Cardinality cardinality = Cardinality::OneToMany;
    double avg_cardinality = 0.0;
    std::string target_set; // lets expand chains resolve without the model
};

struct EntitySetStats {
    long long row_count = 0;
    std::map<std::string, NumericColumnStats> numeric_columns;
    std::map<std::string, StringColumnStats> string_columns;
    std::map<std::string, RelationStats> relations;
};

// Immutable snapshot of per-set statistics. Estimation works with or
// without one; missing pieces fall back to pinned default selectivities.
struct StatisticsCatalog {
    std::map<std::string, EntitySetStats> sets;

    const EntitySetStats* find_set(const std::string& name) const;

    static StatisticsCatalog from_json(const nlohmann::json& doc);
    static StatisticsCatalog load_file(const std::string& path);
    nlohmann::json to_json() const;
};

// Full-scan statistics build: exact histograms, exact top-K frequencies,
// exact relation cardinality means.
StatisticsCatalog build_stats(const EntityStore& store, int bucket_count = kHistogramBuckets,
                              int top_k = kTopKValues);

} // namespace odatax
