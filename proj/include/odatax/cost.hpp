#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "odatax/ast.hpp"
#include "odatax/stats.hpp"

namespace odatax {

// Component weights for the total-cost formula. rowsPerCostUnit converts
// projected result rows into the size component.
struct CostWeights {
    double w_filter = 1.0;
    double w_expand = 1.0;
    double w_size = 1.0;
    double rows_per_cost_unit = 1000.0;
};

inline constexpr double kDefaultCostThreshold = 500.0;

// Pinned estimation constants. The shape of the model (exponential nesting
// penalty, multiplicative expand chains, histogram selectivity) is fixed;
// these are the calibration points.
inline constexpr double kComparisonLeafCost = 1.0;
inline constexpr double kStringFnLeafCost = 5.0;
inline constexpr double kNestingBase = 2.0;
inline constexpr double kDefaultAvgCardinality = 10.0;
inline constexpr double kDefaultEqSelectivity = 0.1;
inline constexpr double kDefaultRangeSelectivity = 0.33;
inline constexpr double kStringFnSelectivity = 0.25;

struct CostEstimate {
    double filter_cost = 0.0;
    double expand_cost = 0.0;
    long long projected_rows = 0;
    double size_cost = 0.0;
    double total = 0.0;
    double threshold = kDefaultCostThreshold;
    std::vector<std::string> suggestions;
};

// Filter complexity: each leaf costs 1 (comparison) or 5 (string function)
// scaled by 2^(number of enclosing parenthesized groups), plus 1 per
// and/or/not node. Deeper nesting is exponentially more expensive because
// backends cannot index into it.
double filter_cost(const FilterPtr& filter);

// Expand fan-out: every expand node contributes the product of the average
// relation cardinalities on its path from the root, so chains compound
// multiplicatively. Unknown relations assume an average of 10 related rows.
double expand_cost(const std::vector<ExpandNode>& expand, const std::string& entity_set,
                   const StatisticsCatalog& stats);

// Estimated fraction of rows a single leaf condition keeps, from the
// catalog when it covers the column, otherwise from pinned defaults.
double selectivity(const FilterExpr& leaf, const std::string& entity_set,
                   const StatisticsCatalog& stats);

// Estimated result row count: combined filter selectivity applied to the
// set's row count (independence assumed), clamped to at least one row for
// any nonzero selectivity, then capped by $top.
long long projected_rows(const Query& q, const StatisticsCatalog& stats);

CostEstimate estimate(const Query& q, const StatisticsCatalog& stats,
                      const CostWeights& weights = {},
                      double threshold = kDefaultCostThreshold);

struct CostDecision {
    bool accepted = true;
    nlohmann::ordered_json payload; // rejection body when not accepted
};

// Inclusive accept at the threshold; the rejection body renders every
// number as an integer and carries the suggestion list.
CostDecision check(const CostEstimate& est);

nlohmann::ordered_json estimate_to_json(const CostEstimate& est);

} // namespace odatax
