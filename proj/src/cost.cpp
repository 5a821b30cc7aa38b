#include "odatax/cost.hpp"

#include <algorithm>
#include <cmath>

namespace odatax {

namespace {

void filter_cost_walk(const FilterPtr& node, int group_depth, double& total) {
    switch (node->kind) {
    case FilterExpr::Kind::Comparison:
        total += kComparisonLeafCost * std::pow(kNestingBase, group_depth);
        return;
    case FilterExpr::Kind::StringFn:
        total += kStringFnLeafCost * std::pow(kNestingBase, group_depth);
        return;
    case FilterExpr::Kind::Group:
        filter_cost_walk(node->children.front(), group_depth + 1, total);
        return;
    case FilterExpr::Kind::Not:
        total += 1.0;
        filter_cost_walk(node->children.front(), group_depth, total);
        return;
    case FilterExpr::Kind::And:
    case FilterExpr::Kind::Or:
        total += 1.0;
        for (const auto& child : node->children) {
            filter_cost_walk(child, group_depth, total);
        }
        return;
    }
}

double expand_cost_walk(const std::vector<ExpandNode>& nodes, const std::string& set_name,
                        const StatisticsCatalog& stats, double path_product) {
    double total = 0.0;
    for (const auto& node : nodes) {
        std::string next_set;
        double avg = kDefaultAvgCardinality;
        const EntitySetStats* set_stats = stats.find_set(set_name);
        if (set_stats) {
            auto it = set_stats->relations.find(node.relation);
            if (it != set_stats->relations.end()) {
                avg = it->second.avg_cardinality;
                next_set = it->second.target_set;
            }
        }
        double node_product = path_product * std::max(avg, 1.0);
        total += node_product;
        total += expand_cost_walk(node.children, next_set, stats, node_product);
    }
    return total;
}

double combined_selectivity(const FilterPtr& node, const std::string& entity_set,
                            const StatisticsCatalog& stats) {
    switch (node->kind) {
    case FilterExpr::Kind::Comparison:
    case FilterExpr::Kind::StringFn:
        return selectivity(*node, entity_set, stats);
    case FilterExpr::Kind::Group:
        return combined_selectivity(node->children.front(), entity_set, stats);
    case FilterExpr::Kind::Not:
        return 1.0 - combined_selectivity(node->children.front(), entity_set, stats);
    case FilterExpr::Kind::And: {
        double s = 1.0;
        for (const auto& child : node->children) {
            s *= combined_selectivity(child, entity_set, stats);
        }
        return s;
    }
    case FilterExpr::Kind::Or: {
        double s = 0.0;
        for (const auto& child : node->children) {
            double c = combined_selectivity(child, entity_set, stats);
            s = s + c - s * c;
        }
        return s;
    }
    }
    return 1.0;
}

int max_expand_depth(const std::vector<ExpandNode>& nodes) {
    int depth = 0;
    for (const auto& node : nodes) {
        depth = std::max(depth, 1 + max_expand_depth(node.children));
    }
    return depth;
}

long long render_int(double v) { return std::llround(v); }

} // namespace

double filter_cost(const FilterPtr& filter) {
    if (!filter) return 0.0;
    double total = 0.0;
    filter_cost_walk(filter, 0, total);
    return total;
}

double expand_cost(const std::vector<ExpandNode>& expand, const std::string& entity_set,
                   const StatisticsCatalog& stats) {
    return expand_cost_walk(expand, entity_set, stats, 1.0);
}

double selectivity(const FilterExpr& leaf, const std::string& entity_set,
                   const StatisticsCatalog& stats) {
    if (leaf.kind == FilterExpr::Kind::StringFn) return kStringFnSelectivity;

    const EntitySetStats* set_stats = stats.find_set(entity_set);
    const std::string field = leaf.field.str();
    const bool is_range = leaf.op == CompareOp::Gt || leaf.op == CompareOp::Ge ||
                          leaf.op == CompareOp::Lt || leaf.op == CompareOp::Le;

    if (set_stats && set_stats->row_count > 0) {
        double rows = static_cast<double>(set_stats->row_count);
        if (leaf.value.kind == Literal::Kind::String &&
            (leaf.op == CompareOp::Eq || leaf.op == CompareOp::Ne)) {
            auto col = set_stats->string_columns.find(field);
            if (col != set_stats->string_columns.end()) {
                double eq;
                auto hit = col->second.top_k.find(leaf.value.text);
                if (hit != col->second.top_k.end()) {
                    eq = static_cast<double>(hit->second) / rows;
                } else {
                    eq = static_cast<double>(col->second.residual_rows) /
                         (rows * static_cast<double>(
                                     std::max<long long>(col->second.residual_distinct, 1)));
                }
                return leaf.op == CompareOp::Eq ? eq : 1.0 - eq;
            }
        }
        if (leaf.value.kind == Literal::Kind::Number && is_range) {
            auto col = set_stats->numeric_columns.find(field);
            if (col != set_stats->numeric_columns.end() && col->second.total_rows() > 0) {
                double total = static_cast<double>(col->second.total_rows());
                double below = col->second.rows_below(leaf.value.num);
                double frac_below = std::clamp(below / total, 0.0, 1.0);
                if (leaf.op == CompareOp::Lt || leaf.op == CompareOp::Le) return frac_below;
                return 1.0 - frac_below;
            }
        }
    }

    if (is_range) return kDefaultRangeSelectivity;
    if (leaf.op == CompareOp::Ne) return 1.0 - kDefaultEqSelectivity;
    return kDefaultEqSelectivity;
}

long long projected_rows(const Query& q, const StatisticsCatalog& stats) {
    const EntitySetStats* set_stats = stats.find_set(q.entity_set);
    long long base = set_stats ? set_stats->row_count : 0;
    double s = q.filter ? combined_selectivity(q.filter, q.entity_set, stats) : 1.0;
    long long rows = std::llround(static_cast<double>(base) * s);
    long long floor = s == 0.0 ? 0 : 1;
    rows = std::clamp(rows, std::min(floor, base), base);
    if (q.top) rows = std::min(rows, *q.top);
    return std::max<long long>(rows, 0);
}

CostEstimate estimate(const Query& q, const StatisticsCatalog& stats,
                      const CostWeights& weights, double threshold) {
    CostEstimate est;
    est.filter_cost = filter_cost(q.filter);
    est.expand_cost = expand_cost(q.expand, q.entity_set, stats);
    est.projected_rows = projected_rows(q, stats);
    est.size_cost = static_cast<double>(est.projected_rows) / weights.rows_per_cost_unit;
    est.total = weights.w_filter * est.filter_cost + weights.w_expand * est.expand_cost +
                weights.w_size * est.size_cost;
    est.threshold = threshold;

    if (est.total > 0 && est.expand_cost > 0.5 * est.total) {
        int depth = max_expand_depth(q.expand);
        est.suggestions.push_back("Reduce expand depth from " + std::to_string(depth) +
                                  " to " + std::to_string(depth - 1) + " levels");
    }
    if (static_cast<double>(est.projected_rows) > weights.rows_per_cost_unit * 100.0) {
        est.suggestions.push_back("Add more selective filter conditions");
    }
    return est;
}

CostDecision check(const CostEstimate& est) {
    CostDecision decision;
    if (est.total <= est.threshold) return decision;
    decision.accepted = false;
    nlohmann::ordered_json details;
    details["filterCost"] = render_int(est.filter_cost);
    details["expandCost"] = render_int(est.expand_cost);
    details["projectedRows"] = est.projected_rows;
    details["suggestions"] = est.suggestions;
    nlohmann::ordered_json error;
    error["code"] = "QueryTooExpensive";
    error["message"] = "Query cost (" + std::to_string(render_int(est.total)) +
                       ") exceeds maximum allowed (" + std::to_string(render_int(est.threshold)) +
                       ")";
    error["details"] = details;
    decision.payload = nlohmann::ordered_json{{"error", error}};
    return decision;
}

nlohmann::ordered_json estimate_to_json(const CostEstimate& est) {
    nlohmann::ordered_json doc;
    doc["filterCost"] = est.filter_cost;
    doc["expandCost"] = est.expand_cost;
    doc["projectedRows"] = est.projected_rows;
    doc["sizeCost"] = est.size_cost;
    doc["total"] = est.total;
    doc["threshold"] = est.threshold;
    doc["suggestions"] = est.suggestions;
    return doc;
}

} // namespace odatax
