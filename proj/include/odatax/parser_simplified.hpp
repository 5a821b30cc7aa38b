#pragma once

#include <string>
#include <vector>

#include "odatax/ast.hpp"
#include "odatax/model.hpp"

namespace odatax {

// Parses the dollar-free filter shorthand: comma-separated conditions that
// AND together, operators > < >= <= = != plus ':' for string equality.
// Values for non-':' operators infer their literal type (decimal, true,
// false, null, otherwise string); quoting with '...' or "..." forces string.
// Unquoted values run to the next top-level comma and may contain spaces.
// '|' or a bare 'or' word raises UnsupportedConstruct: the shorthand has no
// OR on purpose.
FilterPtr parse_simplified_filter(const std::string& text, const EntitySetDef* set,
                                  const EntityModel* model);

// Parses the `sort` shorthand: comma list of field names, a leading '-'
// marking descending order.
std::vector<OrderKey> parse_simplified_sort(const std::string& text, const EntitySetDef* set,
                                            const EntityModel* model);

// Parses the `select` shorthand: comma list of field names, duplicates are
// an error.
std::vector<std::string> parse_simplified_select(const std::string& text,
                                                 const EntitySetDef* set);

// Parses the plain-named options (filter, sort, select, top, skip) from a
// request's parameter list into a Query fragment. '$'-prefixed names and
// plain names outside that list are ignored here; the gateway routes them.
Query parse_simplified(const std::string& entity_set,
                       const std::vector<std::pair<std::string, std::string>>& options,
                       const EntityModel* model);

struct MergeResult {
    Query query;
    // One note per simplified option that a traditional option displaced.
    std::vector<std::string> warnings;
};

// Combines a traditional fragment with a simplified fragment for the same
// entity set. Filters conjoin (both constraints hold); for every other
// option the traditional side wins outright and a warning records the
// discarded simplified value.
MergeResult merge(const Query& traditional, const Query& simplified);

} // namespace odatax
