#pragma once

#include <string>

#include "odatax/ast.hpp"

namespace odatax {

// Renders a filter tree in traditional syntax. Parentheses appear exactly at
// Group nodes, so a tree in parser shape serializes back to the text it was
// parsed from (modulo whitespace normalization to single spaces).
std::string serialize_filter(const FilterPtr& filter);

// Renders the expand list, e.g. "Reviews($expand=Author),Supplier".
std::string serialize_expand(const std::vector<ExpandNode>& expand);

// Renders a full query as traditional query-string options in the fixed
// order $filter, $select, $orderby, $top, $skip, $expand. Options that are
// unset produce nothing. The entity set name is not included.
std::string serialize_odata(const Query& q);

// Quotes a string literal for traditional syntax: wraps in single quotes and
// doubles any embedded single quote.
std::string quote_string(const std::string& raw);

} // namespace odatax
