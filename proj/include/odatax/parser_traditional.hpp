#pragma once

#include <map>
#include <string>

#include "odatax/ast.hpp"
#include "odatax/model.hpp"

namespace odatax {

// Parses traditional $-prefixed query options against an entity set.
// `options` holds already percent-decoded option name/value pairs in request
// order; only $-prefixed names belong here. When `model` is non-null every
// field reference is resolved against it (unknown fields fail, casing is
// normalized to the declared spelling); a null model skips resolution and
// keeps spellings as written, which template validation uses.
//
// Duplicate options raise DuplicateOption, negative $top/$skip raise
// RangeError, repeated $select fields raise DuplicateField, and anything the
// grammar cannot express raises InvalidQuery with position info.
Query parse_traditional(const std::string& entity_set,
                        const std::vector<std::pair<std::string, std::string>>& options,
                        const EntityModel* model);

// Parses a single $filter expression. Exposed for tests and template
// validation.
FilterPtr parse_filter(const std::string& text, const EntitySetDef* set,
                       const EntityModel* model);

// Splits a raw query string (already percent-decoded) on '&' into
// name/value pairs, preserving order. A bare name becomes {name, ""}.
std::vector<std::pair<std::string, std::string>> split_query_options(const std::string& raw);

} // namespace odatax
