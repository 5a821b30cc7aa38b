#pragma once

#include <string>

#include "odatax/ast.hpp"

namespace odatax {

// Rewrites a filter into canonical form: nested And-under-And and
// Or-under-Or chains are flattened, then And/Or child lists are sorted by
// their serialized text. Not and Group nodes are preserved as written; no
// algebraic rewriting happens. Canonicalization is idempotent.
FilterPtr canonicalize(const FilterPtr& filter);

// Canonicalizes a whole query: filter as above, select sorted
// lexicographically, expand sorted recursively by relation name. The sort
// key list keeps its order because reordering it changes results.
Query canonicalize(const Query& q);

// Lowercase hex SHA-256 of arbitrary bytes.
std::string sha256_hex(const std::string& data);

// Cache key for a query: SHA-256 over entitySet + "?" + canonical
// serialization. Queries that differ only in And-conjunct order or select
// order map to the same key.
std::string cache_key(const Query& q);

} // namespace odatax
