#pragma once

#include "json.hpp"
#include "odatax/ast.hpp"
#include "odatax/store.hpp"

namespace odatax {

// Reference evaluator: filter, stable multi-key sort, skip, top, select
// projection (selected fields plus Id), then expand embedding. Strings
// compare ordinally and case-sensitively; null sorts before every value
// ascending; comparisons against null are false except eq/ne. Returns the
// result entities as a JSON array.
nlohmann::json evaluate(const Query& q, const EntityStore::State& state,
                        const EntityModel& model);

// Filter predicate for one entity, exposed as the oracle for selectivity
// tests. Throws TypeMismatch when a comparison crosses value types.
bool matches_filter(const FilterPtr& filter, const Entity& entity,
                    const EntityStore::State& state, const EntityModel& model,
                    const std::string& entity_set);

} // namespace odatax
