#include "odatax/evaluate.hpp"

#include <algorithm>

#include "odatax/errors.hpp"

namespace odatax {

namespace {

// Value lookup through a navigation path. Intermediate segments follow
// one-to-one links; a missing link yields null. Returns nullptr-equivalent
// (monostate) when any hop is absent.
Value field_value(const Entity& entity, const FieldRef& field, const EntityStore::State& state,
                  const EntityModel& model, const std::string& entity_set) {
    const Entity* current = &entity;
    const EntitySetDef* set = model.find_set(entity_set);
    for (size_t i = 0; i + 1 < field.segments.size(); ++i) {
        const RelationDef* rel = set ? set->find_relation(field.segments[i]) : nullptr;
        if (!rel) return std::monostate{};
        if (rel->cardinality != Cardinality::OneToOne) {
            throw type_mismatch("cannot navigate one-to-many relation '" + rel->name +
                                "' in a comparison");
        }
        auto link = current->links.find(rel->name);
        if (link == current->links.end() || link->second.empty()) return std::monostate{};
        auto target = state.find(rel->target_set);
        if (target == state.end()) return std::monostate{};
        auto pos = target->second->index.find(link->second.front());
        if (pos == target->second->index.end()) return std::monostate{};
        current = &target->second->entities[pos->second];
        set = model.find_set(rel->target_set);
    }
    auto f = current->fields.find(field.segments.back());
    if (f == current->fields.end()) return std::monostate{};
    return f->second;
}

int type_rank(const Value& v) {
    if (std::holds_alternative<std::monostate>(v)) return 0;
    if (std::holds_alternative<bool>(v)) return 1;
    if (std::holds_alternative<double>(v)) return 2;
    return 3;
}

// Three-way compare for sorting: null before everything, then by type rank,
// then by value. Deterministic for heterogeneous columns.
int order_compare(const Value& a, const Value& b) {
    int ra = type_rank(a), rb = type_rank(b);
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (ra) {
    case 0: return 0;
    case 1: {
        bool x = std::get<bool>(a), y = std::get<bool>(b);
        if (x == y) return 0;
        return x < y ? -1 : 1;
    }
    case 2: {
        double x = std::get<double>(a), y = std::get<double>(b);
        if (x == y) return 0;
        return x < y ? -1 : 1;
    }
    default: {
        const std::string& x = std::get<std::string>(a);
        const std::string& y = std::get<std::string>(b);
        int c = x.compare(y);
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    }
}

bool eval_comparison(const FilterExpr& cmp, const Value& field, const std::string& field_name) {
    const Literal& lit = cmp.value;

    // Null on either side: only eq/ne can be true.
    bool field_null = std::holds_alternative<std::monostate>(field);
    bool lit_null = lit.kind == Literal::Kind::Null;
    if (field_null || lit_null) {
        bool both_null = field_null && lit_null;
        if (cmp.op == CompareOp::Eq) return both_null;
        if (cmp.op == CompareOp::Ne) return !both_null;
        return false;
    }

    int cmp_result;
    switch (lit.kind) {
    case Literal::Kind::Number: {
        if (!std::holds_alternative<double>(field)) {
            throw type_mismatch("field '" + field_name + "' is not a number; cannot compare to " +
                                lit.text);
        }
        double f = std::get<double>(field);
        cmp_result = f < lit.num ? -1 : (f > lit.num ? 1 : 0);
        break;
    }
    case Literal::Kind::String: {
        if (!std::holds_alternative<std::string>(field)) {
            throw type_mismatch("field '" + field_name +
                                "' is not a string; cannot compare to '" + lit.text + "'");
        }
        int c = std::get<std::string>(field).compare(lit.text);
        cmp_result = c < 0 ? -1 : (c > 0 ? 1 : 0);
        break;
    }
    case Literal::Kind::Boolean: {
        if (!std::holds_alternative<bool>(field)) {
            throw type_mismatch("field '" + field_name +
                                "' is not a boolean; cannot compare to " + lit.text);
        }
        bool f = std::get<bool>(field);
        cmp_result = f == lit.flag ? 0 : (!f ? -1 : 1);
        break;
    }
    default:
        return false;
    }

    switch (cmp.op) {
    case CompareOp::Eq: return cmp_result == 0;
    case CompareOp::Ne: return cmp_result != 0;
    case CompareOp::Gt: return cmp_result > 0;
    case CompareOp::Ge: return cmp_result >= 0;
    case CompareOp::Lt: return cmp_result < 0;
    case CompareOp::Le: return cmp_result <= 0;
    }
    return false;
}

bool eval_string_fn(const FilterExpr& fn, const Value& field, const std::string& field_name) {
    if (std::holds_alternative<std::monostate>(field)) return false;
    if (!std::holds_alternative<std::string>(field)) {
        throw type_mismatch("string function on non-string field '" + field_name + "'");
    }
    const std::string& haystack = std::get<std::string>(field);
    const std::string& needle = fn.value.text;
    switch (fn.fn) {
    case StringFn::Contains: return haystack.find(needle) != std::string::npos;
    case StringFn::StartsWith:
        return haystack.size() >= needle.size() &&
               haystack.compare(0, needle.size(), needle) == 0;
    case StringFn::EndsWith:
        return haystack.size() >= needle.size() &&
               haystack.compare(haystack.size() - needle.size(), needle.size(), needle) == 0;
    }
    return false;
}

nlohmann::json project_entity(const Entity& entity, const std::vector<std::string>& select,
                              const std::vector<ExpandNode>& expand,
                              const EntityStore::State& state, const EntityModel& model,
                              const EntitySetDef* set);

nlohmann::json expand_relation(const Entity& entity, const ExpandNode& node,
                               const EntityStore::State& state, const EntityModel& model,
                               const EntitySetDef* set) {
    const RelationDef* rel = set ? set->find_relation(node.relation) : nullptr;
    bool to_one = rel && rel->cardinality == Cardinality::OneToOne;
    const EntitySetDef* target_set = rel ? model.find_set(rel->target_set) : nullptr;

    nlohmann::json embedded = nlohmann::json::array();
    auto link = entity.links.find(node.relation);
    if (link != entity.links.end() && target_set) {
        auto target = state.find(target_set->name);
        for (long long id : link->second) {
            if (target == state.end()) break;
            auto pos = target->second->index.find(id);
            if (pos == target->second->index.end()) continue;
            embedded.push_back(project_entity(target->second->entities[pos->second], {},
                                              node.children, state, model, target_set));
            if (to_one) break;
        }
    }
    if (to_one) {
        if (embedded.empty()) return nullptr;
        return embedded.front();
    }
    return embedded;
}

nlohmann::json project_entity(const Entity& entity, const std::vector<std::string>& select,
                              const std::vector<ExpandNode>& expand,
                              const EntityStore::State& state, const EntityModel& model,
                              const EntitySetDef* set) {
    nlohmann::json doc = nlohmann::json::object();
    if (select.empty()) {
        for (const auto& [name, value] : entity.fields) doc[name] = value_to_json(value);
    } else {
        doc["Id"] = entity.id;
        for (const auto& name : select) {
            auto f = entity.fields.find(name);
            doc[name] = f == entity.fields.end() ? nlohmann::json() : value_to_json(f->second);
        }
    }
    for (const auto& node : expand) {
        doc[node.relation] = expand_relation(entity, node, state, model, set);
    }
    return doc;
}

} // namespace

bool matches_filter(const FilterPtr& filter, const Entity& entity,
                    const EntityStore::State& state, const EntityModel& model,
                    const std::string& entity_set) {
    if (!filter) return true;
    switch (filter->kind) {
    case FilterExpr::Kind::Comparison: {
        Value v = field_value(entity, filter->field, state, model, entity_set);
        return eval_comparison(*filter, v, filter->field.str());
    }
    case FilterExpr::Kind::StringFn: {
        Value v = field_value(entity, filter->field, state, model, entity_set);
        return eval_string_fn(*filter, v, filter->field.str());
    }
    case FilterExpr::Kind::And:
        for (const auto& child : filter->children) {
            if (!matches_filter(child, entity, state, model, entity_set)) return false;
        }
        return true;
    case FilterExpr::Kind::Or:
        for (const auto& child : filter->children) {
            if (matches_filter(child, entity, state, model, entity_set)) return true;
        }
        return false;
    case FilterExpr::Kind::Not:
        return !matches_filter(filter->children.front(), entity, state, model, entity_set);
    case FilterExpr::Kind::Group:
        return matches_filter(filter->children.front(), entity, state, model, entity_set);
    }
    return true;
}

nlohmann::json evaluate(const Query& q, const EntityStore::State& state,
                        const EntityModel& model) {
    auto it = state.find(q.entity_set);
    if (it == state.end()) {
        throw Error("UnknownEntitySet", "unknown entity set '" + q.entity_set + "'");
    }
    const EntitySetDef* set = model.find_set(q.entity_set);
    const EntitySetData& data = *it->second;

    std::vector<const Entity*> rows;
    rows.reserve(data.entities.size());
    for (const auto& entity : data.entities) {
        if (matches_filter(q.filter, entity, state, model, q.entity_set)) {
            rows.push_back(&entity);
        }
    }

    if (!q.order_by.empty()) {
        std::stable_sort(rows.begin(), rows.end(), [&](const Entity* a, const Entity* b) {
            for (const auto& key : q.order_by) {
                Value va = field_value(*a, key.field, state, model, q.entity_set);
                Value vb = field_value(*b, key.field, state, model, q.entity_set);
                int c = order_compare(va, vb);
                if (c != 0) return key.descending ? c > 0 : c < 0;
            }
            return false;
        });
    }

    size_t begin = 0;
    if (q.skip) begin = std::min<size_t>(static_cast<size_t>(*q.skip), rows.size());
    size_t end = rows.size();
    if (q.top) end = std::min(end, begin + static_cast<size_t>(*q.top));

    nlohmann::json out = nlohmann::json::array();
    for (size_t i = begin; i < end; ++i) {
        out.push_back(project_entity(*rows[i], q.select, q.expand, state, model, set));
    }
    return out;
}

} // namespace odatax
