#include "odatax/store.hpp"

#include <algorithm>
#include <fstream>

#include "odatax/errors.hpp"

namespace odatax {

nlohmann::json value_to_json(const Value& v) {
    if (std::holds_alternative<std::monostate>(v)) return nullptr;
    if (std::holds_alternative<bool>(v)) return std::get<bool>(v);
    if (std::holds_alternative<double>(v)) {
        double d = std::get<double>(v);
        long long i = static_cast<long long>(d);
        if (static_cast<double>(i) == d) return i; // render integral numbers without ".0"
        return d;
    }
    return std::get<std::string>(v);
}

Value value_from_json(const nlohmann::json& v) {
    if (v.is_null()) return std::monostate{};
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return v.get<std::string>();
    throw Error("SchemaMismatch", "field values must be scalars, got " + v.dump());
}

EntityStore::EntityStore(EntityModel model)
    : model_(std::move(model)), state_(std::make_shared<const State>()) {
    State initial;
    for (const auto& set : model_.sets) {
        initial[set.name] = std::make_shared<const EntitySetData>();
    }
    state_ = std::make_shared<const State>(std::move(initial));
}

std::shared_ptr<EntityStore> EntityStore::load_dataset(
    const std::string& model_file, const std::vector<std::string>& data_files) {
    auto store = std::make_shared<EntityStore>(EntityModel::load_file(model_file));
    for (const auto& path : data_files) {
        std::ifstream in(path);
        if (!in) throw Error("FileError", "cannot open data file '" + path + "'");
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw Error("SchemaMismatch",
                        "data file '" + path + "' is not valid JSON: " + e.what());
        }
        if (!doc.is_object() || !doc.contains("entitySet") || !doc.contains("records")) {
            throw Error("SchemaMismatch",
                        "data file '" + path + "' must hold {\"entitySet\", \"records\"}");
        }
        store->load_records(doc["entitySet"].get<std::string>(), doc["records"]);
    }
    store->validate_links();
    return store;
}

Entity EntityStore::record_to_entity(const EntitySetDef& set,
                                     const nlohmann::json& record) const {
    if (!record.is_object()) {
        throw Error("SchemaMismatch", "records must be JSON objects");
    }
    Entity entity;
    if (!record.contains("Id") || !record["Id"].is_number_integer()) {
        throw Error("SchemaMismatch", "record in '" + set.name + "' lacks an integer Id");
    }
    entity.id = record["Id"].get<long long>();
    for (const auto& [key, value] : record.items()) {
        const PropertyDef* prop = set.find_property(key);
        if (prop) {
            Value v = value_from_json(value);
            bool ok = std::holds_alternative<std::monostate>(v) ||
                      (prop->type == PropertyType::Number && std::holds_alternative<double>(v)) ||
                      (prop->type == PropertyType::String &&
                       std::holds_alternative<std::string>(v)) ||
                      (prop->type == PropertyType::Boolean && std::holds_alternative<bool>(v));
            if (!ok) {
                throw Error("SchemaMismatch", "field '" + prop->name + "' of '" + set.name +
                                                  "' expects " + to_string(prop->type));
            }
            entity.fields[prop->name] = std::move(v);
            continue;
        }
        const RelationDef* rel = set.find_relation(key);
        if (rel) {
            if (!value.is_array()) {
                throw Error("SchemaMismatch",
                            "relation '" + rel->name + "' must be an id array");
            }
            std::vector<long long> ids;
            for (const auto& id : value) {
                if (!id.is_number_integer()) {
                    throw Error("SchemaMismatch",
                                "relation '" + rel->name + "' must hold integer ids");
                }
                ids.push_back(id.get<long long>());
            }
            if (rel->cardinality == Cardinality::OneToOne && ids.size() > 1) {
                throw Error("SchemaMismatch", "one-to-one relation '" + rel->name +
                                                  "' maps id " + std::to_string(entity.id) +
                                                  " to " + std::to_string(ids.size()) +
                                                  " targets");
            }
            entity.links[rel->name] = std::move(ids);
            continue;
        }
        throw Error("SchemaMismatch",
                    "unknown field '" + key + "' on entity set '" + set.name + "'");
    }
    return entity;
}

void EntityStore::load_records(const std::string& set_name, const nlohmann::json& records) {
    const EntitySetDef* set = model_.find_set(set_name);
    if (!set) throw Error("UnknownEntitySet", "unknown entity set '" + set_name + "'");
    if (!records.is_array()) {
        throw Error("SchemaMismatch", "records for '" + set_name + "' must be an array");
    }
    std::lock_guard<std::mutex> lock(mutex_);
    auto data = std::make_shared<EntitySetData>(*state_->at(set->name));
    for (const auto& record : records) {
        Entity entity = record_to_entity(*set, record);
        if (data->index.count(entity.id)) {
            throw Error("DuplicateId", "duplicate id " + std::to_string(entity.id) + " in '" +
                                           set_name + "'");
        }
        data->index[entity.id] = data->entities.size();
        data->entities.push_back(std::move(entity));
    }
    auto next = std::make_shared<State>(*state_);
    (*next)[set->name] = std::move(data);
    state_ = std::move(next);
}

void EntityStore::check_entity_links(const State& state, const EntitySetDef& set,
                                     const Entity& entity) const {
    for (const auto& [rel_name, ids] : entity.links) {
        const RelationDef* rel = set.find_relation(rel_name);
        auto target = state.find(rel->target_set);
        for (long long id : ids) {
            if (target == state.end() || !target->second->index.count(id)) {
                throw Error("DanglingReference",
                            "relation '" + rel_name + "' on id " + std::to_string(entity.id) +
                                " in '" + set.name + "' references missing " + rel->target_set +
                                " id " + std::to_string(id));
            }
        }
    }
}

void EntityStore::validate_links() const {
    auto state = snapshot();
    for (const auto& set : model_.sets) {
        auto it = state->find(set.name);
        if (it == state->end()) continue;
        for (const auto& entity : it->second->entities) {
            check_entity_links(*state, set, entity);
        }
    }
}

std::shared_ptr<const EntityStore::State> EntityStore::snapshot() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return state_;
}

namespace {

nlohmann::json entity_record(const Entity& entity) {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [name, value] : entity.fields) doc[name] = value_to_json(value);
    for (const auto& [name, ids] : entity.links) doc[name] = ids;
    return doc;
}

} // namespace

nlohmann::json EntityStore::insert(const std::string& set_name, const nlohmann::json& record) {
    const EntitySetDef* set = model_.find_set(set_name);
    if (!set) throw Error("UnknownEntitySet", "unknown entity set '" + set_name + "'");
    std::lock_guard<std::mutex> lock(mutex_);
    nlohmann::json normalized = record;
    if (!normalized.contains("Id")) {
        long long max_id = 0;
        for (const auto& e : state_->at(set->name)->entities) max_id = std::max(max_id, e.id);
        normalized["Id"] = max_id + 1;
    }
    Entity entity = record_to_entity(*set, normalized);
    check_entity_links(*state_, *set, entity);
    auto data = std::make_shared<EntitySetData>(*state_->at(set->name));
    if (data->index.count(entity.id)) {
        throw Error("DuplicateId",
                    "id " + std::to_string(entity.id) + " already exists in '" + set_name + "'");
    }
    data->index[entity.id] = data->entities.size();
    data->entities.push_back(entity);
    auto next = std::make_shared<State>(*state_);
    (*next)[set->name] = std::move(data);
    state_ = std::move(next);
    return entity_record(entity);
}

nlohmann::json EntityStore::patch(const std::string& set_name, long long id,
                                  const nlohmann::json& fields) {
    const EntitySetDef* set = model_.find_set(set_name);
    if (!set) throw Error("UnknownEntitySet", "unknown entity set '" + set_name + "'");
    if (!fields.is_object()) throw Error("SchemaMismatch", "patch body must be an object");
    std::lock_guard<std::mutex> lock(mutex_);
    const auto& current = state_->at(set->name);
    auto pos = current->index.find(id);
    if (pos == current->index.end()) {
        throw Error("NotFound",
                    "no " + set_name + " entity with id " + std::to_string(id));
    }
    // Merge onto the existing record, then revalidate the whole entity.
    nlohmann::json merged = entity_record(current->entities[pos->second]);
    for (const auto& [key, value] : fields.items()) merged[key] = value;
    merged["Id"] = id;
    Entity entity = record_to_entity(*set, merged);
    check_entity_links(*state_, *set, entity);
    auto data = std::make_shared<EntitySetData>(*current);
    data->entities[pos->second] = entity;
    auto next = std::make_shared<State>(*state_);
    (*next)[set->name] = std::move(data);
    state_ = std::move(next);
    return entity_record(entity);
}

nlohmann::json EntityStore::put(const std::string& set_name, long long id,
                                const nlohmann::json& record) {
    const EntitySetDef* set = model_.find_set(set_name);
    if (!set) throw Error("UnknownEntitySet", "unknown entity set '" + set_name + "'");
    std::lock_guard<std::mutex> lock(mutex_);
    const auto& current = state_->at(set->name);
    auto pos = current->index.find(id);
    if (pos == current->index.end()) {
        throw Error("NotFound",
                    "no " + set_name + " entity with id " + std::to_string(id));
    }
    nlohmann::json normalized = record;
    normalized["Id"] = id;
    Entity entity = record_to_entity(*set, normalized);
    check_entity_links(*state_, *set, entity);
    auto data = std::make_shared<EntitySetData>(*current);
    data->entities[pos->second] = entity;
    auto next = std::make_shared<State>(*state_);
    (*next)[set->name] = std::move(data);
    state_ = std::move(next);
    return entity_record(entity);
}

void EntityStore::remove(const std::string& set_name, long long id) {
    const EntitySetDef* set = model_.find_set(set_name);
    if (!set) throw Error("UnknownEntitySet", "unknown entity set '" + set_name + "'");
    std::lock_guard<std::mutex> lock(mutex_);
    const auto& current = state_->at(set->name);
    auto pos = current->index.find(id);
    if (pos == current->index.end()) {
        throw Error("NotFound",
                    "no " + set_name + " entity with id " + std::to_string(id));
    }
    auto next = std::make_shared<State>(*state_);
    auto data = std::make_shared<EntitySetData>(*current);
    data->entities.erase(data->entities.begin() + static_cast<long>(pos->second));
    data->index.clear();
    for (size_t i = 0; i < data->entities.size(); ++i) {
        data->index[data->entities[i].id] = i;
    }
    (*next)[set->name] = std::move(data);

    // Strip links that pointed at the removed entity so no relation dangles.
    for (const auto& other_set : model_.sets) {
        bool targets_this = false;
        for (const auto& rel : other_set.relations) {
            if (rel.target_set == set->name) targets_this = true;
        }
        if (!targets_this) continue;
        auto source = std::make_shared<EntitySetData>(*next->at(other_set.name));
        bool changed = false;
        for (auto& entity : source->entities) {
            for (const auto& rel : other_set.relations) {
                if (rel.target_set != set->name) continue;
                auto link = entity.links.find(rel.name);
                if (link == entity.links.end()) continue;
                auto& ids = link->second;
                auto kept = std::remove(ids.begin(), ids.end(), id);
                if (kept != ids.end()) {
                    ids.erase(kept, ids.end());
                    changed = true;
                }
            }
        }
        if (changed) (*next)[other_set.name] = std::move(source);
    }
    state_ = std::move(next);
}

} // namespace odatax
