#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace odatax {

enum class PropertyType { Number, String, Boolean };

enum class Cardinality { OneToOne, OneToMany };

struct PropertyDef {
    std::string name;
    PropertyType type = PropertyType::String;
};

struct RelationDef {
    std::string name;
    std::string target_set;
    Cardinality cardinality = Cardinality::OneToMany;
};

struct EntitySetDef {
    std::string name;
    std::vector<PropertyDef> properties;
    std::vector<RelationDef> relations;

    // Case-insensitive lookups returning the metadata-cased definition.
    const PropertyDef* find_property(const std::string& name) const;
    const RelationDef* find_relation(const std::string& name) const;
};

// Schema of entity sets, typed properties, and relations. Loaded from a JSON
// model file; immutable once constructed.
struct EntityModel {
    std::vector<EntitySetDef> sets;

    const EntitySetDef* find_set(const std::string& name) const;

    static EntityModel from_json(const nlohmann::json& doc);
    static EntityModel load_file(const std::string& path);
    nlohmann::json to_json() const;
};

std::string to_string(PropertyType t);
std::string to_string(Cardinality c);

} // namespace odatax
