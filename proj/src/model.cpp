#include "odatax/model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "odatax/errors.hpp"

namespace odatax {

namespace {

bool iequals(const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return false;
    return std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
        return std::tolower(x) == std::tolower(y);
    });
}

PropertyType property_type_from_string(const std::string& s) {
    if (s == "number") return PropertyType::Number;
    if (s == "string") return PropertyType::String;
    if (s == "boolean") return PropertyType::Boolean;
    throw Error("InvalidModel", "unknown property type '" + s + "'");
}

Cardinality cardinality_from_string(const std::string& s) {
    if (s == "one-to-one") return Cardinality::OneToOne;
    if (s == "one-to-many") return Cardinality::OneToMany;
    throw Error("InvalidModel", "unknown cardinality '" + s + "'");
}

} // namespace

std::string to_string(PropertyType t) {
    switch (t) {
    case PropertyType::Number: return "number";
    case PropertyType::String: return "string";
    case PropertyType::Boolean: return "boolean";
    }
    return "string";
}

std::string to_string(Cardinality c) {
    return c == Cardinality::OneToOne ? "one-to-one" : "one-to-many";
}

const PropertyDef* EntitySetDef::find_property(const std::string& name) const {
    for (const auto& p : properties) {
        if (iequals(p.name, name)) return &p;
    }
    return nullptr;
}

const RelationDef* EntitySetDef::find_relation(const std::string& name) const {
    for (const auto& r : relations) {
        if (iequals(r.name, name)) return &r;
    }
    return nullptr;
}

const EntitySetDef* EntityModel::find_set(const std::string& name) const {
    for (const auto& s : sets) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

EntityModel EntityModel::from_json(const nlohmann::json& doc) {
    EntityModel model;
    if (!doc.is_object() || !doc.contains("entitySets") || !doc["entitySets"].is_array()) {
        throw Error("InvalidModel", "model document must contain an 'entitySets' array");
    }
    for (const auto& set_doc : doc["entitySets"]) {
        EntitySetDef set;
        set.name = set_doc.at("name").get<std::string>();
        if (model.find_set(set.name) != nullptr) {
            throw Error("InvalidModel", "entity set '" + set.name + "' declared twice");
        }
        for (const auto& prop : set_doc.value("properties", nlohmann::json::array())) {
            PropertyDef p;
            p.name = prop.at("name").get<std::string>();
            p.type = property_type_from_string(prop.at("type").get<std::string>());
            if (set.find_property(p.name) != nullptr) {
                throw Error("InvalidModel",
                            "property '" + p.name + "' declared twice on '" + set.name + "'");
            }
            set.properties.push_back(std::move(p));
        }
        for (const auto& rel : set_doc.value("relations", nlohmann::json::array())) {
            RelationDef r;
            r.name = rel.at("name").get<std::string>();
            r.target_set = rel.at("target").get<std::string>();
            r.cardinality = cardinality_from_string(rel.at("cardinality").get<std::string>());
            if (set.find_relation(r.name) != nullptr) {
                throw Error("InvalidModel",
                            "relation '" + r.name + "' declared twice on '" + set.name + "'");
            }
            set.relations.push_back(std::move(r));
        }
        model.sets.push_back(std::move(set));
    }
    // Relation targets must name declared sets.
    for (const auto& s : model.sets) {
        for (const auto& r : s.relations) {
            if (model.find_set(r.target_set) == nullptr) {
                throw Error("InvalidModel", "relation '" + r.name + "' on '" + s.name +
                                                "' targets unknown set '" + r.target_set + "'");
            }
        }
    }
    return model;
}

EntityModel EntityModel::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("FileError", "cannot open model file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error("InvalidModel", "model file '" + path + "' is not valid JSON: " + e.what());
    }
    return from_json(doc);
}

nlohmann::json EntityModel::to_json() const {
    nlohmann::json sets_doc = nlohmann::json::array();
    for (const auto& s : sets) {
        nlohmann::json props = nlohmann::json::array();
        for (const auto& p : s.properties) {
            props.push_back({{"name", p.name}, {"type", to_string(p.type)}});
        }
        nlohmann::json rels = nlohmann::json::array();
        for (const auto& r : s.relations) {
            rels.push_back({{"name", r.name},
                            {"target", r.target_set},
                            {"cardinality", to_string(r.cardinality)}});
        }
        sets_doc.push_back({{"name", s.name}, {"properties", props}, {"relations", rels}});
    }
    return {{"entitySets", sets_doc}};
}

} // namespace odatax
