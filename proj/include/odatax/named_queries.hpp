#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "odatax/ast.hpp"
#include "odatax/model.hpp"

namespace odatax {

// A server-side query alias: a traditional query-option template with
// {placeholder} slots that client parameters fill at request time.
struct NamedQueryDef {
    std::string name;
    std::string template_text;
    std::vector<std::string> parameters;
    bool cacheable = false;
    std::optional<double> cost_limit;

    static NamedQueryDef from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;
};

// Expansion result: the parsed query plus the definition's execution hints.
struct ExpandedQuery {
    Query query;
    bool cacheable = false;
    std::optional<double> cost_limit;
};

// Thread-safe registry of named queries. Reads take an immutable snapshot;
// register/load swap the snapshot under a writer lock, so lookups never
// block and a failed load leaves the registry untouched.
class QueryRegistry {
public:
    // Validates and stores a definition. The template must parse with every
    // placeholder substituted, placeholders and declared parameters must
    // match exactly, and each placeholder must sit inside a string literal
    // (values can then never escape their quoting).
    void register_query(const NamedQueryDef& def, bool replace = false);

    // Loads a JSON array of definitions. All-or-nothing: any invalid entry
    // aborts the load and the previous contents stay in place.
    size_t load_registry(const std::string& path);

    // Substitutes args into the named template (single quotes doubled) and
    // parses the result against `entity_set`. Every declared parameter must
    // be supplied, and nothing beyond them.
    ExpandedQuery expand(const std::string& name,
                         const std::map<std::string, std::string>& args,
                         const std::string& entity_set, const EntityModel* model) const;

    std::optional<NamedQueryDef> find(const std::string& name) const;
    std::vector<NamedQueryDef> list() const;
    size_t size() const;

private:
    using Snapshot = std::map<std::string, NamedQueryDef>;

    std::shared_ptr<const Snapshot> snapshot() const;
    void validate(const NamedQueryDef& def) const;

    mutable std::mutex write_mutex_;
    std::shared_ptr<const Snapshot> snapshot_ = std::make_shared<Snapshot>();
};

// Substitutes {param} placeholders in a template, doubling single quotes in
// each value so the result stays inside its string literal. Exposed for the
// expansion-safety tests.
std::string substitute_template(const std::string& template_text,
                                const std::map<std::string, std::string>& args);

} // namespace odatax
