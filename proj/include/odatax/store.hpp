#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "json.hpp"
#include "odatax/model.hpp"

namespace odatax {

// A field value. monostate stands for null.
using Value = std::variant<std::monostate, bool, double, std::string>;

struct Entity {
    long long id = 0;
    std::map<std::string, Value> fields;                 // includes "Id"
    std::map<std::string, std::vector<long long>> links; // relation name -> target ids
};

struct EntitySetData {
    std::vector<Entity> entities;                // insertion order
    std::unordered_map<long long, size_t> index; // id -> position in entities
};

// In-memory entity collections validated against an entity model. Reads see
// an immutable snapshot; each mutation clones only the affected set and
// swaps the snapshot, so concurrent readers keep a consistent view.
class EntityStore {
public:
    using SetPtr = std::shared_ptr<const EntitySetData>;
    using State = std::map<std::string, SetPtr>;

    explicit EntityStore(EntityModel model);

    // Loads a model file plus one data file per entity set. Data files are
    // {"entitySet": name, "records": [...]}; relation links are id arrays
    // on the source record.
    static std::shared_ptr<EntityStore> load_dataset(const std::string& model_file,
                                                     const std::vector<std::string>& data_files);

    // Bulk insert with full validation: unknown fields, type mismatches,
    // duplicate ids and dangling relation targets all fail the load.
    void load_records(const std::string& set_name, const nlohmann::json& records);

    // Re-checks every relation link against current contents. Called after
    // all sets are loaded, since links may point forward.
    void validate_links() const;

    const EntityModel& model() const { return model_; }

    std::shared_ptr<const State> snapshot() const;

    // Mock-backend mutations. Each validates against the model and returns
    // the resulting record as JSON.
    nlohmann::json insert(const std::string& set_name, const nlohmann::json& record);
    nlohmann::json patch(const std::string& set_name, long long id,
                         const nlohmann::json& fields);
    nlohmann::json put(const std::string& set_name, long long id, const nlohmann::json& record);
    void remove(const std::string& set_name, long long id);

private:
    Entity record_to_entity(const EntitySetDef& set, const nlohmann::json& record) const;
    void check_entity_links(const State& state, const EntitySetDef& set,
                            const Entity& entity) const;

    EntityModel model_;
    mutable std::mutex mutex_;
    std::shared_ptr<const State> state_;
};

nlohmann::json value_to_json(const Value& v);
Value value_from_json(const nlohmann::json& v);

} // namespace odatax
