#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "json.hpp"
#include "odatax/model.hpp"
#include "odatax/store.hpp"

namespace odatax {

// A generated dataset: its entity model plus one record array per set, in
// the exact format load_records consumes.
struct GeneratedDataset {
    std::string name;
    EntityModel model;
    std::map<std::string, nlohmann::json> records;
};

// Deterministic seeded generators for the bundled datasets:
//   ecommerce-small : Products (10k) -[Reviews]-> Reviews (50k) -[Author]-> Authors
//   social-small    : Users (5k) -[Posts]-> Posts (15k)
//   erp-small       : Transactions (20k), no relations
// The same name+seed always produces byte-identical records on every
// platform (raw mt19937 draws, no library distributions).
GeneratedDataset generate_dataset(const std::string& name, std::uint32_t seed = 42);

// Just the entity model of a bundled dataset, without generating records.
EntityModel dataset_model(const std::string& name);

std::shared_ptr<EntityStore> make_store(const GeneratedDataset& dataset);

// Writes model.json plus <set>.json files into dir (created if missing).
void write_dataset(const GeneratedDataset& dataset, const std::string& dir);

} // namespace odatax
