#pragma once

// Shared fixtures: a small product-catalog model plus a hand-picked dataset,
// so expected query results can be written down literally in the tests.

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include "json.hpp"
#include "odatax/model.hpp"
#include "odatax/store.hpp"

namespace testfix {

inline odatax::EntityModel catalog_model() {
    using namespace odatax;
    EntityModel m;

    EntitySetDef products;
    products.name = "Products";
    products.properties = {{"Id", PropertyType::Number},      {"Name", PropertyType::String},
                           {"Price", PropertyType::Number},   {"Category", PropertyType::String},
                           {"Rating", PropertyType::Number},  {"InStock", PropertyType::Boolean}};
    products.relations = {{"Reviews", "Reviews", Cardinality::OneToMany}};

    EntitySetDef reviews;
    reviews.name = "Reviews";
    reviews.properties = {{"Id", PropertyType::Number},
                          {"Title", PropertyType::String},
                          {"Rating", PropertyType::Number},
                          {"Helpful", PropertyType::Number}};
    reviews.relations = {{"Author", "Authors", Cardinality::OneToOne}};

    EntitySetDef authors;
    authors.name = "Authors";
    authors.properties = {{"Id", PropertyType::Number},
                          {"Name", PropertyType::String},
                          {"Country", PropertyType::String}};

    m.sets = {products, reviews, authors};
    return m;
}

inline nlohmann::json product_records() {
    // Product 7 has no Rating: null-comparison and null-sort cases use it.
    return nlohmann::json::parse(R"([
        {"Id": 1, "Name": "Widget",       "Price": 9.99,   "Category": "Tools", "Rating": 4.5, "InStock": true,  "Reviews": [1, 2]},
        {"Id": 2, "Name": "Gadget",       "Price": 19.99,  "Category": "Tools", "Rating": 3.0, "InStock": false, "Reviews": [3]},
        {"Id": 3, "Name": "Book of Maps", "Price": 25.0,   "Category": "Books", "Rating": 4.8, "InStock": true,  "Reviews": []},
        {"Id": 4, "Name": "Atlas",        "Price": 55.5,   "Category": "Books", "Rating": 4.1, "InStock": true,  "Reviews": [4]},
        {"Id": 5, "Name": "Lamp",         "Price": 12.0,   "Category": "Home",  "Rating": 2.5, "InStock": true,  "Reviews": []},
        {"Id": 6, "Name": "Desk",         "Price": 199.99, "Category": "Home",  "Rating": 4.9, "InStock": false, "Reviews": [5]},
        {"Id": 7, "Name": "Chair",        "Price": 89.0,   "Category": "Home",                 "InStock": true,  "Reviews": []},
        {"Id": 8, "Name": "Pen",          "Price": 1.5,    "Category": "Tools", "Rating": 3.3, "InStock": true,  "Reviews": []}
    ])");
}

inline nlohmann::json review_records() {
    return nlohmann::json::parse(R"([
        {"Id": 1, "Title": "Great widget",  "Rating": 5, "Helpful": 10, "Author": [1]},
        {"Id": 2, "Title": "Meh",           "Rating": 2, "Helpful": 1,  "Author": [2]},
        {"Id": 3, "Title": "Broken",        "Rating": 1, "Helpful": 0,  "Author": [1]},
        {"Id": 4, "Title": "Detailed maps", "Rating": 4, "Helpful": 7,  "Author": [3]},
        {"Id": 5, "Title": "Sturdy",        "Rating": 5, "Helpful": 3,  "Author": [2]}
    ])");
}

inline nlohmann::json author_records() {
    return nlohmann::json::parse(R"([
        {"Id": 1, "Name": "Ann", "Country": "US"},
        {"Id": 2, "Name": "Bob", "Country": "DE"},
        {"Id": 3, "Name": "Cho", "Country": "JP"}
    ])");
}

inline std::shared_ptr<odatax::EntityStore> catalog_store() {
    auto store = std::make_shared<odatax::EntityStore>(catalog_model());
    store->load_records("Products", product_records());
    store->load_records("Reviews", review_records());
    store->load_records("Authors", author_records());
    store->validate_links();
    return store;
}

// Writes the catalog as a model file plus one data file per set and returns
// the directory, for components that load datasets from disk.
inline std::string catalog_dataset_dir() {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "odatax-unit-fixture";
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const nlohmann::json& doc) {
        std::ofstream out(dir / name);
        out << doc.dump(2) << "\n";
    };
    write("model.json", catalog_model().to_json());
    write("Products.json", {{"entitySet", "Products"}, {"records", product_records()}});
    write("Reviews.json", {{"entitySet", "Reviews"}, {"records", review_records()}});
    write("Authors.json", {{"entitySet", "Authors"}, {"records", author_records()}});
    return dir.string();
}

} // namespace testfix
