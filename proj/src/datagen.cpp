#include "odatax/datagen.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "odatax/errors.hpp"

namespace odatax {

namespace {

// Raw mt19937 draws with hand-rolled mapping helpers. The engine's output
// sequence is fixed by the standard, so the same seed produces the same
// dataset on every platform; library distributions carry no such guarantee.
class Rng {
public:
    explicit Rng(std::uint32_t seed) : gen_(seed) {}

    std::uint32_t next() { return gen_(); }

    long long uniform_int(long long n) { // [0, n)
        return static_cast<long long>(next() % static_cast<std::uint32_t>(n));
    }

    double uniform() { return static_cast<double>(next()) / 4294967296.0; } // [0, 1)

    double uniform_range(double lo, double hi) { return lo + uniform() * (hi - lo); }

    bool chance(double p) { return uniform() < p; }

private:
    std::mt19937 gen_;
};

double round2(double x) { return std::round(x * 100.0) / 100.0; }
double round1(double x) { return std::round(x * 10.0) / 10.0; }

const std::vector<std::string> kAdjectives = {
    "classic", "modern", "compact", "deluxe", "rugged",  "sleek",
    "vintage", "smart",  "eco",     "pro",    "ultra",   "mini",
    "grand",   "swift",  "quiet",   "bold"};

const std::vector<std::string> kNouns = {
    "widget", "gadget",  "lamp",   "speaker", "jacket", "racket",
    "novel",  "planter", "wrench", "monitor", "kettle", "backpack",
    "drone",  "tripod",  "desk",   "charger"};

struct CategorySpec {
    std::string name;
    double price_lo;
    double price_hi;
};

const std::vector<CategorySpec> kCategories = {
    {"Electronics", 20.0, 1500.0}, {"Books", 5.0, 60.0},     {"Clothing", 10.0, 200.0},
    {"Home", 15.0, 400.0},         {"Sports", 10.0, 300.0},  {"Toys", 5.0, 150.0},
    {"Garden", 10.0, 250.0},       {"Automotive", 20.0, 800.0}};

const std::vector<std::string> kCountries = {
    "US", "DE", "FR", "JP", "BR", "IN", "GB", "CA", "AU", "MX",
    "ES", "IT", "NL", "SE", "PL", "KR", "ZA", "AR", "NO", "CH"};

EntityModel ecommerce_model() {
    return EntityModel::from_json(nlohmann::json::parse(R"({
      "entitySets": [
        {
          "name": "Products",
          "properties": [
            {"name": "Id", "type": "number"},
            {"name": "Name", "type": "string"},
            {"name": "Price", "type": "number"},
            {"name": "Category", "type": "string"},
            {"name": "Rating", "type": "number"},
            {"name": "InStock", "type": "boolean"}
          ],
          "relations": [
            {"name": "Reviews", "target": "Reviews", "cardinality": "one-to-many"}
          ]
        },
        {
          "name": "Reviews",
          "properties": [
            {"name": "Id", "type": "number"},
            {"name": "Title", "type": "string"},
            {"name": "Rating", "type": "number"},
            {"name": "Helpful", "type": "number"}
          ],
          "relations": [
            {"name": "Author", "target": "Authors", "cardinality": "one-to-one"}
          ]
        },
        {
          "name": "Authors",
          "properties": [
            {"name": "Id", "type": "number"},
            {"name": "Name", "type": "string"},
            {"name": "Country", "type": "string"}
          ],
          "relations": []
        }
      ]
    })"));
}

GeneratedDataset generate_ecommerce(std::uint32_t seed) {
    GeneratedDataset ds;
    ds.name = "ecommerce-small";
    ds.model = ecommerce_model();
    Rng rng(seed);

    constexpr long long kProducts = 10000;
    constexpr long long kReviews = 50000;
    constexpr long long kAuthors = 2000;

    nlohmann::json authors = nlohmann::json::array();
    for (long long id = 1; id <= kAuthors; ++id) {
        nlohmann::json a;
        a["Id"] = id;
        // One seeded author name with a quote, for escaping-sensitive tests.
        a["Name"] = id == 77 ? "Pat O'Brien"
                             : kAdjectives[rng.uniform_int(16)] + " reviewer " +
                                   std::to_string(id);
        a["Country"] = kCountries[rng.uniform_int(20)];
        authors.push_back(std::move(a));
    }

    // Assign every review to a product up front so product records can
    // carry their link arrays.
    std::vector<std::vector<long long>> reviews_of(kProducts + 1);
    nlohmann::json reviews = nlohmann::json::array();
    for (long long id = 1; id <= kReviews; ++id) {
        long long product = 1 + rng.uniform_int(kProducts);
        reviews_of[product].push_back(id);
        nlohmann::json r;
        r["Id"] = id;
        r["Title"] = kAdjectives[rng.uniform_int(16)] + " " + kNouns[rng.uniform_int(16)] +
                     " review " + std::to_string(id);
        r["Rating"] = static_cast<long long>(1 + rng.uniform_int(5));
        r["Helpful"] = static_cast<long long>(rng.uniform_int(500));
        r["Author"] = nlohmann::json::array({1 + rng.uniform_int(kAuthors)});
        reviews.push_back(std::move(r));
    }

    nlohmann::json products = nlohmann::json::array();
    for (long long id = 1; id <= kProducts; ++id) {
        nlohmann::json p;
        p["Id"] = id;
        const CategorySpec& cat = kCategories[rng.uniform_int(8)];
        double price = round2(rng.uniform_range(cat.price_lo, cat.price_hi));
        std::string name = kAdjectives[rng.uniform_int(16)] + " " +
                           kNouns[rng.uniform_int(16)] + " " + std::to_string(id);
        p["Category"] = cat.name;
        p["Price"] = price;
        p["Name"] = name;
        p["Rating"] = round1(rng.uniform_range(1.0, 5.0));
        p["InStock"] = rng.chance(0.8);
        p["Reviews"] = reviews_of[id];
        if (id == 42) {
            // Seeded oddball: a category value with a quote in it, plus a
            // lowercase name for case-sensitive substring tests.
            p["Category"] = "O'Brien";
            p["Name"] = "o'brien phone classic 42";
        }
        products.push_back(std::move(p));
    }

    ds.records["Authors"] = std::move(authors);
    ds.records["Reviews"] = std::move(reviews);
    ds.records["Products"] = std::move(products);
    return ds;
}

EntityModel social_model() {
    return EntityModel::from_json(nlohmann::json::parse(R"({
      "entitySets": [
        {
          "name": "Users",
          "properties": [
            {"name": "Id", "type": "number"},
            {"name": "Handle", "type": "string"},
            {"name": "Country", "type": "string"},
            {"name": "Followers", "type": "number"},
            {"name": "Active", "type": "boolean"}
          ],
          "relations": [
            {"name": "Posts", "target": "Posts", "cardinality": "one-to-many"}
          ]
        },
        {
          "name": "Posts",
          "properties": [
            {"name": "Id", "type": "number"},
            {"name": "Title", "type": "string"},
            {"name": "Likes", "type": "number"},
            {"name": "Views", "type": "number"}
          ],
          "relations": []
        }
      ]
    })"));
}

GeneratedDataset generate_social(std::uint32_t seed) {
    GeneratedDataset ds;
    ds.name = "social-small";
    ds.model = social_model();
    Rng rng(seed);

    constexpr long long kUsers = 5000;
    constexpr long long kPosts = 15000;

    std::vector<std::vector<long long>> posts_of(kUsers + 1);
    nlohmann::json posts = nlohmann::json::array();
    for (long long id = 1; id <= kPosts; ++id) {
        posts_of[1 + rng.uniform_int(kUsers)].push_back(id);
        nlohmann::json p;
        p["Id"] = id;
        p["Title"] = kAdjectives[rng.uniform_int(16)] + " post " + std::to_string(id);
        p["Likes"] = static_cast<long long>(rng.uniform_int(10000));
        p["Views"] = static_cast<long long>(rng.uniform_int(100000));
        posts.push_back(std::move(p));
    }

    nlohmann::json users = nlohmann::json::array();
    for (long long id = 1; id <= kUsers; ++id) {
        nlohmann::json u;
        u["Id"] = id;
        u["Handle"] = "user_" + std::to_string(id);
        u["Country"] = kCountries[rng.uniform_int(20)];
        u["Followers"] = static_cast<long long>(rng.uniform_int(100000));
        u["Active"] = rng.chance(0.7);
        u["Posts"] = posts_of[id];
        users.push_back(std::move(u));
    }

    ds.records["Posts"] = std::move(posts);
    ds.records["Users"] = std::move(users);
    return ds;
}

EntityModel erp_model() {
    return EntityModel::from_json(nlohmann::json::parse(R"({
      "entitySets": [
        {
          "name": "Transactions",
          "properties": [
            {"name": "Id", "type": "number"},
            {"name": "Account", "type": "string"},
            {"name": "Amount", "type": "number"},
            {"name": "Quarter", "type": "string"},
            {"name": "Status", "type": "string"},
            {"name": "Posted", "type": "boolean"}
          ],
          "relations": []
        }
      ]
    })"));
}

GeneratedDataset generate_erp(std::uint32_t seed) {
    GeneratedDataset ds;
    ds.name = "erp-small";
    ds.model = erp_model();
    Rng rng(seed);

    static const std::vector<std::string> kQuarters = {"2024-Q1", "2024-Q2", "2024-Q3",
                                                       "2024-Q4", "2025-Q1", "2025-Q2",
                                                       "2025-Q3", "2025-Q4"};
    static const std::vector<std::string> kStatuses = {"open", "closed", "pending"};

    nlohmann::json txs = nlohmann::json::array();
    for (long long id = 1; id <= 20000; ++id) {
        nlohmann::json t;
        t["Id"] = id;
        t["Account"] = "ACC-" + std::to_string(1 + rng.uniform_int(200));
        t["Amount"] = round2(rng.uniform_range(-5000.0, 50000.0));
        t["Quarter"] = kQuarters[rng.uniform_int(8)];
        t["Status"] = kStatuses[rng.uniform_int(3)];
        t["Posted"] = rng.chance(0.9);
        txs.push_back(std::move(t));
    }
    ds.records["Transactions"] = std::move(txs);
    return ds;
}

} // namespace

GeneratedDataset generate_dataset(const std::string& name, std::uint32_t seed) {
    if (name == "ecommerce-small") return generate_ecommerce(seed);
    if (name == "social-small") return generate_social(seed);
    if (name == "erp-small") return generate_erp(seed);
    throw Error("UnknownDataset",
                "unknown dataset '" + name +
                    "' (available: ecommerce-small, social-small, erp-small)");
}

EntityModel dataset_model(const std::string& name) {
    if (name == "ecommerce-small") return ecommerce_model();
    if (name == "social-small") return social_model();
    if (name == "erp-small") return erp_model();
    throw Error("UnknownDataset",
                "unknown dataset '" + name +
                    "' (available: ecommerce-small, social-small, erp-small)");
}

std::shared_ptr<EntityStore> make_store(const GeneratedDataset& dataset) {
    auto store = std::make_shared<EntityStore>(dataset.model);
    for (const auto& [set_name, records] : dataset.records) {
        store->load_records(set_name, records);
    }
    store->validate_links();
    return store;
}

void write_dataset(const GeneratedDataset& dataset, const std::string& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir + "/model.json");
        out << dataset.model.to_json().dump(2) << "\n";
    }
    for (const auto& [set_name, records] : dataset.records) {
        std::ofstream out(dir + "/" + set_name + ".json");
        nlohmann::json doc{{"entitySet", set_name}, {"records", records}};
        out << doc.dump() << "\n";
    }
}

} // namespace odatax
