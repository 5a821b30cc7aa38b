#include "doctest.h"

#include "helpers.hpp"
#include "odatax/cost.hpp"
#include "odatax/parser_traditional.hpp"

using namespace odatax;

namespace {

// A catalog with round numbers so every expectation below can be computed
// by hand: 1000 products, Category 15% Electronics / 5% Books / 80% spread
// over 8 residual values, Price uniform on [0, 100], Reviews averaging 5.
StatisticsCatalog synthetic_catalog() {
    StatisticsCatalog catalog;

    EntitySetStats products;
    products.row_count = 1000;
    StringColumnStats category;
    category.top_k = {{"Electronics", 150}, {"Books", 50}};
    category.residual_rows = 800;
    category.residual_distinct = 8;
    products.string_columns["Category"] = category;
    NumericColumnStats price;
    price.boundaries = {0.0, 100.0};
    price.counts = {1000};
    products.numeric_columns["Price"] = price;
    products.relations["Reviews"] = {Cardinality::OneToMany, 5.0, "Reviews"};
    catalog.sets["Products"] = products;

    EntitySetStats reviews;
    reviews.row_count = 5000;
    reviews.relations["Author"] = {Cardinality::OneToOne, 1.0, "Authors"};
    catalog.sets["Reviews"] = reviews;

    EntitySetStats authors;
    authors.row_count = 200;
    catalog.sets["Authors"] = authors;
    return catalog;
}

FilterPtr parse_f(const std::string& text) {
    static EntityModel model = testfix::catalog_model();
    return parse_filter(text, model.find_set("Products"), &model);
}

Query products_query(const std::string& filter_text) {
    Query q;
    q.entity_set = "Products";
    if (!filter_text.empty()) q.filter = parse_f(filter_text);
    return q;
}

} // namespace

TEST_CASE("filter cost charges leaves, connectives and nesting") {
    CHECK(filter_cost(nullptr) == 0.0);
    CHECK(filter_cost(parse_f("Price lt 50")) == 1.0);
    CHECK(filter_cost(parse_f("contains(Name,'x')")) == 5.0);
    CHECK(filter_cost(parse_f("Price lt 50 and Rating gt 2")) == 3.0);
    CHECK(filter_cost(parse_f("Price lt 50 or Rating gt 2")) == 3.0);
    CHECK(filter_cost(parse_f("not Price lt 50")) == 2.0);
    // Each enclosing group doubles a leaf's cost.
    CHECK(filter_cost(parse_f("(Price lt 50)")) == 2.0);
    CHECK(filter_cost(parse_f("((Price lt 50))")) == 4.0);
    CHECK(filter_cost(parse_f("(contains(Name,'x'))")) == 10.0);
    // And(+1), plain leaf(1), group -> Or(+1) with two doubled leaves (2+2).
    CHECK(filter_cost(parse_f("Price gt 1 and (Rating ge 4 or InStock eq true)")) == 7.0);
    CHECK(filter_cost(parse_f("contains(Name,'x') and Price lt 5")) == 7.0);
}

TEST_CASE("expand cost multiplies along the chain") {
    StatisticsCatalog stats = synthetic_catalog();

    std::vector<ExpandNode> flat = {{"Reviews", {}}};
    CHECK(expand_cost(flat, "Products", stats) == doctest::Approx(5.0));

    std::vector<ExpandNode> nested = {{"Reviews", {{"Author", {}}}}};
    // 5 for the reviews, 5 * 1 for each review's author.
    CHECK(expand_cost(nested, "Products", stats) == doctest::Approx(10.0));

    CHECK(expand_cost({}, "Products", stats) == 0.0);
}

TEST_CASE("unknown relations assume ten related rows") {
    StatisticsCatalog empty;
    std::vector<ExpandNode> flat = {{"Reviews", {}}};
    CHECK(expand_cost(flat, "Products", empty) == doctest::Approx(10.0));
    std::vector<ExpandNode> nested = {{"Reviews", {{"Author", {}}}}};
    CHECK(expand_cost(nested, "Products", empty) == doctest::Approx(110.0)); // 10 + 10*10
}

TEST_CASE("sub-unit averages never discount a chain") {
    StatisticsCatalog stats = synthetic_catalog();
    stats.sets["Products"].relations["Reviews"].avg_cardinality = 0.4;
    std::vector<ExpandNode> nested = {{"Reviews", {{"Author", {}}}}};
    // max(0.4, 1) keeps the multiplier at one per level.
    CHECK(expand_cost(nested, "Products", stats) == doctest::Approx(2.0));
}

TEST_CASE("string equality selectivity reads the frequency sketch") {
    StatisticsCatalog stats = synthetic_catalog();
    CHECK(selectivity(*parse_f("Category eq 'Electronics'"), "Products", stats) ==
          doctest::Approx(0.15));
    CHECK(selectivity(*parse_f("Category eq 'Books'"), "Products", stats) ==
          doctest::Approx(0.05));
    // A miss spreads the residual mass over the residual distinct values.
    CHECK(selectivity(*parse_f("Category eq 'Garden'"), "Products", stats) ==
          doctest::Approx(0.1)); // 800 / (1000 * 8)
    CHECK(selectivity(*parse_f("Category ne 'Electronics'"), "Products", stats) ==
          doctest::Approx(0.85));
}

TEST_CASE("numeric range selectivity interpolates the histogram") {
    StatisticsCatalog stats = synthetic_catalog();
    CHECK(selectivity(*parse_f("Price lt 50"), "Products", stats) == doctest::Approx(0.5));
    CHECK(selectivity(*parse_f("Price lt 25"), "Products", stats) == doctest::Approx(0.25));
    CHECK(selectivity(*parse_f("Price gt 80"), "Products", stats) == doctest::Approx(0.2));
    CHECK(selectivity(*parse_f("Price lt 0"), "Products", stats) == doctest::Approx(0.0));
    CHECK(selectivity(*parse_f("Price gt 200"), "Products", stats) == doctest::Approx(0.0));
}

TEST_CASE("string functions and uncovered columns use pinned defaults") {
    StatisticsCatalog stats = synthetic_catalog();
    CHECK(selectivity(*parse_f("contains(Name,'x')"), "Products", stats) ==
          doctest::Approx(0.25));
    // Name has no sketch in the synthetic catalog.
    CHECK(selectivity(*parse_f("Name eq 'Widget'"), "Products", stats) == doctest::Approx(0.1));
    CHECK(selectivity(*parse_f("Name ne 'Widget'"), "Products", stats) == doctest::Approx(0.9));
    CHECK(selectivity(*parse_f("Rating gt 3"), "Products", stats) == doctest::Approx(0.33));
    // Numeric equality has no histogram answer; it uses the eq default.
    CHECK(selectivity(*parse_f("Price eq 50"), "Products", stats) == doctest::Approx(0.1));
    StatisticsCatalog empty;
    CHECK(selectivity(*parse_f("Category eq 'Books'"), "Products", empty) ==
          doctest::Approx(0.1));
}

TEST_CASE("projected rows combine selectivities and honor top") {
    StatisticsCatalog stats = synthetic_catalog();

    CHECK(projected_rows(products_query(""), stats) == 1000);
    CHECK(projected_rows(products_query("Category eq 'Electronics'"), stats) == 150);
    // Conjunction multiplies: 0.15 * 0.5.
    CHECK(projected_rows(products_query("Category eq 'Electronics' and Price lt 50"), stats) ==
          75);
    // Disjunction adds without double counting: 0.15 + 0.5 - 0.075.
    CHECK(projected_rows(products_query("Category eq 'Electronics' or Price lt 50"), stats) ==
          575);
    CHECK(projected_rows(products_query("not Category eq 'Electronics'"), stats) == 850);
    // Groups are transparent for selectivity.
    CHECK(projected_rows(products_query("(Category eq 'Electronics')"), stats) == 150);

    Query topped = products_query("Price lt 50");
    topped.top = 10;
    CHECK(projected_rows(topped, stats) == 10);
}

TEST_CASE("projected rows clamp to the possible range") {
    StatisticsCatalog stats = synthetic_catalog();
    // Zero selectivity means zero rows...
    CHECK(projected_rows(products_query("Price lt 0"), stats) == 0);
    // ...but any nonzero selectivity keeps at least one row.
    CHECK(projected_rows(products_query("Price lt 0.0001"), stats) == 1);
    // Unknown sets project nothing.
    Query unknown;
    unknown.entity_set = "Nope";
    CHECK(projected_rows(unknown, stats) == 0);
}

TEST_CASE("the total is a weighted sum of the three components") {
    StatisticsCatalog stats = synthetic_catalog();
    Query q = products_query("Category eq 'Electronics' and Price lt 50");
    q.expand = {{"Reviews", {}}};

    CostEstimate est = estimate(q, stats);
    CHECK(est.filter_cost == 3.0);
    CHECK(est.expand_cost == doctest::Approx(5.0));
    CHECK(est.projected_rows == 75);
    CHECK(est.size_cost == doctest::Approx(0.075)); // 75 rows / 1000 rows per unit
    CHECK(est.total == doctest::Approx(8.075));
    CHECK(est.threshold == 500.0);

    CostWeights heavy;
    heavy.w_filter = 2.0;
    heavy.w_expand = 10.0;
    heavy.w_size = 0.0;
    CostEstimate weighted = estimate(q, stats, heavy);
    CHECK(weighted.total == doctest::Approx(2.0 * 3.0 + 10.0 * 5.0));
}

TEST_CASE("acceptance is inclusive at the threshold") {
    CostEstimate at;
    at.total = 500.0;
    at.threshold = 500.0;
    CHECK(check(at).accepted);

    CostEstimate over;
    over.total = 500.001;
    over.threshold = 500.0;
    CHECK_FALSE(check(over).accepted);
}

TEST_CASE("the rejection body is stable down to key order") {
    CostEstimate est;
    est.filter_cost = 200.0;
    est.expand_cost = 500.0;
    est.projected_rows = 150000;
    est.size_cost = 150.0;
    est.total = 850.0;
    est.threshold = 500.0;
    est.suggestions = {"Reduce expand depth from 3 to 2 levels",
                       "Add more selective filter conditions"};

    CostDecision decision = check(est);
    REQUIRE_FALSE(decision.accepted);
    CHECK(decision.payload.dump() ==
          R"x({"error":{"code":"QueryTooExpensive","message":"Query cost (850) exceeds maximum )x"
          R"x(allowed (500)","details":{"filterCost":200,"expandCost":500,"projectedRows":150000,)x"
          R"x("suggestions":["Reduce expand depth from 3 to 2 levels",)x"
          R"x("Add more selective filter conditions"]}}})x");
}

TEST_CASE("suggestions trigger on their documented conditions") {
    StatisticsCatalog stats = synthetic_catalog();

    // Expand dominating the total names the depth to cut.
    Query deep;
    deep.entity_set = "Products";
    deep.expand = {{"Reviews", {{"Author", {}}}}};
    CostEstimate est = estimate(deep, stats);
    REQUIRE(est.suggestions.size() >= 1);
    CHECK(est.suggestions[0] == "Reduce expand depth from 2 to 1 levels");

    // A huge projected result asks for more filtering.
    CostWeights tight;
    tight.rows_per_cost_unit = 1.0;
    CostEstimate fat = estimate(products_query(""), stats, tight);
    REQUIRE(fat.suggestions.size() == 1);
    CHECK(fat.suggestions[0] == "Add more selective filter conditions");

    // A cheap, filtered query suggests nothing.
    CostEstimate quiet = estimate(products_query("Category eq 'Books'"), stats);
    CHECK(quiet.suggestions.empty());
}

TEST_CASE("estimates serialize with every component visible") {
    StatisticsCatalog stats = synthetic_catalog();
    Query q = products_query("Price lt 50");
    nlohmann::ordered_json doc = estimate_to_json(estimate(q, stats));
    CHECK(doc["filterCost"] == 1.0);
    CHECK(doc["projectedRows"] == 500);
    CHECK(doc["threshold"] == 500.0);
    CHECK(doc.contains("sizeCost"));
    CHECK(doc.contains("total"));
    CHECK(doc.contains("suggestions"));
}
