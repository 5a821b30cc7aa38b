#include "doctest.h"

#include <algorithm>

#include "helpers.hpp"
#include "odatax/stats.hpp"
#include "odatax/store.hpp"

using namespace odatax;

// Product prices sorted: 1.5, 9.99, 12, 19.99, 25, 55.5, 89, 199.99

TEST_CASE("histograms are equi-depth and cover the value range") {
    auto store = testfix::catalog_store();
    StatisticsCatalog catalog = build_stats(*store);

    const EntitySetStats* products = catalog.find_set("Products");
    REQUIRE(products);
    CHECK(products->row_count == 8);

    const auto& price = products->numeric_columns.at("Price");
    REQUIRE(price.boundaries.size() == price.counts.size() + 1);
    CHECK(price.total_rows() == 8);
    CHECK(price.boundaries.front() == doctest::Approx(1.5));
    CHECK(price.boundaries.back() == doctest::Approx(199.99));
    CHECK(std::is_sorted(price.boundaries.begin(), price.boundaries.end()));
    // 8 values and 32 requested buckets: one value per bucket.
    CHECK(price.counts == std::vector<long long>(8, 1));
}

TEST_CASE("bucket count caps at the number of values") {
    auto store = testfix::catalog_store();
    StatisticsCatalog catalog = build_stats(*store, /*bucket_count=*/4);
    const auto& price = catalog.find_set("Products")->numeric_columns.at("Price");
    CHECK(price.counts == std::vector<long long>{2, 2, 2, 2});
    CHECK(price.boundaries == std::vector<double>{1.5, 12.0, 25.0, 89.0, 199.99});
}

TEST_CASE("rows_below interpolates inside a bucket") {
    auto store = testfix::catalog_store();
    StatisticsCatalog catalog = build_stats(*store);
    const auto& price = catalog.find_set("Products")->numeric_columns.at("Price");

    CHECK(price.rows_below(1.5) == doctest::Approx(0.0));    // nothing below the minimum
    CHECK(price.rows_below(0.0) == doctest::Approx(0.0));
    CHECK(price.rows_below(500.0) == doctest::Approx(8.0));  // everything below a huge bound
    CHECK(price.rows_below(12.0) == doctest::Approx(2.0));   // exactly 1.5 and 9.99 sit below
    // Halfway through the [12, 19.99] bucket: two full buckets plus half.
    CHECK(price.rows_below((12.0 + 19.99) / 2) == doctest::Approx(2.5));
}

TEST_CASE("null fields stay out of the histograms") {
    auto store = testfix::catalog_store();
    StatisticsCatalog catalog = build_stats(*store);
    // Product 7 has no Rating, so only 7 of 8 rows contribute.
    const auto& rating = catalog.find_set("Products")->numeric_columns.at("Rating");
    CHECK(rating.total_rows() == 7);
}

TEST_CASE("string columns count exact frequencies") {
    auto store = testfix::catalog_store();
    StatisticsCatalog catalog = build_stats(*store);
    const auto& category = catalog.find_set("Products")->string_columns.at("Category");
    CHECK(category.top_k ==
          std::map<std::string, long long>{{"Books", 2}, {"Home", 3}, {"Tools", 3}});
    CHECK(category.residual_rows == 0);
    CHECK(category.residual_distinct == 0);
}

TEST_CASE("values past the top-k fold into residuals") {
    auto store = testfix::catalog_store();
    StatisticsCatalog catalog = build_stats(*store, kHistogramBuckets, /*top_k=*/1);
    const auto& category = catalog.find_set("Products")->string_columns.at("Category");
    // Home and Tools tie at 3; the lexicographically smaller one wins the slot.
    CHECK(category.top_k == std::map<std::string, long long>{{"Home", 3}});
    CHECK(category.residual_rows == 5);
    CHECK(category.residual_distinct == 2);
}

TEST_CASE("relation statistics record exact link averages") {
    auto store = testfix::catalog_store();
    StatisticsCatalog catalog = build_stats(*store);

    const auto& reviews = catalog.find_set("Products")->relations.at("Reviews");
    CHECK(reviews.avg_cardinality == doctest::Approx(5.0 / 8.0)); // five links over eight rows
    CHECK(reviews.target_set == "Reviews");
    CHECK(reviews.cardinality == Cardinality::OneToMany);

    const auto& author = catalog.find_set("Reviews")->relations.at("Author");
    CHECK(author.avg_cardinality == doctest::Approx(1.0));
    CHECK(author.target_set == "Authors");
    CHECK(author.cardinality == Cardinality::OneToOne);
}

TEST_CASE("boolean columns produce no statistics") {
    auto store = testfix::catalog_store();
    StatisticsCatalog catalog = build_stats(*store);
    const EntitySetStats* products = catalog.find_set("Products");
    CHECK(products->numeric_columns.count("InStock") == 0);
    CHECK(products->string_columns.count("InStock") == 0);
}

TEST_CASE("catalogs survive a json round trip") {
    auto store = testfix::catalog_store();
    StatisticsCatalog catalog = build_stats(*store);
    StatisticsCatalog back = StatisticsCatalog::from_json(catalog.to_json());

    CHECK(back.sets.size() == catalog.sets.size());
    const auto& a = catalog.find_set("Products")->numeric_columns.at("Price");
    const auto& b = back.find_set("Products")->numeric_columns.at("Price");
    CHECK(a.boundaries == b.boundaries);
    CHECK(a.counts == b.counts);
    CHECK(catalog.find_set("Products")->string_columns.at("Category").top_k ==
          back.find_set("Products")->string_columns.at("Category").top_k);
    CHECK(back.find_set("Reviews")->relations.at("Author").target_set == "Authors");
    CHECK(back.find_set("Products")->row_count == 8);
}

TEST_CASE("lookups on missing sets return null") {
    StatisticsCatalog empty;
    CHECK(empty.find_set("Products") == nullptr);
}
