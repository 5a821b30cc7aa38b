#include "doctest.h"

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "odatax/canonical.hpp"
#include "odatax/parser_traditional.hpp"
#include "odatax/serialize.hpp"

using namespace odatax;

namespace {

const EntityModel& model() {
    static EntityModel m = testfix::catalog_model();
    return m;
}

Query parse_q(const std::string& raw) {
    return parse_traditional("Products", split_query_options(raw), &model());
}

std::string canon(const std::string& raw) {
    return serialize_odata(canonicalize(parse_q(raw)));
}

} // namespace

TEST_CASE("conjunct order does not matter after canonicalization") {
    CHECK(canon("$filter=Price lt 20 and Category eq 'Books'") ==
          canon("$filter=Category eq 'Books' and Price lt 20"));
    CHECK(canon("$filter=Rating ge 4 and Price lt 9 and InStock eq true") ==
          canon("$filter=InStock eq true and Rating ge 4 and Price lt 9"));
    // Disjuncts too.
    CHECK(canon("$filter=Price lt 2 or Price gt 90") ==
          canon("$filter=Price gt 90 or Price lt 2"));
}

TEST_CASE("children sort by their serialized text") {
    CHECK(canon("$filter=Price lt 20 and Category eq 'Books'") ==
          "$filter=Category eq 'Books' and Price lt 20");
    CHECK(canon("$filter=startswith(Name,'A') and contains(Name,'z')") ==
          "$filter=contains(Name,'z') and startswith(Name,'A')");
}

TEST_CASE("nested and chains flatten") {
    // Parsing "a and b and c" yields one 3-child And; building the same
    // condition from grouped pairs collapses once groups are absent.
    Query chained = parse_q("$filter=Price gt 1 and Price lt 9 and Rating ge 2");
    Query built;
    built.entity_set = "Products";
    built.filter = make_and({make_and({make_comparison(FieldRef{{"Price"}}, CompareOp::Gt,
                                                       Literal::number("1")),
                                       make_comparison(FieldRef{{"Price"}}, CompareOp::Lt,
                                                       Literal::number("9"))}),
                             make_comparison(FieldRef{{"Rating"}}, CompareOp::Ge,
                                             Literal::number("2"))});
    CHECK(serialize_odata(canonicalize(chained)) == serialize_odata(canonicalize(built)));
}

TEST_CASE("groups are never rewritten") {
    // A group with a single comparison stays; stripping it would change the
    // byte-exact round trip guarantee.
    CHECK(canon("$filter=(Price lt 5)") == "$filter=(Price lt 5)");
    // Inside a group the children still sort.
    CHECK(canon("$filter=(Price lt 20 or Category eq 'Books')") ==
          "$filter=(Category eq 'Books' or Price lt 20)");
    // And-over-grouped-Or keeps its structure.
    CHECK(canon("$filter=Price gt 1 and (Rating ge 4 or InStock eq true)") ==
          "$filter=(InStock eq true or Rating ge 4) and Price gt 1");
}

TEST_CASE("not is preserved as written") {
    CHECK(canon("$filter=not InStock eq true") == "$filter=not InStock eq true");
    CHECK(canon("$filter=not (Price lt 5 or Price gt 500)") ==
          "$filter=not (Price gt 500 or Price lt 5)");
}

TEST_CASE("select sorts, orderby does not") {
    CHECK(canon("$select=Price,Name,Category") == "$select=Category,Name,Price");
    // Sort keys are semantic order; reordering them changes results.
    CHECK(canon("$orderby=Rating desc,Price") == "$orderby=Rating desc,Price");
    CHECK(canon("$orderby=Price,Rating desc") == "$orderby=Price,Rating desc");
}

TEST_CASE("expand sorts recursively by relation name") {
    Query q;
    q.entity_set = "Products";
    q.expand = {{"Reviews", {{"Author", {}}}}};
    Query c = canonicalize(q);
    CHECK(serialize_odata(c) == "$expand=Reviews($expand=Author)");

    Query two;
    two.entity_set = "Products";
    two.expand = {{"Zeta", {}}, {"Alpha", {}}};
    CHECK(canonicalize(two).expand[0].relation == "Alpha");
}

TEST_CASE("canonicalization is idempotent") {
    const char* cases[] = {
        "$filter=Price lt 20 and Category eq 'Books'",
        "$filter=not (Price lt 5 or (Rating ge 4 and InStock eq true))",
        "$filter=contains(Name,'a') or Price eq 9.99 or startswith(Name,'B')",
        "$select=Price,Name&$orderby=Rating desc&$top=4&$expand=Reviews($expand=Author)",
    };
    for (const char* raw : cases) {
        CAPTURE(raw);
        Query once = canonicalize(parse_q(raw));
        Query twice = canonicalize(once);
        CHECK(serialize_odata(once) == serialize_odata(twice));
        CHECK(equal(once, twice));
    }
}

TEST_CASE("random conjunction permutations share one canonical form") {
    std::mt19937 rng(7);
    std::vector<std::string> conds = {"Price gt 1",          "Price lt 99",
                                      "Rating ge 3",         "Category eq 'Home'",
                                      "contains(Name,'a')",  "InStock eq true"};
    for (int round = 0; round < 50; ++round) {
        std::shuffle(conds.begin(), conds.end(), rng);
        std::string raw = "$filter=" + conds[0];
        for (size_t i = 1; i < conds.size(); ++i) raw += " and " + conds[i];
        CHECK(canon(raw) ==
              "$filter=Category eq 'Home' and InStock eq true and Price gt 1 and Price lt 99 "
              "and Rating ge 3 and contains(Name,'a')");
    }
}

TEST_CASE("sha256 matches the published test vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("cache keys are stable across equivalent spellings") {
    std::string a = cache_key(parse_q("$filter=Price lt 20 and Category eq 'Books'"));
    std::string b = cache_key(parse_q("$filter=Category eq 'Books' and Price lt 20"));
    std::string c = cache_key(parse_q("$filter=category eq 'Books' and price lt 020.0"));
    CHECK(a == b);
    CHECK(a == c);

    CHECK(a.size() == 64);
    CHECK(a.find_first_not_of("0123456789abcdef") == std::string::npos);

    // Same options on a different entity set is a different key.
    Query other = parse_q("$filter=Price lt 20 and Category eq 'Books'");
    other.entity_set = "Clones";
    CHECK(cache_key(other) != a);

    // Different constraints differ.
    CHECK(cache_key(parse_q("$filter=Price lt 21 and Category eq 'Books'")) != a);
    CHECK(cache_key(parse_q("$filter=Price le 20 and Category eq 'Books'")) != a);
}

TEST_CASE("select order and expand order do not change the key") {
    CHECK(cache_key(parse_q("$select=Name,Price")) == cache_key(parse_q("$select=Price,Name")));
    Query a;
    a.entity_set = "Products";
    a.expand = {{"Reviews", {}}};
    Query b = a;
    CHECK(cache_key(a) == cache_key(b));
}

TEST_CASE("grouping is semantic: grouped and ungrouped keys differ") {
    CHECK(cache_key(parse_q("$filter=(Price lt 5)")) !=
          cache_key(parse_q("$filter=Price lt 5")));
}
