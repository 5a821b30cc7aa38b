#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace odatax {

// Comparison operators shared by both query dialects.
enum class CompareOp { Eq, Ne, Gt, Ge, Lt, Le };

// String predicate functions. Only these three are recognized.
enum class StringFn { Contains, StartsWith, EndsWith };

std::string to_string(CompareOp op);
std::string to_string(StringFn fn);

// A property reference, possibly a navigation path (segments joined by '/').
struct FieldRef {
    std::vector<std::string> segments;

    std::string str() const;

    bool operator==(const FieldRef&) const = default;
};

// A literal value as written in a query. Numbers keep a canonical decimal
// rendering so that "1.50" and "1.5" compare and serialize identically.
struct Literal {
    enum class Kind { Number, String, Boolean, Null };

    Kind kind = Kind::Null;
    std::string text;    // canonical form: decimal for numbers, raw chars for strings
    double num = 0.0;    // numeric value when kind == Number
    bool flag = false;   // boolean value when kind == Boolean

    static Literal number(const std::string& lexeme);
    static Literal number_from(double value);
    static Literal string(std::string value);
    static Literal boolean(bool value);
    static Literal null();

    bool operator==(const Literal& other) const {
        return kind == other.kind && text == other.text && flag == other.flag;
    }
};

// Normalizes a decimal lexeme: drops '+', leading zeros, trailing fraction
// zeros and a bare trailing '.', and collapses "-0" to "0".
std::string canonical_decimal(const std::string& lexeme);

struct FilterExpr;
using FilterPtr = std::shared_ptr<const FilterExpr>;

// Filter expression node. The tree always keeps the shape a parser produces:
// an Or node never has Or children, an And node never has And or Or children
// (an Or appears under And only wrapped in Group), and explicit parentheses
// survive as Group nodes. The serializer relies on this to emit parentheses
// exactly where Group nodes sit, which makes parse -> serialize a byte-level
// round trip.
struct FilterExpr {
    enum class Kind { Comparison, StringFn, And, Or, Not, Group };

    Kind kind = Kind::Comparison;

    // Comparison / StringFn payload
    FieldRef field;
    CompareOp op = CompareOp::Eq;
    StringFn fn = StringFn::Contains;
    Literal value;

    // And / Or: two or more children. Not / Group: exactly one.
    std::vector<FilterPtr> children;
};

FilterPtr make_comparison(FieldRef field, CompareOp op, Literal value);
FilterPtr make_string_fn(StringFn fn, FieldRef field, Literal value);
FilterPtr make_and(std::vector<FilterPtr> children);
FilterPtr make_or(std::vector<FilterPtr> children);
FilterPtr make_not(FilterPtr child);
FilterPtr make_group(FilterPtr child);

bool equal(const FilterPtr& a, const FilterPtr& b);

// One sort key; direction defaults to ascending.
struct OrderKey {
    FieldRef field;
    bool descending = false;

    bool operator==(const OrderKey&) const = default;
};

// One node of an expand tree: a relation name plus nested expands.
struct ExpandNode {
    std::string relation;
    std::vector<ExpandNode> children;

    bool operator==(const ExpandNode&) const = default;
};

// A parsed query against one entity set. Absent options stay unset; the
// serializer skips them entirely.
struct Query {
    std::string entity_set;
    FilterPtr filter;                 // null when no filter given
    std::vector<OrderKey> order_by;
    std::vector<std::string> select;
    std::vector<ExpandNode> expand;
    std::optional<long long> top;
    std::optional<long long> skip;
};

bool equal(const Query& a, const Query& b);

} // namespace odatax
