#include "odatax/ast.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace odatax {

std::string to_string(CompareOp op) {
    switch (op) {
    case CompareOp::Eq: return "eq";
    case CompareOp::Ne: return "ne";
    case CompareOp::Gt: return "gt";
    case CompareOp::Ge: return "ge";
    case CompareOp::Lt: return "lt";
    case CompareOp::Le: return "le";
    }
    return "eq";
}

std::string to_string(StringFn fn) {
    switch (fn) {
    case StringFn::Contains: return "contains";
    case StringFn::StartsWith: return "startswith";
    case StringFn::EndsWith: return "endswith";
    }
    return "contains";
}

std::string FieldRef::str() const {
    std::string out;
    for (size_t i = 0; i < segments.size(); ++i) {
        if (i) out += '/';
        out += segments[i];
    }
    return out;
}

std::string canonical_decimal(const std::string& lexeme) {
    std::string s = lexeme;
    bool negative = false;
    size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        negative = s[i] == '-';
        ++i;
    }
    std::string integer, fraction;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') integer += s[i++];
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') fraction += s[i++];
    }
    if (i != s.size() || (integer.empty() && fraction.empty())) {
        throw std::invalid_argument("not a decimal literal: '" + lexeme + "'");
    }
    size_t first = integer.find_first_not_of('0');
    integer = first == std::string::npos ? "0" : integer.substr(first);
    size_t last = fraction.find_last_not_of('0');
    fraction = last == std::string::npos ? "" : fraction.substr(0, last + 1);

    std::string out = integer;
    if (!fraction.empty()) out += "." + fraction;
    if (negative && out != "0") out = "-" + out;
    return out;
}

Literal Literal::number(const std::string& lexeme) {
    Literal lit;
    lit.kind = Kind::Number;
    lit.text = canonical_decimal(lexeme);
    lit.num = std::strtod(lit.text.c_str(), nullptr);
    return lit;
}

Literal Literal::number_from(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    std::string s(buf);
    // Integral doubles render without an exponent up to 17 significant
    // digits; query literals never need scientific notation.
    if (s.find('e') != std::string::npos || s.find('E') != std::string::npos) {
        std::snprintf(buf, sizeof(buf), "%.17f", value);
        s = buf;
    }
    return number(s);
}

Literal Literal::string(std::string value) {
    Literal lit;
    lit.kind = Kind::String;
    lit.text = std::move(value);
    return lit;
}

Literal Literal::boolean(bool value) {
    Literal lit;
    lit.kind = Kind::Boolean;
    lit.text = value ? "true" : "false";
    lit.flag = value;
    return lit;
}

Literal Literal::null() {
    Literal lit;
    lit.kind = Kind::Null;
    lit.text = "null";
    return lit;
}

FilterPtr make_comparison(FieldRef field, CompareOp op, Literal value) {
    auto node = std::make_shared<FilterExpr>();
    node->kind = FilterExpr::Kind::Comparison;
    node->field = std::move(field);
    node->op = op;
    node->value = std::move(value);
    return node;
}

FilterPtr make_string_fn(StringFn fn, FieldRef field, Literal value) {
    auto node = std::make_shared<FilterExpr>();
    node->kind = FilterExpr::Kind::StringFn;
    node->fn = fn;
    node->field = std::move(field);
    node->value = std::move(value);
    return node;
}

FilterPtr make_and(std::vector<FilterPtr> children) {
    if (children.size() == 1) return children.front();
    auto node = std::make_shared<FilterExpr>();
    node->kind = FilterExpr::Kind::And;
    node->children = std::move(children);
    return node;
}

FilterPtr make_or(std::vector<FilterPtr> children) {
    if (children.size() == 1) return children.front();
    auto node = std::make_shared<FilterExpr>();
    node->kind = FilterExpr::Kind::Or;
    node->children = std::move(children);
    return node;
}

FilterPtr make_not(FilterPtr child) {
    auto node = std::make_shared<FilterExpr>();
    node->kind = FilterExpr::Kind::Not;
    node->children.push_back(std::move(child));
    return node;
}

FilterPtr make_group(FilterPtr child) {
    auto node = std::make_shared<FilterExpr>();
    node->kind = FilterExpr::Kind::Group;
    node->children.push_back(std::move(child));
    return node;
}

bool equal(const FilterPtr& a, const FilterPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case FilterExpr::Kind::Comparison:
        return a->field == b->field && a->op == b->op && a->value == b->value;
    case FilterExpr::Kind::StringFn:
        return a->fn == b->fn && a->field == b->field && a->value == b->value;
    default: {
        if (a->children.size() != b->children.size()) return false;
        for (size_t i = 0; i < a->children.size(); ++i) {
            if (!equal(a->children[i], b->children[i])) return false;
        }
        return true;
    }
    }
}

bool equal(const Query& a, const Query& b) {
    return a.entity_set == b.entity_set && equal(a.filter, b.filter) &&
           a.order_by == b.order_by && a.select == b.select && a.expand == b.expand &&
           a.top == b.top && a.skip == b.skip;
}

} // namespace odatax
