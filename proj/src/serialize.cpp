#include "odatax/serialize.hpp"

namespace odatax {

std::string quote_string(const std::string& raw) {
    std::string out = "'";
    for (char c : raw) {
        if (c == '\'') out += "''";
        else out += c;
    }
    out += "'";
    return out;
}

namespace {

std::string render_literal(const Literal& lit) {
    switch (lit.kind) {
    case Literal::Kind::Number: return lit.text;
    case Literal::Kind::String: return quote_string(lit.text);
    case Literal::Kind::Boolean: return lit.flag ? "true" : "false";
    case Literal::Kind::Null: return "null";
    }
    return "null";
}

void render_filter(const FilterPtr& node, std::string& out) {
    switch (node->kind) {
    case FilterExpr::Kind::Comparison:
        out += node->field.str();
        out += ' ';
        out += to_string(node->op);
        out += ' ';
        out += render_literal(node->value);
        break;
    case FilterExpr::Kind::StringFn:
        out += to_string(node->fn);
        out += '(';
        out += node->field.str();
        out += ',';
        out += render_literal(node->value);
        out += ')';
        break;
    case FilterExpr::Kind::And:
        for (size_t i = 0; i < node->children.size(); ++i) {
            if (i) out += " and ";
            render_filter(node->children[i], out);
        }
        break;
    case FilterExpr::Kind::Or:
        for (size_t i = 0; i < node->children.size(); ++i) {
            if (i) out += " or ";
            render_filter(node->children[i], out);
        }
        break;
    case FilterExpr::Kind::Not:
        out += "not ";
        render_filter(node->children.front(), out);
        break;
    case FilterExpr::Kind::Group:
        out += '(';
        render_filter(node->children.front(), out);
        out += ')';
        break;
    }
}

void render_expand_list(const std::vector<ExpandNode>& expand, std::string& out) {
    for (size_t i = 0; i < expand.size(); ++i) {
        if (i) out += ',';
        out += expand[i].relation;
        if (!expand[i].children.empty()) {
            out += "($expand=";
            render_expand_list(expand[i].children, out);
            out += ')';
        }
    }
}

} // namespace

std::string serialize_filter(const FilterPtr& filter) {
    std::string out;
    if (filter) render_filter(filter, out);
    return out;
}

std::string serialize_expand(const std::vector<ExpandNode>& expand) {
    std::string out;
    render_expand_list(expand, out);
    return out;
}

std::string serialize_odata(const Query& q) {
    std::string out;
    auto append = [&out](const std::string& name, const std::string& value) {
        if (!out.empty()) out += '&';
        out += name;
        out += '=';
        out += value;
    };
    if (q.filter) append("$filter", serialize_filter(q.filter));
    if (!q.select.empty()) {
        std::string list;
        for (size_t i = 0; i < q.select.size(); ++i) {
            if (i) list += ',';
            list += q.select[i];
        }
        append("$select", list);
    }
    if (!q.order_by.empty()) {
        std::string list;
        for (size_t i = 0; i < q.order_by.size(); ++i) {
            if (i) list += ',';
            list += q.order_by[i].field.str();
            if (q.order_by[i].descending) list += " desc";
        }
        append("$orderby", list);
    }
    if (q.top) append("$top", std::to_string(*q.top));
    if (q.skip) append("$skip", std::to_string(*q.skip));
    if (!q.expand.empty()) append("$expand", serialize_expand(q.expand));
    return out;
}

} // namespace odatax
