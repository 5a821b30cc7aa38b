#include "odatax/parser_simplified.hpp"

#include <cctype>

#include "odatax/canonical.hpp"
#include "odatax/errors.hpp"

namespace odatax {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool is_decimal(const std::string& s) {
    size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    size_t digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) { ++i; ++digits; }
    if (i < s.size() && s[i] == '.') {
        ++i;
        size_t frac = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) { ++i; ++frac; }
        if (frac == 0) return false;
    }
    return i == s.size() && digits > 0;
}

// A span of the raw option value, with the absolute offset of its start so
// error positions point into the text the client sent.
struct Span {
    std::string text;
    size_t pos = 0;
};

// Splits on top-level commas, honoring '...' and "..." quoting. Quote
// doubling inside a quoted run stays intact for the value parser.
std::vector<Span> split_top_level(const std::string& s) {
    std::vector<Span> out;
    Span current{.text = "", .pos = 0};
    char quote = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (quote) {
            current.text += c;
            if (c == quote) {
                if (i + 1 < s.size() && s[i + 1] == quote) {
                    current.text += s[++i];
                } else {
                    quote = 0;
                }
            }
            continue;
        }
        if (c == '\'' || c == '"') {
            quote = c;
            current.text += c;
            continue;
        }
        if (c == ',') {
            out.push_back(current);
            current = Span{.text = "", .pos = i + 1};
            continue;
        }
        current.text += c;
    }
    out.push_back(current);
    return out;
}

// Rejects '|' and the standalone word 'or' outside quotes anywhere in the
// filter text. OR has no shorthand; pretending otherwise would silently
// change semantics, so the request fails loudly instead.
void reject_or_tokens(const std::string& s) {
    char quote = 0;
    auto is_word = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    };
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (quote) {
            if (c == quote) {
                if (i + 1 < s.size() && s[i + 1] == quote) ++i;
                else quote = 0;
            }
            continue;
        }
        if (c == '\'' || c == '"') { quote = c; continue; }
        if (c == '|') {
            throw unsupported_construct(
                "'|' is not supported in the filter shorthand; use $filter for OR");
        }
        if ((c == 'o' || c == 'O') && i + 1 < s.size() &&
            (s[i + 1] == 'r' || s[i + 1] == 'R')) {
            bool left_boundary = i == 0 || !is_word(s[i - 1]);
            bool right_boundary = i + 2 >= s.size() || !is_word(s[i + 2]);
            if (left_boundary && right_boundary) {
                throw unsupported_construct(
                    "'or' is not supported in the filter shorthand; use $filter for OR");
            }
        }
    }
}

// Strips one layer of matching quotes and resolves doubled quotes inside.
// Returns true when the value was quoted.
bool unquote(std::string& value) {
    if (value.size() < 2) return false;
    char q = value.front();
    if ((q != '\'' && q != '"') || value.back() != q) return false;
    std::string body;
    for (size_t i = 1; i + 1 < value.size(); ++i) {
        if (value[i] == q && i + 1 < value.size() - 1 && value[i + 1] == q) {
            body += q;
            ++i;
        } else {
            body += value[i];
        }
    }
    value = body;
    return true;
}

std::string resolve_field_token(const std::string& raw, const EntitySetDef* set,
                                const std::string& whole, size_t pos) {
    if (raw.empty()) {
        throw ParseError(whole, pos, "a field name", "missing field name");
    }
    if (!set) return raw;
    const PropertyDef* prop = set->find_property(raw);
    if (!prop) {
        throw ParseError(whole, pos, "a declared field",
                         "unknown field '" + raw + "' on '" + set->name + "'");
    }
    return prop->name;
}

FilterPtr parse_condition(const Span& span, const EntitySetDef* set, const std::string& whole) {
    const std::string text = span.text;
    // The operator is the first operator character outside quotes; field
    // names are plain identifiers so nothing before it can be mistaken.
    size_t op_pos = std::string::npos;
    char quote = 0;
    for (size_t i = 0; i < text.size() && op_pos == std::string::npos; ++i) {
        char c = text[i];
        if (quote) {
            if (c == quote) quote = 0;
            continue;
        }
        if (c == '\'' || c == '"') { quote = c; continue; }
        if (c == '>' || c == '<' || c == '=' || c == '!' || c == ':') op_pos = i;
    }
    if (op_pos == std::string::npos) {
        throw ParseError(whole, span.pos + (text.empty() ? 0 : text.size() / 2),
                         "an operator (> < >= <= = != :)",
                         "condition has no operator: '" + trim(text) + "'");
    }

    std::string op_text(1, text[op_pos]);
    size_t value_start = op_pos + 1;
    if ((text[op_pos] == '>' || text[op_pos] == '<' || text[op_pos] == '!') &&
        value_start < text.size() && text[value_start] == '=') {
        op_text += '=';
        ++value_start;
    }
    if (op_text == "!") {
        throw ParseError(whole, span.pos + op_pos, "'!=' operator",
                         "'!' must be followed by '='");
    }

    std::string field_raw = trim(text.substr(0, op_pos));
    size_t field_pos = span.pos + text.find_first_not_of(" \t");
    std::string field = resolve_field_token(field_raw, set, whole,
                                            field_raw.empty() ? span.pos + op_pos : field_pos);

    std::string value_raw = trim(text.substr(value_start));
    if (value_raw.empty()) {
        throw ParseError(whole, span.pos + value_start, "a value",
                         "condition has no value: '" + trim(text) + "'");
    }
    bool quoted = unquote(value_raw);

    FieldRef ref;
    ref.segments.push_back(field);

    if (op_text == ":") {
        return make_comparison(std::move(ref), CompareOp::Eq, Literal::string(value_raw));
    }

    CompareOp op;
    if (op_text == ">") op = CompareOp::Gt;
    else if (op_text == "<") op = CompareOp::Lt;
    else if (op_text == ">=") op = CompareOp::Ge;
    else if (op_text == "<=") op = CompareOp::Le;
    else if (op_text == "=") op = CompareOp::Eq;
    else op = CompareOp::Ne;

    Literal value;
    if (quoted) value = Literal::string(value_raw);
    else if (is_decimal(value_raw)) value = Literal::number(value_raw);
    else if (value_raw == "true") value = Literal::boolean(true);
    else if (value_raw == "false") value = Literal::boolean(false);
    else if (value_raw == "null") value = Literal::null();
    else value = Literal::string(value_raw);

    return make_comparison(std::move(ref), op, std::move(value));
}

long long parse_count_option(const std::string& name, const std::string& value) {
    std::string v = trim(value);
    if (v.empty() || v.size() > 18) throw range_error(name, value);
    for (char c : v) {
        if (!std::isdigit(static_cast<unsigned char>(c))) throw range_error(name, value);
    }
    return std::stoll(v);
}

} // namespace

FilterPtr parse_simplified_filter(const std::string& text, const EntitySetDef* set,
                                  const EntityModel* model) {
    (void)model;
    if (trim(text).empty()) {
        throw ParseError(text, 0, "a filter condition", "empty filter");
    }
    reject_or_tokens(text);
    std::vector<FilterPtr> conditions;
    for (const Span& span : split_top_level(text)) {
        if (trim(span.text).empty()) {
            throw ParseError(text, span.pos, "a filter condition", "empty filter condition");
        }
        conditions.push_back(parse_condition(span, set, text));
    }
    return make_and(std::move(conditions));
}

std::vector<OrderKey> parse_simplified_sort(const std::string& text, const EntitySetDef* set,
                                            const EntityModel* model) {
    (void)model;
    if (trim(text).empty()) {
        throw ParseError(text, 0, "a sort field", "empty sort");
    }
    std::vector<OrderKey> keys;
    for (const Span& span : split_top_level(text)) {
        std::string item = trim(span.text);
        if (item.empty()) {
            throw ParseError(text, span.pos, "a sort field", "empty sort entry");
        }
        OrderKey key;
        if (item[0] == '-') {
            key.descending = true;
            item = trim(item.substr(1));
        }
        std::string resolved = resolve_field_token(item, set, text, span.pos);
        key.field.segments.push_back(resolved);
        keys.push_back(std::move(key));
    }
    return keys;
}

std::vector<std::string> parse_simplified_select(const std::string& text,
                                                 const EntitySetDef* set) {
    if (trim(text).empty()) {
        throw ParseError(text, 0, "a field name", "empty select");
    }
    std::vector<std::string> fields;
    for (const Span& span : split_top_level(text)) {
        std::string item = trim(span.text);
        if (item.empty()) {
            throw ParseError(text, span.pos, "a field name", "empty select entry");
        }
        std::string resolved = resolve_field_token(item, set, text, span.pos);
        for (const auto& existing : fields) {
            if (existing == resolved) throw duplicate_field(resolved);
        }
        fields.push_back(std::move(resolved));
    }
    return fields;
}

Query parse_simplified(const std::string& entity_set,
                       const std::vector<std::pair<std::string, std::string>>& options,
                       const EntityModel* model) {
    Query q;
    q.entity_set = entity_set;
    const EntitySetDef* set = nullptr;
    if (model) {
        set = model->find_set(entity_set);
        if (!set) throw Error("UnknownEntitySet", "unknown entity set '" + entity_set + "'");
    }
    std::vector<std::string> seen;
    for (const auto& [name, value] : options) {
        if (name != "filter" && name != "sort" && name != "select" && name != "top" &&
            name != "skip") {
            continue;
        }
        for (const auto& prior : seen) {
            if (prior == name) throw duplicate_option(name);
        }
        seen.push_back(name);
        if (name == "filter") q.filter = parse_simplified_filter(value, set, model);
        else if (name == "sort") q.order_by = parse_simplified_sort(value, set, model);
        else if (name == "select") q.select = parse_simplified_select(value, set);
        else if (name == "top") q.top = parse_count_option(name, value);
        else if (name == "skip") q.skip = parse_count_option(name, value);
    }
    return q;
}

namespace {

// An Or joining an And would melt into it on reserialization; the grouping
// keeps the tree in parser shape so serialization stays exact.
FilterPtr group_if_or(const FilterPtr& f) {
    if (f->kind == FilterExpr::Kind::Or) return make_group(f);
    return f;
}

} // namespace

MergeResult merge(const Query& traditional, const Query& simplified) {
    MergeResult result;
    Query& q = result.query;
    q.entity_set =
        traditional.entity_set.empty() ? simplified.entity_set : traditional.entity_set;

    if (traditional.filter && simplified.filter) {
        q.filter = canonicalize(
            make_and({group_if_or(traditional.filter), group_if_or(simplified.filter)}));
    } else {
        q.filter = traditional.filter ? traditional.filter : simplified.filter;
    }

    if (!traditional.order_by.empty() && !simplified.order_by.empty()) {
        q.order_by = traditional.order_by;
        result.warnings.push_back("simplified 'sort' ignored: $orderby takes precedence");
    } else {
        q.order_by = traditional.order_by.empty() ? simplified.order_by : traditional.order_by;
    }

    if (!traditional.select.empty() && !simplified.select.empty()) {
        q.select = traditional.select;
        result.warnings.push_back("simplified 'select' ignored: $select takes precedence");
    } else {
        q.select = traditional.select.empty() ? simplified.select : traditional.select;
    }

    if (traditional.top && simplified.top) {
        q.top = traditional.top;
        result.warnings.push_back("simplified 'top' ignored: $top takes precedence");
    } else {
        q.top = traditional.top ? traditional.top : simplified.top;
    }

    if (traditional.skip && simplified.skip) {
        q.skip = traditional.skip;
        result.warnings.push_back("simplified 'skip' ignored: $skip takes precedence");
    } else {
        q.skip = traditional.skip ? traditional.skip : simplified.skip;
    }

    // The shorthand has no expand form, so only one side can carry one.
    q.expand = traditional.expand.empty() ? simplified.expand : traditional.expand;

    return result;
}

} // namespace odatax
