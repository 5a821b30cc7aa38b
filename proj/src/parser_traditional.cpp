#include "odatax/parser_traditional.hpp"

#include <cctype>

#include "odatax/errors.hpp"

namespace odatax {

namespace {

struct Token {
    enum class Kind { Ident, Number, String, LParen, RParen, Comma, Slash, End };
    Kind kind = Kind::End;
    std::string text;   // identifier spelling, decimal lexeme, or string body (escapes resolved)
    size_t pos = 0;     // offset of the first character in the input
};

class Lexer {
public:
    explicit Lexer(const std::string& input) : input_(input) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const Token& at, const std::string& expected) const {
        throw ParseError(input_, at.pos, expected,
                         "expected " + expected + " at position " + std::to_string(at.pos));
    }

    const std::string& input() const { return input_; }

private:
    void advance() {
        while (i_ < input_.size() && std::isspace(static_cast<unsigned char>(input_[i_]))) ++i_;
        current_ = Token{};
        current_.pos = i_;
        if (i_ >= input_.size()) {
            current_.kind = Token::Kind::End;
            return;
        }
        char c = input_[i_];
        if (c == '(') { current_.kind = Token::Kind::LParen; ++i_; return; }
        if (c == ')') { current_.kind = Token::Kind::RParen; ++i_; return; }
        if (c == ',') { current_.kind = Token::Kind::Comma; ++i_; return; }
        if (c == '/') { current_.kind = Token::Kind::Slash; ++i_; return; }
        if (c == '\'') { lex_string(); return; }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            ((c == '-' || c == '+') && i_ + 1 < input_.size() &&
             std::isdigit(static_cast<unsigned char>(input_[i_ + 1])))) {
            lex_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            lex_ident();
            return;
        }
        throw ParseError(input_, i_, "a filter token",
                         std::string("unexpected character '") + c + "' at position " +
                             std::to_string(i_));
    }

    void lex_string() {
        size_t start = i_;
        ++i_; // opening quote
        std::string body;
        while (true) {
            if (i_ >= input_.size()) {
                throw ParseError(input_, start, "closing quote",
                                 "unterminated string literal at position " +
                                     std::to_string(start));
            }
            char c = input_[i_];
            if (c == '\'') {
                if (i_ + 1 < input_.size() && input_[i_ + 1] == '\'') {
                    body += '\'';
                    i_ += 2;
                    continue;
                }
                ++i_;
                break;
            }
            body += c;
            ++i_;
        }
        current_.kind = Token::Kind::String;
        current_.text = std::move(body);
    }

    void lex_number() {
        size_t start = i_;
        if (input_[i_] == '-' || input_[i_] == '+') ++i_;
        while (i_ < input_.size() && std::isdigit(static_cast<unsigned char>(input_[i_]))) ++i_;
        if (i_ < input_.size() && input_[i_] == '.') {
            ++i_;
            if (i_ >= input_.size() || !std::isdigit(static_cast<unsigned char>(input_[i_]))) {
                throw ParseError(input_, start, "digits after decimal point",
                                 "malformed number at position " + std::to_string(start));
            }
            while (i_ < input_.size() && std::isdigit(static_cast<unsigned char>(input_[i_]))) ++i_;
        }
        current_.kind = Token::Kind::Number;
        current_.text = input_.substr(start, i_ - start);
    }

    void lex_ident() {
        size_t start = i_;
        while (i_ < input_.size() &&
               (std::isalnum(static_cast<unsigned char>(input_[i_])) || input_[i_] == '_')) {
            ++i_;
        }
        current_.kind = Token::Kind::Ident;
        current_.text = input_.substr(start, i_ - start);
    }

    const std::string& input_;
    size_t i_ = 0;
    Token current_;
};

// Field resolution walks relation segments, then requires the last segment
// to be a property of the final set. Returns the metadata-cased path.
FieldRef resolve_path(const std::vector<Token>& segments, const EntitySetDef* set,
                      const EntityModel* model, const std::string& input) {
    FieldRef ref;
    if (!model || !set) {
        for (const auto& t : segments) ref.segments.push_back(t.text);
        return ref;
    }
    const EntitySetDef* current = set;
    for (size_t i = 0; i + 1 < segments.size(); ++i) {
        const RelationDef* rel = current->find_relation(segments[i].text);
        if (!rel) {
            throw ParseError(input, segments[i].pos, "a declared relation",
                             "unknown relation '" + segments[i].text + "' on '" +
                                 current->name + "'");
        }
        ref.segments.push_back(rel->name);
        current = model->find_set(rel->target_set);
    }
    const Token& last = segments.back();
    const PropertyDef* prop = current->find_property(last.text);
    if (!prop) {
        throw ParseError(input, last.pos, "a declared field",
                         "unknown field '" + last.text + "' on '" + current->name + "'");
    }
    ref.segments.push_back(prop->name);
    return ref;
}

class FilterParser {
public:
    FilterParser(const std::string& text, const EntitySetDef* set, const EntityModel* model)
        : lex_(text), set_(set), model_(model) {}

    FilterPtr parse() {
        FilterPtr expr = parse_or();
        if (lex_.peek().kind != Token::Kind::End) {
            lex_.fail(lex_.peek(), "end of filter");
        }
        return expr;
    }

private:
    static bool is_keyword(const Token& t, const char* word) {
        return t.kind == Token::Kind::Ident && t.text == word;
    }

    FilterPtr parse_or() {
        std::vector<FilterPtr> parts{parse_and()};
        while (is_keyword(lex_.peek(), "or")) {
            lex_.take();
            parts.push_back(parse_and());
        }
        return make_or(std::move(parts));
    }

    FilterPtr parse_and() {
        std::vector<FilterPtr> parts{parse_unary()};
        while (is_keyword(lex_.peek(), "and")) {
            lex_.take();
            parts.push_back(parse_unary());
        }
        return make_and(std::move(parts));
    }

    FilterPtr parse_unary() {
        if (is_keyword(lex_.peek(), "not")) {
            lex_.take();
            return make_not(parse_unary());
        }
        return parse_primary();
    }

    FilterPtr parse_primary() {
        const Token& t = lex_.peek();
        if (t.kind == Token::Kind::LParen) {
            lex_.take();
            FilterPtr inner = parse_or();
            if (lex_.peek().kind != Token::Kind::RParen) {
                lex_.fail(lex_.peek(), "')'");
            }
            lex_.take();
            return make_group(std::move(inner));
        }
        if (t.kind != Token::Kind::Ident) {
            lex_.fail(t, "a field name, string function, or '('");
        }
        if (t.text == "contains" || t.text == "startswith" || t.text == "endswith") {
            return parse_string_fn();
        }
        return parse_comparison();
    }

    FilterPtr parse_string_fn() {
        Token name = lex_.take();
        StringFn fn = name.text == "contains"     ? StringFn::Contains
                      : name.text == "startswith" ? StringFn::StartsWith
                                                  : StringFn::EndsWith;
        if (lex_.peek().kind != Token::Kind::LParen) lex_.fail(lex_.peek(), "'('");
        lex_.take();
        FieldRef field = parse_field_path();
        if (lex_.peek().kind != Token::Kind::Comma) lex_.fail(lex_.peek(), "','");
        lex_.take();
        if (lex_.peek().kind != Token::Kind::String) {
            lex_.fail(lex_.peek(), "a string literal");
        }
        Token value = lex_.take();
        if (lex_.peek().kind != Token::Kind::RParen) lex_.fail(lex_.peek(), "')'");
        lex_.take();
        return make_string_fn(fn, std::move(field), Literal::string(value.text));
    }

    FilterPtr parse_comparison() {
        FieldRef field = parse_field_path();
        const Token& op_token = lex_.peek();
        if (op_token.kind != Token::Kind::Ident) {
            lex_.fail(op_token, "a comparison operator (eq ne gt ge lt le)");
        }
        CompareOp op;
        if (op_token.text == "eq") op = CompareOp::Eq;
        else if (op_token.text == "ne") op = CompareOp::Ne;
        else if (op_token.text == "gt") op = CompareOp::Gt;
        else if (op_token.text == "ge") op = CompareOp::Ge;
        else if (op_token.text == "lt") op = CompareOp::Lt;
        else if (op_token.text == "le") op = CompareOp::Le;
        else lex_.fail(op_token, "a comparison operator (eq ne gt ge lt le)");
        lex_.take();
        Literal value = parse_literal();
        return make_comparison(std::move(field), op, std::move(value));
    }

    FieldRef parse_field_path() {
        if (lex_.peek().kind != Token::Kind::Ident) {
            lex_.fail(lex_.peek(), "a field name");
        }
        std::vector<Token> segments{lex_.take()};
        while (lex_.peek().kind == Token::Kind::Slash) {
            lex_.take();
            if (lex_.peek().kind != Token::Kind::Ident) {
                lex_.fail(lex_.peek(), "a field name after '/'");
            }
            segments.push_back(lex_.take());
        }
        return resolve_path(segments, set_, model_, lex_.input());
    }

    Literal parse_literal() {
        const Token& t = lex_.peek();
        if (t.kind == Token::Kind::Number) return Literal::number(lex_.take().text);
        if (t.kind == Token::Kind::String) return Literal::string(lex_.take().text);
        if (t.kind == Token::Kind::Ident) {
            if (t.text == "true") { lex_.take(); return Literal::boolean(true); }
            if (t.text == "false") { lex_.take(); return Literal::boolean(false); }
            if (t.text == "null") { lex_.take(); return Literal::null(); }
        }
        lex_.fail(t, "a literal value");
    }

    Lexer lex_;
    const EntitySetDef* set_;
    const EntityModel* model_;
};

long long parse_count_option(const std::string& name, const std::string& value) {
    if (value.empty() || value.size() > 18) throw range_error(name, value);
    for (char c : value) {
        if (!std::isdigit(static_cast<unsigned char>(c))) throw range_error(name, value);
    }
    return std::stoll(value);
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    for (char c : s) {
        if (c == ',') {
            out.push_back(item);
            item.clear();
        } else {
            item += c;
        }
    }
    out.push_back(item);
    return out;
}

std::string resolve_select_field(const std::string& raw, const EntitySetDef* set,
                                 const std::string& whole, size_t pos) {
    if (!set) return raw;
    const PropertyDef* prop = set->find_property(raw);
    if (!prop) {
        throw ParseError(whole, pos, "a declared field",
                         "unknown field '" + raw + "' on '" + set->name + "'");
    }
    return prop->name;
}

void parse_select(const std::string& value, const EntitySetDef* set, Query& q) {
    size_t offset = 0;
    for (const std::string& piece : split_commas(value)) {
        std::string item = trim(piece);
        if (item.empty()) {
            throw ParseError(value, offset, "a field name", "empty $select entry");
        }
        std::string resolved =
            resolve_select_field(item, set, value, offset + piece.find_first_not_of(" \t"));
        for (const auto& existing : q.select) {
            if (existing == resolved) throw duplicate_field(resolved);
        }
        q.select.push_back(resolved);
        offset += piece.size() + 1;
    }
}

void parse_orderby(const std::string& value, const EntitySetDef* set, const EntityModel* model,
                   Query& q) {
    size_t offset = 0;
    for (const std::string& piece : split_commas(value)) {
        std::string item = trim(piece);
        if (item.empty()) {
            throw ParseError(value, offset, "a field name", "empty $orderby entry");
        }
        // item is "path" or "path asc" or "path desc"
        size_t space = item.find_first_of(" \t");
        std::string path_text = space == std::string::npos ? item : item.substr(0, space);
        std::string dir = space == std::string::npos ? "" : trim(item.substr(space));
        OrderKey key;
        if (dir == "desc") key.descending = true;
        else if (dir == "asc" || dir.empty()) key.descending = false;
        else {
            throw ParseError(value, offset, "'asc' or 'desc'",
                             "unknown sort direction '" + dir + "'");
        }
        // Reuse the filter lexer's path rules through a small inline split.
        std::vector<Token> segments;
        size_t seg_start = 0;
        while (true) {
            size_t slash = path_text.find('/', seg_start);
            Token t;
            t.text = path_text.substr(seg_start, slash == std::string::npos
                                                     ? std::string::npos
                                                     : slash - seg_start);
            t.pos = offset;
            if (t.text.empty()) {
                throw ParseError(value, offset, "a field name", "empty $orderby entry");
            }
            segments.push_back(std::move(t));
            if (slash == std::string::npos) break;
            seg_start = slash + 1;
        }
        key.field = resolve_path(segments, set, model, value);
        q.order_by.push_back(std::move(key));
        offset += piece.size() + 1;
    }
}

// expandList := item (',' item)*
// item       := relation [ '(' '$expand=' expandList ')' ]
class ExpandParser {
public:
    ExpandParser(const std::string& text, const EntitySetDef* set, const EntityModel* model)
        : text_(text), set_(set), model_(model) {}

    std::vector<ExpandNode> parse() {
        auto list = parse_list(set_);
        skip_spaces();
        if (i_ != text_.size()) {
            throw ParseError(text_, i_, "end of $expand", "trailing characters in $expand");
        }
        return list;
    }

private:
    void skip_spaces() {
        while (i_ < text_.size() && (text_[i_] == ' ' || text_[i_] == '\t')) ++i_;
    }

    std::vector<ExpandNode> parse_list(const EntitySetDef* set) {
        std::vector<ExpandNode> out;
        while (true) {
            out.push_back(parse_item(set));
            skip_spaces();
            if (i_ < text_.size() && text_[i_] == ',') {
                ++i_;
                continue;
            }
            break;
        }
        return out;
    }

    ExpandNode parse_item(const EntitySetDef* set) {
        skip_spaces();
        size_t start = i_;
        while (i_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_')) {
            ++i_;
        }
        if (i_ == start) {
            throw ParseError(text_, start, "a relation name", "expected a relation name");
        }
        std::string name = text_.substr(start, i_ - start);
        ExpandNode node;
        const EntitySetDef* target = nullptr;
        if (set && model_) {
            const RelationDef* rel = set->find_relation(name);
            if (!rel) {
                throw ParseError(text_, start, "a declared relation",
                                 "unknown relation '" + name + "' on '" + set->name + "'");
            }
            node.relation = rel->name;
            target = model_->find_set(rel->target_set);
        } else {
            node.relation = name;
        }
        skip_spaces();
        if (i_ < text_.size() && text_[i_] == '(') {
            ++i_;
            skip_spaces();
            static const std::string kInner = "$expand=";
            if (text_.compare(i_, kInner.size(), kInner) != 0) {
                throw ParseError(text_, i_, "'$expand=' inside parentheses",
                                 "only nested $expand is supported inside parentheses");
            }
            i_ += kInner.size();
            node.children = parse_list(target);
            skip_spaces();
            if (i_ >= text_.size() || text_[i_] != ')') {
                throw ParseError(text_, i_, "')'", "unbalanced parenthesis in $expand");
            }
            ++i_;
        }
        return node;
    }

    const std::string& text_;
    const EntitySetDef* set_;
    const EntityModel* model_;
    size_t i_ = 0;
};

} // namespace

FilterPtr parse_filter(const std::string& text, const EntitySetDef* set,
                       const EntityModel* model) {
    if (trim(text).empty()) {
        throw ParseError(text, 0, "a filter expression", "empty $filter");
    }
    return FilterParser(text, set, model).parse();
}

std::vector<std::pair<std::string, std::string>> split_query_options(const std::string& raw) {
    std::vector<std::pair<std::string, std::string>> out;
    size_t i = 0;
    while (i <= raw.size()) {
        size_t amp = raw.find('&', i);
        std::string part =
            raw.substr(i, amp == std::string::npos ? std::string::npos : amp - i);
        if (!part.empty()) {
            size_t eq = part.find('=');
            if (eq == std::string::npos) out.emplace_back(part, "");
            else out.emplace_back(part.substr(0, eq), part.substr(eq + 1));
        }
        if (amp == std::string::npos) break;
        i = amp + 1;
    }
    return out;
}

Query parse_traditional(const std::string& entity_set,
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
        if (name.empty() || name[0] != '$') continue;
        for (const auto& prior : seen) {
            if (prior == name) throw duplicate_option(name);
        }
        seen.push_back(name);
        if (name == "$filter") {
            q.filter = parse_filter(value, set, model);
        } else if (name == "$select") {
            parse_select(value, set, q);
        } else if (name == "$orderby") {
            parse_orderby(value, set, model, q);
        } else if (name == "$top") {
            q.top = parse_count_option(name, value);
        } else if (name == "$skip") {
            q.skip = parse_count_option(name, value);
        } else if (name == "$expand") {
            q.expand = ExpandParser(value, set, model).parse();
        } else {
            throw ParseError(name, 0, "a supported query option",
                             "unsupported query option '" + name + "'");
        }
    }
    return q;
}

} // namespace odatax
