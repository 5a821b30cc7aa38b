#include "odatax/named_queries.hpp"

#include <atomic>
#include <cctype>
#include <fstream>
#include <set>

#include "odatax/errors.hpp"
#include "odatax/parser_traditional.hpp"

namespace odatax {

namespace {

bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') return false;
    }
    return true;
}

// Scans for {identifier} placeholders. `inside_quotes` reports, per
// placeholder, whether it sits inside a single-quoted literal.
struct PlaceholderScan {
    std::vector<std::string> names;
    std::vector<bool> inside_quotes;
};

PlaceholderScan scan_placeholders(const std::string& tpl) {
    PlaceholderScan scan;
    bool quoted = false;
    for (size_t i = 0; i < tpl.size(); ++i) {
        char c = tpl[i];
        if (c == '\'') {
            quoted = !quoted;
            continue;
        }
        if (c != '{') continue;
        size_t close = tpl.find('}', i);
        if (close == std::string::npos) {
            throw Error("InvalidTemplate", "unterminated '{' in template");
        }
        std::string name = tpl.substr(i + 1, close - i - 1);
        if (!is_identifier(name)) {
            throw Error("InvalidTemplate", "bad placeholder '{" + name + "}' in template");
        }
        scan.names.push_back(name);
        scan.inside_quotes.push_back(quoted);
        i = close;
    }
    return scan;
}

std::string escape_single_quotes(const std::string& raw) {
    std::string out;
    for (char c : raw) {
        if (c == '\'') out += "''";
        else out += c;
    }
    return out;
}

// The template's option structure is fixed before any argument arrives:
// split first, substitute into each value after. An '&' or '=' inside an
// argument therefore stays inside its option value (and, since every
// placeholder sits inside a quoted literal, inside that literal) instead of
// creating new query options.
std::vector<std::pair<std::string, std::string>> expand_options(
    const std::string& template_text, const std::map<std::string, std::string>& args) {
    auto options = split_query_options(template_text);
    for (auto& option : options) {
        option.second = substitute_template(option.second, args);
    }
    return options;
}

} // namespace

std::string substitute_template(const std::string& template_text,
                                const std::map<std::string, std::string>& args) {
    std::string out;
    for (size_t i = 0; i < template_text.size(); ++i) {
        char c = template_text[i];
        if (c != '{') {
            out += c;
            continue;
        }
        size_t close = template_text.find('}', i);
        std::string name = template_text.substr(i + 1, close - i - 1);
        auto it = args.find(name);
        out += escape_single_quotes(it->second);
        i = close;
    }
    return out;
}

NamedQueryDef NamedQueryDef::from_json(const nlohmann::json& doc) {
    NamedQueryDef def;
    def.name = doc.at("name").get<std::string>();
    def.template_text = doc.at("template").get<std::string>();
    for (const auto& p : doc.value("parameters", nlohmann::json::array())) {
        def.parameters.push_back(p.get<std::string>());
    }
    def.cacheable = doc.value("cacheable", false);
    if (doc.contains("costLimit") && !doc["costLimit"].is_null()) {
        def.cost_limit = doc["costLimit"].get<double>();
    }
    return def;
}

nlohmann::json NamedQueryDef::to_json() const {
    nlohmann::json doc{{"name", name},
                       {"template", template_text},
                       {"parameters", parameters},
                       {"cacheable", cacheable}};
    if (cost_limit) doc["costLimit"] = *cost_limit;
    return doc;
}

void QueryRegistry::validate(const NamedQueryDef& def) const {
    if (!is_identifier(def.name)) {
        throw Error("InvalidTemplate",
                    "query name must be alphanumeric plus '-' or '_', got '" + def.name + "'");
    }
    if (def.template_text.empty()) {
        throw Error("InvalidTemplate", "template for '" + def.name + "' is empty");
    }
    if (def.cost_limit && *def.cost_limit <= 0) {
        throw Error("InvalidTemplate",
                    "costLimit for '" + def.name + "' must be positive");
    }

    std::set<std::string> declared(def.parameters.begin(), def.parameters.end());
    if (declared.size() != def.parameters.size()) {
        throw Error("PlaceholderMismatch",
                    "duplicate parameter name in '" + def.name + "'");
    }

    PlaceholderScan scan = scan_placeholders(def.template_text);
    std::set<std::string> used(scan.names.begin(), scan.names.end());
    for (const auto& p : used) {
        if (!declared.count(p)) {
            throw Error("PlaceholderMismatch", "template of '" + def.name +
                                                   "' uses undeclared parameter '{" + p + "}'");
        }
    }
    for (const auto& p : declared) {
        if (!used.count(p)) {
            throw Error("PlaceholderMismatch", "parameter '" + p + "' of '" + def.name +
                                                   "' never appears in the template");
        }
    }
    for (size_t i = 0; i < scan.names.size(); ++i) {
        if (!scan.inside_quotes[i]) {
            throw Error("InvalidTemplate",
                        "placeholder '{" + scan.names[i] + "}' in '" + def.name +
                            "' must sit inside a quoted string literal");
        }
    }

    // Probe parse: substitute every parameter and make sure the template is
    // valid traditional syntax. Field names resolve later, per entity set.
    std::map<std::string, std::string> probe;
    for (const auto& p : def.parameters) probe[p] = "probe";
    try {
        parse_traditional("", expand_options(def.template_text, probe), nullptr);
    } catch (const Error& e) {
        throw Error("InvalidTemplate", "template of '" + def.name +
                                           "' does not parse: " + e.what());
    }
}

std::shared_ptr<const QueryRegistry::Snapshot> QueryRegistry::snapshot() const {
    std::lock_guard<std::mutex> lock(write_mutex_);
    return snapshot_;
}

void QueryRegistry::register_query(const NamedQueryDef& def, bool replace) {
    validate(def);
    std::lock_guard<std::mutex> lock(write_mutex_);
    if (!replace && snapshot_->count(def.name)) {
        throw Error("DuplicateName", "named query '" + def.name + "' already registered");
    }
    auto next = std::make_shared<Snapshot>(*snapshot_);
    (*next)[def.name] = def;
    snapshot_ = std::move(next);
}

size_t QueryRegistry::load_registry(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("FileError", "cannot open registry file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error("InvalidTemplate",
                    "registry file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_array()) {
        throw Error("InvalidTemplate", "registry file must hold a JSON array");
    }

    // Validate everything against a scratch copy first so a bad entry
    // cannot leave a half-loaded registry behind.
    std::vector<NamedQueryDef> defs;
    std::set<std::string> names;
    for (const auto& entry : doc) {
        NamedQueryDef def;
        try {
            def = NamedQueryDef::from_json(entry);
        } catch (const nlohmann::json::exception& e) {
            throw Error("InvalidTemplate", std::string("bad registry entry: ") + e.what());
        }
        validate(def);
        if (!names.insert(def.name).second) {
            throw Error("DuplicateName",
                        "named query '" + def.name + "' appears twice in '" + path + "'");
        }
        defs.push_back(std::move(def));
    }

    std::lock_guard<std::mutex> lock(write_mutex_);
    auto next = std::make_shared<Snapshot>(*snapshot_);
    for (auto& def : defs) (*next)[def.name] = std::move(def);
    snapshot_ = std::move(next);
    return defs.size();
}

ExpandedQuery QueryRegistry::expand(const std::string& name,
                                    const std::map<std::string, std::string>& args,
                                    const std::string& entity_set,
                                    const EntityModel* model) const {
    auto snap = snapshot();
    auto it = snap->find(name);
    if (it == snap->end()) {
        throw Error("UnknownNamedQuery", "named query '" + name + "' is not registered");
    }
    const NamedQueryDef& def = it->second;
    for (const auto& p : def.parameters) {
        if (!args.count(p)) {
            throw Error("MissingParameter",
                        "named query '" + name + "' requires parameter '" + p + "'");
        }
    }
    for (const auto& [key, value] : args) {
        (void)value;
        bool declared = false;
        for (const auto& p : def.parameters) {
            if (p == key) { declared = true; break; }
        }
        if (!declared) {
            throw Error("UnexpectedParameter",
                        "named query '" + name + "' has no parameter '" + key + "'");
        }
    }
    ExpandedQuery out;
    out.query = parse_traditional(entity_set, expand_options(def.template_text, args), model);
    out.cacheable = def.cacheable;
    out.cost_limit = def.cost_limit;
    return out;
}

std::optional<NamedQueryDef> QueryRegistry::find(const std::string& name) const {
    auto snap = snapshot();
    auto it = snap->find(name);
    if (it == snap->end()) return std::nullopt;
    return it->second;
}

std::vector<NamedQueryDef> QueryRegistry::list() const {
    auto snap = snapshot();
    std::vector<NamedQueryDef> out;
    for (const auto& [name, def] : *snap) {
        (void)name;
        out.push_back(def);
    }
    return out;
}

size_t QueryRegistry::size() const { return snapshot()->size(); }

} // namespace odatax
