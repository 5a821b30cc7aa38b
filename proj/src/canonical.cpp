#include "odatax/canonical.hpp"

#include <algorithm>

#include <openssl/evp.h>

#include "odatax/serialize.hpp"

namespace odatax {

namespace {

// Flattens same-kind children one level; recursion below already flattened
// deeper levels, so one pass suffices.
std::vector<FilterPtr> flatten(FilterExpr::Kind kind, const std::vector<FilterPtr>& children) {
    std::vector<FilterPtr> out;
    for (const auto& child : children) {
        if (child->kind == kind) {
            out.insert(out.end(), child->children.begin(), child->children.end());
        } else {
            out.push_back(child);
        }
    }
    return out;
}

void sort_by_serialization(std::vector<FilterPtr>& children) {
    std::stable_sort(children.begin(), children.end(),
                     [](const FilterPtr& a, const FilterPtr& b) {
                         return serialize_filter(a) < serialize_filter(b);
                     });
}

FilterPtr canonicalize_node(const FilterPtr& node) {
    switch (node->kind) {
    case FilterExpr::Kind::Comparison:
    case FilterExpr::Kind::StringFn:
        return node;
    case FilterExpr::Kind::Not:
        return make_not(canonicalize_node(node->children.front()));
    case FilterExpr::Kind::Group:
        return make_group(canonicalize_node(node->children.front()));
    case FilterExpr::Kind::And:
    case FilterExpr::Kind::Or: {
        std::vector<FilterPtr> children;
        children.reserve(node->children.size());
        for (const auto& child : node->children) children.push_back(canonicalize_node(child));
        children = flatten(node->kind, children);
        sort_by_serialization(children);
        auto out = std::make_shared<FilterExpr>();
        out->kind = node->kind;
        out->children = std::move(children);
        return out;
    }
    }
    return node;
}

void sort_expand(std::vector<ExpandNode>& expand) {
    for (auto& node : expand) sort_expand(node.children);
    std::stable_sort(expand.begin(), expand.end(),
                     [](const ExpandNode& a, const ExpandNode& b) {
                         return a.relation < b.relation;
                     });
}

} // namespace

FilterPtr canonicalize(const FilterPtr& filter) {
    if (!filter) return filter;
    return canonicalize_node(filter);
}

Query canonicalize(const Query& q) {
    Query out = q;
    out.filter = canonicalize(q.filter);
    std::sort(out.select.begin(), out.select.end());
    sort_expand(out.expand);
    return out;
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string cache_key(const Query& q) {
    Query canon = canonicalize(q);
    return sha256_hex(canon.entity_set + "?" + serialize_odata(canon));
}

} // namespace odatax
