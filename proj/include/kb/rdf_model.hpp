#pragma once

#include <string>
#include <vector>

#include "kb/diagnostics.hpp"

namespace kb::rdf {

// A node in a statement. Resources are named by their 'about'/'resource'
// value; anonymous nodes get document-local generated ids; literals carry
// text.
struct RdfNode {
    enum class Kind { Resource, Literal, Anon };
    Kind kind = Kind::Resource;
    std::string value;

    bool operator==(const RdfNode&) const = default;
};

inline RdfNode resource_node(std::string v) {
    return {RdfNode::Kind::Resource, std::move(v)};
}
inline RdfNode literal_node(std::string v) { return {RdfNode::Kind::Literal, std::move(v)}; }
inline RdfNode anon_node(std::string v) { return {RdfNode::Kind::Anon, std::move(v)}; }

// Property name with its namespace binding as written: `ns` is the resolved
// namespace URI (or the raw prefix when no binding is in scope), `prefix` the
// prefix as written, `local` the local part.
struct RdfName {
    std::string ns;
    std::string prefix;
    std::string local;

    bool operator==(const RdfName&) const = default;
};

struct RdfStatement {
    RdfNode subject;
    RdfName predicate;
    RdfNode object;
    SourcePos pos;
};

struct RdfGraph {
    std::vector<RdfStatement> statements;
};

std::string render_node(const RdfNode& node);
std::string render_statement(const RdfStatement& st);
std::string render_graph(const RdfGraph& graph);

// Containers are emitted as an anonymous (or ID-named) node with an
// rdf:type statement ("Bag", "Seq" or "Alt") plus rdf:_1.. member
// statements. Two graphs are equivalent when their statements match up to
// renaming of anonymous ids, with properties compared by local name, Bag
// members compared as a multiset, Seq members in order, and Alt by first
// member (the default) plus a multiset of the rest.
bool equivalent_statement_sets(const RdfGraph& a, const RdfGraph& b);

}  // namespace kb::rdf
