#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kb/diagnostics.hpp"
#include "kb/ontology.hpp"
#include "kb/rdf_model.hpp"

namespace kb::rdf {

// One line of a mapping file: `<key> -> <Attribute> @ <DomainClass>`.
// The key is matched against a property's expanded name, then its prefixed
// name, then its bare local name.
struct MappingRule {
    std::string key;
    std::string attribute;
    std::string domain_class;
    SourceRef at;
};

struct MappingConfig {
    std::vector<MappingRule> rules;
    const MappingRule* find(const RdfName& predicate) const;
};

MappingConfig parse_mapping(const std::string& text, const std::string& file,
                            Diagnostics& diags);

// Splits a `#v<N>` suffix off a namespace URI.
struct VersionTag {
    std::string base;
    int version = 0;
    bool tagged = false;
};
VersionTag split_version_tag(const std::string& value);

struct MappingResult {
    std::vector<Fact> facts;
    int mapped = 0;   // statements that produced at least one fact
    int skipped = 0;  // statements dropped (unmapped, rejected, container internals)
};

// Turns extracted statements into facts using the mapping. Subjects of
// mapped properties become members of the rule's domain class. Container
// values expand member-wise; an Alt contributes only its first member (the
// default) unless expand_alternatives is set. Properties whose namespace
// carries a version tag newer than `kb_version` are rejected; older tags
// warn and proceed. Facts are returned unasserted; type checking happens
// when the caller asserts them.
MappingResult map_statements(const RdfGraph& graph, const MappingConfig& config,
                             int kb_version, const std::string& file, Mode mode,
                             Diagnostics& diags, bool expand_alternatives = false);

}  // namespace kb::rdf
