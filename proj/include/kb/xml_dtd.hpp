#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kb/diagnostics.hpp"
#include "kb/xml_tree.hpp"

namespace kb::xml {

// Content model AST for <!ELEMENT ...> declarations.
struct ContentModel {
    enum class Kind {
        Empty,   // EMPTY
        Any,     // ANY
        PCData,  // (#PCDATA)
        Mixed,   // (#PCDATA | a | b)* — allowed names in parts
        Name,    // element name leaf
        Seq,     // a, b, c
        Choice,  // a | b | c
        Opt,     // x?
        Star,    // x*
        Plus,    // x+
    };
    Kind kind = Kind::Empty;
    std::string name;                 // for Name
    std::vector<ContentModel> parts;  // for Mixed/Seq/Choice and single-child wrappers
};

struct AttDef {
    std::string name;
    std::string type;           // CDATA, ID, ..., or "(a|b)" enumeration text
    std::string default_kind;   // #REQUIRED, #IMPLIED, #FIXED, or "" for plain default
    std::string default_value;  // for #FIXED / plain defaults
};

struct ElementDecl {
    std::string name;
    ContentModel model;
    SourcePos pos;
};

struct Dtd {
    std::map<std::string, ElementDecl> elements;
    std::map<std::string, std::vector<AttDef>> attlists;
};

// Parses ELEMENT and ATTLIST declarations. `first_line` lets callers keep
// line numbers meaningful when the text was extracted from an internal
// subset. Ambiguous content models (two ways to match the same next element)
// are reported as dtd.ambiguous. Always returns a Dtd with whatever parsed.
Dtd parse_dtd(const std::string& text, const std::string& file, Mode mode, Diagnostics& diags,
              int first_line = 1);

// Checks the element tree against the DTD: declared root name, declared
// elements, and content-model conformance. Each element yields at most one
// content violation of the form "expected X after Y, found Z". Returns true
// iff no violations were found (diagnostics severity still follows mode).
bool validate_document(const XmlDocument& doc, const Dtd& dtd, const std::string& file,
                       Mode mode, Diagnostics& diags);
bool validate_element(const XmlElement& root, const Dtd& dtd, const std::string& file,
                      Mode mode, Diagnostics& diags);

// Runs one element-name sequence against a model. Returns true on match;
// otherwise false with a violation message in *error. Exposed for testing.
bool match_children(const ContentModel& model, const std::vector<std::string>& names,
                    std::string* error);

}  // namespace kb::xml
