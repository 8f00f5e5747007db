#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kb/diagnostics.hpp"

namespace kb::xml {

struct XmlName {
    std::string prefix;  // empty if unprefixed
    std::string local;

    std::string qualified() const { return prefix.empty() ? local : prefix + ":" + local; }
    bool operator==(const XmlName&) const = default;
};

XmlName split_name(const std::string& qualified);

struct XmlAttr {
    XmlName name;
    std::string value;
    SourcePos pos;
};

struct XmlElement;

// Either a text run or a child element.
struct XmlNode {
    bool is_text = false;
    std::string text;
    std::unique_ptr<XmlElement> elem;
};

struct XmlElement {
    XmlName name;
    std::vector<XmlAttr> attrs;  // in source order
    std::vector<XmlNode> children;
    SourcePos pos;

    // First attribute with the given qualified name, or null.
    const std::string* attr(const std::string& qualified) const;
    std::vector<const XmlElement*> child_elements() const;
    // Direct text children, concatenated.
    std::string text_content() const;
};

// Structural equality: names, attribute lists (order included) and children.
bool equal_element(const XmlElement& a, const XmlElement& b);

struct Doctype {
    bool present = false;
    std::string root_name;
    std::string system_id;        // external subset reference, if any
    bool has_internal = false;
    std::string internal_subset;  // raw text between '[' and ']'
    SourcePos pos;
};

struct XmlDeclaration {
    std::string version;
    std::string encoding;  // as written; empty if absent
};

struct XmlDocument {
    std::optional<XmlDeclaration> decl;
    Doctype doctype;
    XmlElement root;
};

}  // namespace kb::xml
