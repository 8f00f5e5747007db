#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kb/diagnostics.hpp"
#include "kb/xml_tree.hpp"

namespace kb::xml {

// Parses a whole document. In lenient mode the parser recovers from common
// damage (stray close tags, unterminated start tags, empty attribute names)
// and reports warnings; in strict mode the same situations are errors, but a
// best-effort tree is still produced so callers can inspect it. Returns
// nullopt only when no root element can be recognised at all or the declared
// encoding is unsupported.
std::optional<XmlDocument> parse_xml(const std::string& text, const std::string& file,
                                     Mode mode, Diagnostics& diags);

// Scans arbitrary text (e.g. an HTML page) for elements whose tag name is
// "rdf" under any prefix, parsing each as a lenient XML fragment. Content
// outside those fragments is ignored.
std::vector<XmlElement> scan_rdf_fragments(const std::string& text, const std::string& file,
                                           Diagnostics& diags);

// Canonical serialization: markup only, text and attribute values escaped,
// childless elements rendered self-closed. Comments and processing
// instructions are not preserved.
std::string serialize(const XmlElement& elem);
std::string serialize(const XmlDocument& doc);

// Expands character and entity references in free text. Unknown references
// are errors in strict mode; in lenient mode they are kept literally with a
// warning. Idempotent over its own output except where the output contains
// markup characters that re-escape ('&' produced by design stays literal
// because lenient mode keeps bare ampersands).
std::string resolve_entities(const std::string& text, Mode mode, Diagnostics& diags,
                             const SourceRef& where = {});

// Escapes text for inclusion in element content / attribute values.
std::string escape_text(const std::string& text);
std::string escape_attr(const std::string& text);

}  // namespace kb::xml
