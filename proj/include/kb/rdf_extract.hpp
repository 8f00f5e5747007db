#pragma once

#include <string>
#include <vector>

#include "kb/diagnostics.hpp"
#include "kb/rdf_model.hpp"
#include "kb/xml_tree.hpp"

namespace kb::rdf {

// Extracts statements from an RDF element (an element whose local name is
// "rdf"/"RDF"). Understands pre-standard serializations: Description/about,
// resource= object references (including the 'ressource' misspelling, with a
// warning), properties abbreviated to attributes, Bag/Seq/Alt containers
// with li members, and — in lenient mode — property elements stranded
// outside a description, which attach to the most recent description.
RdfGraph extract_rdf(const kb::xml::XmlElement& rdf_root, const std::string& file, Mode mode,
                     Diagnostics& diags);

// Convenience: parse + extract from a whole document whose root is an RDF
// element.
RdfGraph extract_document(const kb::xml::XmlDocument& doc, const std::string& file, Mode mode,
                          Diagnostics& diags);

}  // namespace kb::rdf
