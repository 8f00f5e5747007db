#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kb/diagnostics.hpp"
#include "kb/flogic_ast.hpp"
#include "kb/ontology.hpp"
#include "kb/rdf_mapping.hpp"

namespace kb {

std::optional<std::string> read_text_file(const std::string& path);
bool write_text_file(const std::string& path, const std::string& content);

// kb.manifest: line-oriented `key value` pairs; `ontology`, `document` and
// `bump` may repeat.
struct Manifest {
    int version = 1;
    std::string checksum;  // ontology fingerprint recorded at the last bump
    std::vector<std::string> ontology;
    std::string mapping;
    std::string snapshot = "facts.snap";
    std::vector<std::string> documents;  // ingested so far, in first-seen order
    std::vector<std::string> bumps;      // "«version» «timestamp»" history lines

    // Adds a document path once, preserving first-seen order.
    void record_document(const std::string& path);
};

Manifest parse_manifest(const std::string& text, const std::string& file, Diagnostics& diags);
std::string render_manifest(const Manifest& m);

// 64-bit FNV-1a over file names and contents, as hex.
std::string fingerprint_files(const std::vector<std::string>& names,
                              const std::vector<std::string>& contents);

// Snapshot: one fact per line, object ids quoted (they may contain characters
// that are not valid identifiers), classes/attributes bare.
//   member "obj" Class
//   attr "obj" Attr str "text"
//   attr "obj" Attr obj "other"
std::vector<Fact> parse_snapshot(const std::string& text, const std::string& file,
                                 Diagnostics& diags);
std::string render_snapshot(const std::vector<Fact>& facts);

// A directory holding kb.manifest, ontology sources (.flo), an optional
// mapping file and the fact snapshot.
class Workspace {
public:
    // Reads the manifest (or derives defaults when it is missing: version 1,
    // all *.flo files in sorted order, mapping.map if present), loads the
    // ontology into the knowledge base, parses the mapping and asserts the
    // stored facts. Returns false when the knowledge base is unusable.
    bool open(const std::string& dir, Mode mode, Diagnostics& diags);

    // Loads (or derives) just the manifest; enough for version queries.
    bool open_manifest(const std::string& dir, Diagnostics& diags);

    const std::string& dir() const { return dir_; }
    Manifest& manifest() { return manifest_; }
    const Manifest& manifest() const { return manifest_; }
    KnowledgeBase& kb() { return kb_; }
    const KnowledgeBase& kb() const { return kb_; }
    const flogic::Program& program() const { return program_; }
    const rdf::MappingConfig& mapping() const { return mapping_; }
    std::vector<Fact>& stored_facts() { return stored_; }
    const std::vector<Fact>& stored_facts() const { return stored_; }

    std::string resolve(const std::string& relative) const;
    // Fingerprint of the ontology sources as they are on disk right now.
    std::string current_fingerprint(Diagnostics& diags) const;
    // True when a recorded checksum no longer matches the sources.
    bool ontology_stale(Diagnostics& diags) const;

    bool save_manifest(Diagnostics& diags) const;
    bool save_snapshot(Diagnostics& diags) const;

private:
    std::string dir_;
    Manifest manifest_;
    KnowledgeBase kb_;
    flogic::Program program_;
    rdf::MappingConfig mapping_;
    std::vector<Fact> stored_;
};

}  // namespace kb
