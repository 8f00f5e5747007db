#include <algorithm>
#include <cctype>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kb/flogic_loader.hpp"
#include "kb/flogic_parser.hpp"
#include "kb/inference.hpp"
#include "kb/query.hpp"
#include "kb/rdf_extract.hpp"
#include "kb/rdf_mapping.hpp"
#include "kb/workspace.hpp"
#include "kb/xml_dtd.hpp"
#include "kb/xml_parser.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;  // invalid input, failed checks
constexpr int kExitUsage = 2;   // I/O failures and bad invocations

void print_diagnostics(const kb::Diagnostics& diags) {
    for (const auto& d : diags.items()) std::cerr << kb::format_diagnostic(d) << "\n";
}

bool has_io_failure(const kb::Diagnostics& diags) {
    return diags.has_code("ws.io") || diags.has_code("io.read");
}

int finish(const kb::Diagnostics& diags, bool io_failed) {
    print_diagnostics(diags);
    if (io_failed || has_io_failure(diags)) return kExitUsage;
    return diags.has_errors() ? kExitDomain : kExitOk;
}

std::string lower_ext(const std::string& path) {
    std::string ext = fs::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext;
}

bool is_rdf_root(const kb::xml::XmlElement& root) {
    std::string local = root.name.local;
    std::transform(local.begin(), local.end(), local.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return local == "rdf";
}

// Validates one XML document against its DTD (internal subset and/or the
// SYSTEM file next to the document). RDF content additionally goes through
// statement extraction so structural problems surface.
void check_xml_file(const std::string& path, const std::string& text, kb::Mode mode,
                    kb::Diagnostics& diags) {
    auto doc = kb::xml::parse_xml(text, path, mode, diags);
    if (!doc) return;
    bool have_dtd = false;
    kb::xml::Dtd dtd;
    if (doc->doctype.present) {
        if (doc->doctype.has_internal) {
            dtd = kb::xml::parse_dtd(doc->doctype.internal_subset, path, mode, diags,
                                     doc->doctype.pos.line);
            have_dtd = true;
            if (!doc->doctype.system_id.empty())
                diags.warning("dtd.external",
                              "both an internal subset and a SYSTEM identifier are present; "
                              "using the internal subset",
                              {path, doc->doctype.pos});
        } else if (!doc->doctype.system_id.empty()) {
            fs::path dtd_path = fs::path(path).parent_path() / doc->doctype.system_id;
            if (auto dtd_text = kb::read_text_file(dtd_path.string())) {
                dtd = kb::xml::parse_dtd(*dtd_text, dtd_path.string(), mode, diags);
                have_dtd = true;
            } else {
                diags.error("dtd.missing",
                            "external DTD '" + doc->doctype.system_id + "' not found",
                            {path, doc->doctype.pos});
            }
        }
    }
    if (have_dtd) kb::xml::validate_document(*doc, dtd, path, mode, diags);
    if (is_rdf_root(doc->root)) kb::rdf::extract_document(*doc, path, mode, diags);
}

int cmd_check(const std::vector<std::string>& files, kb::Mode mode) {
    kb::Diagnostics diags;
    bool io_failed = false;
    kb::flogic::Program combined;
    bool any_flo = false;

    for (const auto& path : files) {
        auto text = kb::read_text_file(path);
        if (!text) {
            diags.error("io.read", "cannot read '" + path + "'", {});
            io_failed = true;
            continue;
        }
        std::string ext = lower_ext(path);
        if (ext == ".flo") {
            kb::flogic::Program prog = kb::flogic::parse_program(*text, path, diags);
            any_flo = true;
            auto append = [](auto& dst, auto& src) {
                for (auto& item : src) dst.push_back(std::move(item));
            };
            append(combined.class_decls, prog.class_decls);
            append(combined.signatures, prog.signatures);
            append(combined.facts, prog.facts);
            append(combined.rules, prog.rules);
            append(combined.queries, prog.queries);
        } else if (ext == ".q") {
            kb::flogic::parse_query(*text, path, diags);
        } else if (ext == ".xml" || ext == ".rdf") {
            check_xml_file(path, *text, mode, diags);
        } else if (ext == ".html" || ext == ".htm") {
            auto fragments = kb::xml::scan_rdf_fragments(*text, path, diags);
            for (const auto& frag : fragments) kb::rdf::extract_rdf(frag, path, mode, diags);
            if (fragments.empty())
                diags.warning("rdf.none", "no embedded descriptions found in '" + path + "'",
                              {});
        } else if (ext == ".map") {
            kb::rdf::parse_mapping(*text, path, diags);
        } else if (ext == ".dtd") {
            kb::xml::parse_dtd(*text, path, mode, diags);
        } else {
            std::cerr << "kbctl: don't know how to check '" << path << "'\n";
            return kExitUsage;
        }
    }
    if (any_flo) {
        // Files are checked together so cross-file references resolve.
        kb::KnowledgeBase check_kb;
        if (kb::flogic::load_program(combined, check_kb, mode, diags))
            kb::compile_rules(combined, check_kb, mode, diags);
    }
    int code = finish(diags, io_failed);
    if (code == kExitOk) std::cout << "ok\n";
    return code;
}

// Instantiates a body atom under a witness binding.
std::optional<kb::Fact> atom_fact(const kb::flogic::Atom& atom, const kb::Binding& binding) {
    auto term_value = [&](const kb::flogic::Term& t) -> std::optional<kb::Value> {
        switch (t.kind) {
            case kb::flogic::Term::Kind::Variable: {
                auto it = binding.find(t.text);
                if (it == binding.end()) return std::nullopt;
                return it->second;
            }
            case kb::flogic::Term::Kind::Literal:
                return kb::literal_value(t.text);
            default:
                return kb::object_value(t.text);
        }
    };
    auto subject = term_value(atom.subject);
    if (!subject || subject->kind != kb::ValueKind::Object) return std::nullopt;
    if (atom.kind == kb::flogic::Atom::Kind::Membership)
        return kb::Fact::membership(subject->text, atom.name);
    auto value = term_value(atom.value);
    if (!value) return std::nullopt;
    return kb::Fact::attribute(subject->text, atom.name, *value);
}

// Rows in the order render() prints them (sorted by rendered text).
std::vector<std::vector<kb::Value>> rows_in_render_order(const kb::BindingSet& bs) {
    std::vector<std::vector<kb::Value>> rows(bs.rows.begin(), bs.rows.end());
    auto rendered = [](const std::vector<kb::Value>& row) {
        std::string out;
        for (const auto& v : row) {
            out += kb::render_value(v);
            out.push_back('\x1f');
        }
        return out;
    };
    std::sort(rows.begin(), rows.end(),
              [&](const auto& a, const auto& b) { return rendered(a) < rendered(b); });
    return rows;
}

int cmd_query(const std::string& workspace, const std::string& inline_text,
              const std::string& file, int explain_row, bool tsv, kb::Mode mode) {
    kb::Diagnostics diags;
    std::string text = inline_text;
    std::string label = "<query>";
    if (!file.empty()) {
        auto content = kb::read_text_file(file);
        if (!content) {
            std::cerr << "kbctl: cannot read '" << file << "'\n";
            return kExitUsage;
        }
        text = *content;
        label = file;
    }

    kb::Workspace ws;
    if (!ws.open(workspace, mode, diags)) return finish(diags, false);

    auto query = kb::flogic::parse_query(text, label, diags);
    if (!query || diags.has_errors()) return finish(diags, false);

    kb::RuleSet rules = kb::compile_rules(ws.program(), ws.kb(), mode, diags);
    kb::SaturatedKB skb = kb::saturate(ws.kb(), rules, mode, diags);
    kb::BindingSet result = kb::evaluate(*query, skb, mode, diags);
    if (diags.has_errors()) return finish(diags, false);

    std::cout << kb::render(result, tsv);

    if (explain_row > 0) {
        auto rows = rows_in_render_order(result);
        if (static_cast<size_t>(explain_row) > rows.size()) {
            std::cerr << "kbctl: --explain " << explain_row << ": result has only "
                      << rows.size() << " row(s)\n";
            print_diagnostics(diags);
            return kExitUsage;
        }
        const auto& row = rows[static_cast<size_t>(explain_row) - 1];
        std::cout << "\nrow " << explain_row << ":";
        for (size_t i = 0; i < result.columns.size(); ++i)
            std::cout << " " << result.columns[i] << " = " << kb::render_value(row[i]);
        std::cout << "\n";
        auto witnesses = kb::witnesses_for_row(*query, skb, row);
        if (witnesses.empty()) {
            std::cout << "  (no witness)\n";
        } else {
            kb::flogic::Query resolved = kb::resolve_query(*query, skb);
            const kb::Binding& witness = witnesses.front();
            if (witnesses.size() > 1)
                std::cout << "  (showing 1 of " << witnesses.size() << " witnesses)\n";
            for (const auto& atom : resolved.body) {
                auto fact = atom_fact(atom, witness);
                if (!fact) continue;
                std::cout << kb::format_explanation(kb::explain(skb, *fact));
            }
        }
    }
    return finish(diags, false);
}

int cmd_ingest(const std::string& workspace, const std::vector<std::string>& docs,
               bool expand_alternatives, kb::Mode mode) {
    kb::Diagnostics diags;
    bool io_failed = false;

    kb::Workspace ws;
    if (!ws.open(workspace, mode, diags)) return finish(diags, false);
    if (ws.ontology_stale(diags)) {
        diags.error("ver.stale",
                    "ontology sources changed since the last version bump; run 'kbctl version "
                    "bump' first",
                    {});
        return finish(diags, false);
    }

    for (const auto& doc_path : docs) {
        std::size_t warnings_before = diags.warning_count();
        auto text = kb::read_text_file(doc_path);
        if (!text) {
            diags.error("io.read", "cannot read '" + doc_path + "'", {});
            io_failed = true;
            continue;
        }
        std::string ext = lower_ext(doc_path);
        kb::rdf::RdfGraph graph;
        if (ext == ".html" || ext == ".htm") {
            auto fragments = kb::xml::scan_rdf_fragments(*text, doc_path, diags);
            if (fragments.empty())
                diags.warning("rdf.none", "no embedded descriptions found in '" + doc_path +
                                              "'",
                              {});
            for (const auto& frag : fragments) {
                kb::rdf::RdfGraph part = kb::rdf::extract_rdf(frag, doc_path, mode, diags);
                for (auto& st : part.statements) graph.statements.push_back(std::move(st));
            }
        } else {
            auto doc = kb::xml::parse_xml(*text, doc_path, mode, diags);
            if (!doc) continue;
            if (!is_rdf_root(doc->root)) {
                diags.error("rdf.root",
                            "document root '" + doc->root.name.qualified() +
                                "' is not a description root",
                            {doc_path, doc->root.pos});
                continue;
            }
            graph = kb::rdf::extract_document(*doc, doc_path, mode, diags);
        }

        kb::rdf::MappingResult mapped =
            kb::rdf::map_statements(graph, ws.mapping(), ws.manifest().version, doc_path, mode,
                                    diags, expand_alternatives);
        ws.kb().assert_facts(mapped.facts, mode, diags);
        for (const auto& f : mapped.facts)
            if (ws.kb().has_fact(f)) ws.stored_facts().push_back(f);

        std::size_t warnings = diags.warning_count() - warnings_before;
        std::cout << doc_path << ": " << graph.statements.size() << " statements, "
                  << mapped.facts.size() << " facts, " << warnings << " warnings\n";
        ws.manifest().record_document(doc_path);
    }

    if (diags.has_errors() || io_failed) return finish(diags, io_failed);

    if (ws.manifest().checksum.empty())
        ws.manifest().checksum = ws.current_fingerprint(diags);
    bool saved = ws.save_snapshot(diags) && ws.save_manifest(diags);
    return finish(diags, !saved || io_failed);
}

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int cmd_version(const std::string& workspace, bool bump, kb::Mode mode) {
    kb::Diagnostics diags;
    kb::Workspace ws;
    if (bump) {
        // A bump certifies the sources, so they must load cleanly first.
        if (!ws.open(workspace, mode, diags) || diags.has_errors())
            return finish(diags, false);
        ws.manifest().version += 1;
        ws.manifest().checksum = ws.current_fingerprint(diags);
        ws.manifest().bumps.push_back("v" + std::to_string(ws.manifest().version) + " " +
                                      utc_timestamp());
        if (diags.has_errors() || !ws.save_manifest(diags)) return finish(diags, false);
        std::cout << "v" << ws.manifest().version << "\n";
        return finish(diags, false);
    }
    if (!ws.open_manifest(workspace, diags)) return finish(diags, false);
    std::cout << "v" << ws.manifest().version << "\n";
    return finish(diags, false);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deductive knowledge base tool"};
    app.require_subcommand(1);

    std::string workspace = ".";
    bool strict = false;
    bool lenient = false;
    app.add_option("--workspace,-w", workspace, "workspace directory")->capture_default_str();
    app.add_flag("--strict", strict, "fail on questionable input (default)");
    app.add_flag("--lenient", lenient, "recover from questionable input with warnings");

    auto* check = app.add_subcommand("check", "validate sources without touching the workspace");
    std::vector<std::string> check_files;
    check->add_option("files", check_files, "files to check (.flo .q .xml .rdf .html .map .dtd)")
        ->required();

    auto* query = app.add_subcommand("query", "run a query against the knowledge base");
    std::string query_text;
    std::string query_file;
    int explain_row = 0;
    bool tsv = false;
    query->add_option("-q,--query", query_text, "query text");
    query->add_option("-f,--file", query_file, "file containing the query");
    query->add_option("--explain", explain_row, "explain the Nth result row (1-based)");
    query->add_flag("--tsv", tsv, "tab-separated output");

    auto* ingest = app.add_subcommand("ingest", "extract facts from documents into the workspace");
    std::vector<std::string> ingest_docs;
    bool expand_alternatives = false;
    ingest->add_option("docs", ingest_docs, "annotated documents (.rdf .xml .html)")->required();
    ingest->add_flag("--expand-alternatives", expand_alternatives,
                     "take every member of an Alt, not just the default");

    auto* version = app.add_subcommand("version", "show or advance the ontology version");
    version->require_subcommand(1);
    auto* show = version->add_subcommand("show", "print the current version");
    auto* bump = version->add_subcommand("bump", "record a new ontology version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (strict && lenient) {
        std::cerr << "kbctl: --strict and --lenient are mutually exclusive\n";
        return kExitUsage;
    }
    kb::Mode mode = lenient ? kb::Mode::Lenient : kb::Mode::Strict;

    if (check->parsed()) return cmd_check(check_files, mode);
    if (query->parsed()) {
        if (query_text.empty() == query_file.empty()) {
            std::cerr << "kbctl: query needs exactly one of -q <text> or -f <file>\n";
            return kExitUsage;
        }
        return cmd_query(workspace, query_text, query_file, explain_row, tsv, mode);
    }
    if (ingest->parsed()) return cmd_ingest(workspace, ingest_docs, expand_alternatives, mode);
    if (version->parsed())
        return cmd_version(workspace, bump->parsed() || !show->parsed(), mode);
    return kExitUsage;
}
