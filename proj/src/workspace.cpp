#include "kb/workspace.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kb/flogic_loader.hpp"
#include "kb/flogic_parser.hpp"

namespace kb {

namespace fs = std::filesystem;

std::optional<std::string> read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return buf.str();
}

bool write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << content;
    return static_cast<bool>(out);
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string quote_field(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            default: out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

// Reads tokens of a snapshot line: bare words and quoted fields.
class LineReader {
public:
    explicit LineReader(const std::string& line) : line_(line) {}

    bool word(std::string& out) {
        skip_ws();
        if (i_ >= line_.size() || line_[i_] == '"') return false;
        size_t start = i_;
        while (i_ < line_.size() && line_[i_] != ' ' && line_[i_] != '\t') ++i_;
        out = line_.substr(start, i_ - start);
        return true;
    }

    bool quoted(std::string& out) {
        skip_ws();
        if (i_ >= line_.size() || line_[i_] != '"') return false;
        ++i_;
        out.clear();
        while (i_ < line_.size() && line_[i_] != '"') {
            if (line_[i_] == '\\' && i_ + 1 < line_.size()) {
                char c = line_[i_ + 1];
                out.push_back(c == 'n' ? '\n' : c);
                i_ += 2;
            } else {
                out.push_back(line_[i_]);
                ++i_;
            }
        }
        if (i_ >= line_.size()) return false;  // unterminated
        ++i_;
        return true;
    }

    bool done() {
        skip_ws();
        return i_ >= line_.size();
    }

private:
    const std::string& line_;
    size_t i_ = 0;

    void skip_ws() {
        while (i_ < line_.size() && (line_[i_] == ' ' || line_[i_] == '\t')) ++i_;
    }
};

}  // namespace

Manifest parse_manifest(const std::string& text, const std::string& file, Diagnostics& diags) {
    Manifest m;
    m.ontology.clear();
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    bool saw_snapshot = false;
    while (std::getline(in, raw)) {
        ++line_no;
        SourceRef at{file, {line_no, 1}};
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        size_t sp = line.find_first_of(" \t");
        std::string key = sp == std::string::npos ? line : line.substr(0, sp);
        std::string value = sp == std::string::npos ? "" : trim(line.substr(sp + 1));
        if (key == "version") {
            try {
                m.version = std::stoi(value);
            } catch (...) {
                diags.error("ws.manifest", "version must be a number, got '" + value + "'", at);
            }
            if (m.version < 1) {
                diags.error("ws.manifest", "version must be at least 1", at);
                m.version = 1;
            }
        } else if (key == "checksum") {
            m.checksum = value;
        } else if (key == "ontology") {
            if (value.empty())
                diags.error("ws.manifest", "ontology entry without a file name", at);
            else
                m.ontology.push_back(value);
        } else if (key == "mapping") {
            m.mapping = value;
        } else if (key == "snapshot") {
            if (value.empty()) {
                diags.error("ws.manifest", "snapshot entry without a file name", at);
            } else {
                m.snapshot = value;
                saw_snapshot = true;
            }
        } else if (key == "document") {
            if (!value.empty()) m.record_document(value);
        } else if (key == "bump") {
            if (!value.empty()) m.bumps.push_back(value);
        } else {
            diags.warning("ws.manifest", "unknown key '" + key + "' ignored", at);
        }
    }
    if (!saw_snapshot && m.snapshot.empty()) m.snapshot = "facts.snap";
    return m;
}

void Manifest::record_document(const std::string& path) {
    if (std::find(documents.begin(), documents.end(), path) == documents.end())
        documents.push_back(path);
}

std::string render_manifest(const Manifest& m) {
    std::string out;
    out += "version " + std::to_string(m.version) + "\n";
    if (!m.checksum.empty()) out += "checksum " + m.checksum + "\n";
    for (const auto& f : m.ontology) out += "ontology " + f + "\n";
    if (!m.mapping.empty()) out += "mapping " + m.mapping + "\n";
    out += "snapshot " + m.snapshot + "\n";
    for (const auto& d : m.documents) out += "document " + d + "\n";
    for (const auto& b : m.bumps) out += "bump " + b + "\n";
    return out;
}

std::string fingerprint_files(const std::vector<std::string>& names,
                              const std::vector<std::string>& contents) {
    uint64_t hash = 14695981039346656037ULL;
    auto mix = [&hash](const std::string& s) {
        for (unsigned char c : s) {
            hash ^= c;
            hash *= 1099511628211ULL;
        }
        hash ^= 0;
        hash *= 1099511628211ULL;
    };
    for (size_t i = 0; i < names.size(); ++i) {
        mix(names[i]);
        if (i < contents.size()) mix(contents[i]);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::vector<Fact> parse_snapshot(const std::string& text, const std::string& file,
                                 Diagnostics& diags) {
    std::vector<Fact> facts;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        SourceRef at{file, {line_no, 1}};
        if (trim(line).empty()) continue;
        LineReader reader(line);
        std::string kind;
        if (!reader.word(kind)) {
            diags.error("ws.snapshot", "malformed snapshot line", at);
            continue;
        }
        if (kind == "member") {
            std::string object, cls;
            if (!reader.quoted(object) || !reader.word(cls) || !reader.done()) {
                diags.error("ws.snapshot", "expected: member \"<object>\" <Class>", at);
                continue;
            }
            facts.push_back(Fact::membership(object, cls));
        } else if (kind == "attr") {
            std::string object, attr, vkind, value;
            if (!reader.quoted(object) || !reader.word(attr) || !reader.word(vkind) ||
                !reader.quoted(value) || !reader.done()) {
                diags.error("ws.snapshot",
                            "expected: attr \"<object>\" <Attr> str|obj \"<value>\"", at);
                continue;
            }
            if (vkind == "str") {
                facts.push_back(Fact::attribute(object, attr, literal_value(value)));
            } else if (vkind == "obj") {
                facts.push_back(Fact::attribute(object, attr, object_value(value)));
            } else {
                diags.error("ws.snapshot", "value kind must be 'str' or 'obj', got '" + vkind +
                                               "'",
                            at);
            }
        } else {
            diags.error("ws.snapshot", "unknown snapshot entry '" + kind + "'", at);
        }
    }
    return facts;
}

std::string render_snapshot(const std::vector<Fact>& facts) {
    std::vector<Fact> sorted = facts;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::string out;
    for (const auto& f : sorted) {
        if (f.kind == Fact::Kind::Membership) {
            out += "member " + quote_field(f.object) + " " + f.name + "\n";
        } else {
            out += "attr " + quote_field(f.object) + " " + f.name + " " +
                   (f.value.kind == ValueKind::Literal ? "str" : "obj") + " " +
                   quote_field(f.value.text) + "\n";
        }
    }
    return out;
}

std::string Workspace::resolve(const std::string& relative) const {
    if (relative.empty()) return dir_;
    if (relative.front() == '/') return relative;
    return dir_ + "/" + relative;
}

bool Workspace::open_manifest(const std::string& dir, Diagnostics& diags) {
    dir_ = dir;
    while (dir_.size() > 1 && dir_.back() == '/') dir_.pop_back();
    if (!fs::is_directory(dir_)) {
        diags.error("ws.io", "workspace directory '" + dir_ + "' does not exist", {});
        return false;
    }
    if (auto text = read_text_file(resolve("kb.manifest"))) {
        manifest_ = parse_manifest(*text, "kb.manifest", diags);
    } else {
        manifest_ = Manifest{};
        std::vector<std::string> flo;
        for (const auto& entry : fs::directory_iterator(dir_)) {
            if (entry.is_regular_file() && entry.path().extension() == ".flo")
                flo.push_back(entry.path().filename().string());
        }
        std::sort(flo.begin(), flo.end());
        manifest_.ontology = std::move(flo);
        if (fs::is_regular_file(resolve("mapping.map"))) manifest_.mapping = "mapping.map";
    }
    return true;
}

bool Workspace::open(const std::string& dir, Mode mode, Diagnostics& diags) {
    if (!open_manifest(dir, diags)) return false;

    flogic::Program combined;
    for (const auto& name : manifest_.ontology) {
        auto text = read_text_file(resolve(name));
        if (!text) {
            diags.error("ws.io", "cannot read ontology file '" + name + "'", {});
            return false;
        }
        flogic::Program prog = flogic::parse_program(*text, name, diags);
        auto append = [](auto& dst, auto& src) {
            for (auto& item : src) dst.push_back(std::move(item));
        };
        append(combined.class_decls, prog.class_decls);
        append(combined.signatures, prog.signatures);
        append(combined.facts, prog.facts);
        append(combined.rules, prog.rules);
        append(combined.queries, prog.queries);
    }
    if (!flogic::load_program(combined, kb_, mode, diags)) return false;
    program_ = std::move(combined);

    if (!manifest_.mapping.empty()) {
        if (auto text = read_text_file(resolve(manifest_.mapping))) {
            mapping_ = rdf::parse_mapping(*text, manifest_.mapping, diags);
        } else {
            diags.warning("ws.io", "mapping file '" + manifest_.mapping + "' is missing", {});
        }
    }

    if (auto text = read_text_file(resolve(manifest_.snapshot))) {
        stored_ = parse_snapshot(*text, manifest_.snapshot, diags);
        kb_.assert_facts(stored_, mode, diags);
    }
    return true;
}

std::string Workspace::current_fingerprint(Diagnostics& diags) const {
    std::vector<std::string> names;
    std::vector<std::string> contents;
    for (const auto& name : manifest_.ontology) {
        names.push_back(name);
        if (auto text = read_text_file(resolve(name))) {
            contents.push_back(std::move(*text));
        } else {
            diags.error("ws.io", "cannot read ontology file '" + name + "'", {});
            contents.push_back("");
        }
    }
    return fingerprint_files(names, contents);
}

bool Workspace::ontology_stale(Diagnostics& diags) const {
    if (manifest_.checksum.empty()) return false;  // never recorded
    return current_fingerprint(diags) != manifest_.checksum;
}

bool Workspace::save_manifest(Diagnostics& diags) const {
    if (!write_text_file(resolve("kb.manifest"), render_manifest(manifest_))) {
        diags.error("ws.io", "cannot write kb.manifest", {});
        return false;
    }
    return true;
}

bool Workspace::save_snapshot(Diagnostics& diags) const {
    if (!write_text_file(resolve(manifest_.snapshot), render_snapshot(stored_))) {
        diags.error("ws.io", "cannot write snapshot '" + manifest_.snapshot + "'", {});
        return false;
    }
    return true;
}

}  // namespace kb
