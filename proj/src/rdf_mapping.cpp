#include "kb/rdf_mapping.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace kb::rdf {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    return std::all_of(s.begin() + 1, s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

// '//' starts a comment only at line start or after whitespace, so URL keys
// survive.
std::string strip_comment(const std::string& line) {
    size_t i = 0;
    while ((i = line.find("//", i)) != std::string::npos) {
        if (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))
            return line.substr(0, i);
        i += 2;
    }
    return line;
}

std::string node_id(const RdfNode& n) {
    return (n.kind == RdfNode::Kind::Anon ? "_:" : "") + n.value;
}

}  // namespace

const MappingRule* MappingConfig::find(const RdfName& predicate) const {
    std::vector<std::string> candidates;
    if (!predicate.ns.empty() && predicate.ns != predicate.prefix) {
        // Version tags on the namespace are not part of the key.
        std::string ns = split_version_tag(predicate.ns).base;
        if (ns.back() == '#' || ns.back() == '/')
            candidates.push_back(ns + predicate.local);
        std::string hash_joined = ns;
        if (hash_joined.back() != '#') hash_joined += "#";
        hash_joined += predicate.local;
        if (candidates.empty() || candidates.back() != hash_joined)
            candidates.push_back(std::move(hash_joined));
    }
    if (!predicate.prefix.empty()) candidates.push_back(predicate.prefix + ":" + predicate.local);
    candidates.push_back(predicate.local);
    for (const auto& cand : candidates)
        for (const auto& rule : rules)
            if (rule.key == cand) return &rule;
    return nullptr;
}

MappingConfig parse_mapping(const std::string& text, const std::string& file,
                            Diagnostics& diags) {
    MappingConfig config;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        SourceRef at{file, {line_no, 1}};
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        size_t arrow = line.find("->");
        if (arrow == std::string::npos) {
            diags.error("map.syntax", "expected '<key> -> <Attribute> @ <Class>'", at);
            continue;
        }
        std::string key = trim(line.substr(0, arrow));
        std::string rest = line.substr(arrow + 2);
        size_t sep = rest.find('@');
        if (sep == std::string::npos) {
            diags.error("map.syntax", "expected '@ <Class>' after the attribute name", at);
            continue;
        }
        std::string attribute = trim(rest.substr(0, sep));
        std::string domain = trim(rest.substr(sep + 1));
        if (key.empty()) {
            diags.error("map.syntax", "empty property key", at);
            continue;
        }
        if (!is_identifier(attribute)) {
            diags.error("map.syntax", "'" + attribute + "' is not a valid attribute name", at);
            continue;
        }
        if (!is_identifier(domain)) {
            diags.error("map.syntax", "'" + domain + "' is not a valid class name", at);
            continue;
        }
        bool duplicate = false;
        for (const auto& rule : config.rules) {
            if (rule.key == key) {
                diags.warning("map.duplicate",
                              "key '" + key + "' already mapped; keeping the first entry", at);
                duplicate = true;
                break;
            }
        }
        if (!duplicate) config.rules.push_back({key, attribute, domain, at});
    }
    return config;
}

VersionTag split_version_tag(const std::string& value) {
    size_t p = value.rfind("#v");
    if (p == std::string::npos || p + 2 >= value.size()) return {value, 0, false};
    std::string digits = value.substr(p + 2);
    if (!std::all_of(digits.begin(), digits.end(),
                     [](unsigned char c) { return std::isdigit(c); }))
        return {value, 0, false};
    return {value.substr(0, p), std::stoi(digits), true};
}

namespace {

struct ContainerInfo {
    std::string type;
    std::map<int, const RdfNode*> members;
};

class Mapper {
public:
    Mapper(const MappingConfig& config, int kb_version, std::string file, Mode mode,
           Diagnostics& diags, bool expand_alternatives)
        : config_(config),
          kb_version_(kb_version),
          file_(std::move(file)),
          mode_(mode),
          diags_(diags),
          expand_alternatives_(expand_alternatives) {}

    MappingResult run(const RdfGraph& graph) {
        collect_containers(graph);
        for (const auto& st : graph.statements) map_statement(st);
        return std::move(result_);
    }

private:
    const MappingConfig& config_;
    int kb_version_;
    std::string file_;
    Mode mode_;
    Diagnostics& diags_;
    bool expand_alternatives_;
    MappingResult result_;
    std::map<std::string, ContainerInfo> containers_;
    std::set<Fact> emitted_;
    std::set<std::string> reported_ns_;

    void warn(const std::string& code, const std::string& msg, SourcePos pos) {
        diags_.add({Severity::Warning, code, msg, {file_, pos}});
    }
    void error(const std::string& code, const std::string& msg, SourcePos pos) {
        diags_.add({Severity::Error, code, msg, {file_, pos}});
    }

    void collect_containers(const RdfGraph& graph) {
        for (const auto& st : graph.statements) {
            if (st.predicate.local == "type" && st.object.kind == RdfNode::Kind::Resource &&
                (st.object.value == "Bag" || st.object.value == "Seq" ||
                 st.object.value == "Alt"))
                containers_[node_id(st.subject)].type = st.object.value;
        }
        for (const auto& st : graph.statements) {
            auto it = containers_.find(node_id(st.subject));
            if (it == containers_.end()) continue;
            const std::string& local = st.predicate.local;
            if (local.size() > 1 && local.front() == '_' &&
                std::all_of(local.begin() + 1, local.end(),
                            [](unsigned char c) { return std::isdigit(c); }))
                it->second.members[std::stoi(local.substr(1))] = &st.object;
        }
    }

    void push_fact(Fact f) {
        if (emitted_.insert(f).second) result_.facts.push_back(std::move(f));
    }

    // Applies the version policy to the namespace a property came from.
    // Returns false when the statement must be rejected. Each tagged
    // namespace is reported once per document.
    bool accept_namespace(const std::string& ns, SourcePos pos) {
        VersionTag tag = split_version_tag(ns);
        if (!tag.tagged) return true;
        bool fresh = reported_ns_.insert(ns).second;
        if (tag.version > kb_version_) {
            if (fresh)
                error("ver.newer",
                      "namespace '" + ns + "' targets ontology version " +
                          std::to_string(tag.version) + " but the knowledge base is at version " +
                          std::to_string(kb_version_) + "; statements rejected",
                      pos);
            return false;
        }
        if (tag.version < kb_version_ && fresh)
            warn("ver.older",
                 "namespace '" + ns + "' targets ontology version " +
                     std::to_string(tag.version) + " but the knowledge base is at version " +
                     std::to_string(kb_version_) + "; proceeding",
                 pos);
        return true;
    }

    std::optional<Value> value_from(const RdfNode& node, SourcePos pos) {
        switch (node.kind) {
            case RdfNode::Kind::Literal:
                return literal_value(node.value);
            case RdfNode::Kind::Anon:
                warn("rdf.unmapped", "anonymous value ignored", pos);
                return std::nullopt;
            default:
                return object_value(node.value);
        }
    }

    void report_unmapped(const RdfStatement& st) {
        std::string shown = st.predicate.prefix.empty()
                                ? st.predicate.local
                                : st.predicate.prefix + ":" + st.predicate.local;
        std::string msg = "no mapping for property '" + shown + "'; statement ignored";
        if (mode_ == Mode::Strict)
            error("rdf.unmapped", msg, st.pos);
        else
            warn("rdf.unmapped", msg, st.pos);
        ++result_.skipped;
    }

    void map_statement(const RdfStatement& st) {
        if (containers_.count(node_id(st.subject))) return;  // container internals
        if (!accept_namespace(st.predicate.ns, st.pos)) {
            ++result_.skipped;
            return;
        }
        if (st.subject.kind == RdfNode::Kind::Anon) {
            warn("rdf.unmapped", "statement about an anonymous node ignored", st.pos);
            ++result_.skipped;
            return;
        }
        const std::string& subject = st.subject.value;
        if (st.predicate.local == "type" && st.object.kind == RdfNode::Kind::Resource) {
            push_fact(Fact::membership(subject, st.object.value));
            ++result_.mapped;
            return;
        }
        const MappingRule* rule = config_.find(st.predicate);
        if (!rule) {
            report_unmapped(st);
            return;
        }
        push_fact(Fact::membership(subject, rule->domain_class));

        std::vector<Value> values;
        auto cont = st.object.kind != RdfNode::Kind::Literal
                        ? containers_.find(node_id(st.object))
                        : containers_.end();
        if (cont != containers_.end()) {
            const ContainerInfo& info = cont->second;
            bool first_only = info.type == "Alt" && !expand_alternatives_;
            if (first_only && info.members.size() > 1)
                warn("rdf.alt", "alternative list: using the first member as the default",
                     st.pos);
            for (const auto& [idx, member] : info.members) {
                if (auto v = value_from(*member, st.pos)) values.push_back(std::move(*v));
                if (first_only) break;
            }
        } else if (auto v = value_from(st.object, st.pos)) {
            values.push_back(std::move(*v));
        }
        if (values.empty()) {
            ++result_.skipped;
            return;
        }
        for (auto& v : values)
            push_fact(Fact::attribute(subject, rule->attribute, std::move(v)));
        ++result_.mapped;
    }
};

}  // namespace

MappingResult map_statements(const RdfGraph& graph, const MappingConfig& config,
                             int kb_version, const std::string& file, Mode mode,
                             Diagnostics& diags, bool expand_alternatives) {
    Mapper mapper(config, kb_version, file, mode, diags, expand_alternatives);
    return mapper.run(graph);
}

}  // namespace kb::rdf
