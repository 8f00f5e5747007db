#include "kb/rdf_extract.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>

namespace kb::rdf {

namespace {

using kb::xml::XmlAttr;
using kb::xml::XmlElement;
using kb::xml::XmlName;

std::string trim_collapse(const std::string& text) {
    std::string out;
    bool in_ws = true;  // swallow leading whitespace
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            in_ws = true;
        } else {
            if (in_ws && !out.empty()) out.push_back(' ');
            in_ws = false;
            out.push_back(c);
        }
    }
    return out;
}

std::string strip_local_ref(const std::string& value) {
    if (!value.empty() && value.front() == '#') return value.substr(1);
    return value;
}

// Container spellings seen in early serializations.
std::optional<std::string> container_type(const std::string& local) {
    if (local == "Bag") return "Bag";
    if (local == "Seq" || local == "Sequence") return "Seq";
    if (local == "Alt" || local == "Alternative") return "Alt";
    return std::nullopt;
}

bool is_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isdigit(c);
    });
}

class Extractor {
public:
    Extractor(std::string file, Mode mode, Diagnostics& diags)
        : file_(std::move(file)), mode_(mode), diags_(diags) {}

    RdfGraph run(const XmlElement& root) {
        push_bindings(root);
        std::optional<RdfNode> last_desc;
        for (const XmlElement* child : root.child_elements()) process_toplevel(*child, last_desc);
        pop_bindings();
        return std::move(graph_);
    }

private:
    std::string file_;
    Mode mode_;
    Diagnostics& diags_;
    RdfGraph graph_;
    std::vector<std::map<std::string, std::string>> ns_stack_;
    std::set<std::string> unbound_reported_;
    int anon_counter_ = 0;

    void report(const std::string& code, const std::string& msg, SourcePos p) {
        diags_.add({mode_ == Mode::Strict ? Severity::Error : Severity::Warning, code, msg,
                    {file_, p}});
    }
    void warn(const std::string& code, const std::string& msg, SourcePos p) {
        diags_.add({Severity::Warning, code, msg, {file_, p}});
    }

    void push_bindings(const XmlElement& e) {
        std::map<std::string, std::string> scope;
        for (const auto& a : e.attrs) {
            if (a.name.prefix == "xmlns") scope[a.name.local] = a.value;
            else if (a.name.prefix.empty() && a.name.local == "xmlns") scope[""] = a.value;
        }
        ns_stack_.push_back(std::move(scope));
    }
    void pop_bindings() { ns_stack_.pop_back(); }

    std::string resolve_ns(const std::string& prefix) const {
        for (auto it = ns_stack_.rbegin(); it != ns_stack_.rend(); ++it) {
            auto found = it->find(prefix);
            if (found != it->end()) return found->second;
        }
        return prefix;  // unbound: fall back to the raw prefix
    }

    // Resolution for names taken from the document; unbound prefixes are
    // reported once each.
    RdfName qualified(const XmlName& n, SourcePos pos) {
        std::string ns = resolve_ns(n.prefix);
        if (!n.prefix.empty() && ns == n.prefix && unbound_reported_.insert(n.prefix).second)
            report("rdf.ns",
                   "namespace prefix '" + n.prefix + "' is not declared; using it verbatim", pos);
        return {std::move(ns), n.prefix, n.local};
    }
    RdfName builtin(const std::string& local) const { return {resolve_ns("rdf"), "rdf", local}; }

    RdfNode fresh_anon() { return anon_node("anon" + std::to_string(++anon_counter_)); }

    void emit(RdfNode subj, RdfName pred, RdfNode obj, SourcePos pos) {
        graph_.statements.push_back({std::move(subj), std::move(pred), std::move(obj), pos});
    }

    // Attributes that describe the node itself rather than a property of it.
    static bool is_structural_attr(const XmlAttr& a) {
        if (a.name.prefix == "xmlns" || (a.name.prefix.empty() && a.name.local == "xmlns"))
            return true;
        const std::string& l = a.name.local;
        return l == "about" || l == "aboutEach" || l == "ID" || l == "id" || l == "bagID" ||
               l == "resource" || l == "ressource";
    }

    const XmlAttr* find_attr_local(const XmlElement& e, const std::string& local) const {
        for (const auto& a : e.attrs)
            if (a.name.local == local) return &a;
        return nullptr;
    }

    RdfNode subject_of(const XmlElement& e) {
        if (const XmlAttr* about = find_attr_local(e, "about"))
            return resource_node(strip_local_ref(about->value));
        if (const XmlAttr* id = find_attr_local(e, "ID")) return resource_node(id->value);
        if (const XmlAttr* id = find_attr_local(e, "id")) return resource_node(id->value);
        return fresh_anon();
    }

    void process_toplevel(const XmlElement& e, std::optional<RdfNode>& last_desc) {
        const std::string& local = e.name.local;
        if (local == "Description") {
            push_bindings(e);
            RdfNode subj = subject_of(e);
            last_desc = subj;
            process_description(subj, e);
            pop_bindings();
            return;
        }
        if (container_type(local)) {
            process_container(e, std::nullopt);
            return;
        }
        if (local == "li") {
            report("rdf.syntax", "'li' outside a container element; ignored", e.pos);
            return;
        }
        if (find_attr_local(e, "about")) {
            // Typed-node form: the element name is the type.
            push_bindings(e);
            RdfNode subj = subject_of(e);
            emit(subj, builtin("type"), resource_node(local), e.pos);
            last_desc = subj;
            process_description(subj, e);
            pop_bindings();
            return;
        }
        // A property element with no enclosing description.
        if (mode_ == Mode::Lenient && last_desc) {
            warn("rdf.orphan",
                 "property '" + e.name.qualified() +
                     "' outside any description; attached to '" + last_desc->value + "'",
                 e.pos);
            process_property(*last_desc, e);
            return;
        }
        report("rdf.orphan",
               "property '" + e.name.qualified() + "' outside any description; ignored", e.pos);
    }

    void process_description(const RdfNode& subj, const XmlElement& e) {
        // Abbreviated form: remaining attributes are literal-valued properties.
        for (const auto& a : e.attrs) {
            if (is_structural_attr(a) || a.name.local.empty()) continue;
            emit(subj, qualified(a.name, a.pos), literal_node(a.value), a.pos);
        }
        // A description that was accidentally self-closed leaves its intended
        // siblings nested here: in lenient mode a child description shifts
        // the attachment target for the properties that follow it.
        RdfNode target = subj;
        for (const XmlElement* child : e.child_elements()) {
            if (child->name.local == "Description") {
                report("rdf.orphan",
                       "description nested directly inside a description", child->pos);
                push_bindings(*child);
                RdfNode nested = subject_of(*child);
                process_description(nested, *child);
                pop_bindings();
                if (mode_ == Mode::Lenient) target = nested;
                continue;
            }
            if (!(target == subj))
                warn("rdf.orphan",
                     "property '" + child->name.qualified() +
                         "' outside any description; attached to '" + target.value + "'",
                     child->pos);
            process_property(target, *child);
        }
    }

    // Object reference attribute, accepting the historical misspelling.
    const XmlAttr* resource_attr(const XmlElement& e) {
        if (const XmlAttr* a = find_attr_local(e, "resource")) return a;
        if (const XmlAttr* a = find_attr_local(e, "ressource")) {
            warn("rdf.spelling", "attribute 'ressource' treated as 'resource'", a->pos);
            return a;
        }
        return nullptr;
    }

    void process_property(const RdfNode& subj, const XmlElement& p) {
        push_bindings(p);
        RdfName pred = qualified(p.name, p.pos);
        auto elems = p.child_elements();

        if (const XmlAttr* res = resource_attr(p)) {
            emit(subj, pred, resource_node(strip_local_ref(res->value)), p.pos);
            if (!elems.empty())
                warn("rdf.syntax",
                     "property '" + p.name.qualified() +
                         "' has both a resource reference and element content; content ignored",
                     p.pos);
            pop_bindings();
            return;
        }
        // <rdf:Name="value"/> parses as an attribute with an empty name.
        for (const auto& a : p.attrs) {
            if (a.name.prefix.empty() && a.name.local.empty()) {
                emit(subj, pred, literal_node(a.value), p.pos);
                pop_bindings();
                return;
            }
        }
        if (elems.empty()) {
            emit(subj, pred, literal_node(trim_collapse(p.text_content())), p.pos);
            pop_bindings();
            return;
        }
        const XmlElement& value = *elems.front();
        if (elems.size() > 1)
            warn("rdf.syntax",
                 "property '" + p.name.qualified() +
                     "' has multiple element values; extra elements ignored",
                 p.pos);
        if (container_type(value.name.local)) {
            RdfNode cont = process_container(value, std::nullopt);
            emit(subj, pred, cont, p.pos);
            pop_bindings();
            return;
        }
        if (value.name.local == "Description" || find_attr_local(value, "about")) {
            push_bindings(value);
            RdfNode nested = subject_of(value);
            if (value.name.local != "Description")
                emit(nested, builtin("type"), resource_node(value.name.local), value.pos);
            emit(subj, pred, nested, p.pos);
            process_description(nested, value);
            pop_bindings();
            pop_bindings();
            return;
        }
        if (value.name.local == "li") {
            report("rdf.syntax", "'li' outside a container element; ignored", value.pos);
            pop_bindings();
            return;
        }
        warn("rdf.syntax",
             "cannot interpret content of property '" + p.name.qualified() + "'; ignored",
             value.pos);
        pop_bindings();
    }

    RdfNode process_container(const XmlElement& e, std::optional<RdfNode> forced_subject) {
        push_bindings(e);
        RdfNode subj = forced_subject ? *forced_subject : subject_of(e);
        std::string type = *container_type(e.name.local);
        emit(subj, builtin("type"), resource_node(type), e.pos);
        int index = 0;
        for (const XmlElement* item : e.child_elements()) {
            const std::string& local = item->name.local;
            if (local == "li") {
                ++index;
            } else if (!local.empty() && local.front() == '_' && is_digits(local.substr(1))) {
                index = std::stoi(local.substr(1));
            } else {
                warn("rdf.syntax",
                     "unexpected element '" + item->name.qualified() + "' in " + type +
                         "; ignored",
                     item->pos);
                continue;
            }
            emit(subj, builtin("_" + std::to_string(index)), member_value(*item), item->pos);
        }
        pop_bindings();
        return subj;
    }

    RdfNode member_value(const XmlElement& li) {
        push_bindings(li);
        RdfNode out;
        if (const XmlAttr* res = resource_attr(li)) {
            out = resource_node(strip_local_ref(res->value));
        } else {
            auto elems = li.child_elements();
            if (elems.empty()) {
                out = literal_node(trim_collapse(li.text_content()));
            } else {
                const XmlElement& value = *elems.front();
                push_bindings(value);
                out = subject_of(value);
                if (value.name.local != "Description")
                    emit(out, builtin("type"), resource_node(value.name.local), value.pos);
                process_description(out, value);
                pop_bindings();
            }
        }
        pop_bindings();
        return out;
    }
};

}  // namespace

RdfGraph extract_rdf(const kb::xml::XmlElement& rdf_root, const std::string& file, Mode mode,
                     Diagnostics& diags) {
    Extractor extractor(file, mode, diags);
    return extractor.run(rdf_root);
}

RdfGraph extract_document(const kb::xml::XmlDocument& doc, const std::string& file, Mode mode,
                          Diagnostics& diags) {
    return extract_rdf(doc.root, file, mode, diags);
}

std::string render_node(const RdfNode& node) {
    switch (node.kind) {
        case RdfNode::Kind::Literal: return "\"" + node.value + "\"";
        case RdfNode::Kind::Anon: return "_:" + node.value;
        default: return node.value;
    }
}

std::string render_statement(const RdfStatement& st) {
    std::string pred = st.predicate.prefix.empty()
                           ? st.predicate.local
                           : st.predicate.prefix + ":" + st.predicate.local;
    return render_node(st.subject) + " " + pred + " " + render_node(st.object);
}

std::string render_graph(const RdfGraph& graph) {
    std::string out;
    for (const auto& st : graph.statements) {
        out += render_statement(st);
        out.push_back('\n');
    }
    return out;
}

namespace {

struct ContainerDesc {
    std::string type;
    std::map<int, std::string> members;  // index → member key
    bool referenced = false;
};

std::string node_key(const RdfNode& n) {
    switch (n.kind) {
        case RdfNode::Kind::Literal: return "L:" + n.value;
        case RdfNode::Kind::Anon: return "A:?";
        default: return "R:" + n.value;
    }
}

std::string subject_id(const RdfNode& n) {
    return (n.kind == RdfNode::Kind::Anon ? "_:" : "") + n.value;
}

std::string canonical_container(const ContainerDesc& c, bool named, const std::string& name) {
    std::vector<std::string> keys;
    for (const auto& [idx, key] : c.members) keys.push_back(key);
    if (c.type == "Bag") {
        std::sort(keys.begin(), keys.end());
    } else if (c.type == "Alt" && keys.size() > 1) {
        std::sort(keys.begin() + 1, keys.end());
    }
    std::string out = "C:" + c.type + ":" + (named ? name : "?");
    for (const auto& k : keys) out += "|" + k;
    return out;
}

// Multiset of comparison keys for one graph.
std::multiset<std::string> graph_keys(const RdfGraph& g) {
    std::map<std::string, ContainerDesc> containers;
    std::map<std::string, bool> named;
    for (const auto& st : g.statements) {
        if (st.predicate.local == "type" && st.object.kind == RdfNode::Kind::Resource &&
            (st.object.value == "Bag" || st.object.value == "Seq" || st.object.value == "Alt")) {
            std::string id = subject_id(st.subject);
            containers[id].type = st.object.value;
            named[id] = st.subject.kind != RdfNode::Kind::Anon;
        }
    }
    for (const auto& st : g.statements) {
        std::string id = subject_id(st.subject);
        auto it = containers.find(id);
        if (it == containers.end()) continue;
        const std::string& local = st.predicate.local;
        if (local.size() > 1 && local.front() == '_' && is_digits(local.substr(1)))
            it->second.members[std::stoi(local.substr(1))] = node_key(st.object);
    }
    std::multiset<std::string> keys;
    for (const auto& st : g.statements) {
        std::string sid = subject_id(st.subject);
        if (containers.count(sid)) continue;  // folded into the descriptor
        std::string object;
        std::string oid = subject_id(st.object);
        auto it = st.object.kind != RdfNode::Kind::Literal ? containers.find(oid)
                                                           : containers.end();
        if (it != containers.end()) {
            it->second.referenced = true;
            object = canonical_container(it->second, named[oid], st.object.value);
        } else {
            object = node_key(st.object);
        }
        std::string subject =
            st.subject.kind == RdfNode::Kind::Anon ? "A:?" : "R:" + st.subject.value;
        keys.insert(subject + " " + st.predicate.local + " " + object);
    }
    for (const auto& [id, desc] : containers) {
        if (!desc.referenced)
            keys.insert("container " + canonical_container(desc, named[id], id));
    }
    return keys;
}

}  // namespace

bool equivalent_statement_sets(const RdfGraph& a, const RdfGraph& b) {
    return graph_keys(a) == graph_keys(b);
}

}  // namespace kb::rdf
