#include "kb/xml_dtd.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <sstream>

namespace kb::xml {

namespace {

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':' ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) {
    return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-';
}

// Position automaton over the Name leaves of a children-type content model.
struct Glushkov {
    std::vector<std::string> sym;
    std::vector<std::set<size_t>> follow;
    std::set<size_t> first;
    std::set<size_t> last;
    bool nullable = false;
};

struct FirstLast {
    std::set<size_t> first;
    std::set<size_t> last;
    bool nullable = false;
};

FirstLast build_positions(const ContentModel& m, Glushkov& g) {
    switch (m.kind) {
        case ContentModel::Kind::Name: {
            size_t p = g.sym.size();
            g.sym.push_back(m.name);
            g.follow.emplace_back();
            return {{p}, {p}, false};
        }
        case ContentModel::Kind::Seq: {
            FirstLast acc{{}, {}, true};
            for (const auto& part : m.parts) {
                FirstLast f = build_positions(part, g);
                for (size_t q : acc.last) g.follow[q].insert(f.first.begin(), f.first.end());
                if (acc.nullable) acc.first.insert(f.first.begin(), f.first.end());
                if (f.nullable) acc.last.insert(f.last.begin(), f.last.end());
                else acc.last = f.last;
                acc.nullable = acc.nullable && f.nullable;
            }
            return acc;
        }
        case ContentModel::Kind::Choice: {
            FirstLast acc{{}, {}, false};
            for (const auto& part : m.parts) {
                FirstLast f = build_positions(part, g);
                acc.first.insert(f.first.begin(), f.first.end());
                acc.last.insert(f.last.begin(), f.last.end());
                acc.nullable = acc.nullable || f.nullable;
            }
            return acc;
        }
        case ContentModel::Kind::Opt: {
            FirstLast f = build_positions(m.parts.front(), g);
            f.nullable = true;
            return f;
        }
        case ContentModel::Kind::Star:
        case ContentModel::Kind::Plus: {
            FirstLast f = build_positions(m.parts.front(), g);
            for (size_t q : f.last) g.follow[q].insert(f.first.begin(), f.first.end());
            if (m.kind == ContentModel::Kind::Star) f.nullable = true;
            return f;
        }
        default:
            return {{}, {}, true};
    }
}

Glushkov build_automaton(const ContentModel& m) {
    Glushkov g;
    FirstLast f = build_positions(m, g);
    g.first = std::move(f.first);
    g.last = std::move(f.last);
    g.nullable = f.nullable;
    return g;
}

// A model is deterministic iff no two distinct positions with the same
// element name compete in the first set or in any follow set.
std::optional<std::string> find_ambiguity(const Glushkov& g) {
    auto dup = [&](const std::set<size_t>& positions) -> std::optional<std::string> {
        std::set<std::string> seen;
        for (size_t p : positions)
            if (!seen.insert(g.sym[p]).second) return g.sym[p];
        return std::nullopt;
    };
    if (auto s = dup(g.first)) return s;
    for (const auto& f : g.follow)
        if (auto s = dup(f)) return s;
    return std::nullopt;
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

std::string render_expected(const Glushkov& g, const std::set<size_t>& positions,
                            bool at_start, bool accepting) {
    std::set<std::string> names;
    if (at_start) {
        for (size_t p : g.first) names.insert(g.sym[p]);
    } else {
        for (size_t p : positions)
            for (size_t q : g.follow[p]) names.insert(g.sym[q]);
    }
    std::vector<std::string> parts;
    for (const auto& n : names) parts.push_back(quote(n));
    if (accepting || (at_start && g.nullable)) parts.push_back("end of element");
    if (parts.empty()) return "end of element";
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += i + 1 == parts.size() ? " or " : ", ";
        out += parts[i];
    }
    return out;
}

bool run_automaton(const Glushkov& g, const std::vector<std::string>& names,
                   std::string* error) {
    std::set<size_t> cur;
    bool at_start = true;
    std::string prev;
    for (const auto& s : names) {
        std::set<size_t> next;
        if (at_start) {
            for (size_t p : g.first)
                if (g.sym[p] == s) next.insert(p);
        } else {
            for (size_t p : cur)
                for (size_t q : g.follow[p])
                    if (g.sym[q] == s) next.insert(q);
        }
        if (next.empty()) {
            if (error) {
                bool accepting = false;
                for (size_t p : cur)
                    if (g.last.count(p)) accepting = true;
                *error = "expected " + render_expected(g, cur, at_start, accepting) + " after " +
                         (at_start ? "start of element" : quote(prev)) + ", found " + quote(s);
            }
            return false;
        }
        cur = std::move(next);
        at_start = false;
        prev = s;
    }
    bool accepting = at_start ? g.nullable : false;
    for (size_t p : cur)
        if (g.last.count(p)) accepting = true;
    if (!accepting) {
        if (error)
            *error = "expected " + render_expected(g, cur, at_start, false) + " after " +
                     (at_start ? "start of element" : quote(prev)) + ", found end of element";
        return false;
    }
    return true;
}

class DtdParser {
public:
    DtdParser(const std::string& text, std::string file, Mode mode, Diagnostics& diags,
              int first_line)
        : text_(text), file_(std::move(file)), mode_(mode), diags_(diags), line_(first_line) {}

    Dtd parse();

private:
    const std::string& text_;
    std::string file_;
    Mode mode_;
    Diagnostics& diags_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Dtd dtd_;

    bool eof() const { return pos_ >= text_.size(); }
    char peek(size_t k = 0) const { return pos_ + k < text_.size() ? text_[pos_ + k] : '\0'; }
    bool starts_with(const char* s) const { return text_.compare(pos_, std::strlen(s), s) == 0; }
    void advance() {
        if (eof()) return;
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    void skip(size_t n) {
        while (n-- > 0) advance();
    }
    SourcePos here() const { return {line_, col_}; }
    void report(const std::string& code, const std::string& msg, SourcePos p) {
        diags_.add({mode_ == Mode::Strict ? Severity::Error : Severity::Warning, code, msg,
                    {file_, p}});
    }
    void warn(const std::string& code, const std::string& msg, SourcePos p) {
        diags_.add({Severity::Warning, code, msg, {file_, p}});
    }
    void skip_ws() {
        while (!eof() && is_ws(peek())) advance();
    }
    std::string read_name() {
        std::string out;
        if (!eof() && is_name_start(peek())) {
            out.push_back(peek());
            advance();
            while (!eof() && is_name_char(peek())) {
                out.push_back(peek());
                advance();
            }
        }
        return out;
    }
    std::string read_quoted() {
        char q = peek();
        if (q != '"' && q != '\'') return "";
        advance();
        std::string out;
        while (!eof() && peek() != q) {
            out.push_back(peek());
            advance();
        }
        if (!eof()) advance();
        return out;
    }
    void skip_to_gt() {
        while (!eof() && peek() != '>') advance();
        if (!eof()) advance();
    }

    void parse_element_decl();
    void parse_attlist_decl();
    ContentModel parse_model();
    ContentModel parse_cp();
    ContentModel parse_group_tail(SourcePos start);
    ContentModel apply_modifier(ContentModel inner);
};

ContentModel DtdParser::apply_modifier(ContentModel inner) {
    char c = peek();
    if (c != '?' && c != '*' && c != '+') return inner;
    advance();
    ContentModel wrapped;
    wrapped.kind = c == '?'   ? ContentModel::Kind::Opt
                   : c == '*' ? ContentModel::Kind::Star
                              : ContentModel::Kind::Plus;
    wrapped.parts.push_back(std::move(inner));
    return wrapped;
}

ContentModel DtdParser::parse_cp() {
    if (peek() == '(') {
        SourcePos start = here();
        advance();
        ContentModel group = parse_group_tail(start);
        return apply_modifier(std::move(group));
    }
    SourcePos start = here();
    ContentModel leaf;
    leaf.kind = ContentModel::Kind::Name;
    leaf.name = read_name();
    if (leaf.name.empty()) {
        report("dtd.syntax", "expected element name in content model", start);
        if (!eof()) advance();
    }
    return apply_modifier(std::move(leaf));
}

ContentModel DtdParser::parse_group_tail(SourcePos start) {
    std::vector<ContentModel> items;
    skip_ws();
    items.push_back(parse_cp());
    char sep = '\0';
    for (;;) {
        skip_ws();
        char c = peek();
        if (c == ',' || c == '|') {
            if (sep == '\0') {
                sep = c;
            } else if (c != sep) {
                report("dtd.syntax", "cannot mix ',' and '|' at the same level", here());
            }
            advance();
            skip_ws();
            items.push_back(parse_cp());
            continue;
        }
        break;
    }
    if (peek() == ')') advance();
    else report("dtd.syntax", "expected ')' in content model", start);
    if (items.size() == 1) return std::move(items.front());
    ContentModel group;
    group.kind = sep == '|' ? ContentModel::Kind::Choice : ContentModel::Kind::Seq;
    group.parts = std::move(items);
    return group;
}

ContentModel DtdParser::parse_model() {
    ContentModel model;
    if (starts_with("EMPTY")) {
        skip(5);
        model.kind = ContentModel::Kind::Empty;
        return model;
    }
    if (starts_with("ANY")) {
        skip(3);
        model.kind = ContentModel::Kind::Any;
        return model;
    }
    SourcePos start = here();
    if (peek() != '(') {
        report("dtd.syntax", "expected '(' to start content model", start);
        model.kind = ContentModel::Kind::Any;
        return model;
    }
    advance();
    skip_ws();
    if (starts_with("#PCDATA")) {
        skip(7);
        std::vector<ContentModel> names;
        for (;;) {
            skip_ws();
            if (peek() == '|') {
                advance();
                skip_ws();
                ContentModel leaf;
                leaf.kind = ContentModel::Kind::Name;
                leaf.name = read_name();
                if (leaf.name.empty()) {
                    report("dtd.syntax", "expected element name in mixed content model", here());
                    break;
                }
                names.push_back(std::move(leaf));
                continue;
            }
            break;
        }
        if (peek() == ')') advance();
        else report("dtd.syntax", "expected ')' in content model", start);
        bool starred = peek() == '*';
        if (starred) advance();
        if (names.empty()) {
            model.kind = ContentModel::Kind::PCData;
        } else {
            if (!starred)
                report("dtd.syntax", "mixed content model must end with ')*'", start);
            model.kind = ContentModel::Kind::Mixed;
            model.parts = std::move(names);
        }
        return model;
    }
    ContentModel group = parse_group_tail(start);
    return apply_modifier(std::move(group));
}

void DtdParser::parse_element_decl() {
    SourcePos start = here();
    skip(std::strlen("<!ELEMENT"));
    skip_ws();
    std::string name = read_name();
    if (name.empty()) {
        report("dtd.syntax", "expected element name after '<!ELEMENT'", here());
        skip_to_gt();
        return;
    }
    skip_ws();
    ElementDecl decl;
    decl.name = name;
    decl.pos = start;
    decl.model = parse_model();
    skip_ws();
    if (peek() == '>') advance();
    else {
        report("dtd.syntax", "expected '>' to end element declaration", here());
        skip_to_gt();
    }
    switch (decl.model.kind) {
        case ContentModel::Kind::Name:
        case ContentModel::Kind::Seq:
        case ContentModel::Kind::Choice:
        case ContentModel::Kind::Opt:
        case ContentModel::Kind::Star:
        case ContentModel::Kind::Plus: {
            Glushkov g = build_automaton(decl.model);
            if (auto sym = find_ambiguity(g))
                report("dtd.ambiguous",
                       "content model for '" + name + "' is ambiguous on '" + *sym +
                           "': two ways to match the next element",
                       start);
            break;
        }
        default:
            break;
    }
    auto [it, inserted] = dtd_.elements.emplace(name, std::move(decl));
    if (!inserted)
        report("dtd.duplicate", "element '" + name + "' declared more than once", start);
}

void DtdParser::parse_attlist_decl() {
    SourcePos start = here();
    skip(std::strlen("<!ATTLIST"));
    skip_ws();
    std::string elem = read_name();
    if (elem.empty()) {
        report("dtd.syntax", "expected element name after '<!ATTLIST'", here());
        skip_to_gt();
        return;
    }
    auto& defs = dtd_.attlists[elem];
    for (;;) {
        skip_ws();
        if (eof()) {
            report("dtd.syntax", "unterminated attribute-list declaration", start);
            return;
        }
        if (peek() == '>') {
            advance();
            return;
        }
        AttDef def;
        def.name = read_name();
        if (def.name.empty()) {
            report("dtd.syntax", "expected attribute name in '<!ATTLIST'", here());
            skip_to_gt();
            return;
        }
        skip_ws();
        if (peek() == '(') {
            // Enumeration: capture the raw parenthesised list.
            def.type.push_back('(');
            advance();
            while (!eof() && peek() != ')') {
                if (!is_ws(peek())) def.type.push_back(peek());
                advance();
            }
            if (!eof()) advance();
            def.type.push_back(')');
        } else {
            def.type = read_name();
            if (def.type == "NOTATION") {
                skip_ws();
                if (peek() == '(') {
                    while (!eof() && peek() != ')') advance();
                    if (!eof()) advance();
                }
            }
        }
        skip_ws();
        if (peek() == '#') {
            advance();
            def.default_kind = "#" + read_name();
            if (def.default_kind == "#FIXED") {
                skip_ws();
                def.default_value = read_quoted();
            }
        } else if (peek() == '"' || peek() == '\'') {
            def.default_value = read_quoted();
        } else {
            report("dtd.syntax",
                   "expected default declaration for attribute '" + def.name + "'", here());
        }
        defs.push_back(std::move(def));
    }
}

Dtd DtdParser::parse() {
    for (;;) {
        skip_ws();
        if (eof()) break;
        if (starts_with("<!--")) {
            SourcePos start = here();
            skip(4);
            while (!eof() && !starts_with("-->")) advance();
            if (eof()) report("dtd.syntax", "unterminated comment", start);
            else skip(3);
            continue;
        }
        if (starts_with("<!ELEMENT") && is_ws(peek(9))) {
            parse_element_decl();
            continue;
        }
        if (starts_with("<!ATTLIST") && is_ws(peek(9))) {
            parse_attlist_decl();
            continue;
        }
        if (starts_with("<!ENTITY")) {
            warn("dtd.unsupported", "entity declarations are ignored", here());
            skip_to_gt();
            continue;
        }
        if (starts_with("<!NOTATION")) {
            warn("dtd.unsupported", "notation declarations are ignored", here());
            skip_to_gt();
            continue;
        }
        if (starts_with("<?")) {
            SourcePos start = here();
            skip(2);
            while (!eof() && !starts_with("?>")) advance();
            if (eof()) report("dtd.syntax", "unterminated processing instruction", start);
            else skip(2);
            continue;
        }
        if (peek() == '%') {
            SourcePos start = here();
            advance();
            read_name();
            if (peek() == ';') advance();
            warn("dtd.unsupported", "parameter entity reference ignored", start);
            continue;
        }
        report("dtd.syntax", "unexpected content in DTD", here());
        while (!eof() && peek() != '<') advance();
        if (!eof() && peek() == '<' && !starts_with("<!") && !starts_with("<?")) advance();
    }
    return dtd_;
}

class Validator {
public:
    Validator(const Dtd& dtd, std::string file, Mode mode, Diagnostics& diags)
        : dtd_(dtd), file_(std::move(file)), mode_(mode), diags_(diags) {}

    bool check(const XmlElement& elem) {
        check_element(elem);
        return ok_;
    }
    void check_root_name(const Doctype& doctype, const XmlElement& root) {
        if (!doctype.present || doctype.root_name.empty()) return;
        if (doctype.root_name != root.name.qualified()) {
            report("dtd.root",
                   "document root is '" + root.name.qualified() + "' but DOCTYPE declares '" +
                       doctype.root_name + "'",
                   root.pos);
        }
    }

private:
    const Dtd& dtd_;
    std::string file_;
    Mode mode_;
    Diagnostics& diags_;
    bool ok_ = true;
    std::map<std::string, Glushkov> automata_;

    void report(const std::string& code, const std::string& msg, SourcePos p) {
        ok_ = false;
        diags_.add({mode_ == Mode::Strict ? Severity::Error : Severity::Warning, code, msg,
                    {file_, p}});
    }

    const Glushkov& automaton_for(const ElementDecl& decl) {
        auto it = automata_.find(decl.name);
        if (it == automata_.end())
            it = automata_.emplace(decl.name, build_automaton(decl.model)).first;
        return it->second;
    }

    void check_element(const XmlElement& elem) {
        std::string qname = elem.name.qualified();
        auto it = dtd_.elements.find(qname);
        if (it == dtd_.elements.end()) {
            report("dtd.undeclared", "no declaration for element '" + qname + "'", elem.pos);
        } else {
            check_content(elem, it->second);
        }
        for (const XmlElement* child : elem.child_elements()) check_element(*child);
    }

    void check_content(const XmlElement& elem, const ElementDecl& decl) {
        std::string qname = elem.name.qualified();
        bool has_text = false;
        std::vector<std::string> names;
        const XmlElement* first_child = nullptr;
        for (const auto& n : elem.children) {
            if (n.is_text) {
                has_text = true;
            } else {
                if (!first_child) first_child = n.elem.get();
                names.push_back(n.elem->name.qualified());
            }
        }
        switch (decl.model.kind) {
            case ContentModel::Kind::Empty:
                if (!names.empty()) {
                    report("dtd.content",
                           "element '" + qname + "': expected end of element after start of " +
                               "element, found '" + names.front() + "'",
                           first_child->pos);
                } else if (has_text) {
                    report("dtd.content", "text content not allowed in element '" + qname + "'",
                           elem.pos);
                }
                return;
            case ContentModel::Kind::Any:
                return;
            case ContentModel::Kind::PCData:
                if (!names.empty())
                    report("dtd.content",
                           "element '" + names.front() + "' not allowed in text-only element '" +
                               qname + "'",
                           first_child->pos);
                return;
            case ContentModel::Kind::Mixed: {
                std::set<std::string> allowed;
                for (const auto& part : decl.model.parts) allowed.insert(part.name);
                for (const auto& n : elem.children) {
                    if (n.is_text) continue;
                    if (!allowed.count(n.elem->name.qualified())) {
                        std::string list;
                        for (const auto& a : allowed) {
                            if (!list.empty()) list += ", ";
                            list += a;
                        }
                        report("dtd.content",
                               "element '" + n.elem->name.qualified() + "' not allowed in '" +
                                   qname + "' (allowed: " + list + ")",
                               n.elem->pos);
                        return;
                    }
                }
                return;
            }
            default: {
                if (has_text) {
                    report("dtd.content", "text content not allowed in element '" + qname + "'",
                           elem.pos);
                    return;
                }
                std::string msg;
                if (!run_automaton(automaton_for(decl), names, &msg))
                    report("dtd.content", "element '" + qname + "': " + msg, elem.pos);
                return;
            }
        }
    }
};

}  // namespace

Dtd parse_dtd(const std::string& text, const std::string& file, Mode mode, Diagnostics& diags,
              int first_line) {
    DtdParser parser(text, file, mode, diags, first_line);
    return parser.parse();
}

bool validate_document(const XmlDocument& doc, const Dtd& dtd, const std::string& file,
                       Mode mode, Diagnostics& diags) {
    Validator validator(dtd, file, mode, diags);
    validator.check_root_name(doc.doctype, doc.root);
    bool ok = validator.check(doc.root);
    return ok && !(doc.doctype.present && !doc.doctype.root_name.empty() &&
                   doc.doctype.root_name != doc.root.name.qualified());
}

bool validate_element(const XmlElement& root, const Dtd& dtd, const std::string& file,
                      Mode mode, Diagnostics& diags) {
    Validator validator(dtd, file, mode, diags);
    return validator.check(root);
}

bool match_children(const ContentModel& model, const std::vector<std::string>& names,
                    std::string* error) {
    switch (model.kind) {
        case ContentModel::Kind::Empty:
            if (!names.empty()) {
                if (error)
                    *error = "expected end of element after start of element, found '" +
                             names.front() + "'";
                return false;
            }
            return true;
        case ContentModel::Kind::Any:
        case ContentModel::Kind::PCData:
        case ContentModel::Kind::Mixed: {
            if (model.kind == ContentModel::Kind::PCData && !names.empty()) {
                if (error) *error = "element '" + names.front() + "' not allowed";
                return false;
            }
            if (model.kind == ContentModel::Kind::Mixed) {
                std::set<std::string> allowed;
                for (const auto& part : model.parts) allowed.insert(part.name);
                for (const auto& n : names) {
                    if (!allowed.count(n)) {
                        if (error) *error = "element '" + n + "' not allowed";
                        return false;
                    }
                }
            }
            return true;
        }
        default: {
            Glushkov g = build_automaton(model);
            return run_automaton(g, names, error);
        }
    }
}

}  // namespace kb::xml
