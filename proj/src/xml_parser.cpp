#include "kb/xml_parser.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <unordered_map>

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

std::string ascii_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

void utf8_encode(int cp, std::string& out) {
    if (cp < 0 || cp > 0x10FFFF) cp = 0xFFFD;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

const std::unordered_map<std::string, int>& named_entities() {
    static const std::unordered_map<std::string, int> table = {
        {"lt", '<'}, {"gt", '>'}, {"amp", '&'}, {"apos", '\''}, {"quot", '"'},
        {"nbsp", 160}, {"iexcl", 161}, {"cent", 162}, {"pound", 163}, {"curren", 164},
        {"yen", 165}, {"brvbar", 166}, {"sect", 167}, {"uml", 168}, {"copy", 169},
        {"ordf", 170}, {"laquo", 171}, {"not", 172}, {"shy", 173}, {"reg", 174},
        {"macr", 175}, {"deg", 176}, {"plusmn", 177}, {"sup2", 178}, {"sup3", 179},
        {"acute", 180}, {"micro", 181}, {"para", 182}, {"middot", 183}, {"cedil", 184},
        {"sup1", 185}, {"ordm", 186}, {"raquo", 187}, {"frac14", 188}, {"frac12", 189},
        {"frac34", 190}, {"iquest", 191}, {"Agrave", 192}, {"Aacute", 193}, {"Acirc", 194},
        {"Atilde", 195}, {"Auml", 196}, {"Aring", 197}, {"AElig", 198}, {"Ccedil", 199},
        {"Egrave", 200}, {"Eacute", 201}, {"Ecirc", 202}, {"Euml", 203}, {"Igrave", 204},
        {"Iacute", 205}, {"Icirc", 206}, {"Iuml", 207}, {"ETH", 208}, {"Ntilde", 209},
        {"Ograve", 210}, {"Oacute", 211}, {"Ocirc", 212}, {"Otilde", 213}, {"Ouml", 214},
        {"times", 215}, {"Oslash", 216}, {"Ugrave", 217}, {"Uacute", 218}, {"Ucirc", 219},
        {"Uuml", 220}, {"Yacute", 221}, {"THORN", 222}, {"szlig", 223}, {"agrave", 224},
        {"aacute", 225}, {"acirc", 226}, {"atilde", 227}, {"auml", 228}, {"aring", 229},
        {"aelig", 230}, {"ccedil", 231}, {"egrave", 232}, {"eacute", 233}, {"ecirc", 234},
        {"euml", 235}, {"igrave", 236}, {"iacute", 237}, {"icirc", 238}, {"iuml", 239},
        {"eth", 240}, {"ntilde", 241}, {"ograve", 242}, {"oacute", 243}, {"ocirc", 244},
        {"otilde", 245}, {"ouml", 246}, {"divide", 247}, {"oslash", 248}, {"ugrave", 249},
        {"uacute", 250}, {"ucirc", 251}, {"uuml", 252}, {"yacute", 253}, {"thorn", 254},
        {"yuml", 255},
    };
    return table;
}

// Expands one reference starting at text[i] == '&'. Advances i past whatever
// was consumed and appends the expansion to out.
void expand_reference(const std::string& text, size_t& i, std::string& out, Mode mode,
                      Diagnostics& diags, const SourceRef& where) {
    size_t start = i;
    ++i;  // '&'
    if (i < text.size() && text[i] == '#') {
        ++i;
        int base = 10;
        if (i < text.size() && (text[i] == 'x' || text[i] == 'X')) {
            base = 16;
            ++i;
        }
        size_t digits = i;
        int cp = 0;
        bool overflow = false;
        while (i < text.size() && text[i] != ';') {
            char c = text[i];
            int d;
            if (c >= '0' && c <= '9') d = c - '0';
            else if (base == 16 && c >= 'a' && c <= 'f') d = c - 'a' + 10;
            else if (base == 16 && c >= 'A' && c <= 'F') d = c - 'A' + 10;
            else break;
            cp = cp * base + d;
            if (cp > 0x10FFFF) overflow = true;
            ++i;
        }
        if (i < text.size() && text[i] == ';' && i > digits && !overflow) {
            ++i;
            utf8_encode(cp, out);
            return;
        }
        diags.add({mode == Mode::Strict ? Severity::Error : Severity::Warning, "xml.entity",
                   "malformed character reference", where});
        out.append(text, start, std::min(i, text.size()) - start);
        if (i < text.size() && text[i] == ';') ++i;
        return;
    }
    size_t name_start = i;
    while (i < text.size() && i - name_start < 32 && is_name_char(text[i]) && text[i] != ':') ++i;
    if (i < text.size() && text[i] == ';' && i > name_start) {
        std::string name = text.substr(name_start, i - name_start);
        ++i;
        auto it = named_entities().find(name);
        if (it != named_entities().end()) {
            utf8_encode(it->second, out);
            return;
        }
        diags.add({mode == Mode::Strict ? Severity::Error : Severity::Warning, "xml.entity",
                   "unknown entity reference '&" + name + ";'", where});
        out.push_back('&');
        out.append(name);
        out.push_back(';');
        return;
    }
    // Bare ampersand.
    diags.add({mode == Mode::Strict ? Severity::Error : Severity::Warning, "xml.entity",
               "'&' not followed by an entity reference", where});
    i = start + 1;
    out.push_back('&');
}

}  // namespace

XmlName split_name(const std::string& qualified) {
    auto pos = qualified.find(':');
    if (pos == std::string::npos) return {"", qualified};
    return {qualified.substr(0, pos), qualified.substr(pos + 1)};
}

const std::string* XmlElement::attr(const std::string& qualified) const {
    for (const auto& a : attrs)
        if (a.name.qualified() == qualified) return &a.value;
    return nullptr;
}

std::vector<const XmlElement*> XmlElement::child_elements() const {
    std::vector<const XmlElement*> out;
    for (const auto& n : children)
        if (!n.is_text) out.push_back(n.elem.get());
    return out;
}

std::string XmlElement::text_content() const {
    std::string out;
    for (const auto& n : children)
        if (n.is_text) out += n.text;
    return out;
}

bool equal_element(const XmlElement& a, const XmlElement& b) {
    if (a.name != b.name) return false;
    if (a.attrs.size() != b.attrs.size()) return false;
    for (size_t i = 0; i < a.attrs.size(); ++i)
        if (a.attrs[i].name != b.attrs[i].name || a.attrs[i].value != b.attrs[i].value)
            return false;
    if (a.children.size() != b.children.size()) return false;
    for (size_t i = 0; i < a.children.size(); ++i) {
        const auto& x = a.children[i];
        const auto& y = b.children[i];
        if (x.is_text != y.is_text) return false;
        if (x.is_text) {
            if (x.text != y.text) return false;
        } else if (!equal_element(*x.elem, *y.elem)) {
            return false;
        }
    }
    return true;
}

std::string resolve_entities(const std::string& text, Mode mode, Diagnostics& diags,
                             const SourceRef& where) {
    std::string out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '&') {
            expand_reference(text, i, out, mode, diags, where);
        } else {
            out.push_back(text[i]);
            ++i;
        }
    }
    return out;
}

std::string escape_text(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string escape_attr(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

namespace {

void serialize_into(const XmlElement& elem, std::string& out) {
    out.push_back('<');
    out += elem.name.qualified();
    for (const auto& a : elem.attrs) {
        out.push_back(' ');
        out += a.name.qualified();
        out += "=\"";
        out += escape_attr(a.value);
        out.push_back('"');
    }
    if (elem.children.empty()) {
        out += "/>";
        return;
    }
    out.push_back('>');
    for (const auto& n : elem.children) {
        if (n.is_text) out += escape_text(n.text);
        else serialize_into(*n.elem, out);
    }
    out += "</";
    out += elem.name.qualified();
    out.push_back('>');
}

class Parser {
public:
    Parser(const std::string& text, std::string file, Mode mode, Diagnostics& diags)
        : text_(text), file_(std::move(file)), mode_(mode), diags_(diags) {}

    std::optional<XmlDocument> document();
    // Advances to `offset` (tracking line/col) and parses one element there.
    std::optional<XmlElement> element_at(size_t offset);
    size_t offset() const { return pos_; }

private:
    const std::string& text_;
    std::string file_;
    Mode mode_;
    Diagnostics& diags_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    bool eof() const { return pos_ >= text_.size(); }
    char peek(size_t k = 0) const {
        return pos_ + k < text_.size() ? text_[pos_ + k] : '\0';
    }
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
    SourceRef ref() const { return {file_, here()}; }
    SourceRef ref(SourcePos p) const { return {file_, p}; }

    void report(const std::string& code, const std::string& msg, SourcePos p) {
        diags_.add({mode_ == Mode::Strict ? Severity::Error : Severity::Warning, code, msg,
                    ref(p)});
    }
    void warn(const std::string& code, const std::string& msg, SourcePos p) {
        diags_.add({Severity::Warning, code, msg, ref(p)});
    }
    void error(const std::string& code, const std::string& msg, SourcePos p) {
        diags_.add({Severity::Error, code, msg, ref(p)});
    }

    bool skip_ws() {
        bool any = false;
        while (!eof() && is_ws(peek())) {
            advance();
            any = true;
        }
        return any;
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

    std::string read_reference() {
        // pos_ at '&'; delegate to expand_reference on a local cursor, then
        // advance the tracked cursor by the consumed length.
        std::string out;
        size_t i = pos_;
        expand_reference(text_, i, out, mode_, diags_, ref());
        skip(i - pos_);
        return out;
    }

    bool read_quoted(std::string& value, SourcePos start) {
        char q = peek();
        if (q != '"' && q != '\'') return false;
        advance();
        value.clear();
        while (!eof() && peek() != q) {
            if (peek() == '&') {
                value += read_reference();
            } else if (peek() == '<') {
                report("xml.attr", "'<' in attribute value; assuming unterminated value", start);
                return true;
            } else {
                value.push_back(peek());
                advance();
            }
        }
        if (eof()) {
            report("xml.attr", "unterminated attribute value", start);
            return true;
        }
        advance();  // closing quote
        return true;
    }

    void skip_comment() {
        SourcePos start = here();
        skip(4);  // <!--
        while (!eof() && !starts_with("-->")) advance();
        if (eof()) report("xml.comment", "unterminated comment", start);
        else skip(3);
    }

    void skip_pi() {
        SourcePos start = here();
        skip(2);  // <?
        while (!eof() && !starts_with("?>")) advance();
        if (eof()) report("xml.syntax", "unterminated processing instruction", start);
        else skip(2);
    }

    std::string read_cdata() {
        SourcePos start = here();
        skip(9);  // <![CDATA[
        std::string out;
        while (!eof() && !starts_with("]]>")) {
            out.push_back(peek());
            advance();
        }
        if (eof()) report("xml.syntax", "unterminated CDATA section", start);
        else skip(3);
        return out;
    }

    std::optional<XmlDeclaration> read_xml_decl() {
        if (!starts_with("<?xml") || !(is_ws(peek(5)) || peek(5) == '?')) return std::nullopt;
        SourcePos start = here();
        skip(5);
        XmlDeclaration decl;
        while (!eof() && !starts_with("?>")) {
            skip_ws();
            if (starts_with("?>")) break;
            std::string name = read_name();
            if (name.empty()) {
                advance();
                continue;
            }
            skip_ws();
            std::string value;
            if (peek() == '=') {
                advance();
                skip_ws();
                read_quoted(value, here());
            }
            if (name == "version") decl.version = value;
            else if (name == "encoding") decl.encoding = value;
        }
        if (eof()) report("xml.syntax", "unterminated XML declaration", start);
        else skip(2);
        return decl;
    }

    void read_doctype(Doctype& doctype) {
        SourcePos start = here();
        skip(9);  // <!DOCTYPE
        doctype.present = true;
        doctype.pos = start;
        skip_ws();
        doctype.root_name = read_name();
        skip_ws();
        if (starts_with("SYSTEM")) {
            skip(6);
            skip_ws();
            read_quoted(doctype.system_id, here());
        } else if (starts_with("PUBLIC")) {
            skip(6);
            skip_ws();
            std::string pub;
            read_quoted(pub, here());
            skip_ws();
            read_quoted(doctype.system_id, here());
            warn("xml.doctype", "public identifier ignored; using system identifier", start);
        }
        skip_ws();
        if (peek() == '[') {
            advance();
            doctype.has_internal = true;
            SourcePos sub_start = here();
            std::string& sub = doctype.internal_subset;
            char in_quote = '\0';
            while (!eof()) {
                char c = peek();
                if (in_quote) {
                    if (c == in_quote) in_quote = '\0';
                } else if (c == '"' || c == '\'') {
                    in_quote = c;
                } else if (c == ']') {
                    break;
                }
                sub.push_back(c);
                advance();
            }
            if (eof()) {
                report("xml.doctype", "unterminated internal DTD subset", sub_start);
            } else {
                advance();  // ']'
            }
        }
        skip_ws();
        if (peek() == '>') advance();
        else report("xml.doctype", "expected '>' to end DOCTYPE", here());
    }

    struct OpenTag {
        XmlElement elem;
        bool self_closed = false;
    };

    std::optional<OpenTag> parse_open_tag();
    std::optional<XmlElement> parse_element_tree();
    void parse_text_into(XmlElement& parent);
};

std::optional<Parser::OpenTag> Parser::parse_open_tag() {
    SourcePos start = here();
    advance();  // '<'
    OpenTag tag;
    tag.elem.pos = start;
    std::string qname = read_name();
    if (qname.empty()) {
        report("xml.syntax", "expected element name after '<'", start);
        return std::nullopt;
    }
    tag.elem.name = split_name(qname);
    for (;;) {
        skip_ws();
        if (eof()) {
            report("xml.eof", "unexpected end of input in start tag '<" + qname + "'", start);
            return tag;
        }
        char c = peek();
        if (c == '>') {
            advance();
            return tag;
        }
        if (c == '/' && peek(1) == '>') {
            skip(2);
            tag.self_closed = true;
            return tag;
        }
        if (c == '<') {
            report("xml.unterminated-start",
                   "start tag '<" + qname + "' not closed before next markup; assuming '>'",
                   here());
            return tag;
        }
        SourcePos attr_pos = here();
        if (c == '=') {
            // Attribute written without a name, e.g. <rdf:Name="value"/>.
            report("xml.attr-name",
                   "attribute with empty name in '<" + qname + ">'", attr_pos);
            advance();
            skip_ws();
            std::string value;
            if (!read_quoted(value, attr_pos))
                report("xml.attr", "expected quoted value after '='", here());
            tag.elem.attrs.push_back({XmlName{"", ""}, value, attr_pos});
            continue;
        }
        if (!is_name_start(c)) {
            report("xml.syntax",
                   std::string("unexpected character '") + c + "' in start tag", attr_pos);
            advance();
            continue;
        }
        std::string aname = read_name();
        skip_ws();
        std::string value;
        if (peek() == '=') {
            advance();
            skip_ws();
            if (!read_quoted(value, attr_pos)) {
                report("xml.attr", "attribute '" + aname + "' value is not quoted", here());
                while (!eof() && !is_ws(peek()) && peek() != '>' && peek() != '<' &&
                       !(peek() == '/' && peek(1) == '>')) {
                    value.push_back(peek());
                    advance();
                }
            }
        } else {
            report("xml.attr", "attribute '" + aname + "' has no value", attr_pos);
        }
        XmlName an = split_name(aname);
        for (const auto& existing : tag.elem.attrs) {
            if (existing.name == an) {
                report("xml.attr-dup",
                       "duplicate attribute '" + aname + "' in '<" + qname + ">'", attr_pos);
                break;
            }
        }
        tag.elem.attrs.push_back({an, value, attr_pos});
    }
}

void Parser::parse_text_into(XmlElement& parent) {
    std::string text;
    bool nonspace = false;
    while (!eof() && peek() != '<') {
        if (peek() == '&') {
            text += read_reference();
            nonspace = true;
        } else {
            if (!is_ws(peek())) nonspace = true;
            text.push_back(peek());
            advance();
        }
    }
    // Whitespace-only runs are layout, not content.
    if (nonspace) parent.children.push_back(XmlNode{true, std::move(text), nullptr});
}

std::optional<XmlElement> Parser::parse_element_tree() {
    auto first = parse_open_tag();
    if (!first) return std::nullopt;
    if (first->self_closed) return std::move(first->elem);

    std::vector<XmlElement> stack;
    stack.push_back(std::move(first->elem));

    auto pop_one = [&]() -> std::optional<XmlElement> {
        XmlElement done = std::move(stack.back());
        stack.pop_back();
        if (stack.empty()) return done;
        auto node = XmlNode{false, "", std::make_unique<XmlElement>(std::move(done))};
        stack.back().children.push_back(std::move(node));
        return std::nullopt;
    };

    for (;;) {
        if (eof()) {
            report("xml.eof",
                   "element '<" + stack.back().name.qualified() + "' not closed at end of input",
                   stack.back().pos);
            while (true) {
                auto done = pop_one();
                if (done) return done;
            }
        }
        if (peek() != '<') {
            parse_text_into(stack.back());
            continue;
        }
        if (starts_with("<!--")) {
            skip_comment();
            continue;
        }
        if (starts_with("<![CDATA[")) {
            std::string data = read_cdata();
            if (!data.empty())
                stack.back().children.push_back(XmlNode{true, std::move(data), nullptr});
            continue;
        }
        if (starts_with("<?")) {
            skip_pi();
            continue;
        }
        if (peek(1) == '/') {
            SourcePos close_pos = here();
            skip(2);
            std::string qname = read_name();
            skip_ws();
            if (peek() == '>') advance();
            else report("xml.syntax", "expected '>' after '</" + qname + "'", here());

            size_t match = stack.size();
            for (size_t i = stack.size(); i-- > 0;) {
                if (stack[i].name.qualified() == qname) {
                    match = i;
                    break;
                }
            }
            if (match == stack.size()) {
                report("xml.stray-close",
                       "closing tag '</" + qname + "' does not match any open element; ignored",
                       close_pos);
                continue;
            }
            while (stack.size() - 1 > match) {
                report("xml.mismatch",
                       "element '<" + stack.back().name.qualified() + "' implicitly closed by '</" +
                           qname + ">'",
                       close_pos);
                auto done = pop_one();
                (void)done;
            }
            auto done = pop_one();
            if (done) return done;
            continue;
        }
        if (is_name_start(peek(1))) {
            auto child = parse_open_tag();
            if (!child) continue;
            if (child->self_closed) {
                auto node =
                    XmlNode{false, "", std::make_unique<XmlElement>(std::move(child->elem))};
                stack.back().children.push_back(std::move(node));
            } else {
                stack.push_back(std::move(child->elem));
            }
            continue;
        }
        report("xml.syntax", "unexpected markup", here());
        advance();
    }
}

std::optional<XmlDocument> Parser::document() {
    if (starts_with("\xEF\xBB\xBF")) skip(3);
    XmlDocument doc;
    doc.decl = read_xml_decl();
    for (;;) {
        skip_ws();
        if (eof()) break;
        if (starts_with("<!--")) {
            skip_comment();
        } else if (starts_with("<!DOCTYPE")) {
            if (doc.doctype.present) {
                report("xml.doctype", "multiple DOCTYPE declarations", here());
                Doctype ignored;
                read_doctype(ignored);
            } else {
                read_doctype(doc.doctype);
            }
        } else if (starts_with("<?")) {
            skip_pi();
        } else {
            break;
        }
    }
    if (eof() || peek() != '<' || !is_name_start(peek(1))) {
        // Skip forward to the first plausible start tag, if any.
        SourcePos junk = here();
        bool skipped = false;
        while (!eof() && !(peek() == '<' && is_name_start(peek(1)))) {
            advance();
            skipped = true;
        }
        if (eof()) {
            error("xml.no-root", "no root element found", junk);
            return std::nullopt;
        }
        if (skipped) report("xml.syntax", "unexpected content before root element", junk);
    }
    auto root = parse_element_tree();
    if (!root) {
        error("xml.no-root", "no root element found", here());
        return std::nullopt;
    }
    doc.root = std::move(*root);
    for (;;) {
        skip_ws();
        if (eof()) break;
        if (starts_with("<!--")) {
            skip_comment();
            continue;
        }
        if (starts_with("<?")) {
            skip_pi();
            continue;
        }
        report("xml.trailing", "content after the root element is ignored", here());
        break;
    }
    return doc;
}

std::optional<XmlElement> Parser::element_at(size_t offset) {
    while (pos_ < offset && !eof()) advance();
    if (eof() || peek() != '<') return std::nullopt;
    return parse_element_tree();
}

// Returns empty string if the declared encoding is unsupported.
bool decode_input(const std::string& raw, const std::string& file, Diagnostics& diags,
                  std::string& out) {
    // Peek at the declaration without full parsing.
    std::string enc;
    size_t start = raw.compare(0, 3, "\xEF\xBB\xBF") == 0 ? 3 : 0;
    bool bom = start == 3;
    if (raw.compare(start, 5, "<?xml") == 0) {
        size_t end = raw.find("?>", start);
        std::string prolog = raw.substr(start, end == std::string::npos ? 128 : end - start);
        size_t e = prolog.find("encoding");
        if (e != std::string::npos) {
            size_t q1 = prolog.find_first_of("\"'", e);
            if (q1 != std::string::npos) {
                size_t q2 = prolog.find(prolog[q1], q1 + 1);
                if (q2 != std::string::npos) enc = prolog.substr(q1 + 1, q2 - q1 - 1);
            }
        }
    }
    std::string norm = ascii_lower(enc);
    if (bom && !norm.empty() && norm != "utf-8" && norm != "utf8") {
        diags.add({Severity::Warning, "xml.encoding",
                   "byte order mark contradicts declared encoding '" + enc + "'; using UTF-8",
                   {file, {1, 1}}});
        norm = "utf-8";
    }
    if (norm.empty() || norm == "utf-8" || norm == "utf8" || norm == "us-ascii" ||
        norm == "ascii") {
        out = raw;
        return true;
    }
    if (norm == "iso-8859-1" || norm == "latin-1" || norm == "latin1") {
        out.clear();
        out.reserve(raw.size());
        for (unsigned char c : raw) {
            if (c < 0x80) out.push_back(static_cast<char>(c));
            else utf8_encode(c, out);
        }
        return true;
    }
    diags.add({Severity::Error, "xml.encoding", "unsupported encoding '" + enc + "'",
               {file, {1, 1}}});
    return false;
}

}  // namespace

std::string serialize(const XmlElement& elem) {
    std::string out;
    serialize_into(elem, out);
    return out;
}

std::string serialize(const XmlDocument& doc) {
    std::string out;
    if (doc.decl) {
        out += "<?xml version=\"";
        out += doc.decl->version.empty() ? "1.0" : doc.decl->version;
        out += "\" encoding=\"UTF-8\"?>\n";
    }
    if (doc.doctype.present) {
        out += "<!DOCTYPE " + doc.doctype.root_name;
        if (!doc.doctype.system_id.empty()) out += " SYSTEM \"" + doc.doctype.system_id + "\"";
        if (doc.doctype.has_internal) out += " [" + doc.doctype.internal_subset + "]";
        out += ">\n";
    }
    serialize_into(doc.root, out);
    out.push_back('\n');
    return out;
}

std::optional<XmlDocument> parse_xml(const std::string& text, const std::string& file,
                                     Mode mode, Diagnostics& diags) {
    std::string decoded;
    if (!decode_input(text, file, diags, decoded)) return std::nullopt;
    Parser parser(decoded, file, mode, diags);
    return parser.document();
}

std::vector<XmlElement> scan_rdf_fragments(const std::string& text, const std::string& file,
                                           Diagnostics& diags) {
    std::vector<XmlElement> out;
    Parser parser(text, file, Mode::Lenient, diags);
    size_t search = 0;
    while (search < text.size()) {
        size_t lt = text.find('<', search);
        if (lt == std::string::npos) break;
        if (lt + 1 >= text.size() || !is_name_start(text[lt + 1])) {
            search = lt + 1;
            continue;
        }
        size_t e = lt + 1;
        while (e < text.size() && is_name_char(text[e])) ++e;
        XmlName name = split_name(text.substr(lt + 1, e - lt - 1));
        if (ascii_lower(name.local) != "rdf") {
            search = lt + 1;
            continue;
        }
        if (auto elem = parser.element_at(lt)) {
            out.push_back(std::move(*elem));
            search = std::max(parser.offset(), lt + 1);
        } else {
            search = lt + 1;
        }
    }
    return out;
}

}  // namespace kb::xml
