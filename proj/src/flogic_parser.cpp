#include "kb/flogic_parser.hpp"

#include <cctype>
#include <set>
#include <vector>

namespace kb::flogic {

namespace {

enum class Tok {
    Ident,
    String,
    Dot,         // .
    Colon,       // :
    DblColon,    // ::
    LBracket,    // [
    RBracket,    // ]
    Comma,       // ,
    Semicolon,   // ;
    SigArrow,    // ==>
    ValArrow,    // ->>
    ImplArrow,   // ->
    EquivArrow,  // <->
    QueryArrow,  // <-
    Forall,      // FORALL
    And,         // and
    End,
};

struct Token {
    Tok kind;
    std::string text;
    SourcePos pos;
};

class Lexer {
public:
    Lexer(std::string_view text, const std::string& file, Diagnostics& diags)
        : text_(text), file_(file), diags_(diags) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_trivia();
            SourcePos pos{line_, col_};
            if (eof()) {
                out.push_back({Tok::End, "", pos});
                return out;
            }
            char c = peek();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string id = lex_ident();
                Tok k = id == "FORALL" ? Tok::Forall : id == "and" ? Tok::And : Tok::Ident;
                out.push_back({k, id, pos});
            } else if (c == '"') {
                out.push_back({Tok::String, lex_string(), pos});
            } else if (starts_with("...")) {
                error(pos, "'...' (ellipsis) is not part of the language");
                advance(3);
            } else if (starts_with("==>")) {
                out.push_back({Tok::SigArrow, "==>", pos});
                advance(3);
            } else if (starts_with("->>")) {
                out.push_back({Tok::ValArrow, "->>", pos});
                advance(3);
            } else if (starts_with("->")) {
                out.push_back({Tok::ImplArrow, "->", pos});
                advance(2);
            } else if (starts_with("<->")) {
                out.push_back({Tok::EquivArrow, "<->", pos});
                advance(3);
            } else if (starts_with("<-")) {
                out.push_back({Tok::QueryArrow, "<-", pos});
                advance(2);
            } else if (starts_with("::")) {
                out.push_back({Tok::DblColon, "::", pos});
                advance(2);
            } else {
                switch (c) {
                    case '.': out.push_back({Tok::Dot, ".", pos}); break;
                    case ':': out.push_back({Tok::Colon, ":", pos}); break;
                    case '[': out.push_back({Tok::LBracket, "[", pos}); break;
                    case ']': out.push_back({Tok::RBracket, "]", pos}); break;
                    case ',': out.push_back({Tok::Comma, ",", pos}); break;
                    case ';': out.push_back({Tok::Semicolon, ";", pos}); break;
                    default:
                        error(pos, std::string("unexpected character '") + c + "'");
                        break;
                }
                advance(1);
            }
        }
    }

private:
    std::string_view text_;
    const std::string& file_;
    Diagnostics& diags_;
    std::size_t i_ = 0;
    int line_ = 1, col_ = 1;

    bool eof() const { return i_ >= text_.size(); }
    char peek() const { return text_[i_]; }
    bool starts_with(std::string_view s) const { return text_.substr(i_, s.size()) == s; }

    void advance(std::size_t n) {
        for (std::size_t k = 0; k < n && !eof(); ++k) {
            if (text_[i_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++i_;
        }
    }

    void skip_trivia() {
        while (!eof()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance(1);
            } else if (starts_with("//")) {
                while (!eof() && peek() != '\n') advance(1);
            } else {
                return;
            }
        }
    }

    std::string lex_ident() {
        std::string id;
        while (!eof()) {
            char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                id += c;
                advance(1);
            } else {
                break;
            }
        }
        return id;
    }

    std::string lex_string() {
        SourcePos start{line_, col_};
        advance(1);  // opening quote
        std::string out;
        while (!eof()) {
            char c = peek();
            if (c == '"') {
                advance(1);
                return out;
            }
            if (c == '\n') break;
            if (c == '\\') {
                advance(1);
                if (eof()) break;
                char e = peek();
                if (e == '"' || e == '\\') {
                    out += e;
                } else {
                    error({line_, col_}, std::string("unknown escape '\\") + e + "'");
                    out += e;
                }
                advance(1);
            } else {
                out += c;
                advance(1);
            }
        }
        error(start, "unterminated string literal");
        return out;
    }

    void error(SourcePos pos, const std::string& msg) {
        diags_.error("parse.lex", msg, {file_, pos});
    }
};

class Parser {
public:
    Parser(std::vector<Token> tokens, const std::string& file, Diagnostics& diags)
        : toks_(std::move(tokens)), file_(file), diags_(diags) {}

    Program run() {
        Program prog;
        while (!at(Tok::End)) parse_statement(prog);
        return prog;
    }

private:
    std::vector<Token> toks_;
    const std::string& file_;
    Diagnostics& diags_;
    std::size_t i_ = 0;

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t k = i_ + ahead;
        return k < toks_.size() ? toks_[k] : toks_.back();
    }
    const Token& advance() {
        const Token& t = toks_[i_];
        if (i_ + 1 < toks_.size()) ++i_;
        return t;
    }
    bool at(Tok k) const { return peek().kind == k; }
    SourceRef here() const { return {file_, peek().pos}; }

    bool expect(Tok k, const std::string& what) {
        if (at(k)) {
            advance();
            return true;
        }
        syntax_error("expected " + what);
        return false;
    }

    void syntax_error(const std::string& msg) {
        const Token& t = peek();
        std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        diags_.error("parse.syntax", msg + ", found " + got, {file_, t.pos});
    }

    // Skips past the next '.' (or to end of input) after an error.
    void recover() {
        while (!at(Tok::End)) {
            if (advance().kind == Tok::Dot) return;
        }
    }

    void parse_statement(Program& prog) {
        if (at(Tok::Forall)) {
            parse_rule_or_query(prog);
        } else if (at(Tok::Ident)) {
            parse_named_statement(prog);
        } else {
            syntax_error("expected a statement");
            recover();
        }
    }

    // Statements introduced by an identifier: class declarations, signature
    // blocks, and ground facts.
    void parse_named_statement(Program& prog) {
        SourceRef start = here();
        std::string name = advance().text;
        if (at(Tok::Dot)) {
            advance();
            prog.class_decls.push_back({name, {}, start});
            return;
        }
        if (at(Tok::DblColon)) {
            advance();
            if (!at(Tok::Ident)) {
                syntax_error("expected a superclass name after '::'");
                recover();
                return;
            }
            std::string super = advance().text;
            if (!expect(Tok::Dot, "'.'")) {
                recover();
                return;
            }
            prog.class_decls.push_back({name, {super}, start});
            return;
        }
        if (at(Tok::Colon)) {
            advance();
            parse_fact_statement(prog, name, start);
            return;
        }
        if (at(Tok::LBracket)) {
            if (peek(1).kind == Tok::RBracket) {
                advance();
                advance();
                if (expect(Tok::Dot, "'.'"))
                    prog.class_decls.push_back({name, {}, start});
                else
                    recover();
                return;
            }
            if (peek(1).kind == Tok::Ident && peek(2).kind == Tok::SigArrow) {
                parse_signature_block(prog, name, start);
                return;
            }
            parse_fact_statement(prog, name, start, /*expect_membership=*/false);
            return;
        }
        syntax_error("expected '.', '::', ':' or '[' after '" + name + "'");
        recover();
    }

    // name '[' Attr ==> Type ... ']' '.' — entries may be separated by ';'
    // or ',' or by nothing at all.
    void parse_signature_block(Program& prog, const std::string& owner,
                               const SourceRef& start) {
        (void)start;
        advance();  // '['
        while (true) {
            if (at(Tok::Semicolon) || at(Tok::Comma)) {
                advance();
                continue;
            }
            if (at(Tok::RBracket)) break;
            if (!at(Tok::Ident)) {
                syntax_error("expected an attribute name");
                recover();
                return;
            }
            SourceRef entry_at = here();
            std::string attr = advance().text;
            if (!expect(Tok::SigArrow, "'==>'")) {
                recover();
                return;
            }
            if (!at(Tok::Ident)) {
                syntax_error("expected a value type after '==>'");
                recover();
                return;
            }
            std::string type = advance().text;
            prog.signatures.push_back({owner, attr, type, entry_at});
        }
        advance();  // ']'
        if (!expect(Tok::Dot, "'.'")) recover();
    }

    Term parse_term(const std::set<std::string>* vars) {
        const Token& t = peek();
        if (t.kind == Tok::String) {
            advance();
            return {Term::Kind::Literal, t.text, {file_, t.pos}};
        }
        if (t.kind == Tok::Ident) {
            advance();
            Term::Kind k = (vars && vars->count(t.text)) ? Term::Kind::Variable
                                                         : Term::Kind::Identifier;
            return {k, t.text, {file_, t.pos}};
        }
        syntax_error("expected an identifier or string literal");
        return {Term::Kind::Identifier, "<error>", {file_, t.pos}};
    }

    // subject (':' Class)? ('[' Attr ->> value (';'|',' Attr ->> value)* ']')?
    bool parse_atom_group(std::vector<Atom>& out, const std::set<std::string>* vars) {
        SourceRef start = here();
        Term subject = parse_term(vars);
        if (subject.text == "<error>") return false;
        bool any = false;
        if (at(Tok::Colon)) {
            advance();
            if (!at(Tok::Ident)) {
                syntax_error("expected a class name after ':'");
                return false;
            }
            const Token& cls = peek();
            advance();
            out.push_back({Atom::Kind::Membership, subject, cls.text, {}, {file_, cls.pos}});
            any = true;
        }
        if (at(Tok::LBracket)) {
            advance();
            while (true) {
                if (at(Tok::Semicolon) || at(Tok::Comma)) {
                    advance();
                    continue;
                }
                if (at(Tok::RBracket)) break;
                if (!at(Tok::Ident)) {
                    syntax_error("expected an attribute name");
                    return false;
                }
                SourceRef entry_at = here();
                std::string attr = advance().text;
                if (!expect(Tok::ValArrow, "'->>'")) return false;
                Term value = parse_term(vars);
                if (value.text == "<error>") return false;
                out.push_back({Atom::Kind::Attribute, subject, attr, value, entry_at});
                any = true;
            }
            advance();  // ']'
        }
        if (!any) {
            diags_.error("parse.syntax",
                         "expected ':' or '[' after term '" + subject.text + "'", start);
            return false;
        }
        return true;
    }

    // Atom groups joined by 'and' or ','; stops before '->', '<->' or '.'.
    bool parse_conjunction(std::vector<Atom>& out, const std::set<std::string>* vars) {
        while (true) {
            if (!parse_atom_group(out, vars)) return false;
            if (at(Tok::And) || at(Tok::Comma)) {
                advance();
                continue;
            }
            return true;
        }
    }

    void parse_fact_statement(Program& prog, const std::string& subject_name,
                              const SourceRef& start, bool expect_membership = true) {
        FactStatement stmt;
        stmt.at = start;
        Term subject{Term::Kind::Identifier, subject_name, start};
        if (expect_membership) {  // ':' already consumed
            if (!at(Tok::Ident)) {
                syntax_error("expected a class name after ':'");
                recover();
                return;
            }
            const Token& cls = peek();
            advance();
            stmt.atoms.push_back(
                {Atom::Kind::Membership, subject, cls.text, {}, {file_, cls.pos}});
        }
        if (at(Tok::LBracket)) {
            advance();
            while (true) {
                if (at(Tok::Semicolon) || at(Tok::Comma)) {
                    advance();
                    continue;
                }
                if (at(Tok::RBracket)) break;
                if (!at(Tok::Ident)) {
                    syntax_error("expected an attribute name");
                    recover();
                    return;
                }
                SourceRef entry_at = here();
                std::string attr = advance().text;
                if (!expect(Tok::ValArrow, "'->>'")) {
                    recover();
                    return;
                }
                Term value = parse_term(nullptr);
                if (value.text == "<error>") {
                    recover();
                    return;
                }
                stmt.atoms.push_back({Atom::Kind::Attribute, subject, attr, value, entry_at});
            }
            advance();  // ']'
        }
        if (stmt.atoms.empty()) {
            syntax_error("expected ':' or '[' in fact statement");
            recover();
            return;
        }
        if (!expect(Tok::Dot, "'.'")) {
            recover();
            return;
        }
        prog.facts.push_back(std::move(stmt));
    }

    static std::set<std::string> variables_in(const std::vector<Atom>& atoms) {
        std::set<std::string> vars;
        for (const auto& a : atoms) {
            if (a.subject.kind == Term::Kind::Variable) vars.insert(a.subject.text);
            if (a.kind == Atom::Kind::Attribute && a.value.kind == Term::Kind::Variable)
                vars.insert(a.value.text);
        }
        return vars;
    }

    void parse_rule_or_query(Program& prog) {
        SourceRef start = here();
        advance();  // FORALL
        std::vector<std::string> var_list;
        std::set<std::string> vars;
        if (!at(Tok::Ident)) {
            syntax_error("expected a variable name after FORALL");
            recover();
            return;
        }
        while (true) {
            if (!at(Tok::Ident)) {
                syntax_error("expected a variable name");
                recover();
                return;
            }
            const Token& v = peek();
            advance();
            if (!vars.insert(v.text).second)
                diags_.error("parse.dup-var", "duplicate FORALL variable '" + v.text + "'",
                             {file_, v.pos});
            else
                var_list.push_back(v.text);
            if (at(Tok::Comma)) {
                advance();
                continue;
            }
            break;
        }

        if (at(Tok::QueryArrow)) {
            advance();
            Query q;
            q.projected = var_list;
            q.at = start;
            if (!parse_conjunction(q.body, &vars)) {
                recover();
                return;
            }
            if (!expect(Tok::Dot, "'.'")) {
                recover();
                return;
            }
            std::set<std::string> body_vars = variables_in(q.body);
            for (const auto& v : q.projected) {
                if (!body_vars.count(v))
                    diags_.error(
                        "parse.unsafe-query",
                        "projected variable '" + v + "' does not occur in the query body",
                        start);
            }
            prog.queries.push_back(std::move(q));
            return;
        }

        Rule r;
        r.variables = var_list;
        r.at = start;
        if (!parse_conjunction(r.body, &vars)) {
            recover();
            return;
        }
        if (at(Tok::ImplArrow))
            r.kind = Rule::Kind::Implication;
        else if (at(Tok::EquivArrow))
            r.kind = Rule::Kind::Equivalence;
        else {
            syntax_error("expected '->', '<->' or '<-'");
            recover();
            return;
        }
        advance();
        if (!parse_conjunction(r.head, &vars)) {
            recover();
            return;
        }
        if (!expect(Tok::Dot, "'.'")) {
            recover();
            return;
        }

        // Range restriction: every head variable must be bound by the body;
        // for equivalences both directions are checked.
        std::set<std::string> body_vars = variables_in(r.body);
        std::set<std::string> head_vars = variables_in(r.head);
        for (const auto& v : head_vars) {
            if (!body_vars.count(v))
                diags_.error("parse.unsafe-rule",
                             "head variable '" + v + "' does not occur in the rule body",
                             start);
        }
        if (r.kind == Rule::Kind::Equivalence) {
            for (const auto& v : body_vars) {
                if (!head_vars.count(v))
                    diags_.error(
                        "parse.unsafe-rule",
                        "variable '" + v + "' occurs on only one side of the equivalence",
                        start);
            }
        }
        prog.rules.push_back(std::move(r));
    }
};

}  // namespace

Program parse_program(std::string_view text, const std::string& file, Diagnostics& diags) {
    Lexer lexer(text, file, diags);
    Parser parser(lexer.run(), file, diags);
    return parser.run();
}

std::optional<Query> parse_query(std::string_view text, const std::string& file,
                                 Diagnostics& diags) {
    std::size_t errors_before = diags.error_count();
    Program prog = parse_program(text, file, diags);
    if (prog.queries.size() != 1 || !prog.class_decls.empty() || !prog.signatures.empty() ||
        !prog.facts.empty() || !prog.rules.empty()) {
        diags.error("parse.syntax", "expected exactly one query statement", {file, {1, 1}});
        return std::nullopt;
    }
    if (diags.error_count() > errors_before) return std::nullopt;
    return prog.queries[0];
}

}  // namespace kb::flogic
