#include "kb/flogic_loader.hpp"

#include <map>

namespace kb::flogic {

namespace {

Value term_value(const Term& t) {
    return t.kind == Term::Kind::Literal ? literal_value(t.text) : object_value(t.text);
}

}  // namespace

std::vector<Fact> statement_facts(const FactStatement& stmt, Diagnostics& diags) {
    std::vector<Fact> out;
    for (const auto& a : stmt.atoms) {
        if (a.subject.kind == Term::Kind::Variable ||
            (a.kind == Atom::Kind::Attribute && a.value.kind == Term::Kind::Variable)) {
            diags.error("parse.syntax", "fact statements must be ground", a.at);
            continue;
        }
        if (a.kind == Atom::Kind::Membership)
            out.push_back(Fact::membership(a.subject.text, a.name));
        else
            out.push_back(Fact::attribute(a.subject.text, a.name, term_value(a.value)));
    }
    return out;
}

bool load_program(const Program& prog, KnowledgeBase& kb, Mode mode, Diagnostics& diags) {
    // Merge split declarations: "A :: B." plus "A :: C." gives A the supers
    // {B, C}.
    std::map<std::string, std::pair<std::set<std::string>, SourceRef>> merged;
    for (const auto& d : prog.class_decls) {
        auto& entry = merged[d.name];
        if (entry.first.empty()) entry.second = d.at;
        entry.first.insert(d.supers.begin(), d.supers.end());
    }
    for (const auto& [name, entry] : merged)
        kb.declare_class(name, entry.first, diags, entry.second);
    for (const auto& s : prog.signatures)
        kb.add_signature(s.owner, s.attribute, s.value_type, diags, s.at);
    if (!kb.finalize(diags)) return false;

    std::vector<std::pair<Fact, SourceRef>> facts;
    for (const auto& stmt : prog.facts)
        for (const auto& f : statement_facts(stmt, diags)) facts.emplace_back(f, stmt.at);
    for (const auto& [f, at] : facts)
        if (f.kind == Fact::Kind::Membership) kb.assert_fact(f, mode, diags, at);
    for (const auto& [f, at] : facts)
        if (f.kind == Fact::Kind::Attribute) kb.assert_fact(f, mode, diags, at);
    return true;
}

}  // namespace kb::flogic
