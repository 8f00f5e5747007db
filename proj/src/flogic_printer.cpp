#include "kb/flogic_printer.hpp"

#include <sstream>

namespace kb::flogic {

std::string print_term(const Term& t) {
    if (t.kind == Term::Kind::Literal) return quote_literal(t.text);
    return t.text;
}

std::string print_atom(const Atom& a) {
    if (a.kind == Atom::Kind::Membership) return print_term(a.subject) + " : " + a.name;
    return print_term(a.subject) + "[" + a.name + " ->> " + print_term(a.value) + "]";
}

namespace {

std::string print_conjunction(const std::vector<Atom>& atoms) {
    std::string out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (i) out += " and ";
        out += print_atom(atoms[i]);
    }
    return out;
}

std::string print_variables(const std::vector<std::string>& vars) {
    std::string out;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (i) out += ", ";
        out += vars[i];
    }
    return out;
}

}  // namespace

std::string print_rule(const Rule& r) {
    std::string arrow = r.kind == Rule::Kind::Implication ? " -> " : " <-> ";
    return "FORALL " + print_variables(r.variables) + " " + print_conjunction(r.body) + arrow +
           print_conjunction(r.head) + ".";
}

std::string print_query(const Query& q) {
    return "FORALL " + print_variables(q.projected) + " <- " + print_conjunction(q.body) + ".";
}

std::string print_program(const Program& prog) {
    std::ostringstream out;
    for (const auto& c : prog.class_decls) {
        if (c.supers.empty()) {
            out << c.name << ".\n";
        } else {
            for (const auto& s : c.supers) out << c.name << " :: " << s << ".\n";
        }
    }
    for (const auto& s : prog.signatures)
        out << s.owner << "[" << s.attribute << " ==> " << s.value_type << "].\n";
    for (const auto& f : prog.facts)
        for (const auto& a : f.atoms) out << print_atom(a) << ".\n";
    for (const auto& r : prog.rules) out << print_rule(r) << '\n';
    for (const auto& q : prog.queries) out << print_query(q) << '\n';
    return out.str();
}

bool equal_atoms(const std::vector<Atom>& a, const std::vector<Atom>& b) {
    return a == b;
}

bool equal_program(const Program& a, const Program& b) {
    // Class declarations may be split across statements (one super each), so
    // compare the merged per-class super sets.
    auto decls = [](const Program& p) {
        std::map<std::string, std::set<std::string>> out;
        for (const auto& d : p.class_decls)
            out[d.name].insert(d.supers.begin(), d.supers.end());
        return out;
    };
    auto sigs = [](const Program& p) {
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        for (const auto& s : p.signatures)
            out.emplace_back(s.owner, s.attribute, s.value_type);
        return out;
    };
    auto fact_atoms = [](const Program& p) {
        std::vector<Atom> out;
        for (const auto& f : p.facts) out.insert(out.end(), f.atoms.begin(), f.atoms.end());
        return out;
    };
    if (decls(a) != decls(b) || sigs(a) != sigs(b)) return false;
    if (!equal_atoms(fact_atoms(a), fact_atoms(b))) return false;
    if (a.rules.size() != b.rules.size() || a.queries.size() != b.queries.size()) return false;
    for (std::size_t i = 0; i < a.rules.size(); ++i) {
        const Rule &x = a.rules[i], &y = b.rules[i];
        if (x.kind != y.kind || x.variables != y.variables || !equal_atoms(x.body, y.body) ||
            !equal_atoms(x.head, y.head))
            return false;
    }
    for (std::size_t i = 0; i < a.queries.size(); ++i) {
        const Query &x = a.queries[i], &y = b.queries[i];
        if (x.projected != y.projected || !equal_atoms(x.body, y.body)) return false;
    }
    return true;
}

}  // namespace kb::flogic
