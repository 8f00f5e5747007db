#pragma once

#include <string>
#include <vector>

#include "kb/ontology.hpp"

namespace kb::flogic {

// A term in an atom: a FORALL-bound variable, a bare identifier (an object
// id; in query bodies identifiers unknown to the knowledge base are treated
// as existential variables at evaluation time), or a string literal.
struct Term {
    enum class Kind { Variable, Identifier, Literal };
    Kind kind = Kind::Identifier;
    std::string text;
    SourceRef at;

    bool operator==(const Term& o) const { return kind == o.kind && text == o.text; }
};

inline Term var_term(std::string name) { return {Term::Kind::Variable, std::move(name), {}}; }
inline Term id_term(std::string name) { return {Term::Kind::Identifier, std::move(name), {}}; }
inline Term lit_term(std::string text) { return {Term::Kind::Literal, std::move(text), {}}; }

// "subject : Class" or "subject[Attribute ->> value]".
struct Atom {
    enum class Kind { Membership, Attribute };
    Kind kind = Kind::Membership;
    Term subject;
    std::string name;  // class or attribute
    Term value;        // Attribute only
    SourceRef at;

    bool operator==(const Atom& o) const {
        return kind == o.kind && subject == o.subject && name == o.name &&
               (kind == Kind::Membership || value == o.value);
    }
};

inline Atom membership_atom(Term subject, std::string cls) {
    return {Atom::Kind::Membership, std::move(subject), std::move(cls), {}, {}};
}
inline Atom attribute_atom(Term subject, std::string attr, Term value) {
    return {Atom::Kind::Attribute, std::move(subject), std::move(attr), std::move(value), {}};
}

// One ground statement, e.g. "pr1 : TProjekt[HatKunde ->> or1]." — a
// membership plus any number of attribute atoms on the same subject.
struct FactStatement {
    std::vector<Atom> atoms;
    SourceRef at;
};

struct Rule {
    enum class Kind { Implication, Equivalence };
    Kind kind = Kind::Implication;
    std::vector<std::string> variables;  // FORALL list, source order
    std::vector<Atom> body;
    std::vector<Atom> head;
    SourceRef at;
};

struct Query {
    std::vector<std::string> projected;  // FORALL list, source order
    std::vector<Atom> body;
    SourceRef at;
};

struct Program {
    std::vector<ClassDecl> class_decls;  // one entry per source statement
    std::vector<AttributeSignature> signatures;
    std::vector<FactStatement> facts;
    std::vector<Rule> rules;
    std::vector<Query> queries;
};

// Structural comparison ignoring source positions. Fact statements are
// compared as one flattened atom sequence, so statement grouping does not
// matter.
bool equal_program(const Program& a, const Program& b);
bool equal_atoms(const std::vector<Atom>& a, const std::vector<Atom>& b);

}  // namespace kb::flogic
