#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kb/diagnostics.hpp"

namespace kb {

// Predefined root class; every declared class sits (transitively) beneath it.
inline constexpr const char* kRootClass = "Object";
// The only builtin value type; everything else must be a declared class.
inline constexpr const char* kStringType = "STRING";

enum class ValueKind { Object, Literal };

// An attribute value: either an opaque object id or a string literal.
struct Value {
    ValueKind kind = ValueKind::Object;
    std::string text;

    friend auto operator<=>(const Value&, const Value&) = default;
};

inline Value object_value(std::string id) { return {ValueKind::Object, std::move(id)}; }
inline Value literal_value(std::string text) { return {ValueKind::Literal, std::move(text)}; }

// Renders a literal with surrounding quotes, escaping '"' and '\'.
std::string quote_literal(const std::string& text);
// Object ids render bare, literals quoted.
std::string render_value(const Value& v);

struct Fact {
    enum class Kind { Membership, Attribute };

    Kind kind = Kind::Membership;
    std::string object;  // subject
    std::string name;    // class name (Membership) or attribute name (Attribute)
    Value value;         // Attribute only

    static Fact membership(std::string object, std::string cls) {
        return {Kind::Membership, std::move(object), std::move(cls), {}};
    }
    static Fact attribute(std::string object, std::string attr, Value value) {
        return {Kind::Attribute, std::move(object), std::move(attr), std::move(value)};
    }

    friend auto operator<=>(const Fact&, const Fact&) = default;
};

// "obj : Class" or "obj[Attr ->> value]" (no trailing period).
std::string render_fact(const Fact& f);

struct FactHash {
    std::size_t operator()(const Fact& f) const;
};

struct ClassDecl {
    std::string name;
    std::set<std::string> supers;  // direct superclasses; empty = directly under Object
    SourceRef at;
};

struct AttributeSignature {
    std::string owner;       // declaring class
    std::string attribute;   // set-valued attribute name
    std::string value_type;  // declared class name or STRING
    SourceRef at;
};

// A deductive knowledge base: a class lattice, inherited attribute
// signatures, and a duplicate-free set of facts. Classes and signatures are
// declared first, then finalize() resolves the hierarchy; facts may only be
// asserted against a finalized schema.
class KnowledgeBase {
public:
    KnowledgeBase();

    // Declaration phase. Forward references to superclasses are allowed and
    // resolved by finalize(). Redeclaring a class with the identical super
    // set is a no-op; a different super set is a conflict.
    void declare_class(const std::string& name, const std::set<std::string>& supers,
                       Diagnostics& diags, const SourceRef& at = {});
    void add_signature(const std::string& owner, const std::string& attribute,
                       const std::string& value_type, Diagnostics& diags,
                       const SourceRef& at = {});

    // Resolves the hierarchy: checks for unknown superclasses, cycles and
    // signature conflicts, and precomputes ancestor sets and effective
    // signatures. Returns false (and stays unusable) on errors.
    bool finalize(Diagnostics& diags);
    bool finalized() const { return finalized_; }

    bool class_declared(const std::string& name) const;
    const std::map<std::string, ClassDecl>& classes() const { return classes_; }
    const std::vector<AttributeSignature>& signatures() const { return signatures_; }

    // Reflexive-transitive subclass test over the finalized lattice.
    bool is_subclass(const std::string& sub, const std::string& sup) const;
    // As above, but reports unknown class names as diagnostics.
    bool is_subclass_checked(const std::string& sub, const std::string& sup,
                             Diagnostics& diags) const;
    // Strict ancestors (excludes the class itself).
    const std::set<std::string>& ancestors(const std::string& cls) const;

    // Union of the class's own and inherited signatures: attribute -> type.
    const std::map<std::string, std::string>& effective_signature(const std::string& cls) const;

    // True if any class declares the attribute.
    bool attribute_declared(const std::string& attribute) const;
    // Value kinds the attribute accepts anywhere in the schema.
    std::set<ValueKind> value_kinds_for(const std::string& attribute) const;

    // Asserts one fact. Strict mode rejects facts that do not type-check
    // (unknown class, attribute absent from the subject's effective
    // signature, value kind mismatch); lenient mode keeps them and warns.
    // Duplicates are absorbed silently. Returns true if the fact is stored.
    bool assert_fact(const Fact& f, Mode mode, Diagnostics& diags,
                     const SourceRef& at = {});
    // Batch assertion: memberships first, then attribute facts, so that the
    // result does not depend on the order of the input.
    std::size_t assert_facts(const std::vector<Fact>& facts, Mode mode, Diagnostics& diags);

    bool has_fact(const Fact& f) const;
    const std::vector<Fact>& facts() const { return facts_; }
    // Classes the object was asserted to be a member of (no closure).
    std::set<std::string> classes_of(const std::string& object) const;
    // True if the attribute is well-typed for the object under its current
    // memberships and the value kind matches some applicable signature.
    bool attribute_applies(const std::string& object, const std::string& attribute,
                           ValueKind kind) const;

private:
    std::map<std::string, ClassDecl> classes_;
    std::vector<AttributeSignature> signatures_;
    bool finalized_ = false;

    // Populated by finalize().
    std::map<std::string, std::set<std::string>> ancestors_;  // strict ancestors
    std::map<std::string, std::map<std::string, std::string>> effective_;
    std::set<std::string> declared_attributes_;

    std::vector<Fact> facts_;
    std::set<Fact> fact_set_;
    std::map<std::string, std::set<std::string>> memberships_;  // object -> classes

    bool check_fact(const Fact& f, Mode mode, Diagnostics& diags, const SourceRef& at) const;
};

}  // namespace kb
