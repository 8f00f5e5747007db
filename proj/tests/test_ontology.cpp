#include <doctest.h>

#include <set>
#include <string>

#include "kb/diagnostics.hpp"
#include "kb/flogic_loader.hpp"
#include "kb/flogic_parser.hpp"
#include "kb/ontology.hpp"
#include "support/helpers.hpp"

using namespace kb;
using kbtest::read_fixture;

namespace {

// Loads the golden research ontology into a fresh knowledge base.
KnowledgeBase golden_kb() {
    Diagnostics diags;
    flogic::Program prog =
        flogic::parse_program(read_fixture("golden/ontology.flo"), "ontology.flo", diags);
    KnowledgeBase kb;
    REQUIRE(flogic::load_program(prog, kb, Mode::Strict, diags));
    REQUIRE(diags.empty());
    return kb;
}

}  // namespace

TEST_CASE("the subclass relation is reflexive and transitive") {
    KnowledgeBase kb = golden_kb();
    CHECK(kb.is_subclass("TForscher", "TForscher"));
    CHECK(kb.is_subclass("TForscher", "TAngestellter"));
    CHECK(kb.is_subclass("TForscher", "TPerson"));
    CHECK(kb.is_subclass("TForscher", "TObject"));
    CHECK(kb.is_subclass("TForscher", kRootClass));
    CHECK_FALSE(kb.is_subclass("TPerson", "TForscher"));
    CHECK_FALSE(kb.is_subclass("TProjekt", "TPerson"));
}

TEST_CASE("ancestors are strict (the class itself is excluded)") {
    KnowledgeBase kb = golden_kb();
    const std::set<std::string>& anc = kb.ancestors("TForscher");
    CHECK(anc == std::set<std::string>{"TAngestellter", "TPerson", "TObject", kRootClass});
    CHECK(kb.ancestors(kRootClass).empty());
}

TEST_CASE("effective signatures are inherited down the lattice") {
    KnowledgeBase kb = golden_kb();
    const auto& eff = kb.effective_signature("TForscher");
    CHECK(eff.size() == 7);
    CHECK(eff.at("HatName") == kStringType);
    CHECK(eff.at("HatErfahrungMit") == "TOrganisation");
    CHECK(eff.at("HatArbeitgeber") == "TOrganisation");
    CHECK(eff.at("KooperiertMit") == "TPerson");
    CHECK(eff.count("HatProjektname") == 0);  // TProjekt is not an ancestor
    CHECK(kb.effective_signature("TObject").empty());
}

TEST_CASE("declared attributes and their accepted value kinds are visible") {
    KnowledgeBase kb = golden_kb();
    CHECK(kb.attribute_declared("KooperiertMit"));
    CHECK_FALSE(kb.attribute_declared("Nichts"));
    CHECK(kb.value_kinds_for("HatName") == std::set<ValueKind>{ValueKind::Literal});
    CHECK(kb.value_kinds_for("KooperiertMit") == std::set<ValueKind>{ValueKind::Object});
    CHECK(kb.value_kinds_for("Nichts").empty());
}

TEST_CASE("unknown superclasses fail finalize") {
    KnowledgeBase kb;
    Diagnostics diags;
    kb.declare_class("A", {"Missing"}, diags);
    CHECK_FALSE(kb.finalize(diags));
    CHECK(diags.has_code("onto.unknown-class"));
    CHECK_FALSE(kb.finalized());
}

TEST_CASE("hierarchy cycles fail finalize") {
    KnowledgeBase kb;
    Diagnostics diags;
    kb.declare_class("A", {"B"}, diags);
    kb.declare_class("B", {"A"}, diags);
    CHECK_FALSE(kb.finalize(diags));
    CHECK(diags.has_code("onto.cycle"));
}

TEST_CASE("redeclaration is idempotent but conflicting supers are an error") {
    KnowledgeBase kb;
    Diagnostics diags;
    kb.declare_class("A", {}, diags);
    kb.declare_class("A", {}, diags);
    CHECK(diags.empty());
    kb.declare_class("B", {}, diags);
    kb.declare_class("A", {"B"}, diags);
    CHECK(diags.has_code("onto.super-conflict"));
}

TEST_CASE("the builtin string type name cannot be declared as a class") {
    KnowledgeBase kb;
    Diagnostics diags;
    kb.declare_class(kStringType, {}, diags);
    CHECK(diags.has_code("onto.reserved"));
}

TEST_CASE("redeclaring the root class with no supers is a no-op") {
    KnowledgeBase kb;
    Diagnostics diags;
    kb.declare_class(kRootClass, {}, diags);
    CHECK(diags.empty());
    kb.declare_class(kRootClass, {"Anything"}, diags);
    CHECK(diags.has_code("onto.super-conflict"));
}

TEST_CASE("conflicting inherited value types are a signature conflict") {
    KnowledgeBase kb;
    Diagnostics diags;
    kb.declare_class("A", {}, diags);
    kb.declare_class("B", {"A"}, diags);
    kb.declare_class("C", {}, diags);
    kb.add_signature("A", "X", kStringType, diags);
    kb.add_signature("B", "X", "C", diags);
    CHECK_FALSE(kb.finalize(diags));
    CHECK(diags.has_code("onto.sig-conflict"));
}

TEST_CASE("agreeing redeclarations of an attribute are fine") {
    KnowledgeBase kb;
    Diagnostics diags;
    kb.declare_class("A", {}, diags);
    kb.declare_class("B", {"A"}, diags);
    kb.add_signature("A", "X", kStringType, diags);
    kb.add_signature("B", "X", kStringType, diags);
    CHECK(kb.finalize(diags));
    CHECK(diags.empty());
}

TEST_CASE("a value type may be the owner itself but not a proper subclass") {
    KnowledgeBase self;
    Diagnostics diags;
    self.declare_class("A", {}, diags);
    self.add_signature("A", "Knows", "A", diags);
    CHECK(self.finalize(diags));
    CHECK(diags.empty());

    KnowledgeBase sub;
    Diagnostics diags2;
    sub.declare_class("A", {}, diags2);
    sub.declare_class("B", {"A"}, diags2);
    sub.add_signature("A", "Child", "B", diags2);
    CHECK_FALSE(sub.finalize(diags2));
    CHECK(diags2.has_code("onto.sig-subclass"));
}

TEST_CASE("signature value types must be declared or STRING") {
    KnowledgeBase kb;
    Diagnostics diags;
    kb.declare_class("A", {}, diags);
    kb.add_signature("A", "X", "Ghost", diags);
    CHECK_FALSE(kb.finalize(diags));
    CHECK(diags.has_code("onto.unknown-class"));
}

TEST_CASE("facts may only be asserted after finalize") {
    KnowledgeBase kb;
    Diagnostics diags;
    kb.declare_class("A", {}, diags);
    CHECK_FALSE(kb.assert_fact(Fact::membership("a", "A"), Mode::Strict, diags));
    CHECK(diags.has_code("onto.not-finalized"));
}

TEST_CASE("strict assertion type-checks facts") {
    KnowledgeBase kb = golden_kb();
    Diagnostics diags;

    SUBCASE("membership in an undeclared class") {
        CHECK_FALSE(kb.assert_fact(Fact::membership("x", "Ghost"), Mode::Strict, diags));
        CHECK(diags.has_code("onto.unknown-class"));
    }
    SUBCASE("attribute outside every effective signature") {
        REQUIRE(kb.assert_fact(Fact::membership("p", "TProjekt"), Mode::Strict, diags));
        CHECK_FALSE(kb.assert_fact(
            Fact::attribute("p", "KooperiertMit", object_value("q")), Mode::Strict, diags));
        CHECK(diags.has_code("onto.unknown-attr"));
    }
    SUBCASE("value kind mismatch") {
        REQUIRE(kb.assert_fact(Fact::membership("f", "TForscher"), Mode::Strict, diags));
        CHECK_FALSE(kb.assert_fact(
            Fact::attribute("f", "KooperiertMit", literal_value("text")), Mode::Strict, diags));
        CHECK(diags.has_code("onto.kind-mismatch"));
        CHECK_FALSE(kb.assert_fact(Fact::attribute("f", "HatName", object_value("f")),
                                   Mode::Strict, diags));
    }
}

TEST_CASE("lenient assertion keeps ill-typed facts with a warning") {
    KnowledgeBase kb = golden_kb();
    Diagnostics diags;
    Fact odd = Fact::attribute("loner", "KooperiertMit", object_value("x"));
    CHECK(kb.assert_fact(odd, Mode::Lenient, diags));
    CHECK_FALSE(diags.has_errors());
    CHECK(diags.warning_count() == 1);
    CHECK(kb.has_fact(odd));
}

TEST_CASE("duplicates are absorbed silently") {
    KnowledgeBase kb = golden_kb();
    Diagnostics diags;
    Fact f = Fact::membership("m", "TForscher");
    CHECK(kb.assert_fact(f, Mode::Strict, diags));
    std::size_t count = kb.facts().size();
    CHECK(kb.assert_fact(f, Mode::Strict, diags));
    CHECK(kb.facts().size() == count);
    CHECK(diags.empty());
}

TEST_CASE("batch assertion is order independent") {
    KnowledgeBase kb = golden_kb();
    Diagnostics diags;
    // The attribute fact precedes the membership that makes it well-typed.
    std::vector<Fact> batch = {
        Fact::attribute("m", "HatName", literal_value("M")),
        Fact::membership("m", "TForscher"),
    };
    CHECK(kb.assert_facts(batch, Mode::Strict, diags) == 2);
    CHECK(diags.empty());
    CHECK(kb.has_fact(batch[0]));
}

TEST_CASE("attribute_applies respects memberships and inheritance") {
    KnowledgeBase kb = golden_kb();
    Diagnostics diags;
    REQUIRE(kb.assert_fact(Fact::membership("f", "TForscher"), Mode::Strict, diags));
    CHECK(kb.attribute_applies("f", "HatName", ValueKind::Literal));        // inherited
    CHECK(kb.attribute_applies("f", "KooperiertMit", ValueKind::Object));   // own
    CHECK_FALSE(kb.attribute_applies("f", "KooperiertMit", ValueKind::Literal));
    CHECK_FALSE(kb.attribute_applies("f", "HatProjektname", ValueKind::Literal));
    CHECK_FALSE(kb.attribute_applies("ghost", "HatName", ValueKind::Literal));
}

TEST_CASE("classes_of lists asserted memberships without closure") {
    KnowledgeBase kb = golden_kb();
    Diagnostics diags;
    REQUIRE(kb.assert_fact(Fact::membership("f", "TForscher"), Mode::Strict, diags));
    CHECK(kb.classes_of("f") == std::set<std::string>{"TForscher"});
}

TEST_CASE("value and fact rendering") {
    CHECK(render_value(object_value("obj1")) == "obj1");
    CHECK(render_value(literal_value("a \"b\"")) == "\"a \\\"b\\\"\"");
    CHECK(render_fact(Fact::membership("o", "C")) == "o : C");
    CHECK(render_fact(Fact::attribute("o", "A", literal_value("v"))) == "o[A ->> \"v\"]");
}
