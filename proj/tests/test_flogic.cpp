#include <doctest.h>

#include <string>

#include "kb/diagnostics.hpp"
#include "kb/flogic_ast.hpp"
#include "kb/flogic_loader.hpp"
#include "kb/flogic_parser.hpp"
#include "kb/flogic_printer.hpp"
#include "kb/ontology.hpp"
#include "support/helpers.hpp"

using namespace kb;
using namespace kb::flogic;
using kbtest::read_fixture;

TEST_CASE("golden ontology parses with the expected statement counts") {
    Diagnostics diags;
    Program prog = parse_program(read_fixture("golden/ontology.flo"), "ontology.flo", diags);
    CHECK(diags.empty());
    CHECK(prog.class_decls.size() == 7);
    CHECK(prog.signatures.size() == 16);
    CHECK(prog.facts.empty());
    CHECK(prog.rules.size() == 3);
    CHECK(prog.queries.empty());

    REQUIRE(prog.rules.size() == 3);
    CHECK(prog.rules[0].kind == Rule::Kind::Implication);
    CHECK(prog.rules[1].kind == Rule::Kind::Equivalence);
    CHECK(prog.rules[2].kind == Rule::Kind::Equivalence);

    const Rule& experience = prog.rules[0];
    CHECK(experience.variables == std::vector<std::string>{"PE1", "PR1", "OR1"});
    REQUIRE(experience.body.size() == 3);
    CHECK(experience.body[0] == membership_atom(var_term("PR1"), "TProjekt"));
    CHECK(experience.body[1] == attribute_atom(var_term("PR1"), "HatMitglied", var_term("PE1")));
    CHECK(experience.body[2] == attribute_atom(var_term("PR1"), "HatKunde", var_term("OR1")));
    REQUIRE(experience.head.size() == 2);
    CHECK(experience.head[0] == membership_atom(var_term("PE1"), "TPerson"));
    CHECK(experience.head[1] ==
          attribute_atom(var_term("PE1"), "HatErfahrungMit", var_term("OR1")));
}

TEST_CASE("fact statements flatten to ground facts") {
    Diagnostics diags;
    Program prog =
        parse_program(read_fixture("golden/researchers.flo"), "researchers.flo", diags);
    CHECK(diags.empty());
    REQUIRE(prog.facts.size() == 6);

    // "mustermann : TForscher[HatName ->> ...]." is one statement with a
    // membership atom and an attribute atom.
    std::vector<Fact> first = statement_facts(prog.facts[0], diags);
    CHECK(diags.empty());
    REQUIRE(first.size() == 2);
    CHECK(first[0] == Fact::membership("mustermann", "TForscher"));
    CHECK(first[1] ==
          Fact::attribute("mustermann", "HatName", literal_value("Mustermann")));

    // Attribute-only statements have no membership atom.
    std::vector<Fact> edge = statement_facts(prog.facts[4], diags);
    REQUIRE(edge.size() == 1);
    CHECK(edge[0] == Fact::attribute("mustermann", "KooperiertMit", object_value("schmidt")));
}

TEST_CASE("facts with variables are rejected as not ground") {
    Diagnostics diags;
    FactStatement stmt;
    stmt.atoms.push_back(attribute_atom(id_term("a"), "Attr", var_term("X")));
    std::vector<Fact> facts = statement_facts(stmt, diags);
    CHECK(facts.empty());
    CHECK(diags.has_errors());
}

TEST_CASE("the ellipsis shorthand is rejected with a pointed message") {
    Diagnostics diags;
    Program prog = parse_program("TPerson[HatName ==> STRING ...].", "t.flo", diags);
    CHECK(diags.has_errors());
    CHECK(diags.has_code("parse.lex"));
    bool mentioned = false;
    for (const auto& d : diags.items())
        if (kbtest::contains(d.message, "ellipsis")) mentioned = true;
    CHECK(mentioned);
    (void)prog;
}

TEST_CASE("printer output reparses to a structurally equal program") {
    for (const char* rel : {"golden/ontology.flo", "golden/researchers.flo",
                            "golden/projects.flo", "golden/composite.flo"}) {
        CAPTURE(rel);
        Diagnostics diags;
        Program prog = parse_program(read_fixture(rel), rel, diags);
        REQUIRE(diags.empty());
        std::string printed = print_program(prog);
        Diagnostics diags2;
        Program again = parse_program(printed, "printed", diags2);
        CHECK(diags2.empty());
        CHECK(equal_program(prog, again));
    }
}

TEST_CASE("queries print and reparse") {
    Diagnostics diags;
    auto query = parse_query(read_fixture("golden/mustermann.q"), "mustermann.q", diags);
    REQUIRE(query.has_value());
    CHECK(diags.empty());
    CHECK(query->projected == std::vector<std::string>{"NAME"});
    CHECK(query->body.size() == 5);

    Diagnostics diags2;
    auto again = parse_query(print_query(*query), "printed", diags2);
    REQUIRE(again.has_value());
    CHECK(equal_atoms(query->body, again->body));
    CHECK(query->projected == again->projected);
}

TEST_CASE("parse_query rejects input that is not exactly one query") {
    Diagnostics diags;
    CHECK_FALSE(parse_query("TObject.", "t.q", diags).has_value());
    CHECK(diags.has_errors());

    Diagnostics two;
    CHECK_FALSE(parse_query("FORALL X <- X : A. FORALL Y <- Y : A.", "t.q", two).has_value());
    CHECK(two.has_errors());
}

TEST_CASE("duplicate FORALL variables are flagged") {
    Diagnostics diags;
    parse_program("FORALL X, X <- X : TPerson.", "t.flo", diags);
    CHECK(diags.has_code("parse.dup-var"));
}

TEST_CASE("rules with head-only variables are unsafe") {
    Diagnostics diags;
    Program prog =
        parse_program("FORALL X, Y X : TPerson -> Y : TPerson.", "t.flo", diags);
    CHECK(diags.has_code("parse.unsafe-rule"));
    CHECK(diags.has_errors());
    CHECK(prog.rules.size() == 1);  // kept for inspection; errors gate loading
}

TEST_CASE("equivalences must use the same variables on both sides") {
    Diagnostics diags;
    parse_program("FORALL X, Y X[KooperiertMit ->> Y] <-> X : TForscher.", "t.flo", diags);
    CHECK(diags.has_code("parse.unsafe-rule"));
}

TEST_CASE("queries projecting variables absent from the body are unsafe") {
    Diagnostics diags;
    Program prog = parse_program("FORALL X, Y <- Y : TPerson.", "t.flo", diags);
    CHECK(diags.has_code("parse.unsafe-query"));
    CHECK(diags.has_errors());
    CHECK(prog.queries.size() == 1);
}

TEST_CASE("parse errors skip to the next statement and keep going") {
    Diagnostics diags;
    Program prog = parse_program("Foo ::.\nBar.\n", "t.flo", diags);
    CHECK(diags.has_errors());
    REQUIRE(prog.class_decls.size() == 1);
    CHECK(prog.class_decls[0].name == "Bar");
}

TEST_CASE("diagnostics carry positions") {
    Diagnostics diags;
    parse_program("A.\nB ::.\n", "t.flo", diags);
    REQUIRE(diags.has_errors());
    const Diagnostic& d = diags.items().front();
    CHECK(d.at.file == "t.flo");
    CHECK(d.at.pos.line == 2);
}

TEST_CASE("split class declarations merge their superclass sets") {
    Diagnostics diags;
    Program prog = parse_program("A.\nB.\nC.\nA :: B.\nA :: C.\n", "t.flo", diags);
    REQUIRE(diags.empty());
    KnowledgeBase kb;
    CHECK(load_program(prog, kb, Mode::Strict, diags));
    CHECK(diags.empty());
    CHECK(kb.is_subclass("A", "B"));
    CHECK(kb.is_subclass("A", "C"));
}

TEST_CASE("empty-bracket declarations are plain class declarations") {
    Diagnostics diags;
    Program prog = parse_program("Thing[].", "t.flo", diags);
    CHECK(diags.empty());
    REQUIRE(prog.class_decls.size() == 1);
    CHECK(prog.class_decls[0].name == "Thing");
    CHECK(prog.class_decls[0].supers.empty());
}

TEST_CASE("signature entries accept any of the three separators") {
    Diagnostics diags;
    Program prog = parse_program(
        "A[X ==> STRING; Y ==> STRING, Z ==> STRING\n  W ==> STRING].", "t.flo", diags);
    CHECK(diags.empty());
    CHECK(prog.signatures.size() == 4);
    for (const auto& s : prog.signatures) CHECK(s.owner == "A");
}

TEST_CASE("string literals keep escapes and exact spacing") {
    Diagnostics diags;
    Program prog =
        parse_program("a : A[X ->> \"line \\\"quoted\\\" end \"].", "t.flo", diags);
    REQUIRE(prog.facts.size() == 1);
    std::vector<Fact> facts = statement_facts(prog.facts[0], diags);
    REQUIRE(facts.size() == 2);
    CHECK(facts[1].value == literal_value("line \"quoted\" end "));
}

TEST_CASE("comments are skipped") {
    Diagnostics diags;
    Program prog = parse_program("// header\nA. // trailing\n// tail\n", "t.flo", diags);
    CHECK(diags.empty());
    CHECK(prog.class_decls.size() == 1);
}

TEST_CASE("loading the full golden program asserts every ground fact") {
    Diagnostics diags;
    std::string text =
        read_fixture("golden/ontology.flo") + "\n" + read_fixture("golden/researchers.flo");
    Program prog = parse_program(text, "golden", diags);
    REQUIRE(diags.empty());
    KnowledgeBase kb;
    REQUIRE(load_program(prog, kb, Mode::Strict, diags));
    CHECK(diags.empty());
    CHECK(kb.facts().size() == 10);  // 4 memberships + 6 attribute facts
    CHECK(kb.has_fact(Fact::membership("braun", "TForscher")));
    CHECK(kb.has_fact(Fact::attribute("weber", "KooperiertMit", object_value("mustermann"))));
}
