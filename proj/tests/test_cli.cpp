#include <doctest.h>

#include <string>

#include "support/helpers.hpp"

using kbtest::CmdResult;
using kbtest::contains;
using kbtest::count_occurrences;
using kbtest::fixture_path;
using kbtest::run_kbctl;
using kbtest::slurp;
using kbtest::TempDir;

namespace {

// A workspace primed with the golden ontology (and optional extras).
TempDir golden_ws(const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    TempDir dir;
    dir.copy_fixture("golden/ontology.flo", "ontology.flo");
    for (const auto& [rel, name] : extra) dir.copy_fixture(rel, name);
    return dir;
}

}  // namespace

TEST_CASE("check passes the golden sources") {
    CmdResult r = run_kbctl("check " + fixture_path("golden/ontology.flo") + " " +
                            fixture_path("golden/researchers.flo") + " " +
                            fixture_path("golden/mustermann.q") + " " +
                            fixture_path("golden/mapping.map"));
    CHECK(r.exit_code == 0);
    CHECK(r.output == "ok\n");
}

TEST_CASE("check rejects an inconsistent hierarchy with exit 1") {
    TempDir dir;
    kbtest::spit(dir.file("cycle.flo"), "A :: B.\nB :: A.\n");
    CmdResult r = run_kbctl("check " + dir.file("cycle.flo"));
    CHECK(r.exit_code == 1);
    CHECK(contains(r.output, "onto.cycle"));
}

TEST_CASE("check reports unreadable files with exit 2") {
    CmdResult r = run_kbctl("check /nonexistent/missing.flo");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.output, "io.read"));
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run_kbctl("").exit_code == 2);
    CHECK(run_kbctl("frobnicate").exit_code == 2);
    CHECK(run_kbctl("check").exit_code == 2);  // files are required
    CHECK(run_kbctl("query").exit_code == 2);  // needs -q or -f
    CmdResult both = run_kbctl("query -q 'FORALL X <- X : A.' -f also.q");
    CHECK(both.exit_code == 2);
    CmdResult modes = run_kbctl("--strict --lenient check x.flo");
    CHECK(modes.exit_code == 2);
    CHECK(contains(modes.output, "mutually exclusive"));
}

TEST_CASE("querying a missing workspace exits 2") {
    CmdResult r = run_kbctl("-w /nonexistent/nowhere query -q 'FORALL X <- X : TPerson.'");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.output, "ws.io"));
}

TEST_CASE("the cooperation query answers through the command line") {
    TempDir ws = golden_ws({{"golden/researchers.flo", "researchers.flo"}});
    CmdResult r =
        run_kbctl("-w " + ws.str() + " query -f " + fixture_path("golden/mustermann.q"));
    CHECK(r.exit_code == 0);
    CHECK(r.output == "NAME\n\"Schmidt\"\n\"Weber\"\n");

    CmdResult tsv = run_kbctl("-w " + ws.str() + " query --tsv -f " +
                              fixture_path("golden/mustermann.q"));
    CHECK(tsv.output == "NAME\n\"Schmidt\"\n\"Weber\"\n");
}

TEST_CASE("inline query text works like a query file") {
    TempDir ws = golden_ws({{"golden/researchers.flo", "researchers.flo"}});
    CmdResult r = run_kbctl("-w " + ws.str() +
                            " query -q 'FORALL X <- X[HatName ->> \"Braun\"].'");
    CHECK(r.exit_code == 0);
    CHECK(r.output == "X\nbraun\n");
}

TEST_CASE("explain prints the witness and its derivation chain") {
    TempDir ws = golden_ws({{"golden/researchers.flo", "researchers.flo"}});
    CmdResult r = run_kbctl("-w " + ws.str() + " query --explain 2 -f " +
                            fixture_path("golden/mustermann.q"));
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "row 2: NAME = \"Weber\""));
    CHECK(contains(r.output, "rule 3 (equivalence, forward)"));
    CHECK(contains(r.output, "{PE1 = weber, PE2 = mustermann}"));
    CHECK(contains(r.output, "weber[KooperiertMit ->> mustermann]  (asserted)"));

    CmdResult out_of_range = run_kbctl("-w " + ws.str() + " query --explain 7 -f " +
                                       fixture_path("golden/mustermann.q"));
    CHECK(out_of_range.exit_code != 0);
}

TEST_CASE("the composite query narrows to a single researcher") {
    TempDir ws = golden_ws({{"golden/composite.flo", "composite.flo"}});
    CmdResult r =
        run_kbctl("-w " + ws.str() + " query -f " + fixture_path("golden/composite.q"));
    CHECK(r.exit_code == 0);
    CHECK(r.output == "NAME\n\"Schmidt\"\n");
}

TEST_CASE("ingest extracts, maps, stores and records the document") {
    TempDir ws = golden_ws({{"golden/mapping.map", "mapping.map"}});
    std::string doc = fixture_path("ingest/authors.rdf");
    CmdResult r = run_kbctl("-w " + ws.str() + " ingest " + doc);
    CHECK(r.exit_code == 0);
    CHECK(r.output == doc + ": 6 statements, 7 facts, 0 warnings\n");

    std::string snap = slurp(ws.file("facts.snap"));
    CHECK(snap ==
          "member \"Autor_1\" TPerson\n"
          "member \"Autor_2\" TPerson\n"
          "member \"Beispiel.pdf\" TVeroeffentlichung\n"
          "attr \"Autor_1\" HatName str \"Mustermann, Hans\"\n"
          "attr \"Autor_2\" HatName str \"Maier, Egon\"\n"
          "attr \"Beispiel.pdf\" HatAutor obj \"Autor_1\"\n"
          "attr \"Beispiel.pdf\" HatAutor obj \"Autor_2\"\n");

    std::string manifest = slurp(ws.file("kb.manifest"));
    CHECK(contains(manifest, "version 1\n"));
    CHECK(contains(manifest, "checksum "));
    CHECK(contains(manifest, "ontology ontology.flo\n"));
    CHECK(contains(manifest, "document " + doc + "\n"));

    // Ingesting the same document again changes nothing.
    CmdResult again = run_kbctl("-w " + ws.str() + " ingest " + doc);
    CHECK(again.exit_code == 0);
    CHECK(slurp(ws.file("facts.snap")) == snap);
    CHECK(count_occurrences(slurp(ws.file("kb.manifest")), "document ") == 1);

    // The stored facts are immediately queryable.
    CmdResult q = run_kbctl(
        "-w " + ws.str() +
        " query -q 'FORALL T <- T[HatAutor ->> A] and A[HatName ->> \"Maier, Egon\"].'");
    CHECK(q.output == "T\nBeispiel.pdf\n");
}

TEST_CASE("ingesting an empty description set succeeds with zero facts") {
    TempDir ws = golden_ws({{"golden/mapping.map", "mapping.map"}});
    std::string doc = fixture_path("rdf/empty.rdf");
    CmdResult r = run_kbctl("-w " + ws.str() + " ingest " + doc);
    CHECK(r.exit_code == 0);
    CHECK(r.output == doc + ": 0 statements, 0 facts, 0 warnings\n");
}

TEST_CASE("ingest finds descriptions embedded in host pages") {
    TempDir ws = golden_ws({{"golden/mapping.map", "mapping.map"}});
    std::string doc = fixture_path("ingest/embedded.html");
    CmdResult r = run_kbctl("--lenient -w " + ws.str() + " ingest " + doc);
    CHECK(r.exit_code == 0);
    CHECK(r.output == doc + ": 1 statements, 2 facts, 0 warnings\n");
    CHECK(contains(slurp(ws.file("facts.snap")), "attr \"Beispiel.pdf\" HatTitel str"));
}

TEST_CASE("ingesting a missing document exits 2") {
    TempDir ws = golden_ws({{"golden/mapping.map", "mapping.map"}});
    CmdResult r = run_kbctl("-w " + ws.str() + " ingest /nonexistent/gone.rdf");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.output, "io.read"));
}

TEST_CASE("version show and bump advance the recorded version") {
    TempDir ws = golden_ws();
    CHECK(run_kbctl("-w " + ws.str() + " version show").output == "v1\n");

    CmdResult bump = run_kbctl("-w " + ws.str() + " version bump");
    CHECK(bump.exit_code == 0);
    CHECK(bump.output == "v2\n");
    CHECK(run_kbctl("-w " + ws.str() + " version show").output == "v2\n");

    std::string manifest = slurp(ws.file("kb.manifest"));
    CHECK(contains(manifest, "version 2\n"));
    CHECK(contains(manifest, "checksum "));
    CHECK(contains(manifest, "\nbump v2 20"));  // ISO timestamp follows
    CHECK(contains(manifest, "Z\n"));
}

TEST_CASE("bumping a broken ontology fails without touching the manifest") {
    TempDir dir;
    kbtest::spit(dir.file("bad.flo"), "A :: Missing.\n");
    CmdResult r = run_kbctl("-w " + dir.str() + " version bump");
    CHECK(r.exit_code == 1);
    CHECK(contains(r.output, "onto.unknown-class"));
    CHECK_FALSE(std::filesystem::exists(dir.file("kb.manifest")));
}

TEST_CASE("documents from an older vocabulary version warn and proceed") {
    TempDir ws = golden_ws({{"golden/mapping.map", "mapping.map"}});
    REQUIRE(run_kbctl("-w " + ws.str() + " version bump").output == "v2\n");

    std::string doc = fixture_path("ingest/authors_v1.rdf");
    CmdResult r = run_kbctl("-w " + ws.str() + " ingest " + doc);
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, ": 6 statements, 7 facts, 1 warnings\n"));
    CHECK(contains(r.output, "ver.older"));
    CHECK(contains(r.output, "targets ontology version 1"));
    CHECK(contains(slurp(ws.file("kb.manifest")), "document " + doc));
}

TEST_CASE("documents matching the current version ingest silently") {
    TempDir ws = golden_ws({{"golden/mapping.map", "mapping.map"}});
    REQUIRE(run_kbctl("-w " + ws.str() + " version bump").output == "v2\n");

    std::string doc = fixture_path("ingest/authors_v2.rdf");
    CmdResult r = run_kbctl("-w " + ws.str() + " ingest " + doc);
    CHECK(r.exit_code == 0);
    CHECK(r.output == doc + ": 6 statements, 7 facts, 0 warnings\n");
}

TEST_CASE("documents from a newer vocabulary version are rejected") {
    TempDir ws = golden_ws({{"golden/mapping.map", "mapping.map"}});
    REQUIRE(run_kbctl("-w " + ws.str() + " version bump").output == "v2\n");

    std::string doc = fixture_path("ingest/authors_v3.rdf");
    CmdResult r = run_kbctl("-w " + ws.str() + " ingest " + doc);
    CHECK(r.exit_code == 1);
    CHECK(contains(r.output, ": 6 statements, 0 facts, 0 warnings\n"));
    CHECK(contains(r.output, "ver.newer"));
    CHECK(contains(r.output, "statements rejected"));
    // Nothing was persisted.
    CHECK_FALSE(std::filesystem::exists(ws.file("facts.snap")));
    CHECK_FALSE(contains(slurp(ws.file("kb.manifest")), "document"));
}

TEST_CASE("edited ontology sources block ingest until a bump certifies them") {
    TempDir ws = golden_ws({{"golden/mapping.map", "mapping.map"}});
    std::string doc = fixture_path("ingest/authors.rdf");
    REQUIRE(run_kbctl("-w " + ws.str() + " ingest " + doc).exit_code == 0);

    kbtest::spit(ws.file("ontology.flo"),
                 kbtest::read_fixture("golden/ontology.flo") + "\n// edited\n");
    CmdResult blocked = run_kbctl("-w " + ws.str() + " ingest " + doc);
    CHECK(blocked.exit_code == 1);
    CHECK(contains(blocked.output, "ver.stale"));

    REQUIRE(run_kbctl("-w " + ws.str() + " version bump").exit_code == 0);
    CHECK(run_kbctl("-w " + ws.str() + " ingest " + doc).exit_code == 0);
}

TEST_CASE("check validates documents against their DTD") {
    std::string base = fixture_path("xml/");
    CHECK(run_kbctl("check " + base + "person.xml").output == "ok\n");
    CHECK(run_kbctl("check " + base + "person_internal.xml").output == "ok\n");

    CmdResult missing = run_kbctl("check " + base + "person_missing_email.xml");
    CHECK(missing.exit_code == 1);
    CHECK(count_occurrences(missing.output, "dtd.content") == 1);
    CHECK(contains(missing.output,
                   "element 'TPerson': expected 'TEmail' after 'TName', found 'TTelefon'"));

    CmdResult reordered = run_kbctl("check " + base + "person_reordered.xml");
    CHECK(reordered.exit_code == 1);
    CHECK(count_occurrences(reordered.output, "dtd.content") == 1);
    CHECK(contains(reordered.output,
                   "expected 'TName' after start of element, found 'TEmail'"));
}

TEST_CASE("lenient checks recover from the damaged description listings") {
    std::string base = fixture_path("rdf/");
    for (const char* name :
         {"simple.rdf", "structured.rdf", "bag.rdf", "title.rdf", "bag_serialization.rdf",
          "bag_abbreviated.rdf", "empty.rdf"}) {
        CAPTURE(name);
        CmdResult r = run_kbctl("--lenient check " + base + name);
        CHECK(r.exit_code == 0);
        CHECK(contains(r.output, "ok\n"));
        CHECK_FALSE(contains(r.output, "error"));
    }
    CmdResult attach = run_kbctl("--lenient check " + base + "structured.rdf");
    CHECK(contains(attach.output, "attached to 'Autor_1'"));

    // Strict mode turns the damage into hard errors.
    CmdResult strict = run_kbctl("check " + base + "structured.rdf");
    CHECK(strict.exit_code == 1);
}

TEST_CASE("repeated runs of the full pipeline are byte-identical") {
    auto run_once = [](const TempDir& ws) {
        std::string out;
        out += run_kbctl("check " + ws.file("ontology.flo")).output;
        out += run_kbctl("-w " + ws.str() + " ingest " + fixture_path("ingest/authors.rdf"))
                   .output;
        out += run_kbctl("-w " + ws.str() +
                         " query -q 'FORALL T, N <- T[HatAutor ->> A] and A[HatName ->> N].'")
                   .output;
        out += slurp(ws.file("facts.snap"));
        out += slurp(ws.file("kb.manifest"));
        return out;
    };
    TempDir first = golden_ws({{"golden/mapping.map", "mapping.map"}});
    TempDir second = golden_ws({{"golden/mapping.map", "mapping.map"}});
    std::string a = run_once(first);
    std::string b = run_once(second);
    CHECK(a == b);
    CHECK(kbtest::contains(a, "Maier, Egon"));
}
