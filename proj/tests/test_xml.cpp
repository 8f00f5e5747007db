#include <doctest.h>

#include <string>

#include "kb/diagnostics.hpp"
#include "kb/xml_parser.hpp"
#include "kb/xml_tree.hpp"
#include "support/helpers.hpp"

using namespace kb;
using namespace kb::xml;
using kbtest::read_fixture;

namespace {

XmlDocument parse_ok(const std::string& text, Mode mode, Diagnostics& diags) {
    auto doc = parse_xml(text, "test.xml", mode, diags);
    REQUIRE(doc.has_value());
    return std::move(*doc);
}

}  // namespace

TEST_CASE("a well-formed document parses cleanly with exact text") {
    Diagnostics diags;
    XmlDocument doc = parse_ok(read_fixture("xml/person.xml"), Mode::Strict, diags);
    CHECK(diags.empty());

    CHECK(doc.decl.has_value());
    CHECK(doc.decl->version == "1.0");
    CHECK(doc.doctype.present);
    CHECK(doc.doctype.root_name == "TPerson");
    CHECK(doc.doctype.system_id == "person.dtd");
    CHECK_FALSE(doc.doctype.has_internal);

    CHECK(doc.root.name.qualified() == "TPerson");
    auto children = doc.root.child_elements();
    REQUIRE(children.size() == 3);
    CHECK(children[0]->name.local == "TName");
    CHECK(children[1]->name.local == "TEmail");
    CHECK(children[2]->name.local == "TTelefon");

    // Character data is preserved byte for byte, including trailing blanks.
    auto name_parts = children[0]->child_elements();
    REQUIRE(name_parts.size() == 2);
    CHECK(name_parts[1]->text_content() == "Mustermann ");
    CHECK(children[1]->text_content() == "hm@xyz.de");
}

TEST_CASE("internal DTD subsets are captured verbatim") {
    Diagnostics diags;
    XmlDocument doc = parse_ok(read_fixture("xml/person_internal.xml"), Mode::Strict, diags);
    CHECK(diags.empty());
    CHECK(doc.doctype.present);
    CHECK(doc.doctype.has_internal);
    CHECK(kbtest::contains(doc.doctype.internal_subset, "<!ELEMENT TPerson"));
    CHECK(doc.doctype.system_id.empty());
}

TEST_CASE("attributes keep source order and support lookup") {
    Diagnostics diags;
    XmlDocument doc =
        parse_ok("<a x=\"1\" ns:y=\"2\"><b/></a>", Mode::Strict, diags);
    REQUIRE(doc.root.attrs.size() == 2);
    CHECK(doc.root.attrs[0].name.qualified() == "x");
    CHECK(doc.root.attrs[1].name.prefix == "ns");
    REQUIRE(doc.root.attr("ns:y") != nullptr);
    CHECK(*doc.root.attr("ns:y") == "2");
    CHECK(doc.root.attr("missing") == nullptr);
}

TEST_CASE("split_name separates the prefix") {
    CHECK(split_name("rdf:Description") == XmlName{"rdf", "Description"});
    CHECK(split_name("plain") == XmlName{"", "plain"});
}

TEST_CASE("entity and character references resolve in text and attributes") {
    Diagnostics diags;
    XmlDocument doc = parse_ok("<a t=\"&lt;x&gt;\">&amp;&#65;&#x42;&quot;&apos;</a>",
                               Mode::Strict, diags);
    CHECK(diags.empty());
    CHECK(*doc.root.attr("t") == "<x>");
    CHECK(doc.root.text_content() == "&AB\"'");
}

TEST_CASE("the Latin-1 named entities are understood") {
    Diagnostics diags;
    std::string out = resolve_entities("M&uuml;ller &amp; S&ouml;hne", Mode::Strict, diags);
    CHECK(diags.empty());
    CHECK(out == "M\xC3\xBCller & S\xC3\xB6hne");
}

TEST_CASE("unknown entities follow the mode") {
    Diagnostics strict;
    resolve_entities("a &nope; b", Mode::Strict, strict);
    CHECK(strict.has_errors());
    CHECK(strict.has_code("xml.entity"));

    Diagnostics lenient;
    std::string out = resolve_entities("a &nope; b", Mode::Lenient, lenient);
    CHECK(out == "a &nope; b");  // kept literally
    CHECK_FALSE(lenient.has_errors());
    CHECK(lenient.has_code("xml.entity"));
}

TEST_CASE("declared ISO-8859-1 input is transcoded to UTF-8") {
    Diagnostics diags;
    std::string text = "<?xml version=\"1.0\" encoding=\"ISO-8859-1\"?><a>M\xFCller</a>";
    XmlDocument doc = parse_ok(text, Mode::Strict, diags);
    CHECK(doc.root.text_content() == "M\xC3\xBCller");
}

TEST_CASE("an unsupported encoding aborts the parse") {
    Diagnostics diags;
    auto doc = parse_xml("<?xml version=\"1.0\" encoding=\"EBCDIC\"?><a/>", "t.xml",
                         Mode::Strict, diags);
    CHECK_FALSE(doc.has_value());
    CHECK(diags.has_code("xml.encoding"));
}

TEST_CASE("stray closing tags are skipped") {
    Diagnostics diags;
    XmlDocument doc = parse_ok("<a><b>x</b></c></a>", Mode::Lenient, diags);
    CHECK(diags.has_code("xml.stray-close"));
    CHECK_FALSE(diags.has_errors());
    CHECK(doc.root.child_elements().size() == 1);

    Diagnostics strict;
    parse_ok("<a><b>x</b></c></a>", Mode::Strict, strict);
    CHECK(strict.has_errors());  // same recovery, error severity
}

TEST_CASE("unterminated start tags assume a closing angle bracket") {
    Diagnostics diags;
    XmlDocument doc = parse_ok("<a\n<b>x</b></a>", Mode::Lenient, diags);
    CHECK(diags.has_code("xml.unterminated-start"));
    CHECK(doc.root.name.local == "a");
    REQUIRE(doc.root.child_elements().size() == 1);
    CHECK(doc.root.child_elements()[0]->text_content() == "x");
}

TEST_CASE("mismatched closing tags implicitly close inner elements") {
    Diagnostics diags;
    XmlDocument doc = parse_ok("<a><b><c>x</c></a>", Mode::Lenient, diags);
    CHECK(diags.has_code("xml.mismatch"));
    REQUIRE(doc.root.child_elements().size() == 1);
    CHECK(doc.root.child_elements()[0]->name.local == "b");
}

TEST_CASE("attributes with an empty name are tolerated") {
    Diagnostics diags;
    XmlDocument doc = parse_ok("<a><n =\"v\" /></a>", Mode::Lenient, diags);
    CHECK(diags.has_code("xml.attr-name"));
    auto children = doc.root.child_elements();
    REQUIRE(children.size() == 1);
    REQUIRE(children[0]->attrs.size() == 1);
    CHECK(children[0]->attrs[0].name.local.empty());
    CHECK(children[0]->attrs[0].value == "v");
}

TEST_CASE("duplicate attributes are flagged and lookup sees the first") {
    Diagnostics diags;
    XmlDocument doc = parse_ok("<a x=\"1\" x=\"2\"/>", Mode::Lenient, diags);
    CHECK(diags.has_code("xml.attr-dup"));
    REQUIRE(doc.root.attrs.size() == 2);  // source order preserved
    const std::string* value = doc.root.attr("x");
    REQUIRE(value != nullptr);
    CHECK(*value == "1");
}

TEST_CASE("comments, processing instructions and CDATA are handled") {
    Diagnostics diags;
    XmlDocument doc = parse_ok(
        "<a><!-- note --><?pi data?><![CDATA[<raw&>]]>tail</a>", Mode::Strict, diags);
    CHECK(diags.empty());
    CHECK(doc.root.text_content() == "<raw&>tail");
    CHECK(doc.root.child_elements().empty());
}

TEST_CASE("whitespace-only text runs are dropped") {
    Diagnostics diags;
    XmlDocument doc = parse_ok("<a>\n  <b/>\n</a>", Mode::Strict, diags);
    CHECK(doc.root.text_content().empty());
    CHECK(doc.root.children.size() == 1);
}

TEST_CASE("content after the root element is reported") {
    Diagnostics diags;
    XmlDocument doc = parse_ok("<a/><b/>", Mode::Lenient, diags);
    CHECK(diags.has_code("xml.trailing"));
    CHECK(doc.root.name.local == "a");
}

TEST_CASE("input without a root element yields nothing") {
    Diagnostics diags;
    CHECK_FALSE(parse_xml("", "t.xml", Mode::Lenient, diags).has_value());
    CHECK(diags.has_code("xml.no-root"));

    Diagnostics diags2;
    CHECK_FALSE(parse_xml("   just text   ", "t.xml", Mode::Lenient, diags2).has_value());
}

TEST_CASE("serialization round-trips structurally") {
    for (const char* rel : {"xml/person.xml", "xml/person_internal.xml"}) {
        CAPTURE(rel);
        Diagnostics diags;
        XmlDocument doc = parse_ok(read_fixture(rel), Mode::Strict, diags);
        std::string out = serialize(doc.root);
        Diagnostics diags2;
        XmlDocument again = parse_ok(out, Mode::Strict, diags2);
        CHECK(diags2.empty());
        CHECK(equal_element(doc.root, again.root));
    }
}

TEST_CASE("serialization escapes markup and self-closes empty elements") {
    Diagnostics diags;
    XmlDocument doc = parse_ok("<a t=\"&quot;&lt;\"><b></b>x&amp;y</a>", Mode::Strict, diags);
    std::string out = serialize(doc.root);
    CHECK(out == "<a t=\"&quot;&lt;\"><b/>x&amp;y</a>");
}

TEST_CASE("escape helpers cover the markup characters") {
    CHECK(escape_text("a<b&c>d") == "a&lt;b&amp;c&gt;d");
    CHECK(escape_attr("\"x\" & 'y'") == "&quot;x&quot; &amp; 'y'");
}

TEST_CASE("rdf fragments are found inside host markup") {
    Diagnostics diags;
    std::vector<XmlElement> frags =
        scan_rdf_fragments(read_fixture("ingest/embedded.html"), "embedded.html", diags);
    REQUIRE(frags.size() == 1);
    CHECK(frags[0].name.local == "rdf");
    CHECK(frags[0].name.prefix == "rdf");
    auto descriptions = frags[0].child_elements();
    REQUIRE(descriptions.size() == 1);
    CHECK(*descriptions[0]->attr("about") == "Beispiel.pdf");

    Diagnostics none;
    CHECK(scan_rdf_fragments("<html><body>plain</body></html>", "t.html", none).empty());
}

TEST_CASE("equal_element distinguishes names, attributes and children") {
    Diagnostics diags;
    XmlDocument a = parse_ok("<a x=\"1\"><b/></a>", Mode::Strict, diags);
    XmlDocument b = parse_ok("<a x=\"1\"><b/></a>", Mode::Strict, diags);
    XmlDocument c = parse_ok("<a x=\"2\"><b/></a>", Mode::Strict, diags);
    XmlDocument d = parse_ok("<a x=\"1\"><c/></a>", Mode::Strict, diags);
    CHECK(equal_element(a.root, b.root));
    CHECK_FALSE(equal_element(a.root, c.root));
    CHECK_FALSE(equal_element(a.root, d.root));
}
