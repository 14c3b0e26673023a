#include <random>
#include <set>

#include "bpmnverify/ingest.hpp"
#include "bpmnverify/model.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace bpmn;
using testutil::fixture_path;
using testutil::load_fixture;
using testutil::read_file;

TEST_CASE("format detection by extension") {
  CHECK(detect_format("a/b/model.bpmn") == SourceFormat::BpmnXml);
  CHECK(detect_format("model.xml") == SourceFormat::BpmnXml);
  CHECK(detect_format("model.wf") == SourceFormat::WorkflowDsl);
  CHECK_THROWS_AS(detect_format("model.txt"), std::invalid_argument);
  CHECK_THROWS_AS(detect_format("model"), std::invalid_argument);
}

TEST_CASE("BPMN XML maps elements directly and preserves names") {
  const auto out = parse_bpmn_xml(read_file(fixture_path("m1.bpmn")));
  CHECK(out.warnings.empty());
  REQUIRE(out.model.nodes.size() == 3);
  REQUIRE(out.model.flows.size() == 2);
  CHECK(out.model.nodes[0].kind == NodeKind::start());
  CHECK(out.model.nodes[1].kind == NodeKind::task());
  CHECK(out.model.nodes[1].name == "Task A");
  CHECK(out.model.nodes[2].kind == NodeKind::end());
}

TEST_CASE("gateway direction is inferred from degree") {
  const auto model = parse_bpmn_xml(read_file(fixture_path("m2.bpmn"))).model;
  REQUIRE(model.find_node("G1"));
  REQUIRE(model.find_node("G2"));
  CHECK(model.find_node("G1")->kind == NodeKind::and_split());
  CHECK(model.find_node("G2")->kind == NodeKind::and_join());
}

TEST_CASE("XML and DSL encodings of the same fixture parse to equal models") {
  for (const char* base : {"m1", "m2", "m3"}) {
    CAPTURE(base);
    const auto xml = parse_bpmn_xml(read_file(fixture_path(std::string(base) + ".bpmn"))).model;
    const auto dsl = load_fixture(std::string(base) + ".wf");
    CHECK(xml == dsl);
  }
}

TEST_CASE("sequenceFlow referencing a ghost node is a parse error") {
  const std::string xml = R"(<definitions><process id="p">
    <startEvent id="S"/><endEvent id="E"/>
    <sequenceFlow id="f" sourceRef="ghost" targetRef="E"/>
  </process></definitions>)";
  CHECK_THROWS_WITH_AS(static_cast<void>(parse_bpmn_xml(xml)),
                       doctest::Contains("unknown node 'ghost'"), ParseError);
}

TEST_CASE("mixed gateways are rejected at parse time") {
  const std::string xml = R"(<definitions><process id="p">
    <startEvent id="S1"/><startEvent id="S2"/>
    <exclusiveGateway id="G"/>
    <endEvent id="E1"/><endEvent id="E2"/>
    <sequenceFlow id="a" sourceRef="S1" targetRef="G"/>
    <sequenceFlow id="b" sourceRef="S2" targetRef="G"/>
    <sequenceFlow id="c" sourceRef="G" targetRef="E1"/>
    <sequenceFlow id="d" sourceRef="G" targetRef="E2"/>
  </process></definitions>)";
  CHECK_THROWS_WITH_AS(static_cast<void>(parse_bpmn_xml(xml)),
                       doctest::Contains("both converging and diverging"), ParseError);
}

TEST_CASE("malformed XML reports line and column") {
  try {
    static_cast<void>(parse_bpmn_xml("<definitions>\n  <process id='p'>\n  <oops\n"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line >= 3);
  }
}

TEST_CASE("unknown elements inside process produce warnings, not failures") {
  const std::string xml = R"(<definitions><process id="p">
    <startEvent id="S"/>
    <dataObject id="D"/>
    <task id="A"/><endEvent id="E"/>
    <sequenceFlow id="f1" sourceRef="S" targetRef="A"/>
    <sequenceFlow id="f2" sourceRef="A" targetRef="E"/>
  </process></definitions>)";
  const auto out = parse_bpmn_xml(xml);
  REQUIRE(out.warnings.size() == 1);
  CHECK(out.warnings[0].find("dataObject") != std::string::npos);
  CHECK(out.model.nodes.size() == 3);
}

TEST_CASE("namespace prefixes are ignored; matching is by local name") {
  const std::string xml = R"(<bpmn:definitions xmlns:bpmn="http://example.org/x">
    <bpmn:process id="p">
      <bpmn:startEvent id="S"/><bpmn:task id="A" name="&quot;A&amp;B&quot;"/>
      <bpmn:endEvent id="E"/>
      <bpmn:sequenceFlow id="f1" sourceRef="S" targetRef="A"/>
      <bpmn:sequenceFlow id="f2" sourceRef="A" targetRef="E"/>
    </bpmn:process>
  </bpmn:definitions>)";
  const auto model = parse_bpmn_xml(xml).model;
  REQUIRE(model.nodes.size() == 3);
  CHECK(model.nodes[1].name == "\"A&B\"");
}

TEST_CASE("DSL one-liner parses to the linear fixture") {
  const auto m = parse_dsl("start S; task A \"Task A\"; end E; flow S -> A; flow A -> E;");
  CHECK(m == load_fixture("m1.wf"));
  CHECK(m.flows[0].id == "S__A");
}

TEST_CASE("DSL separates parsing from validation") {
  // A one-armed split parses fine; only validation complains.
  const auto m = parse_dsl("start S; xor-split G; end E; flow S -> G; flow G -> E;");
  CHECK(m.nodes.size() == 3);
  CHECK(!validate_wellformed(m).empty());
}

TEST_CASE("DSL reports duplicate declarations and unknown references with lines") {
  try {
    static_cast<void>(parse_dsl("start S;\ntask A;\ntask A;\n"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
    CHECK(std::string(e.what()).find("A") != std::string::npos);
  }
  try {
    static_cast<void>(parse_dsl("start S;\nend E;\nflow S -> ghost;\n"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
  CHECK_THROWS_AS(static_cast<void>(parse_dsl("begin S;")), ParseError);
}

TEST_CASE("DSL round-trips every fixture exactly") {
  for (const auto& name : testutil::corpus_names()) {
    CAPTURE(name);
    const auto m = load_fixture(name);
    CHECK(parse_dsl(emit_dsl(m)) == m);
  }
}

TEST_CASE("DSL round-trips random well-formed models") {
  std::mt19937 rng(31);
  for (int i = 0; i < 200; ++i) {
    const auto m = testutil::random_wellformed_model(rng, 1 + i % 10);
    CAPTURE(i);
    CHECK(parse_dsl(emit_dsl(m)) == m);
  }
}

TEST_CASE("emit_dsl is injective on the corpus") {
  std::set<std::string> texts;
  for (const auto& name : testutil::corpus_names())
    CHECK(texts.insert(emit_dsl(load_fixture(name))).second);
}

TEST_CASE("parsing random DSL-shaped junk never crashes") {
  // Totality: arbitrary token soup either parses or throws ParseError.
  std::mt19937 rng(41);
  const std::vector<std::string> words = {
      "start", "end",  "task", "xor-split", "and-join", "flow", "->",
      ";",     ":",    "n1",   "n2",        "\"x",      "#",    "\n",
      "flow;", "\"y\"", "",    "9",         "task;",    "->;"};
  for (int i = 0; i < 1000; ++i) {
    std::string text;
    const int len = std::uniform_int_distribution<int>(0, 30)(rng);
    for (int k = 0; k < len; ++k) {
      text += words[std::uniform_int_distribution<std::size_t>(0, words.size() - 1)(rng)];
      text += ' ';
    }
    CAPTURE(i);
    try {
      static_cast<void>(parse_dsl(text));
    } catch (const ParseError&) {
      // typed failure is the only acceptable failure
    }
  }
}

TEST_CASE("parse_file dispatches on extension") {
  CHECK(parse_file(fixture_path("m1.bpmn")).model == parse_file(fixture_path("m1.wf")).model);
}
