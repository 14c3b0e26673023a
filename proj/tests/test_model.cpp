#include <algorithm>
#include <random>
#include <set>

#include "bpmnverify/model.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace bpmn;
using testutil::load_fixture;

namespace {

WorkflowModel linear_model() {
  WorkflowModel m;
  m.id = "linear";
  m.nodes = {{"S", "", NodeKind::start()},
             {"A", "Task A", NodeKind::task()},
             {"E", "", NodeKind::end()}};
  m.flows = {{"f_S_A", "S", "A"}, {"f_A_E", "A", "E"}};
  return m;
}

bool has(const std::vector<Violation>& vs, ViolationCode code, const std::string& subject) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) {
    return v.code == code && v.subject == subject;
  });
}

}  // namespace

TEST_CASE("node kind keywords round out the vocabulary") {
  CHECK(NodeKind::start().keyword() == "start");
  CHECK(NodeKind::end().keyword() == "end");
  CHECK(NodeKind::task().keyword() == "task");
  CHECK(NodeKind::xor_split().keyword() == "xor-split");
  CHECK(NodeKind::xor_join().keyword() == "xor-join");
  CHECK(NodeKind::and_split().keyword() == "and-split");
  CHECK(NodeKind::and_join().keyword() == "and-join");
  CHECK(NodeKind::xor_split() != NodeKind::and_split());
  CHECK(NodeKind::xor_split() != NodeKind::xor_join());
  // Logic/direction are meaningless for non-gateways.
  NodeKind t1 = NodeKind::task();
  NodeKind t2 = NodeKind::task();
  t2.logic = GatewayLogic::Parallel;
  CHECK(t1 == t2);
}

TEST_CASE("lookup helpers respect document order") {
  const WorkflowModel m = load_fixture("m2.wf");
  REQUIRE(m.find_node("G1"));
  CHECK(m.find_node("G1")->kind == NodeKind::and_split());
  CHECK(m.find_node("nope") == nullptr);
  CHECK(m.node_index("S") == 0);
  CHECK(m.flow_index("f5") == 5);
  CHECK(m.outgoing("G1") == std::vector<std::size_t>{1, 2});
  CHECK(m.incoming("G2") == std::vector<std::size_t>{3, 4});
  CHECK(m.incoming("S").empty());
}

TEST_CASE("model equality ignores carrier metadata") {
  WorkflowModel a = linear_model();
  WorkflowModel b = linear_model();
  b.id = "other";
  b.name = "Display Name";
  CHECK(a == b);
  b.nodes[1].name = "Renamed";
  CHECK(a != b);
}

TEST_CASE("graph_equal is order-insensitive, equality is not") {
  WorkflowModel a = linear_model();
  WorkflowModel b = linear_model();
  std::swap(b.nodes[0], b.nodes[2]);
  std::swap(b.flows[0], b.flows[1]);
  CHECK(a != b);
  CHECK(graph_equal(a, b));
  b.flows[0].target = "S";
  CHECK(!graph_equal(a, b));
}

TEST_CASE("well-formed fixtures validate clean") {
  for (const auto& name : testutil::corpus_names()) {
    CAPTURE(name);
    CHECK(validate_wellformed(load_fixture(name)).empty());
  }
}

TEST_CASE("deleting the start flow yields the frozen violation set") {
  const WorkflowModel m = load_fixture("broken.wf");
  const auto vs = validate_wellformed(m);
  REQUIRE(vs.size() == 4);
  CHECK(has(vs, ViolationCode::BadDegree, "S"));
  CHECK(has(vs, ViolationCode::BadDegree, "A"));
  CHECK(has(vs, ViolationCode::Unreachable, "A"));
  CHECK(has(vs, ViolationCode::Unreachable, "E"));
  // Deterministic order: sorted by subject id, then code.
  CHECK(std::is_sorted(vs.begin(), vs.end(), [](const Violation& x, const Violation& y) {
    return std::tie(x.subject, x.code) < std::tie(y.subject, y.code);
  }));
}

TEST_CASE("missing start and end events are reported") {
  WorkflowModel m = linear_model();
  m.nodes[0].kind = NodeKind::task();
  m.nodes[2].kind = NodeKind::task();
  const auto vs = validate_wellformed(m);
  CHECK(has(vs, ViolationCode::MissingStart, "linear"));
  CHECK(has(vs, ViolationCode::MissingEnd, "linear"));
}

TEST_CASE("degree rules per node kind") {
  // Task with two outputs.
  WorkflowModel m = linear_model();
  m.nodes.push_back({"E2", "", NodeKind::end()});
  m.flows.push_back({"f_A_E2", "A", "E2"});
  CHECK(has(validate_wellformed(m), ViolationCode::BadDegree, "A"));

  // Diverging gateway with a single output.
  WorkflowModel g = linear_model();
  g.nodes[1].kind = NodeKind::xor_split();
  CHECK(has(validate_wellformed(g), ViolationCode::BadDegree, "A"));

  // End event with an outgoing flow.
  WorkflowModel e = linear_model();
  e.flows.push_back({"f_E_A", "E", "A"});
  const auto vs = validate_wellformed(e);
  CHECK(has(vs, ViolationCode::BadDegree, "E"));
}

TEST_CASE("mixed gateways are rejected structurally") {
  WorkflowModel m;
  m.nodes = {{"S1", "", NodeKind::start()},
             {"S2", "", NodeKind::start()},
             {"G", "", NodeKind::xor_join()},
             {"E1", "", NodeKind::end()},
             {"E2", "", NodeKind::end()}};
  m.flows = {{"a", "S1", "G"}, {"b", "S2", "G"}, {"c", "G", "E1"}, {"d", "G", "E2"}};
  CHECK(has(validate_wellformed(m), ViolationCode::MixedGateway, "G"));
}

TEST_CASE("duplicate ids and dangling flows are reported") {
  WorkflowModel m = linear_model();
  m.nodes.push_back({"A", "", NodeKind::task()});
  m.flows.push_back({"f_ghost", "A", "ghost"});
  const auto vs = validate_wellformed(m);
  CHECK(has(vs, ViolationCode::DuplicateId, "A"));
  CHECK(has(vs, ViolationCode::DanglingFlow, "f_ghost"));
}

TEST_CASE("duplicate source/target pairs count as duplicate flows") {
  WorkflowModel m = linear_model();
  m.flows.push_back({"f_again", "S", "A"});
  CHECK(has(validate_wellformed(m), ViolationCode::DuplicateId, "f_again"));
}

TEST_CASE("unreachable means not forward-reachable from any start event") {
  WorkflowModel m = linear_model();
  m.nodes.push_back({"X", "", NodeKind::task()});
  m.nodes.push_back({"Y", "", NodeKind::task()});
  m.flows.push_back({"f_X_Y", "X", "Y"});
  m.flows.push_back({"f_Y_X", "Y", "X"});
  const auto vs = validate_wellformed(m);
  CHECK(has(vs, ViolationCode::Unreachable, "X"));
  CHECK(has(vs, ViolationCode::Unreachable, "Y"));
  CHECK(!has(vs, ViolationCode::Unreachable, "A"));
}

TEST_CASE("validation is pure and deterministic") {
  std::mt19937 rng(7);
  for (int i = 0; i < 100; ++i) {
    const WorkflowModel m = testutil::random_junk_model(rng);
    const auto first = validate_wellformed(m);
    const auto second = validate_wellformed(m);
    REQUIRE(first.size() == second.size());
    for (std::size_t k = 0; k < first.size(); ++k) CHECK(first[k] == second[k]);
  }
}

TEST_CASE("random well-formed models always validate clean") {
  std::mt19937 rng(11);
  for (int i = 0; i < 200; ++i) {
    const WorkflowModel m = testutil::random_wellformed_model(rng, 1 + i % 8);
    CAPTURE(i);
    CHECK(validate_wellformed(m).empty());
  }
}

TEST_CASE("an empty violation list implies every structural invariant") {
  // Cross-check the validator against independently coded invariants on
  // random junk graphs: whenever it says clean, each invariant holds,
  // and whenever an invariant fails, it says something.
  std::mt19937 rng(23);
  int clean = 0;
  for (int i = 0; i < 500; ++i) {
    const WorkflowModel m = testutil::random_junk_model(rng);
    const auto vs = validate_wellformed(m);

    std::set<std::string> node_ids, flow_ids;
    bool dup = false;
    for (const auto& n : m.nodes) dup = !node_ids.insert(n.id).second || dup;
    for (const auto& f : m.flows) dup = !flow_ids.insert(f.id).second || dup;
    bool dangling = false;
    for (const auto& f : m.flows)
      dangling = dangling || !node_ids.count(f.source) || !node_ids.count(f.target);
    bool starts = false, ends = false;
    for (const auto& n : m.nodes) {
      starts = starts || n.kind.tag == NodeKind::Tag::StartEvent;
      ends = ends || n.kind.tag == NodeKind::Tag::EndEvent;
    }
    const bool broken = dup || dangling || !starts || !ends;
    CAPTURE(i);
    if (vs.empty()) {
      clean++;
      CHECK(!broken);
      for (const auto& n : m.nodes) {
        const auto in = m.incoming(n.id).size();
        const auto out = m.outgoing(n.id).size();
        switch (n.kind.tag) {
          case NodeKind::Tag::StartEvent: CHECK((in == 0 && out == 1)); break;
          case NodeKind::Tag::EndEvent: CHECK((in >= 1 && out == 0)); break;
          case NodeKind::Tag::Task: CHECK((in == 1 && out == 1)); break;
          case NodeKind::Tag::Gateway:
            if (n.kind.is_diverging_gateway())
              CHECK((in == 1 && out >= 2));
            else
              CHECK((in >= 2 && out == 1));
            break;
        }
      }
    } else if (broken) {
      CHECK(!vs.empty());
    }
  }
  // Junk models are rarely clean; this just documents that the loop ran.
  CHECK(clean >= 0);
}
