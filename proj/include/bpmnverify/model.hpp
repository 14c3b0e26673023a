#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace bpmn {

enum class GatewayLogic { Exclusive, Parallel };
enum class GatewayDirection { Diverging, Converging };

// The element vocabulary: start/end events, tasks, and the four
// gateway logic/direction combinations. Mixed gateways (in>=2 and
// out>=2) are rejected during validation/parsing.
struct NodeKind {
  enum class Tag { StartEvent, EndEvent, Task, Gateway };

  Tag tag = Tag::Task;
  GatewayLogic logic = GatewayLogic::Exclusive;       // meaningful iff Gateway
  GatewayDirection direction = GatewayDirection::Diverging;  // meaningful iff Gateway

  static NodeKind start() { return {Tag::StartEvent, {}, {}}; }
  static NodeKind end() { return {Tag::EndEvent, {}, {}}; }
  static NodeKind task() { return {Tag::Task, {}, {}}; }
  static NodeKind gateway(GatewayLogic l, GatewayDirection d) {
    return {Tag::Gateway, l, d};
  }
  static NodeKind xor_split() {
    return gateway(GatewayLogic::Exclusive, GatewayDirection::Diverging);
  }
  static NodeKind xor_join() {
    return gateway(GatewayLogic::Exclusive, GatewayDirection::Converging);
  }
  static NodeKind and_split() {
    return gateway(GatewayLogic::Parallel, GatewayDirection::Diverging);
  }
  static NodeKind and_join() {
    return gateway(GatewayLogic::Parallel, GatewayDirection::Converging);
  }

  bool is_gateway() const { return tag == Tag::Gateway; }
  bool is_diverging_gateway() const {
    return is_gateway() && direction == GatewayDirection::Diverging;
  }
  bool is_converging_gateway() const {
    return is_gateway() && direction == GatewayDirection::Converging;
  }

  // Short keyword used by the DSL and in generated-code comments.
  std::string keyword() const;

  friend bool operator==(const NodeKind& a, const NodeKind& b) {
    if (a.tag != b.tag) return false;
    if (a.tag != Tag::Gateway) return true;
    return a.logic == b.logic && a.direction == b.direction;
  }
  friend bool operator!=(const NodeKind& a, const NodeKind& b) {
    return !(a == b);
  }
};

struct FlowNode {
  std::string id;    // nonempty, unique within the model
  std::string name;  // human label, possibly empty
  NodeKind kind;

  friend bool operator==(const FlowNode& a, const FlowNode& b) {
    return a.id == b.id && a.name == b.name && a.kind == b.kind;
  }
};

struct SequenceFlow {
  std::string id;
  std::string source;  // node id
  std::string target;  // node id

  friend bool operator==(const SequenceFlow& a, const SequenceFlow& b) {
    return a.id == b.id && a.source == b.source && a.target == b.target;
  }
};

// The intermediate representation: a directed graph of typed flow
// nodes connected by sequence flows. Document order of nodes and flows
// is preserved and is the canonical order everywhere downstream.
// Immutable by convention after construction; reconfiguration builds
// new models.
struct WorkflowModel {
  std::string id;
  std::string name;
  std::vector<FlowNode> nodes;
  std::vector<SequenceFlow> flows;

  const FlowNode* find_node(const std::string& node_id) const;
  const SequenceFlow* find_flow(const std::string& flow_id) const;
  std::optional<std::size_t> node_index(const std::string& node_id) const;
  std::optional<std::size_t> flow_index(const std::string& flow_id) const;

  // Incoming/outgoing flow indices of a node, in document order.
  std::vector<std::size_t> incoming(const std::string& node_id) const;
  std::vector<std::size_t> outgoing(const std::string& node_id) const;

  // Graph equality: same nodes and flows, same order. The model id and
  // display name are carrier metadata and deliberately excluded, so
  // cross-format encodings of the same graph compare equal.
  friend bool operator==(const WorkflowModel& a, const WorkflowModel& b) {
    return a.nodes == b.nodes && a.flows == b.flows;
  }
  friend bool operator!=(const WorkflowModel& a, const WorkflowModel& b) {
    return !(a == b);
  }
};

// Order-insensitive comparison: same node set (id, name, kind) and
// same flow set (id, source, target). apply_patch(a, diff(a, b)) is
// graph_equal to b but need not list elements in b's order.
bool graph_equal(const WorkflowModel& a, const WorkflowModel& b);

enum class ViolationCode {
  MissingStart,
  MissingEnd,
  BadDegree,
  Unreachable,
  DuplicateId,
  DanglingFlow,
  MixedGateway,
};

std::string to_string(ViolationCode code);

struct Violation {
  ViolationCode code;
  std::string subject;  // node or flow id, determined by the code
  std::string message;

  friend bool operator==(const Violation& a, const Violation& b) {
    return a.code == b.code && a.subject == b.subject;
  }
};

// Structural well-formedness check. Violations are data, not errors;
// the returned list is deterministic (sorted by subject id, then code)
// and empty iff the model satisfies every structural invariant.
std::vector<Violation> validate_wellformed(const WorkflowModel& model);

}  // namespace bpmn
