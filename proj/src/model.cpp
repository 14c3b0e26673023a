#include "bpmnverify/model.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <tuple>
#include <unordered_set>

namespace bpmn {

std::string NodeKind::keyword() const {
  switch (tag) {
    case Tag::StartEvent:
      return "start";
    case Tag::EndEvent:
      return "end";
    case Tag::Task:
      return "task";
    case Tag::Gateway:
      break;
  }
  const bool excl = logic == GatewayLogic::Exclusive;
  const bool div = direction == GatewayDirection::Diverging;
  if (excl) return div ? "xor-split" : "xor-join";
  return div ? "and-split" : "and-join";
}

std::string to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::MissingStart:
      return "MissingStart";
    case ViolationCode::MissingEnd:
      return "MissingEnd";
    case ViolationCode::BadDegree:
      return "BadDegree";
    case ViolationCode::Unreachable:
      return "Unreachable";
    case ViolationCode::DuplicateId:
      return "DuplicateId";
    case ViolationCode::DanglingFlow:
      return "DanglingFlow";
    case ViolationCode::MixedGateway:
      return "MixedGateway";
  }
  return "?";
}

const FlowNode* WorkflowModel::find_node(const std::string& node_id) const {
  for (const auto& n : nodes)
    if (n.id == node_id) return &n;
  return nullptr;
}

const SequenceFlow* WorkflowModel::find_flow(const std::string& flow_id) const {
  for (const auto& f : flows)
    if (f.id == flow_id) return &f;
  return nullptr;
}

std::optional<std::size_t> WorkflowModel::node_index(
    const std::string& node_id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == node_id) return i;
  return std::nullopt;
}

std::optional<std::size_t> WorkflowModel::flow_index(
    const std::string& flow_id) const {
  for (std::size_t i = 0; i < flows.size(); ++i)
    if (flows[i].id == flow_id) return i;
  return std::nullopt;
}

std::vector<std::size_t> WorkflowModel::incoming(
    const std::string& node_id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < flows.size(); ++i)
    if (flows[i].target == node_id) out.push_back(i);
  return out;
}

std::vector<std::size_t> WorkflowModel::outgoing(
    const std::string& node_id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < flows.size(); ++i)
    if (flows[i].source == node_id) out.push_back(i);
  return out;
}

bool graph_equal(const WorkflowModel& a, const WorkflowModel& b) {
  const auto node_key = [](const WorkflowModel& m) {
    std::set<std::tuple<std::string, std::string, std::string>> out;
    for (const auto& n : m.nodes) out.insert({n.id, n.name, n.kind.keyword()});
    return out;
  };
  const auto flow_key = [](const WorkflowModel& m) {
    std::set<std::tuple<std::string, std::string, std::string>> out;
    for (const auto& f : m.flows) out.insert({f.id, f.source, f.target});
    return out;
  };
  return node_key(a) == node_key(b) && flow_key(a) == flow_key(b);
}

namespace {

void add(std::vector<Violation>& out, ViolationCode code, std::string subject,
         std::string message) {
  out.push_back({code, std::move(subject), std::move(message)});
}

}  // namespace

std::vector<Violation> validate_wellformed(const WorkflowModel& model) {
  std::vector<Violation> out;

  std::unordered_set<std::string> node_ids;
  for (const auto& n : model.nodes) {
    if (n.id.empty())
      add(out, ViolationCode::DuplicateId, n.id, "node has empty id");
    else if (!node_ids.insert(n.id).second)
      add(out, ViolationCode::DuplicateId, n.id, "duplicate node id '" + n.id + "'");
  }

  std::unordered_set<std::string> flow_ids;
  std::set<std::pair<std::string, std::string>> endpoints;
  for (const auto& f : model.flows) {
    if (f.id.empty() || !flow_ids.insert(f.id).second)
      add(out, ViolationCode::DuplicateId, f.id, "duplicate flow id '" + f.id + "'");
    if (!node_ids.count(f.source))
      add(out, ViolationCode::DanglingFlow, f.id,
          "flow '" + f.id + "' has unknown source '" + f.source + "'");
    if (!node_ids.count(f.target))
      add(out, ViolationCode::DanglingFlow, f.id,
          "flow '" + f.id + "' has unknown target '" + f.target + "'");
    if (!endpoints.insert({f.source, f.target}).second)
      add(out, ViolationCode::DuplicateId, f.id,
          "flow '" + f.id + "' duplicates pair " + f.source + " -> " + f.target);
  }

  bool has_start = false, has_end = false;
  for (const auto& n : model.nodes) {
    if (n.kind.tag == NodeKind::Tag::StartEvent) has_start = true;
    if (n.kind.tag == NodeKind::Tag::EndEvent) has_end = true;
  }
  if (!has_start)
    add(out, ViolationCode::MissingStart, model.id, "model has no start event");
  if (!has_end)
    add(out, ViolationCode::MissingEnd, model.id, "model has no end event");

  // Degree rules. Only flows with resolvable endpoints count.
  std::unordered_map<std::string, int> indeg, outdeg;
  for (const auto& f : model.flows) {
    if (node_ids.count(f.source)) outdeg[f.source]++;
    if (node_ids.count(f.target)) indeg[f.target]++;
  }
  for (const auto& n : model.nodes) {
    const int in = indeg.count(n.id) ? indeg[n.id] : 0;
    const int ou = outdeg.count(n.id) ? outdeg[n.id] : 0;
    const auto bad = [&](const std::string& want) {
      add(out, ViolationCode::BadDegree, n.id,
          "node '" + n.id + "' (" + n.kind.keyword() + ") has in=" +
              std::to_string(in) + "/out=" + std::to_string(ou) +
              ", expected " + want);
    };
    switch (n.kind.tag) {
      case NodeKind::Tag::StartEvent:
        if (in != 0 || ou != 1) bad("in=0/out=1");
        break;
      case NodeKind::Tag::EndEvent:
        if (in < 1 || ou != 0) bad("in>=1/out=0");
        break;
      case NodeKind::Tag::Task:
        if (in != 1 || ou != 1) bad("in=1/out=1");
        break;
      case NodeKind::Tag::Gateway:
        if (in >= 2 && ou >= 2) {
          add(out, ViolationCode::MixedGateway, n.id,
              "gateway '" + n.id + "' is both converging and diverging");
        } else if (n.kind.direction == GatewayDirection::Diverging) {
          if (in != 1 || ou < 2) bad("in=1/out>=2");
        } else {
          if (in < 2 || ou != 1) bad("in>=2/out=1");
        }
        break;
    }
  }

  // Forward reachability from start events.
  std::unordered_set<std::string> reached;
  std::deque<std::string> frontier;
  for (const auto& n : model.nodes)
    if (n.kind.tag == NodeKind::Tag::StartEvent && reached.insert(n.id).second)
      frontier.push_back(n.id);
  while (!frontier.empty()) {
    const std::string cur = frontier.front();
    frontier.pop_front();
    for (const auto& f : model.flows)
      if (f.source == cur && node_ids.count(f.target) &&
          reached.insert(f.target).second)
        frontier.push_back(f.target);
  }
  for (const auto& n : model.nodes)
    if (!reached.count(n.id))
      add(out, ViolationCode::Unreachable, n.id,
          "node '" + n.id + "' is not reachable from any start event");

  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    if (a.subject != b.subject) return a.subject < b.subject;
    return static_cast<int>(a.code) < static_cast<int>(b.code);
  });
  return out;
}

}  // namespace bpmn
