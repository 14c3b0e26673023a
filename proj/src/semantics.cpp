#include "bpmnverify/semantics.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>

namespace bpmn {

int Marking::total_tokens() const {
  int total = 0;
  for (auto t : tokens) total += t;
  return total;
}

bool Marking::all_zero() const {
  for (auto t : tokens)
    if (t != 0) return false;
  return true;
}

std::map<std::string, int> Marking::positive_tokens(const WorkflowModel& model) const {
  std::map<std::string, int> out;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (tokens[i] > 0) out[model.flows[i].id] = tokens[i];
  return out;
}

std::string Marking::summary(const WorkflowModel& model) const {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == 0) continue;
    if (!first) out << ',';
    first = false;
    out << model.flows[i].id << ':' << static_cast<int>(tokens[i]);
  }
  out << "} completed=" << completed;
  return out.str();
}

std::size_t MarkingHash::operator()(const Marking& m) const {
  // FNV-1a over the token vector and the completion counter.
  std::size_t h = 1469598103934665603ull;
  const auto mix = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  for (auto t : m.tokens) mix(t);
  mix(static_cast<std::uint8_t>(m.completed));
  mix(static_cast<std::uint8_t>(m.completed >> 8));
  return h;
}

Marking initial_marking(const WorkflowModel& model) {
  Marking m;
  m.tokens.assign(model.flows.size(), 0);
  for (const auto& n : model.nodes) {
    if (n.kind.tag != NodeKind::Tag::StartEvent) continue;
    for (std::size_t f : model.outgoing(n.id)) m.tokens[f] = 1;
  }
  return m;
}

namespace {

bool node_enabled(const WorkflowModel& model, const Marking& m, const FlowNode& n) {
  const auto in = model.incoming(n.id);
  switch (n.kind.tag) {
    case NodeKind::Tag::StartEvent:
      return false;
    case NodeKind::Tag::EndEvent:
    case NodeKind::Tag::Task:
      break;
    case NodeKind::Tag::Gateway:
      if (n.kind.direction == GatewayDirection::Converging &&
          n.kind.logic == GatewayLogic::Parallel) {
        if (in.empty()) return false;
        for (std::size_t f : in)
          if (m.tokens[f] == 0) return false;
        return true;
      }
      break;
  }
  // Any single marked input suffices for tasks, end events, diverging
  // gateways and XOR-joins.
  for (std::size_t f : in)
    if (m.tokens[f] > 0) return true;
  return false;
}

// True when firing `node` requires an alternative selector in `marking`'s
// model: XOR-split output choice, XOR-join input choice, or the input
// choice of an end event with several incoming flows.
bool needs_selector(const WorkflowModel& model, const FlowNode& n) {
  if (n.kind == NodeKind::xor_split()) return true;
  if (n.kind == NodeKind::xor_join()) return true;
  if (n.kind.tag == NodeKind::Tag::EndEvent)
    return model.incoming(n.id).size() > 1;
  return false;
}

}  // namespace

std::vector<std::string> enabled(const WorkflowModel& model, const Marking& marking) {
  std::vector<std::string> out;
  for (const auto& n : model.nodes)
    if (node_enabled(model, marking, n)) out.push_back(n.id);
  return out;
}

std::vector<std::pair<std::string, std::string>> enabled_firings(
    const WorkflowModel& model, const Marking& marking) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& n : model.nodes) {
    if (!node_enabled(model, marking, n)) continue;
    if (!needs_selector(model, n)) {
      out.emplace_back(n.id, "");
      continue;
    }
    if (n.kind == NodeKind::xor_split()) {
      for (std::size_t f : model.outgoing(n.id))
        out.emplace_back(n.id, model.flows[f].id);
    } else {
      for (std::size_t f : model.incoming(n.id))
        if (marking.tokens[f] > 0) out.emplace_back(n.id, model.flows[f].id);
    }
  }
  return out;
}

FireOutcome fire(const WorkflowModel& model, const Marking& marking,
                 const std::string& node_id, const std::string& alternative,
                 int bound) {
  const FlowNode* node = model.find_node(node_id);
  if (!node || !node_enabled(model, marking, *node))
    return {FireOutcome::Code::NotEnabled, {}, ""};
  // A selector on a node that takes none is caller misuse, not a legal
  // firing.
  if (!alternative.empty() && !needs_selector(model, *node))
    return {FireOutcome::Code::NotEnabled, {}, ""};

  Marking next = marking;
  const auto produce = [&](std::size_t f) -> const SequenceFlow* {
    if (next.tokens[f] >= bound) return &model.flows[f];
    next.tokens[f]++;
    return nullptr;
  };

  const auto in = model.incoming(node_id);
  const auto out = model.outgoing(node_id);

  // Resolve the consumed input flow for selector-taking nodes.
  std::size_t chosen_in = StateGraph::npos;
  if (node->kind == NodeKind::xor_join() ||
      (node->kind.tag == NodeKind::Tag::EndEvent && in.size() > 1)) {
    if (alternative.empty()) return {FireOutcome::Code::MissingSelector, {}, ""};
    for (std::size_t f : in)
      if (model.flows[f].id == alternative && marking.tokens[f] > 0) chosen_in = f;
    if (chosen_in == StateGraph::npos)
      return {FireOutcome::Code::NotEnabled, {}, ""};
  }

  switch (node->kind.tag) {
    case NodeKind::Tag::StartEvent:
      return {FireOutcome::Code::NotEnabled, {}, ""};
    case NodeKind::Tag::Task: {
      if (out.empty()) return {FireOutcome::Code::NotEnabled, {}, ""};
      next.tokens[in[0]]--;
      if (const auto* f = produce(out[0]))
        return {FireOutcome::Code::BoundExceeded, {}, f->id};
      break;
    }
    case NodeKind::Tag::EndEvent: {
      const std::size_t f = in.size() > 1 ? chosen_in : in[0];
      next.tokens[f]--;
      next.completed++;
      break;
    }
    case NodeKind::Tag::Gateway: {
      if (out.empty()) return {FireOutcome::Code::NotEnabled, {}, ""};
      const bool parallel = node->kind.logic == GatewayLogic::Parallel;
      if (node->kind.direction == GatewayDirection::Diverging) {
        next.tokens[in[0]]--;
        if (parallel) {
          for (std::size_t f : out)
            if (const auto* over = produce(f))
              return {FireOutcome::Code::BoundExceeded, {}, over->id};
        } else {
          if (alternative.empty())
            return {FireOutcome::Code::MissingSelector, {}, ""};
          std::size_t chosen_out = StateGraph::npos;
          for (std::size_t f : out)
            if (model.flows[f].id == alternative) chosen_out = f;
          if (chosen_out == StateGraph::npos)
            return {FireOutcome::Code::NotEnabled, {}, ""};
          if (const auto* over = produce(chosen_out))
            return {FireOutcome::Code::BoundExceeded, {}, over->id};
        }
      } else {
        if (parallel) {
          for (std::size_t f : in) next.tokens[f]--;
        } else {
          next.tokens[chosen_in]--;
        }
        if (const auto* over = produce(out[0]))
          return {FireOutcome::Code::BoundExceeded, {}, over->id};
      }
      break;
    }
  }
  return {FireOutcome::Code::Ok, std::move(next), ""};
}

std::vector<std::size_t> StateGraph::out_edges(std::size_t state) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i].from == state) out.push_back(i);
  return out;
}

StateGraph explore(const WorkflowModel& model, int bound) {
  StateGraph graph;
  std::unordered_map<Marking, std::size_t, MarkingHash> index;

  const Marking init = initial_marking(model);
  graph.states.push_back(init);
  graph.depth.push_back(0);
  graph.discovered_by.push_back(StateGraph::npos);
  index.emplace(init, 0);

  std::deque<std::size_t> frontier{0};
  while (!frontier.empty()) {
    const std::size_t cur = frontier.front();
    frontier.pop_front();
    const Marking marking = graph.states[cur];  // copy: states may reallocate
    for (const auto& [node, alt] : enabled_firings(model, marking)) {
      FireOutcome outcome = fire(model, marking, node, alt, bound);
      if (outcome.code == FireOutcome::Code::BoundExceeded) {
        graph.bound_exceeded = true;
        continue;
      }
      if (!outcome.ok()) continue;
      auto [it, inserted] = index.emplace(outcome.marking, graph.states.size());
      const std::size_t to = it->second;
      if (inserted) {
        graph.states.push_back(std::move(outcome.marking));
        graph.depth.push_back(graph.depth[cur] + 1);
        graph.discovered_by.push_back(graph.edges.size());
        frontier.push_back(to);
      }
      graph.edges.push_back({cur, node, alt, to});
    }
  }
  return graph;
}

std::string export_state_graph(const WorkflowModel& model, const StateGraph& graph) {
  std::ostringstream out;
  for (std::size_t i = 0; i < graph.states.size(); ++i)
    out << "state " << i << ' ' << graph.states[i].summary(model) << '\n';
  std::vector<StateEdge> edges = graph.edges;
  std::sort(edges.begin(), edges.end(), [](const StateEdge& a, const StateEdge& b) {
    if (a.from != b.from) return a.from < b.from;
    if (a.node != b.node) return a.node < b.node;
    return a.to < b.to;
  });
  for (const auto& e : edges)
    out << "edge " << e.from << ' ' << e.node << ' ' << e.to << '\n';
  return out.str();
}

}  // namespace bpmn
