#include "bpmnverify/checker.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace bpmn {

std::string to_string(Verdict::Status status) {
  switch (status) {
    case Verdict::Status::Valid:
      return "valid";
    case Verdict::Status::Invalid:
      return "invalid";
    case Verdict::Status::BoundExceeded:
      return "bound-exceeded";
  }
  return "?";
}

namespace {

// Edge indices along the BFS discovery path from the initial state.
// First-discovery parents under canonical expansion order make this the
// shortest path with lowest canonical firing order as tie-break.
std::vector<std::size_t> discovery_path(const StateGraph& graph, std::size_t state) {
  std::vector<std::size_t> edges;
  while (graph.discovered_by[state] != StateGraph::npos) {
    const std::size_t e = graph.discovered_by[state];
    edges.push_back(e);
    state = graph.edges[e].from;
  }
  std::reverse(edges.begin(), edges.end());
  return edges;
}

Trace trace_from_edges(const StateGraph& graph, const std::vector<std::size_t>& edges) {
  Trace trace;
  for (std::size_t e : edges) {
    const StateEdge& edge = graph.edges[e];
    trace.steps.push_back({edge.node, edge.alternative, graph.states[edge.to]});
  }
  return trace;
}

bool is_terminal(const WorkflowModel& model, const Marking& marking) {
  return enabled_firings(model, marking).empty();
}

// States of `sub` that can be left on an infinite path, i.e. survivors
// of repeatedly stripping states with no remaining successor.
// `edge_ok(e)` restricts the edge set.
template <typename EdgeOk>
std::vector<bool> infinite_path_states(const StateGraph& graph,
                                       const std::vector<bool>& sub, EdgeOk edge_ok) {
  const std::size_t n = graph.states.size();
  std::vector<int> outdeg(n, 0);
  std::vector<std::vector<std::size_t>> rev(n);
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    const StateEdge& e = graph.edges[i];
    if (!sub[e.from] || !sub[e.to] || !edge_ok(e)) continue;
    outdeg[e.from]++;
    rev[e.to].push_back(e.from);
  }
  std::deque<std::size_t> dead;
  std::vector<bool> alive = sub;
  for (std::size_t s = 0; s < n; ++s)
    if (sub[s] && outdeg[s] == 0) {
      alive[s] = false;
      dead.push_back(s);
    }
  while (!dead.empty()) {
    const std::size_t s = dead.front();
    dead.pop_front();
    for (std::size_t p : rev[s])
      if (alive[p] && --outdeg[p] == 0) {
        alive[p] = false;
        dead.push_back(p);
      }
  }
  return alive;
}

// Walks first-available surviving successors from the lowest surviving
// state until a state repeats, yielding (cycle entry, cycle edges).
template <typename EdgeOk>
std::pair<std::size_t, std::vector<std::size_t>> find_cycle(
    const StateGraph& graph, const std::vector<bool>& alive, EdgeOk edge_ok) {
  std::size_t start = StateGraph::npos;
  for (std::size_t s = 0; s < alive.size(); ++s)
    if (alive[s]) {
      start = s;
      break;
    }
  std::vector<std::size_t> walk_edges;
  std::unordered_map<std::size_t, std::size_t> seen_at;  // state -> walk position
  std::size_t cur = start;
  seen_at[cur] = 0;
  for (;;) {
    std::size_t chosen = StateGraph::npos;
    for (std::size_t i = 0; i < graph.edges.size(); ++i) {
      const StateEdge& e = graph.edges[i];
      if (e.from == cur && alive[e.to] && edge_ok(e)) {
        chosen = i;
        break;
      }
    }
    walk_edges.push_back(chosen);
    cur = graph.edges[chosen].to;
    auto it = seen_at.find(cur);
    if (it != seen_at.end()) {
      std::vector<std::size_t> cycle(walk_edges.begin() +
                                         static_cast<std::ptrdiff_t>(it->second),
                                     walk_edges.end());
      return {cur, cycle};
    }
    seen_at[cur] = walk_edges.size();
  }
}

Verdict check_deadlock_free(const WorkflowModel& model, const StateGraph& graph) {
  Verdict v;
  for (std::size_t s = 0; s < graph.states.size(); ++s) {
    const Marking& m = graph.states[s];
    if (!m.all_zero() && is_terminal(model, m)) {
      v.status = Verdict::Status::Invalid;
      v.counterexample = trace_from_edges(graph, discovery_path(graph, s));
      return v;
    }
  }
  return v;
}

Verdict check_proper_completion(const WorkflowModel& model, const StateGraph& graph) {
  Verdict v;
  // Bad terminal state: tokens remain or nothing ever completed.
  for (std::size_t s = 0; s < graph.states.size(); ++s) {
    const Marking& m = graph.states[s];
    if (is_terminal(model, m) && !m.properly_completed()) {
      v.status = Verdict::Status::Invalid;
      v.counterexample = trace_from_edges(graph, discovery_path(graph, s));
      return v;
    }
  }
  // Divergence, with no fairness assumed: any reachable cycle admits an
  // infinite run that never completes (properly-completed states are
  // terminal), so must-completion fails even when an exit is always
  // available.
  std::vector<bool> all(graph.states.size(), true);
  const auto any_edge = [](const StateEdge&) { return true; };
  std::vector<bool> alive = infinite_path_states(graph, all, any_edge);
  if (std::find(alive.begin(), alive.end(), true) != alive.end()) {
    auto [entry, cycle] = find_cycle(graph, alive, any_edge);
    std::vector<std::size_t> edges = discovery_path(graph, entry);
    const std::size_t prefix_len = edges.size();
    edges.insert(edges.end(), cycle.begin(), cycle.end());
    Trace trace = trace_from_edges(graph, edges);
    trace.lasso_start = prefix_len;
    v.status = Verdict::Status::Invalid;
    v.counterexample = std::move(trace);
  }
  return v;
}

Verdict check_reachable(const StateGraph& graph, const std::string& node) {
  Verdict v;
  for (const auto& e : graph.edges)
    if (e.node == node) return v;
  v.status = Verdict::Status::Invalid;
  v.counterexample = Trace{};  // no meaningful witness for unreachability
  std::ostringstream summary;
  summary << "node '" << node << "' never fires in any of " << graph.states.size()
          << " reachable states (" << graph.edges.size() << " transitions)";
  v.stats.summary = summary.str();
  return v;
}

Verdict check_no_dead_activity(const WorkflowModel& model, const StateGraph& graph) {
  Verdict v;
  std::unordered_set<std::string> fired;
  for (const auto& e : graph.edges) fired.insert(e.node);
  for (const auto& n : model.nodes)
    if (n.kind.tag == NodeKind::Tag::Task && !fired.count(n.id))
      v.dead_nodes.push_back(n.id);
  if (!v.dead_nodes.empty()) {
    v.status = Verdict::Status::Invalid;
    v.counterexample = Trace{};
    v.stats.summary = "dead tasks: " + [&] {
      std::string s;
      for (const auto& id : v.dead_nodes) s += (s.empty() ? "" : ", ") + id;
      return s;
    }();
  }
  return v;
}

Verdict check_never_fires(const StateGraph& graph, const std::string& node) {
  Verdict v;
  // Edges are appended in BFS expansion order, so the first match ends
  // a shortest, canonically tie-broken path.
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    const StateEdge& e = graph.edges[i];
    if (e.node != node) continue;
    std::vector<std::size_t> edges = discovery_path(graph, e.from);
    edges.push_back(i);
    v.status = Verdict::Status::Invalid;
    v.counterexample = trace_from_edges(graph, edges);
    return v;
  }
  return v;
}

Verdict check_precedence(const StateGraph& graph, const std::string& first,
                         const std::string& then) {
  Verdict v;
  // BFS restricted to the "no `first` fired yet" region.
  const std::size_t n = graph.states.size();
  std::vector<std::size_t> parent_edge(n, StateGraph::npos);
  std::vector<bool> in_region(n, false);
  in_region[graph.initial] = true;
  std::deque<std::size_t> frontier{graph.initial};
  while (!frontier.empty()) {
    const std::size_t cur = frontier.front();
    frontier.pop_front();
    for (std::size_t i = 0; i < graph.edges.size(); ++i) {
      const StateEdge& e = graph.edges[i];
      if (e.from != cur || e.node == first) continue;
      if (e.node == then) {
        std::vector<std::size_t> edges;
        std::size_t s = cur;
        while (parent_edge[s] != StateGraph::npos) {
          edges.push_back(parent_edge[s]);
          s = graph.edges[parent_edge[s]].from;
        }
        std::reverse(edges.begin(), edges.end());
        edges.push_back(i);
        v.status = Verdict::Status::Invalid;
        v.counterexample = trace_from_edges(graph, edges);
        return v;
      }
      if (!in_region[e.to]) {
        in_region[e.to] = true;
        parent_edge[e.to] = i;
        frontier.push_back(e.to);
      }
    }
  }
  return v;
}

Verdict check_response(const WorkflowModel& model, const StateGraph& graph,
                       const std::string& trigger, const std::string& response) {
  Verdict v;
  // Product with the monitor for F(trigger && G !response): layer 0
  // before any pending trigger, layer 1 once a trigger fired with no
  // response yet. A violation is an infinite (or stuttering-terminal)
  // continuation that stays in layer 1.
  const std::size_t n = graph.states.size();
  // parent per product state, encoded as 2*state + layer.
  std::vector<std::size_t> parent(2 * n, StateGraph::npos);
  std::vector<bool> seen(2 * n, false);
  const std::size_t start = 2 * graph.initial;
  seen[start] = true;
  std::deque<std::size_t> frontier{start};
  std::vector<std::size_t> layer1_order;  // discovery order of layer-1 states
  while (!frontier.empty()) {
    const std::size_t cur = frontier.front();
    frontier.pop_front();
    const std::size_t state = cur / 2;
    const std::size_t layer = cur % 2;
    for (std::size_t i = 0; i < graph.edges.size(); ++i) {
      const StateEdge& e = graph.edges[i];
      if (e.from != state) continue;
      std::vector<std::size_t> nexts;
      if (layer == 0) {
        nexts.push_back(2 * e.to);
        if (e.node == trigger && trigger != response) nexts.push_back(2 * e.to + 1);
      } else if (e.node != response) {
        nexts.push_back(2 * e.to + 1);
      }
      for (std::size_t nx : nexts) {
        if (seen[nx]) continue;
        seen[nx] = true;
        parent[nx] = (cur << 32) | i;  // pack (product parent, edge)
        if (nx % 2 == 1) layer1_order.push_back(nx / 2);
        frontier.push_back(nx);
      }
    }
  }

  const auto product_path = [&](std::size_t product_state) {
    std::vector<std::size_t> edges;
    std::size_t cur = product_state;
    while (parent[cur] != StateGraph::npos) {
      edges.push_back(parent[cur] & 0xffffffffu);
      cur = parent[cur] >> 32;
    }
    std::reverse(edges.begin(), edges.end());
    return edges;
  };

  // Terminal layer-1 state: the run ends with the trigger unanswered;
  // stutter extension keeps !response forever.
  for (std::size_t s : layer1_order) {
    if (!is_terminal(model, graph.states[s])) continue;
    Trace trace = trace_from_edges(graph, product_path(2 * s + 1));
    trace.lasso_start = trace.steps.size();
    v.status = Verdict::Status::Invalid;
    v.counterexample = std::move(trace);
    return v;
  }

  // Cycle within layer 1 avoiding the response.
  std::vector<bool> layer1(n, false);
  for (std::size_t s = 0; s < n; ++s) layer1[s] = seen[2 * s + 1];
  const auto avoids = [&](const StateEdge& e) { return e.node != response; };
  std::vector<bool> alive = infinite_path_states(graph, layer1, avoids);
  if (std::find(alive.begin(), alive.end(), true) != alive.end()) {
    auto [entry, cycle] = find_cycle(graph, alive, avoids);
    std::vector<std::size_t> edges = product_path(2 * entry + 1);
    const std::size_t prefix_len = edges.size();
    edges.insert(edges.end(), cycle.begin(), cycle.end());
    Trace trace = trace_from_edges(graph, edges);
    trace.lasso_start = prefix_len;
    v.status = Verdict::Status::Invalid;
    v.counterexample = std::move(trace);
  }
  return v;
}

void require_node(const WorkflowModel& model, const std::string& id) {
  if (!model.find_node(id))
    throw CheckError(CheckError::Code::UnknownNode,
                     "property references unknown node '" + id + "'");
}

}  // namespace

Verdict check_on_graph(const WorkflowModel& model, const StateGraph& graph,
                       const Property& property) {
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& id : property.targets()) require_node(model, id);

  Verdict v;
  switch (property.kind) {
    case Property::Kind::DeadlockFree:
      v = check_deadlock_free(model, graph);
      break;
    case Property::Kind::ProperCompletion:
      v = check_proper_completion(model, graph);
      break;
    case Property::Kind::Reachable:
      v = check_reachable(graph, property.a);
      break;
    case Property::Kind::NoDeadActivity:
      v = check_no_dead_activity(model, graph);
      break;
    case Property::Kind::NeverFires:
      v = check_never_fires(graph, property.a);
      break;
    case Property::Kind::Precedence:
      v = check_precedence(graph, property.a, property.b);
      break;
    case Property::Kind::Response:
      v = check_response(model, graph, property.a, property.b);
      break;
    case Property::Kind::RawLtl:
      throw CheckError(CheckError::Code::UnsupportedOnEmbeddedPath,
                       "raw LTL requires the SPIN engine");
  }

  // A pruned exploration can hide violations; never report Valid on it.
  if (graph.bound_exceeded && v.status == Verdict::Status::Valid) {
    v.status = Verdict::Status::BoundExceeded;
    v.counterexample.reset();
  }

  v.stats.states = graph.states.size();
  v.stats.edges = graph.edges.size();
  v.stats.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return v;
}

Verdict check(const WorkflowModel& model, const Property& property, int bound) {
  const auto t0 = std::chrono::steady_clock::now();
  const StateGraph graph = explore(model, bound);
  Verdict v = check_on_graph(model, graph, property);
  v.stats.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return v;
}

std::vector<PropertyVerdict> check_all(const WorkflowModel& model,
                                       const std::vector<Property>& properties,
                                       int bound) {
  const StateGraph graph = explore(model, bound);
  std::vector<PropertyVerdict> out;
  for (const auto& p : properties) {
    PropertyVerdict pv;
    pv.property = p;
    try {
      pv.verdict = check_on_graph(model, graph, p);
    } catch (const CheckError& e) {
      pv.error = e.what();
    }
    out.push_back(std::move(pv));
  }
  return out;
}

std::optional<Marking> replay_trace(const WorkflowModel& model, const Trace& trace,
                                    int bound) {
  Marking current = initial_marking(model);
  for (const auto& step : trace.steps) {
    FireOutcome outcome = fire(model, current, step.node, step.alternative, bound);
    if (!outcome.ok()) return std::nullopt;
    if (!(outcome.marking == step.after)) return std::nullopt;
    current = std::move(outcome.marking);
  }
  if (trace.lasso_start) {
    const std::size_t at = *trace.lasso_start;
    if (at > trace.steps.size()) return std::nullopt;
    const Marking& loop_state =
        at == 0 ? initial_marking(model) : trace.steps[at - 1].after;
    if (!trace.steps.empty() && !(trace.steps.back().after == loop_state) &&
        at != trace.steps.size())
      return std::nullopt;
  }
  return current;
}

}  // namespace bpmn
