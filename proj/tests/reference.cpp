#include "reference.hpp"

#include <deque>
#include <functional>

namespace oracle {

using bpmn::FlowNode;
using bpmn::GatewayDirection;
using bpmn::GatewayLogic;
using bpmn::NodeKind;
using bpmn::SequenceFlow;
using bpmn::WorkflowModel;

namespace {

int count(const RefState& s, const std::string& flow) {
  auto it = s.tokens.find(flow);
  return it == s.tokens.end() ? 0 : it->second;
}

void bump(RefState& s, const std::string& flow, int delta) {
  const int next = count(s, flow) + delta;
  if (next == 0)
    s.tokens.erase(flow);
  else
    s.tokens[flow] = next;
}

struct Candidate {
  std::string node;
  std::vector<std::string> consume;
  std::vector<std::string> produce;
  bool completes = false;
};

std::vector<Candidate> candidates(const WorkflowModel& model, const RefState& s) {
  std::vector<Candidate> out;
  const auto flows_in = [&](const std::string& id) {
    std::vector<std::string> v;
    for (const auto& f : model.flows)
      if (f.target == id) v.push_back(f.id);
    return v;
  };
  const auto flows_out = [&](const std::string& id) {
    std::vector<std::string> v;
    for (const auto& f : model.flows)
      if (f.source == id) v.push_back(f.id);
    return v;
  };
  for (const auto& n : model.nodes) {
    const auto in = flows_in(n.id);
    const auto ou = flows_out(n.id);
    switch (n.kind.tag) {
      case NodeKind::Tag::StartEvent:
        break;
      case NodeKind::Tag::Task:
        if (!in.empty() && !ou.empty() && count(s, in[0]) > 0)
          out.push_back({n.id, {in[0]}, {ou[0]}, false});
        break;
      case NodeKind::Tag::EndEvent:
        for (const auto& f : in)
          if (count(s, f) > 0) out.push_back({n.id, {f}, {}, true});
        break;
      case NodeKind::Tag::Gateway: {
        const bool parallel = n.kind.logic == GatewayLogic::Parallel;
        if (n.kind.direction == GatewayDirection::Diverging) {
          if (in.empty() || ou.empty() || count(s, in[0]) == 0) break;
          if (parallel) {
            out.push_back({n.id, {in[0]}, ou, false});
          } else {
            for (const auto& f : ou) out.push_back({n.id, {in[0]}, {f}, false});
          }
        } else {
          if (in.empty() || ou.empty()) break;
          if (parallel) {
            bool all = true;
            for (const auto& f : in) all = all && count(s, f) > 0;
            if (all) out.push_back({n.id, in, {ou[0]}, false});
          } else {
            for (const auto& f : in)
              if (count(s, f) > 0) out.push_back({n.id, {f}, {ou[0]}, false});
          }
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace

RefGraph build_graph(const WorkflowModel& model, int bound) {
  RefGraph g;
  RefState init;
  for (const auto& n : model.nodes) {
    if (n.kind.tag != NodeKind::Tag::StartEvent) continue;
    for (const auto& f : model.flows)
      if (f.source == n.id) bump(init, f.id, 1);
  }
  std::map<RefState, std::size_t> index;
  index[init] = 0;
  g.states.push_back(init);
  g.succ.emplace_back();
  std::deque<std::size_t> work{0};
  while (!work.empty()) {
    const std::size_t cur = work.front();
    work.pop_front();
    const RefState state = g.states[cur];
    for (const auto& c : candidates(model, state)) {
      RefState next = state;
      for (const auto& f : c.consume) bump(next, f, -1);
      bool over = false;
      for (const auto& f : c.produce) {
        bump(next, f, 1);
        over = over || count(next, f) > bound;
      }
      if (over) {
        g.truncated = true;
        continue;
      }
      if (c.completes) next.completed++;
      auto [it, inserted] = index.try_emplace(next, g.states.size());
      if (inserted) {
        g.states.push_back(next);
        g.succ.emplace_back();
        work.push_back(it->second);
      }
      g.succ[cur].push_back({c.node, it->second});
    }
  }
  return g;
}

namespace {

bool terminal(const RefGraph& g, std::size_t s) { return g.succ[s].empty(); }

bool has_tokens(const RefState& s) { return !s.tokens.empty(); }

bool has_cycle(const RefGraph& g) {
  // Plain three-color DFS.
  enum Color { White, Gray, Black };
  std::vector<Color> color(g.states.size(), White);
  std::function<bool(std::size_t)> visit = [&](std::size_t s) {
    color[s] = Gray;
    for (const auto& m : g.succ[s]) {
      if (color[m.to] == Gray) return true;
      if (color[m.to] == White && visit(m.to)) return true;
    }
    color[s] = Black;
    return false;
  };
  for (std::size_t s = 0; s < g.states.size(); ++s)
    if (color[s] == White && visit(s)) return true;
  return false;
}

std::vector<std::size_t> bfs_depths(const RefGraph& g) {
  std::vector<std::size_t> depth(g.states.size(), static_cast<std::size_t>(-1));
  depth[0] = 0;
  std::deque<std::size_t> q{0};
  while (!q.empty()) {
    const std::size_t cur = q.front();
    q.pop_front();
    for (const auto& m : g.succ[cur])
      if (depth[m.to] == static_cast<std::size_t>(-1)) {
        depth[m.to] = depth[cur] + 1;
        q.push_back(m.to);
      }
  }
  return depth;
}

}  // namespace

bool deadlock_free(const WorkflowModel&, const RefGraph& g) {
  for (std::size_t s = 0; s < g.states.size(); ++s)
    if (terminal(g, s) && has_tokens(g.states[s])) return false;
  return true;
}

bool proper_completion(const WorkflowModel&, const RefGraph& g) {
  for (std::size_t s = 0; s < g.states.size(); ++s)
    if (terminal(g, s) &&
        !(g.states[s].completed > 0 && !has_tokens(g.states[s])))
      return false;
  // No fairness: any cycle lets a run avoid completion forever.
  return !has_cycle(g);
}

bool reachable(const RefGraph& g, const std::string& node) {
  for (const auto& moves : g.succ)
    for (const auto& m : moves)
      if (m.node == node) return true;
  return false;
}

std::vector<std::string> dead_tasks(const WorkflowModel& model, const RefGraph& g) {
  std::vector<std::string> out;
  for (const auto& n : model.nodes)
    if (n.kind.tag == NodeKind::Tag::Task && !reachable(g, n.id))
      out.push_back(n.id);
  return out;
}

bool never_fires(const RefGraph& g, const std::string& node) {
  return !reachable(g, node);
}

bool precedence_holds(const RefGraph& g, const std::string& first,
                      const std::string& then) {
  // States reachable without ever firing `first`.
  std::set<std::size_t> region{0};
  std::deque<std::size_t> q{0};
  while (!q.empty()) {
    const std::size_t cur = q.front();
    q.pop_front();
    for (const auto& m : g.succ[cur]) {
      if (m.node == first) continue;
      if (m.node == then) return false;
      if (region.insert(m.to).second) q.push_back(m.to);
    }
  }
  return true;
}

bool response_holds(const RefGraph& g, const std::string& trigger,
                    const std::string& response) {
  if (trigger == response) return true;
  // Product states (s, pending) where pending means a trigger fired
  // with no response since.
  std::set<std::pair<std::size_t, bool>> seen{{0, false}};
  std::deque<std::pair<std::size_t, bool>> q{{0, false}};
  std::set<std::size_t> pending_states;
  while (!q.empty()) {
    const auto [cur, pending] = q.front();
    q.pop_front();
    if (pending) pending_states.insert(cur);
    for (const auto& m : g.succ[cur]) {
      std::vector<bool> nexts;
      if (!pending) {
        nexts.push_back(false);
        if (m.node == trigger) nexts.push_back(true);
      } else if (m.node != response) {
        nexts.push_back(true);
      }
      for (bool np : nexts)
        if (seen.insert({m.to, np}).second) q.push_back({m.to, np});
    }
  }
  // A pending terminal stutters forever without the response.
  for (std::size_t s : pending_states)
    if (terminal(g, s)) return false;
  // A cycle among pending states avoiding the response is an accepting
  // lasso. Check via DFS restricted to the pending set.
  enum Color { White, Gray, Black };
  std::map<std::size_t, Color> color;
  for (std::size_t s : pending_states) color[s] = White;
  std::function<bool(std::size_t)> visit = [&](std::size_t s) {
    color[s] = Gray;
    for (const auto& m : g.succ[s]) {
      if (m.node == response || !pending_states.count(m.to)) continue;
      if (color[m.to] == Gray) return true;
      if (color[m.to] == White && visit(m.to)) return true;
    }
    color[s] = Black;
    return false;
  };
  for (std::size_t s : pending_states)
    if (color[s] == White && visit(s)) return false;
  return true;
}

std::optional<std::size_t> shortest_deadlock_depth(const WorkflowModel&,
                                                   const RefGraph& g) {
  const auto depth = bfs_depths(g);
  std::optional<std::size_t> best;
  for (std::size_t s = 0; s < g.states.size(); ++s)
    if (terminal(g, s) && has_tokens(g.states[s]))
      if (!best || depth[s] < *best) best = depth[s];
  return best;
}

std::optional<std::size_t> shortest_firing_depth(const RefGraph& g,
                                                 const std::string& node) {
  const auto depth = bfs_depths(g);
  std::optional<std::size_t> best;
  for (std::size_t s = 0; s < g.states.size(); ++s)
    for (const auto& m : g.succ[s])
      if (m.node == node)
        if (!best || depth[s] + 1 < *best) best = depth[s] + 1;
  return best;
}

std::optional<std::size_t> shortest_precedence_violation_depth(
    const RefGraph& g, const std::string& first, const std::string& then) {
  // BFS within the no-`first` region.
  std::map<std::size_t, std::size_t> depth{{0, 0}};
  std::deque<std::size_t> q{0};
  std::optional<std::size_t> best;
  while (!q.empty()) {
    const std::size_t cur = q.front();
    q.pop_front();
    for (const auto& m : g.succ[cur]) {
      if (m.node == first) continue;
      if (m.node == then && (!best || depth[cur] + 1 < *best)) best = depth[cur] + 1;
      if (!depth.count(m.to)) {
        depth[m.to] = depth[cur] + 1;
        q.push_back(m.to);
      }
    }
  }
  return best;
}

}  // namespace oracle
