#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bpmnverify/model.hpp"

namespace bpmn {

inline constexpr int kDefaultTokenBound = 2;

// One execution state: token counts per sequence flow (indexed by the
// flow's position in the model, i.e. document order) plus the number of
// end-event firings. Value semantics; equality and hashing are over the
// counts and the completion counter.
struct Marking {
  std::vector<std::uint8_t> tokens;
  int completed = 0;

  int token(std::size_t flow_index) const { return tokens[flow_index]; }
  int total_tokens() const;
  bool all_zero() const;
  bool properly_completed() const { return completed > 0 && all_zero(); }

  // Positive counts keyed by flow id, for reporting.
  std::map<std::string, int> positive_tokens(const WorkflowModel& model) const;
  std::string summary(const WorkflowModel& model) const;

  friend bool operator==(const Marking& a, const Marking& b) {
    return a.completed == b.completed && a.tokens == b.tokens;
  }
};

struct MarkingHash {
  std::size_t operator()(const Marking& m) const;
};

struct FireOutcome {
  enum class Code { Ok, NotEnabled, MissingSelector, BoundExceeded };
  Code code = Code::Ok;
  Marking marking;   // valid iff code == Ok
  std::string flow;  // offending flow for BoundExceeded

  bool ok() const { return code == Code::Ok; }
};

// Tokens on each start event's outgoing flow; completed = 0.
// Requires a well-formed model.
Marking initial_marking(const WorkflowModel& model);

// Node ids enabled in `marking`, in canonical (document) node order.
// Start events never appear; they fire implicitly at instantiation.
std::vector<std::string> enabled(const WorkflowModel& model, const Marking& marking);

// Fires one node. `alternative` selects the consumed input flow for
// XOR-joins and multi-input end events, or the produced output flow for
// XOR-splits; it must be empty otherwise. Token counts above `bound`
// are never constructed; the attempt reports BoundExceeded instead.
FireOutcome fire(const WorkflowModel& model, const Marking& marking,
                 const std::string& node_id, const std::string& alternative = "",
                 int bound = kDefaultTokenBound);

// Enabled (node, alternative) pairs in canonical order: nodes in
// document order, alternatives in flow document order. The alternative
// is empty for nodes that need no selector.
std::vector<std::pair<std::string, std::string>> enabled_firings(
    const WorkflowModel& model, const Marking& marking);

struct StateEdge {
  std::size_t from;
  std::string node;         // fired node id
  std::string alternative;  // selector, empty when not applicable
  std::size_t to;
};

struct StateGraph {
  std::vector<Marking> states;
  std::vector<StateEdge> edges;
  std::size_t initial = 0;
  bool bound_exceeded = false;

  // BFS discovery bookkeeping: depth of each state and the edge by
  // which it was first discovered (edge index, or npos for the
  // initial state). First discovery under canonical expansion order
  // makes shortest witness paths and their tie-breaking deterministic.
  std::vector<std::size_t> depth;
  std::vector<std::size_t> discovered_by;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::vector<std::size_t> out_edges(std::size_t state) const;
};

// Breadth-first exhaustive exploration from the initial marking,
// expanding firings in canonical order. Branches whose firing would
// exceed the bound are pruned and flagged.
StateGraph explore(const WorkflowModel& model, int bound = kDefaultTokenBound);

// Debug export: `state <idx> <marking>` lines then sorted
// `edge <from> <node-id> <to>` lines.
std::string export_state_graph(const WorkflowModel& model, const StateGraph& graph);

}  // namespace bpmn
