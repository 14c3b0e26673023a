#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bpmnverify/model.hpp"
#include "bpmnverify/property.hpp"
#include "bpmnverify/semantics.hpp"

namespace bpmn {

struct TraceStep {
  std::string node;         // fired node id
  std::string alternative;  // selector flow id, empty when not applicable
  Marking after;
};

// A counterexample execution. Step 0 fires from the initial marking.
// For liveness violations `lasso_start` marks the cycle re-entry step:
// the marking before step lasso_start equals the final marking.
// lasso_start == steps.size() encodes stuttering in the final (terminal)
// state.
struct Trace {
  std::vector<TraceStep> steps;
  std::optional<std::size_t> lasso_start;
};

struct CheckStats {
  std::size_t states = 0;
  std::size_t edges = 0;
  double elapsed_ms = 0.0;
  std::string summary;  // frontier summary for witness-less verdicts
};

struct Verdict {
  enum class Status { Valid, Invalid, BoundExceeded };
  Status status = Status::Valid;
  std::optional<Trace> counterexample;  // present iff Invalid
  CheckStats stats;
  std::vector<std::string> dead_nodes;  // NoDeadActivity: all dead tasks
};

std::string to_string(Verdict::Status status);

struct CheckError : std::runtime_error {
  enum class Code { UnsupportedOnEmbeddedPath, UnknownNode };
  Code code;

  CheckError(Code code_, const std::string& what)
      : std::runtime_error(what), code(code_) {}
};

// Checks one property by exhaustive bounded exploration. Throws
// CheckError for RawLtl (SPIN-only) and for unresolved target nodes.
// If exploration pruned at the bound, a would-be Valid verdict is
// downgraded to BoundExceeded; Invalid stays Invalid (the witness lies
// inside the explored space).
Verdict check(const WorkflowModel& model, const Property& property,
              int bound = kDefaultTokenBound);

// Same, over a pre-explored graph (explored with the same model).
Verdict check_on_graph(const WorkflowModel& model, const StateGraph& graph,
                       const Property& property);

struct PropertyVerdict {
  Property property;
  std::optional<Verdict> verdict;  // absent on error
  std::string error;
};

// Maps check over the properties, sharing one exploration. Per-property
// errors are collected, never aborting the batch.
std::vector<PropertyVerdict> check_all(const WorkflowModel& model,
                                       const std::vector<Property>& properties,
                                       int bound = kDefaultTokenBound);

// Replays a trace through `fire`; returns the final marking, or nullopt
// if any step is illegal or disagrees with the recorded marking.
std::optional<Marking> replay_trace(const WorkflowModel& model, const Trace& trace,
                                    int bound = kDefaultTokenBound);

}  // namespace bpmn
