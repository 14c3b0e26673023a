#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bpmnverify/checker.hpp"
#include "bpmnverify/model.hpp"

namespace bpmn {

// A trace step resolved against the model, ready for rendering.
struct TraceStepView {
  std::string node;
  std::string name;  // display label (falls back to the id)
  std::string kind;
  std::string alternative;
  std::string marking;
};

struct VerdictView {
  std::string status;  // valid | invalid | bound-exceeded | error | skipped
  std::string error;
  std::size_t states = 0;
  std::size_t edges = 0;
  double elapsed_ms = 0.0;
  std::string summary;
  std::vector<std::string> dead_nodes;
  std::vector<TraceStepView> trace;
  std::optional<std::size_t> lasso_start;

  bool is_valid() const { return status == "valid"; }
  bool is_invalid() const { return status == "invalid"; }
};

struct PropertyReport {
  std::string property;
  VerdictView verdict;                     // current (or new) model
  std::optional<VerdictView> old_verdict;  // verify-reconfig only
  std::string change;                      // preserved | newly-broken | newly-fixed
  std::optional<VerdictView> spin_verdict;
  bool engines_agree = true;
};

// The one internal value both renderings are generated from; the
// machine-readable and human forms carry identical verdict content.
struct VerificationReport {
  std::string command;  // validate | check | verify-reconfig | ...
  std::vector<std::string> model_ids;
  std::string engine;  // embedded | spin | both
  int bound = 0;
  std::vector<PropertyReport> properties;
  std::vector<std::string> violations;  // validate output
  bool engines_agree = true;
  int exit_code = 0;

  static VerdictView view(const WorkflowModel& model, const Verdict& verdict);
};

std::string render_text(const VerificationReport& report);
std::string render_json(const VerificationReport& report);

}  // namespace bpmn
