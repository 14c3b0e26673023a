#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bpmnverify/model.hpp"

namespace bpmn {

enum class SourceFormat { BpmnXml, WorkflowDsl };

// Format detection by file extension: .bpmn/.xml vs .wf.
// Throws std::invalid_argument for anything else.
SourceFormat detect_format(const std::string& path);

struct ParseError : std::runtime_error {
  int line = 0;
  int column = 0;  // 0 when unknown (DSL errors carry lines only)

  ParseError(std::string msg, int line_, int column_ = 0)
      : std::runtime_error(std::move(msg)), line(line_), column(column_) {}
};

struct ParseOutcome {
  WorkflowModel model;
  std::vector<std::string> warnings;  // unknown elements inside <process>
};

// Parses the recognized BPMN 2.0 XML subset: process, startEvent,
// endEvent, task, exclusiveGateway, parallelGateway, sequenceFlow.
// Element namespaces are ignored; matching is by local name. Gateway
// direction is inferred from in/out degree. The result is not
// validated; callers run validate_wellformed.
ParseOutcome parse_bpmn_xml(std::string_view input);

// Line-oriented workflow DSL; see emit_dsl for the canonical shape.
WorkflowModel parse_dsl(std::string_view text);

// Deterministic emitter; parse_dsl(emit_dsl(m)) == m.
std::string emit_dsl(const WorkflowModel& model);

// Dispatches on the detected (or forced) format.
ParseOutcome parse_file(const std::string& path);

}  // namespace bpmn
