#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "bpmnverify/model.hpp"
#include "bpmnverify/property.hpp"
#include "bpmnverify/semantics.hpp"

namespace bpmn {

struct SymbolEntry {
  std::string identifier;  // Promela identifier
  int code = 0;            // numeric code (lastFired value for nodes)
};

struct PromelaProgram {
  std::string source;
  // BPMN node/flow id -> (identifier, code); injective in both
  // directions. Nodes carry their lastFired codes; flows continue the
  // numbering after the last node.
  std::map<std::string, SymbolEntry> symbols;
  std::vector<std::string> property_names;

  // Side-file rendering: one `<bpmn-id> <identifier> <code>` line per
  // symbol, in code order.
  std::string symbol_table_text() const;
};

struct TranslateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Turns a raw label into a fresh Promela identifier: non-conforming
// characters become '_', keywords get a trailing '_', collisions with
// `taken` get a _2/_3/... suffix, and an empty result falls back to
// "n<fallback_code>". The result is added to `taken`.
std::string sanitize_name(const std::string& raw, std::unordered_set<std::string>& taken,
                          int fallback_code = 0);

// Translates a validated model plus properties into a single-proctype
// Promela program. Output is byte-deterministic: canonical declaration
// order, one guarded atomic do-alternative per (node, alternative)
// firing rule, LF line endings, 2-space indent. `bound` mirrors the
// embedded token bound: token increments assert `tok < bound` so unsafe
// models fail fast with a trail.
PromelaProgram translate(const WorkflowModel& model,
                         const std::vector<Property>& properties,
                         int bound = kDefaultTokenBound);

}  // namespace bpmn
