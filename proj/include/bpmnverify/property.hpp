#pragma once

#include <string>
#include <vector>

#include "bpmnverify/model.hpp"

namespace bpmn {

// A requirement template over a workflow model, or a raw LTL formula
// passed through to SPIN unchanged.
struct Property {
  enum class Kind {
    DeadlockFree,
    ProperCompletion,
    Reachable,
    NoDeadActivity,
    NeverFires,
    Precedence,
    Response,
    RawLtl,
  };

  Kind kind = Kind::DeadlockFree;
  std::string a;    // target node (Reachable/NeverFires), first/trigger (Precedence/Response)
  std::string b;    // second/response node
  std::string raw;  // RawLtl formula body
  std::string raw_name = "raw";  // ltl block name for RawLtl

  static Property deadlock_free() { return {Kind::DeadlockFree, "", "", "", ""}; }
  static Property proper_completion() { return {Kind::ProperCompletion, "", "", "", ""}; }
  static Property reachable(std::string node) {
    return {Kind::Reachable, std::move(node), "", "", ""};
  }
  static Property no_dead_activity() { return {Kind::NoDeadActivity, "", "", "", ""}; }
  static Property never_fires(std::string node) {
    return {Kind::NeverFires, std::move(node), "", "", ""};
  }
  static Property precedence(std::string first, std::string then) {
    return {Kind::Precedence, std::move(first), std::move(then), "", ""};
  }
  static Property response(std::string trigger, std::string response) {
    return {Kind::Response, std::move(trigger), std::move(response), "", ""};
  }
  static Property raw_ltl(std::string formula, std::string name = "raw") {
    return {Kind::RawLtl, "", "", std::move(formula), std::move(name)};
  }

  // Stable display form matching the CLI property flags:
  // deadlock-free, proper-completion, reach:<id>, no-dead-activity,
  // never:<id>, prec:<a>,<b>, resp:<a>,<b>, ltl:<name>.
  std::string display() const;

  // Node ids this property references (empty for model-wide templates).
  std::vector<std::string> targets() const;
};

// Parses a CLI property flag into a Property; throws
// std::invalid_argument on unknown syntax.
Property parse_property_flag(const std::string& flag);

}  // namespace bpmn
