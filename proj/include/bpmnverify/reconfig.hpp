#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bpmnverify/model.hpp"

namespace bpmn {

struct AddNode {
  FlowNode node;
};
struct RemoveNode {
  std::string id;
};
struct AddFlow {
  SequenceFlow flow;
};
struct RemoveFlow {
  std::string id;
};
struct RerouteFlow {
  std::string id;
  std::string source;
  std::string target;
};

using PatchOp = std::variant<AddNode, RemoveNode, AddFlow, RemoveFlow, RerouteFlow>;

struct Patch {
  std::vector<PatchOp> ops;
  std::string description;

  bool empty() const { return ops.empty(); }
};

struct PatchError : std::runtime_error {
  enum class Code { UnknownId, DuplicateId };
  Code code;
  std::size_t op_index;
  std::string id;

  PatchError(Code code_, std::size_t op_index_, std::string id_)
      : std::runtime_error("patch op " + std::to_string(op_index_) + ": " +
                           (code_ == Code::UnknownId ? "unknown id '" : "duplicate id '") +
                           id_ + "'"),
        code(code_),
        op_index(op_index_),
        id(std::move(id_)) {}
};

// Applies ops in order to a copy of `model`; the input is untouched.
// RemoveNode cascades over incident flows. A RemoveNode immediately
// followed by AddNode of the same id is a replace-in-place: incident
// flows survive. The result may be ill-formed; callers re-validate.
// Throws PatchError naming the first failing op (atomicity: nothing is
// returned on failure).
WorkflowModel apply_patch(const WorkflowModel& model, const Patch& patch);

// Structural diff such that apply_patch(old_model, diff(old_model,
// new_model)) == new_model up to element order (see graph_equal).
// Deterministic op order: node additions, replace-in-place pairs,
// reroutes of persisting flows, flow removals, node removals, then flow
// additions, each group sorted by id. A node whose name or kind changed
// under the same id becomes a RemoveNode+AddNode replace-in-place pair.
Patch diff(const WorkflowModel& old_model, const WorkflowModel& new_model);

// Patch text format, one op per line (see docs/formats.md):
//   add-node <kind> <id> ["name"]
//   remove-node <id>
//   add-flow <id> <src> -> <tgt>
//   remove-flow <id>
//   reroute-flow <id> <src> -> <tgt>
// `#` starts a comment; a leading `# description:` line carries the
// patch description.
Patch parse_patch(std::string_view text);
std::string emit_patch(const Patch& patch);

// Equivalent machine-readable serialization (JSON).
Patch parse_patch_json(std::string_view text);
std::string emit_patch_json(const Patch& patch);

}  // namespace bpmn
