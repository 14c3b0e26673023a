#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bpmnverify/checker.hpp"
#include "bpmnverify/promela.hpp"

namespace bpmn {

struct SpinError : std::runtime_error {
  enum class Code {
    SpinNotFound,
    SpinVersionUnsupported,
    CompileFailed,
    Timeout,
    UnmappableStep,
    UnrecognizedOutput,
  };
  Code code;

  SpinError(Code code_, const std::string& what)
      : std::runtime_error(what), code(code_) {}
};

struct SpinOptions {
  double timeout_seconds = 60.0;
  bool keep_artifacts = false;
  std::string work_dir;  // empty: fresh temp directory per run
};

// One trail step reconstructed from the pan/spin output: the fired
// node's numeric code plus the global variable values printed after the
// step.
struct SpinTrailStep {
  int fired_code = 0;
  std::vector<std::pair<std::string, int>> globals;  // identifier -> value
};

struct SpinRun {
  std::string property;  // ltl block name, or "assert" for the deadlock check
  int exit_status = 0;
  int errors = -1;  // parsed from "errors: N"
  std::string stdout_text;
  std::string stderr_text;
  std::optional<std::vector<SpinTrailStep>> trail;
  double elapsed_seconds = 0.0;
  std::string spin_version;
  std::string artifacts_dir;  // retained only with keep_artifacts

  bool violated() const { return errors > 0; }
};

// Locates the SPIN executable: $BPMNVERIFY_SPIN overrides, otherwise
// the system path is searched. Empty result means not found.
std::string find_spin();

// Runs SPIN's generate-compile-verify sequence on the program in a
// private work directory. `property` names an emitted ltl block;
// "assert" selects the claim-less safety run (assertions catch both
// deadlock and improper completion). On a violation the trail is
// replayed and parsed.
SpinRun run_spin(const PromelaProgram& program, const std::string& property,
                 const SpinOptions& options = {});

// Rebuilds a model-level Trace from a violation trail using the
// program's symbol table: fired node ids come from lastFired
// assignments, markings from the token variables. Throws
// SpinError(UnmappableStep) on symbols the table does not know.
Trace map_trail(const SpinRun& run, const PromelaProgram& program,
                const WorkflowModel& model);

}  // namespace bpmn
