#include "bpmnverify/spin_bridge.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <sys/wait.h>

namespace bpmn {

namespace fs = std::filesystem;

namespace {

struct CommandResult {
  int exit_status = 0;
  std::string output;  // stdout + stderr, interleaved per command
};

CommandResult run_command(const fs::path& dir, const std::string& cmd,
                          double timeout_seconds) {
  std::ostringstream full;
  full << "cd '" << dir.string() << "' && timeout -k 2 "
       << static_cast<long>(timeout_seconds < 1 ? 1 : timeout_seconds) << " sh -c \""
       << cmd << "\" 2>&1";
  CommandResult result;
  FILE* pipe = popen(full.str().c_str(), "r");
  if (!pipe)
    throw SpinError(SpinError::Code::SpinNotFound, "cannot spawn shell for SPIN");
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
  const int status = pclose(pipe);
  result.exit_status = status >= 0 && WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (result.exit_status == 124)
    throw SpinError(SpinError::Code::Timeout,
                    "SPIN step timed out after " + std::to_string(timeout_seconds) +
                        "s: " + cmd);
  return result;
}

// RAII temp directory, removed on scope exit unless released.
class WorkDir {
 public:
  explicit WorkDir(const std::string& fixed) {
    if (!fixed.empty()) {
      path_ = fixed;
      fs::create_directories(path_);
      owned_ = false;
      return;
    }
    std::string tmpl = (fs::temp_directory_path() / "bpmnverify-XXXXXX").string();
    if (!mkdtemp(tmpl.data()))
      throw SpinError(SpinError::Code::SpinNotFound, "cannot create temp directory");
    path_ = tmpl;
  }
  ~WorkDir() {
    if (owned_ && !released_) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
  }
  const fs::path& path() const { return path_; }
  void release() { released_ = true; }

 private:
  fs::path path_;
  bool owned_ = true;
  bool released_ = false;
};

}  // namespace

std::string find_spin() {
  if (const char* override = std::getenv("BPMNVERIFY_SPIN")) {
    if (*override && fs::exists(override)) return override;
    return "";
  }
  const char* path_env = std::getenv("PATH");
  if (!path_env) return "";
  std::istringstream dirs(path_env);
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (dir.empty()) continue;
    fs::path candidate = fs::path(dir) / "spin";
    std::error_code ec;
    if (fs::exists(candidate, ec) && !fs::is_directory(candidate, ec))
      return candidate.string();
  }
  return "";
}

namespace {

std::string detect_version(const fs::path& dir, const std::string& spin,
                           double timeout) {
  CommandResult res = run_command(dir, spin + " -V", timeout);
  std::smatch m;
  static const std::regex version_re(R"(Version (\d+)(\.[\w.]+)?)");
  if (!std::regex_search(res.output, m, version_re))
    throw SpinError(SpinError::Code::UnrecognizedOutput,
                    "cannot parse 'spin -V' output: " + res.output);
  if (std::stoi(m[1].str()) < 6)
    throw SpinError(SpinError::Code::SpinVersionUnsupported,
                    "SPIN >= 6 required for ltl blocks, found: " + m[0].str());
  return m[0].str();
}

std::vector<SpinTrailStep> parse_trail_output(const std::string& text,
                                              std::size_t* lasso_step) {
  std::vector<SpinTrailStep> steps;
  std::map<std::string, int> globals;
  static const std::regex assign_re(R"(^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(-?\d+)\s*$)");
  std::istringstream in(text);
  std::string line;
  int last_fired = 0;
  while (std::getline(in, line)) {
    if (line.find("START OF CYCLE") != std::string::npos) {
      if (lasso_step) *lasso_step = steps.size();
      continue;
    }
    std::smatch m;
    if (!std::regex_match(line, m, assign_re)) continue;
    const std::string name = m[1].str();
    const int value = std::stoi(m[2].str());
    globals[name] = value;
    if (name == "lastFired" && value != 0 && value != last_fired) {
      // The lastFired update is the final statement of each firing, so
      // the accumulated globals are the marking after the step.
      last_fired = value;
      SpinTrailStep step;
      step.fired_code = value;
      for (const auto& [k, v] : globals) step.globals.emplace_back(k, v);
      steps.push_back(std::move(step));
    } else if (name == "lastFired") {
      last_fired = value;
    }
  }
  return steps;
}

}  // namespace

SpinRun run_spin(const PromelaProgram& program, const std::string& property,
                 const SpinOptions& options) {
  const std::string spin = find_spin();
  if (spin.empty())
    throw SpinError(SpinError::Code::SpinNotFound,
                    "SPIN executable not found (set BPMNVERIFY_SPIN or install spin)");

  const bool assert_run = property == "assert";
  if (!assert_run) {
    bool known = false;
    for (const auto& name : program.property_names) known |= name == property;
    if (!known)
      throw SpinError(SpinError::Code::UnrecognizedOutput,
                      "program has no ltl block named '" + property + "'");
  }

  const auto t0 = std::chrono::steady_clock::now();
  WorkDir work(options.work_dir);
  SpinRun run;
  run.property = property;
  run.spin_version = detect_version(work.path(), spin, options.timeout_seconds);

  {
    std::ofstream out(work.path() / "model.pml", std::ios::binary);
    out << program.source;
  }

  const bool has_claims = !program.property_names.empty();
  const std::string select = assert_run ? "" : " -N " + property;
  CommandResult gen =
      run_command(work.path(), spin + " -a" + select + " model.pml",
                  options.timeout_seconds);
  if (!fs::exists(work.path() / "pan.c"))
    throw SpinError(SpinError::Code::CompileFailed,
                    "spin -a produced no pan.c:\n" + gen.output);

  // A claim-less safety run still needs -DNOCLAIM when ltl blocks exist.
  const std::string noclaim = assert_run && has_claims ? " -DNOCLAIM" : "";
  CommandResult cc = run_command(
      work.path(), "cc -O2" + noclaim + " -o pan pan.c", options.timeout_seconds);
  if (cc.exit_status != 0)
    throw SpinError(SpinError::Code::CompileFailed,
                    "pan compilation failed:\n" + cc.output);

  const std::string pan_flags = assert_run ? "-m100000" : "-a -m100000";
  CommandResult pan =
      run_command(work.path(), "./pan " + pan_flags, options.timeout_seconds);
  run.exit_status = pan.exit_status;
  run.stdout_text = gen.output + pan.output;

  std::smatch m;
  static const std::regex errors_re(R"(errors:\s*(\d+))");
  std::string pan_out = pan.output;
  if (!std::regex_search(pan_out, m, errors_re))
    throw SpinError(SpinError::Code::UnrecognizedOutput,
                    "no 'errors: N' in pan output:\n" + pan.output);
  run.errors = std::stoi(m[1].str());

  if (run.errors > 0 && fs::exists(work.path() / "model.pml.trail")) {
    CommandResult replay = run_command(
        work.path(), spin + " -t -p -g" + select + " model.pml",
        options.timeout_seconds);
    run.stderr_text = replay.output;
    std::size_t lasso = static_cast<std::size_t>(-1);
    run.trail = parse_trail_output(replay.output, &lasso);
  }

  run.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (options.keep_artifacts) {
    work.release();
    run.artifacts_dir = work.path().string();
  }
  return run;
}

Trace map_trail(const SpinRun& run, const PromelaProgram& program,
                const WorkflowModel& model) {
  if (!run.trail)
    throw SpinError(SpinError::Code::UnrecognizedOutput,
                    "run reported no trail (property '" + run.property + "')");

  // Reverse lookups from the symbol table.
  std::map<int, std::string> node_by_code;
  std::map<std::string, std::string> flow_by_ident;
  for (const auto& [bpmn_id, entry] : program.symbols) {
    if (model.find_node(bpmn_id)) node_by_code[entry.code] = bpmn_id;
    if (model.find_flow(bpmn_id)) flow_by_ident[entry.identifier] = bpmn_id;
  }

  Trace trace;
  Marking previous = initial_marking(model);
  for (const auto& step : run.trail.value()) {
    auto node_it = node_by_code.find(step.fired_code);
    if (node_it == node_by_code.end())
      throw SpinError(SpinError::Code::UnmappableStep,
                      "trail fired unknown code " + std::to_string(step.fired_code));
    const std::string& node_id = node_it->second;

    Marking marking;
    marking.tokens.assign(model.flows.size(), 0);
    for (const auto& [ident, value] : step.globals) {
      if (ident == "lastFired") continue;
      if (ident == "completed") {
        marking.completed = value;
        continue;
      }
      auto flow_it = flow_by_ident.find(ident);
      if (flow_it == flow_by_ident.end())
        throw SpinError(SpinError::Code::UnmappableStep,
                        "trail references unknown variable '" + ident + "'");
      const auto idx = model.flow_index(flow_it->second);
      marking.tokens[*idx] = static_cast<std::uint8_t>(value);
    }

    // Selector reconstruction from the marking delta.
    std::string alternative;
    const FlowNode* node = model.find_node(node_id);
    const bool in_selector =
        node->kind == NodeKind::xor_join() ||
        (node->kind.tag == NodeKind::Tag::EndEvent && model.incoming(node_id).size() > 1);
    if (in_selector) {
      for (std::size_t f : model.incoming(node_id))
        if (marking.tokens[f] < previous.tokens[f]) alternative = model.flows[f].id;
    } else if (node->kind == NodeKind::xor_split()) {
      for (std::size_t f : model.outgoing(node_id))
        if (marking.tokens[f] > previous.tokens[f]) alternative = model.flows[f].id;
    }

    trace.steps.push_back({node_id, alternative, marking});
    previous = marking;
  }
  return trace;
}

}  // namespace bpmn
