#include <cctype>
#include <filesystem>
#include <fstream>
#include <unordered_set>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "bpmnverify/checker.hpp"
#include "bpmnverify/ingest.hpp"
#include "bpmnverify/promela.hpp"
#include "bpmnverify/property.hpp"
#include "bpmnverify/reconfig.hpp"
#include "bpmnverify/report.hpp"
#include "bpmnverify/semantics.hpp"
#include "bpmnverify/spin_bridge.hpp"

namespace fs = std::filesystem;
using namespace bpmn;

namespace {

// Exit-code contract: 0 all valid, 1 property invalid / model
// violations, 2 input or environment error, 3 engine disagreement.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << content;
}

WorkflowModel load_model(const std::string& path) {
  try {
    ParseOutcome outcome = parse_file(path);
    for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << '\n';
    return outcome.model;
  } catch (const ParseError& e) {
    throw UsageError(path + ":" + std::to_string(e.line) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

Patch load_patch(const std::string& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && text[first] == '{') return parse_patch_json(text);
    return parse_patch(text);
  } catch (const ParseError& e) {
    throw UsageError(path + ":" + std::to_string(e.line) + ": " + e.what());
  }
}

Property resolve_property_flag(const std::string& flag) {
  if (flag.rfind("ltl:", 0) == 0) {
    const std::string path = flag.substr(4);
    std::string formula = read_file(path);
    while (!formula.empty() && std::isspace(static_cast<unsigned char>(formula.back())))
      formula.pop_back();
    std::unordered_set<std::string> taken;
    return Property::raw_ltl(formula, sanitize_name(fs::path(path).stem().string(), taken));
  }
  try {
    return parse_property_flag(flag);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void require_validated(const WorkflowModel& model, VerificationReport& report) {
  const auto violations = validate_wellformed(model);
  if (violations.empty()) return;
  for (const auto& v : violations)
    report.violations.push_back(to_string(v.code) + " " + v.subject + ": " + v.message);
  report.exit_code = 1;
}

void print_report(const VerificationReport& report, const std::string& format) {
  std::cout << (format == "json" ? render_json(report) : render_text(report));
}

// ---------------------------------------------------------------------------
// SPIN engine plan: which claim to run per property, and whether the
// SPIN verdict is inverted (Reachable passes when SPIN finds a
// violation of the corresponding never claim).
// ---------------------------------------------------------------------------

struct SpinPlan {
  PromelaProgram program;
  std::map<std::size_t, std::string> claim;  // property index -> claim ("assert" for deadlock)
  std::set<std::size_t> inverted;
  std::set<std::size_t> unsupported;  // no LTL form (NoDeadActivity)
};

bool emits_ltl(const Property& p) {
  switch (p.kind) {
    case Property::Kind::DeadlockFree:
    case Property::Kind::NoDeadActivity:
      return false;
    default:
      return true;
  }
}

SpinPlan make_spin_plan(const WorkflowModel& model,
                        const std::vector<Property>& properties, int bound) {
  std::vector<Property> extended = properties;
  std::map<std::size_t, std::size_t> reach_extra;  // property index -> extended index
  for (std::size_t i = 0; i < properties.size(); ++i) {
    if (properties[i].kind == Property::Kind::Reachable) {
      reach_extra[i] = extended.size();
      extended.push_back(Property::never_fires(properties[i].a));
    }
  }
  SpinPlan plan;
  plan.program = translate(model, extended, bound);
  // property_names aligns 1:1 with the ltl-emitting entries of
  // `extended`, in order.
  std::vector<std::string> name_of(extended.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < extended.size(); ++i)
    if (emits_ltl(extended[i])) name_of[i] = plan.program.property_names.at(next++);
  for (std::size_t i = 0; i < properties.size(); ++i) {
    switch (properties[i].kind) {
      case Property::Kind::DeadlockFree:
        plan.claim[i] = "assert";
        break;
      case Property::Kind::NoDeadActivity:
        plan.unsupported.insert(i);
        break;
      case Property::Kind::Reachable:
        plan.claim[i] = name_of[reach_extra[i]];
        plan.inverted.insert(i);
        break;
      default:
        plan.claim[i] = name_of[i];
        break;
    }
  }
  return plan;
}

VerdictView spin_verdict_view(const WorkflowModel& model, const SpinPlan& plan,
                              std::size_t prop_index, const SpinRun& run) {
  VerdictView view;
  const bool inverted = plan.inverted.count(prop_index) > 0;
  view.status = run.violated() != inverted ? "invalid" : "valid";
  if (run.trail) {
    try {
      Trace trace = map_trail(run, plan.program, model);
      Verdict shim;
      shim.status = Verdict::Status::Invalid;
      shim.counterexample = std::move(trace);
      VerdictView mapped = VerificationReport::view(model, shim);
      view.trace = std::move(mapped.trace);
      view.lasso_start = mapped.lasso_start;
      if (inverted) view.summary = "witness trace (reachability confirmed by SPIN)";
    } catch (const SpinError& e) {
      view.error = e.what();
    }
  }
  view.summary += view.summary.empty() ? "" : "; ";
  view.summary += "spin " + run.spin_version + ", errors: " + std::to_string(run.errors);
  return view;
}

// Runs the selected engines over the properties and fills the report.
void run_check(const WorkflowModel& model, const std::vector<Property>& properties,
               const std::string& engine, int bound, const SpinOptions& spin_options,
               VerificationReport& report) {
  report.engine = engine;
  report.bound = bound;

  const bool want_embedded = engine == "embedded" || engine == "both";
  const bool want_spin = engine == "spin" || engine == "both";

  if (want_embedded)
    for (const auto& p : properties)
      if (p.kind == Property::Kind::RawLtl)
        throw UsageError("raw LTL ('" + p.display() +
                         "') is SPIN-only; use --engine spin");

  std::vector<PropertyVerdict> embedded;
  if (want_embedded) embedded = check_all(model, properties, bound);

  std::optional<SpinPlan> plan;
  if (want_spin) {
    if (find_spin().empty())
      throw UsageError("SPIN not found (set BPMNVERIFY_SPIN or install spin)");
    plan = make_spin_plan(model, properties, bound);
  }

  for (std::size_t i = 0; i < properties.size(); ++i) {
    PropertyReport pr;
    pr.property = properties[i].display();
    if (want_embedded) {
      const PropertyVerdict& pv = embedded[i];
      if (pv.verdict) {
        pr.verdict = VerificationReport::view(model, *pv.verdict);
      } else {
        pr.verdict.status = "error";
        pr.verdict.error = pv.error;
      }
    }
    if (want_spin) {
      VerdictView sv;
      if (plan->unsupported.count(i)) {
        sv.status = "skipped";
        sv.summary = "no LTL form; embedded engine only";
      } else {
        SpinRun run = run_spin(plan->program, plan->claim.at(i), spin_options);
        sv = spin_verdict_view(model, *plan, i, run);
      }
      if (engine == "spin") {
        pr.verdict = sv;
      } else {
        pr.spin_verdict = sv;
        const bool comparable =
            (pr.verdict.is_valid() || pr.verdict.is_invalid()) &&
            (sv.status == "valid" || sv.status == "invalid");
        pr.engines_agree = !comparable || pr.verdict.status == sv.status;
        if (!pr.engines_agree) report.engines_agree = false;
      }
    }
    if (!pr.verdict.is_valid() && pr.verdict.status != "skipped")
      if (report.exit_code == 0) report.exit_code = 1;
    report.properties.push_back(std::move(pr));
  }
  if (!report.engines_agree) report.exit_code = 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BPMN workflow verification: validate, translate to Promela, "
               "model-check, and compare reconfigurations"};
  app.require_subcommand(1);

  std::string format = "text";
  app.add_option("--format", format, "Report format: text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  int bound = kDefaultTokenBound;
  double timeout = 60.0;
  bool keep_artifacts = false;

  std::string model_path, out_path, old_path, new_path, patch_path, dump_states;
  std::vector<std::string> prop_flags;
  std::string engine = "embedded";
  bool self_check = false;

  auto* validate_cmd = app.add_subcommand("validate", "Check structural well-formedness");
  validate_cmd->add_option("model", model_path, "Model file (.bpmn/.xml/.wf)")->required();

  auto* translate_cmd = app.add_subcommand("translate", "Generate Promela + symbol table");
  translate_cmd->add_option("model", model_path)->required();
  translate_cmd->add_option("--prop", prop_flags, "Property flag (repeatable)");
  translate_cmd->add_option("-o,--out", out_path, "Output .pml path");
  translate_cmd->add_option("--bound", bound, "Token bound K");

  auto* check_cmd = app.add_subcommand("check", "Verify properties");
  check_cmd->add_option("model", model_path)->required();
  check_cmd->add_option("--prop", prop_flags, "Property flag (repeatable)")->required();
  check_cmd->add_option("--engine", engine, "embedded | spin | both")
      ->check(CLI::IsMember({"embedded", "spin", "both"}));
  check_cmd->add_option("--bound", bound, "Token bound K");
  check_cmd->add_option("--timeout", timeout, "SPIN timeout in seconds");
  check_cmd->add_flag("--keep-artifacts", keep_artifacts, "Retain SPIN temp files");
  check_cmd->add_option("--dump-states", dump_states, "Write the explored state graph");

  auto* diff_cmd = app.add_subcommand("diff", "Diff two models into a patch");
  diff_cmd->add_option("old", old_path)->required();
  diff_cmd->add_option("new", new_path)->required();
  diff_cmd->add_option("-o,--out", out_path, "Patch output path");
  diff_cmd->add_flag("--self-check", self_check, "Verify apply(old, patch) == new");

  auto* apply_cmd = app.add_subcommand("apply", "Apply a patch to a model");
  apply_cmd->add_option("model", model_path)->required();
  apply_cmd->add_option("patch", patch_path)->required();
  apply_cmd->add_option("-o,--out", out_path, "Output .wf path");

  auto* reconfig_cmd = app.add_subcommand(
      "verify-reconfig", "Verify a reconfiguration old -> new against properties");
  reconfig_cmd->add_option("old", old_path)->required();
  reconfig_cmd->add_option("--patch", patch_path, "Reconfiguration patch file");
  reconfig_cmd->add_option("--new", new_path, "Reconfigured model file");
  reconfig_cmd->add_option("--prop", prop_flags, "Property flag (repeatable)")->required();
  reconfig_cmd->add_option("--engine", engine, "embedded | spin | both")
      ->check(CLI::IsMember({"embedded", "spin", "both"}));
  reconfig_cmd->add_option("--bound", bound, "Token bound K");
  reconfig_cmd->add_option("--timeout", timeout, "SPIN timeout in seconds");
  reconfig_cmd->add_flag("--keep-artifacts", keep_artifacts, "Retain SPIN temp files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // Fold CLI11's internal codes into the documented contract:
    // 0 for --help/--version, 2 for any usage error.
    return code == 0 ? 0 : 2;
  }

  try {
    SpinOptions spin_options;
    spin_options.timeout_seconds = timeout;
    spin_options.keep_artifacts = keep_artifacts;

    if (validate_cmd->parsed()) {
      WorkflowModel model = load_model(model_path);
      VerificationReport report;
      report.command = "validate";
      report.model_ids = {model.id};
      require_validated(model, report);
      std::cout << (format == "json"
                        ? render_json(report)
                        : report.model_ids[0] + ": " +
                              std::to_string(report.violations.size()) +
                              " violations\n" + [&] {
                                std::string s;
                                for (const auto& v : report.violations)
                                  s += "  " + v + "\n";
                                return s;
                              }());
      return report.exit_code;
    }

    if (translate_cmd->parsed()) {
      WorkflowModel model = load_model(model_path);
      VerificationReport report;
      report.command = "translate";
      report.model_ids = {model.id};
      require_validated(model, report);
      if (report.exit_code != 0) {
        print_report(report, format);
        return report.exit_code;
      }
      std::vector<Property> props;
      for (const auto& f : prop_flags) props.push_back(resolve_property_flag(f));
      PromelaProgram program = translate(model, props, bound);
      if (out_path.empty())
        out_path = fs::path(model_path).stem().string() + ".pml";
      write_file(out_path, program.source);
      write_file(out_path + ".sym", program.symbol_table_text());
      std::cout << "wrote " << out_path << " and " << out_path << ".sym\n";
      for (const auto& name : program.property_names)
        std::cout << "ltl block: " << name << '\n';
      return 0;
    }

    if (check_cmd->parsed()) {
      WorkflowModel model = load_model(model_path);
      VerificationReport report;
      report.command = "check";
      report.model_ids = {model.id};
      require_validated(model, report);
      if (report.exit_code != 0) {
        print_report(report, format);
        return report.exit_code;
      }
      std::vector<Property> props;
      for (const auto& f : prop_flags) props.push_back(resolve_property_flag(f));
      // With a single model in play, an unresolved target is an input
      // error, not a verdict. (verify-reconfig keeps per-model errors:
      // a patch may add or remove the targeted node.)
      for (const auto& p : props)
        for (const auto& target : p.targets())
          if (!model.find_node(target))
            throw UsageError("property '" + p.display() + "' targets unknown node '" +
                             target + "'");
      if (!dump_states.empty())
        write_file(dump_states, export_state_graph(model, explore(model, bound)));
      run_check(model, props, engine, bound, spin_options, report);
      print_report(report, format);
      return report.exit_code;
    }

    if (diff_cmd->parsed()) {
      WorkflowModel old_model = load_model(old_path);
      WorkflowModel new_model = load_model(new_path);
      Patch patch = diff(old_model, new_model);
      patch.description = fs::path(old_path).stem().string() + " -> " +
                          fs::path(new_path).stem().string();
      if (self_check && !graph_equal(apply_patch(old_model, patch), new_model))
        throw UsageError("diff self-check failed: apply(old, patch) != new");
      const std::string text =
          format == "json" ? emit_patch_json(patch) : emit_patch(patch);
      if (out_path.empty())
        std::cout << text;
      else
        write_file(out_path, text);
      return 0;
    }

    if (apply_cmd->parsed()) {
      WorkflowModel model = load_model(model_path);
      Patch patch = load_patch(patch_path);
      try {
        WorkflowModel result = apply_patch(model, patch);
        const std::string text = emit_dsl(result);
        if (out_path.empty())
          std::cout << text;
        else
          write_file(out_path, text);
        return 0;
      } catch (const PatchError& e) {
        throw UsageError(e.what());
      }
    }

    if (reconfig_cmd->parsed()) {
      if (patch_path.empty() == new_path.empty())
        throw UsageError("verify-reconfig needs exactly one of --patch or --new");
      WorkflowModel old_model = load_model(old_path);
      WorkflowModel new_model;
      if (!patch_path.empty()) {
        Patch patch = load_patch(patch_path);
        try {
          new_model = apply_patch(old_model, patch);
        } catch (const PatchError& e) {
          throw UsageError(e.what());
        }
      } else {
        new_model = load_model(new_path);
      }

      VerificationReport report;
      report.command = "verify-reconfig";
      report.model_ids = {old_model.id, new_model.id};
      require_validated(new_model, report);
      if (report.exit_code != 0) {
        print_report(report, format);
        return report.exit_code;
      }

      std::vector<Property> props;
      for (const auto& f : prop_flags) props.push_back(resolve_property_flag(f));

      VerificationReport old_report, new_report;
      run_check(old_model, props, engine, bound, spin_options, old_report);
      run_check(new_model, props, engine, bound, spin_options, new_report);

      report.engine = engine;
      report.bound = bound;
      report.engines_agree = old_report.engines_agree && new_report.engines_agree;
      for (std::size_t i = 0; i < props.size(); ++i) {
        PropertyReport pr = new_report.properties[i];
        pr.old_verdict = old_report.properties[i].verdict;
        const bool old_ok = pr.old_verdict->is_valid();
        const bool new_ok = pr.verdict.is_valid();
        pr.change = old_ok == new_ok ? "preserved"
                    : old_ok         ? "newly-broken"
                                     : "newly-fixed";
        if (!new_ok && report.exit_code == 0) report.exit_code = 1;
        report.properties.push_back(std::move(pr));
      }
      if (!report.engines_agree) report.exit_code = 3;
      print_report(report, format);
      return report.exit_code;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const SpinError& e) {
    std::cerr << "spin error: " << e.what() << '\n';
    return 2;
  } catch (const TranslateError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
