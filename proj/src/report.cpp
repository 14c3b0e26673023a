#include "bpmnverify/report.hpp"

#include <sstream>

#include "json.hpp"

namespace bpmn {

VerdictView VerificationReport::view(const WorkflowModel& model,
                                     const Verdict& verdict) {
  VerdictView out;
  out.status = to_string(verdict.status);
  out.states = verdict.stats.states;
  out.edges = verdict.stats.edges;
  out.elapsed_ms = verdict.stats.elapsed_ms;
  out.summary = verdict.stats.summary;
  out.dead_nodes = verdict.dead_nodes;
  if (verdict.counterexample) {
    out.lasso_start = verdict.counterexample->lasso_start;
    Marking current = initial_marking(model);
    for (const auto& step : verdict.counterexample->steps) {
      TraceStepView view;
      view.node = step.node;
      view.alternative = step.alternative;
      if (const FlowNode* n = model.find_node(step.node)) {
        view.name = n->name.empty() ? n->id : n->name;
        view.kind = n->kind.keyword();
      } else {
        view.name = step.node;
      }
      view.marking = step.after.summary(model);
      out.trace.push_back(std::move(view));
      current = step.after;
    }
  }
  return out;
}

namespace {

void render_verdict_text(std::ostringstream& out, const VerdictView& v,
                         const std::string& indent) {
  out << v.status;
  if (!v.error.empty()) out << " (" << v.error << ")";
  if (v.states > 0) out << "  [" << v.states << " states, " << v.edges << " edges]";
  out << '\n';
  if (!v.summary.empty()) out << indent << v.summary << '\n';
  for (std::size_t i = 0; i < v.trace.size(); ++i) {
    const TraceStepView& s = v.trace[i];
    if (v.lasso_start && *v.lasso_start == i) out << indent << "-- cycle begins --\n";
    out << indent << "step " << i + 1 << ": fire " << s.kind << " '" << s.name << "'";
    if (!s.alternative.empty()) out << " via " << s.alternative;
    out << " -> tokens: " << s.marking << '\n';
  }
  if (v.lasso_start && *v.lasso_start == v.trace.size() && !v.trace.empty())
    out << indent << "-- stutters forever in the final state --\n";
}

nlohmann::json verdict_json(const VerdictView& v) {
  nlohmann::json j;
  j["status"] = v.status;
  if (!v.error.empty()) j["error"] = v.error;
  j["states"] = v.states;
  j["edges"] = v.edges;
  j["elapsed_ms"] = v.elapsed_ms;
  if (!v.summary.empty()) j["summary"] = v.summary;
  if (!v.dead_nodes.empty()) j["dead_nodes"] = v.dead_nodes;
  if (!v.trace.empty() || v.is_invalid()) {
    auto& steps = j["trace"] = nlohmann::json::array();
    for (const auto& s : v.trace) {
      nlohmann::json step;
      step["node"] = s.node;
      step["name"] = s.name;
      step["kind"] = s.kind;
      if (!s.alternative.empty()) step["alternative"] = s.alternative;
      step["marking"] = s.marking;
      steps.push_back(std::move(step));
    }
    if (v.lasso_start) j["lasso_start"] = *v.lasso_start;
  }
  return j;
}

}  // namespace

std::string render_text(const VerificationReport& report) {
  std::ostringstream out;
  out << report.command << ": ";
  for (std::size_t i = 0; i < report.model_ids.size(); ++i)
    out << (i ? " -> " : "") << report.model_ids[i];
  out << "\n";
  if (!report.engine.empty())
    out << "engine: " << report.engine << ", bound: " << report.bound << '\n';

  if (report.command == "validate") {
    out << report.violations.size() << " violations\n";
    for (const auto& v : report.violations) out << "  " << v << '\n';
  }

  for (const auto& p : report.properties) {
    out << p.property << ": ";
    if (p.old_verdict) {
      out << "old " << p.old_verdict->status << ", new ";
      render_verdict_text(out, p.verdict, "    ");
      out << "  change: " << p.change << '\n';
    } else {
      render_verdict_text(out, p.verdict, "    ");
    }
    if (p.spin_verdict) {
      out << "  spin: " << p.spin_verdict->status
          << (p.engines_agree ? " (engines agree)" : " (ENGINES DISAGREE)") << '\n';
    }
  }
  if (report.engine == "both")
    out << (report.engines_agree ? "engines agree\n" : "ENGINES DISAGREE\n");
  out << "exit: " << report.exit_code << '\n';
  return out.str();
}

std::string render_json(const VerificationReport& report) {
  nlohmann::json j;
  j["command"] = report.command;
  j["models"] = report.model_ids;
  if (!report.engine.empty()) {
    j["engine"] = report.engine;
    j["bound"] = report.bound;
  }
  if (report.command == "validate") j["violations"] = report.violations;
  auto& props = j["properties"] = nlohmann::json::array();
  for (const auto& p : report.properties) {
    nlohmann::json pj;
    pj["property"] = p.property;
    pj["verdict"] = verdict_json(p.verdict);
    if (p.old_verdict) {
      pj["old_verdict"] = verdict_json(*p.old_verdict);
      pj["change"] = p.change;
    }
    if (p.spin_verdict) {
      pj["spin_verdict"] = verdict_json(*p.spin_verdict);
      pj["engines_agree"] = p.engines_agree;
    }
    props.push_back(std::move(pj));
  }
  if (report.engine == "both") j["engines_agree"] = report.engines_agree;
  j["exit_code"] = report.exit_code;
  return j.dump(2) + "\n";
}

}  // namespace bpmn
