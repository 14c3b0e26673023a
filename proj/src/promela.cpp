#include "bpmnverify/promela.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace bpmn {

namespace {

const std::unordered_set<std::string>& promela_keywords() {
  static const std::unordered_set<std::string> kw = {
      "active",  "assert",   "atomic", "bit",     "bool",     "break",
      "byte",    "c_code",   "c_decl", "c_expr",  "c_state",  "c_track",
      "chan",    "d_step",   "do",     "else",    "empty",    "enabled",
      "eval",    "false",    "fi",     "for",     "full",     "goto",
      "hidden",  "if",       "init",   "inline",  "int",      "len",
      "local",   "ltl",      "mtype",  "nempty",  "never",    "nfull",
      "notrace", "np_",      "od",     "of",      "pc_value", "pid",
      "printf",  "printm",   "priority", "proctype", "provided", "run",
      "select",  "short",    "show",   "skip",    "timeout",  "trace",
      "true",    "typedef",  "unless", "unsigned", "xr",      "xs",
  };
  return kw;
}

std::string display_label(const FlowNode& node) {
  return node.name.empty() ? node.id : node.name;
}

}  // namespace

std::string sanitize_name(const std::string& raw, std::unordered_set<std::string>& taken,
                          int fallback_code) {
  std::string base;
  for (char c : raw)
    base += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  if (!base.empty() && std::isdigit(static_cast<unsigned char>(base[0])))
    base = "_" + base;
  if (base.empty()) base = "n" + std::to_string(fallback_code);
  if (promela_keywords().count(base)) base += "_";
  std::string candidate = base;
  for (int i = 2; taken.count(candidate); ++i)
    candidate = base + "_" + std::to_string(i);
  taken.insert(candidate);
  return candidate;
}

std::string PromelaProgram::symbol_table_text() const {
  std::vector<std::pair<int, std::string>> by_code;
  for (const auto& [id, entry] : symbols) by_code.emplace_back(entry.code, id);
  std::sort(by_code.begin(), by_code.end());
  std::ostringstream out;
  for (const auto& [code, id] : by_code)
    out << id << ' ' << symbols.at(id).identifier << ' ' << code << '\n';
  return out.str();
}

PromelaProgram translate(const WorkflowModel& model,
                         const std::vector<Property>& properties, int bound) {
  const std::vector<Violation> violations = validate_wellformed(model);
  if (!violations.empty())
    throw TranslateError("model '" + model.id + "' failed validation (" +
                         std::to_string(violations.size()) +
                         " violations); run validate first");

  PromelaProgram prog;
  std::unordered_set<std::string> taken = {"completed", "lastFired", "Workflow"};

  // Node codes 1..N in canonical order, then flow codes.
  int code = 0;
  for (const auto& n : model.nodes)
    prog.symbols[n.id] = {sanitize_name(n.id, taken, code + 1), ++code};
  std::vector<std::string> tok;  // flow variable per flow index
  for (const auto& f : model.flows) {
    std::string ident = "tok_" + sanitize_name(f.id, taken, code + 1);
    prog.symbols[f.id] = {ident, ++code};
    tok.push_back(std::move(ident));
  }

  const auto node_ident = [&](const std::string& id) {
    return prog.symbols.at(id).identifier;
  };
  const auto node_code = [&](const std::string& id) {
    return prog.symbols.at(id).code;
  };

  // Nodes needing a fired_ macro: tasks, end events, and any property
  // target.
  std::vector<std::string> fired_nodes;
  std::unordered_set<std::string> fired_set;
  const auto want_fired = [&](const std::string& id) {
    if (fired_set.insert(id).second) fired_nodes.push_back(id);
  };
  for (const auto& n : model.nodes)
    if (n.kind.tag == NodeKind::Tag::Task || n.kind.tag == NodeKind::Tag::EndEvent)
      want_fired(n.id);
  for (const auto& p : properties)
    for (const auto& target : p.targets()) {
      if (!model.find_node(target))
        throw TranslateError("property '" + p.display() +
                             "' references unknown node '" + target + "'");
      want_fired(target);
    }
  std::sort(fired_nodes.begin(), fired_nodes.end(),
            [&](const std::string& a, const std::string& b) {
              return node_code(a) < node_code(b);
            });

  std::ostringstream out;
  out << "/* workflow model: " << model.id;
  if (!model.name.empty()) out << " (" << model.name << ")";
  out << " */\n";
  for (const auto& t : tok) out << "byte " << t << ";\n";
  out << "byte completed;\n";
  out << "byte lastFired;\n";
  for (const auto& id : fired_nodes)
    out << "#define fired_" << node_ident(id) << " (lastFired == " << node_code(id)
        << ")\n";

  // LTL requirement blocks.
  std::unordered_set<std::string> ltl_names;
  const auto emit_ltl = [&](std::string name, const std::string& body) {
    std::string unique = name;
    for (int i = 2; ltl_names.count(unique); ++i)
      unique = name + "_" + std::to_string(i);
    ltl_names.insert(unique);
    out << "ltl " << unique << " { " << body << " }\n";
    prog.property_names.push_back(unique);
  };
  bool first_ltl = true;
  for (const auto& p : properties) {
    std::string name, body;
    const auto fired = [&](const std::string& id) { return "fired_" + node_ident(id); };
    switch (p.kind) {
      case Property::Kind::DeadlockFree:
      case Property::Kind::NoDeadActivity:
        continue;  // carried by the trailing assert / no LTL form
      case Property::Kind::ProperCompletion:
        name = "complete";
        body = "<> (completed > 0)";
        break;
      case Property::Kind::Reachable:
        // SPIN proves the negation: a reachability pass is a violation
        // of [] !fired_<n>; the bridge inverts the verdict.
        name = "reach_" + node_ident(p.a);
        body = "<> " + fired(p.a);
        break;
      case Property::Kind::NeverFires:
        name = "never_" + node_ident(p.a);
        body = "[] !" + fired(p.a);
        break;
      case Property::Kind::Precedence:
        name = "prec_" + node_ident(p.a) + "_" + node_ident(p.b);
        body = "([] !" + fired(p.b) + ") || (!" + fired(p.b) + " U " + fired(p.a) + ")";
        break;
      case Property::Kind::Response:
        name = "resp_" + node_ident(p.a) + "_" + node_ident(p.b);
        body = "[] (" + fired(p.a) + " -> <> " + fired(p.b) + ")";
        break;
      case Property::Kind::RawLtl: {
        std::unordered_set<std::string> scratch = ltl_names;
        name = sanitize_name(p.raw_name, scratch);
        body = p.raw;
        break;
      }
    }
    if (first_ltl) {
      out << "\n";
      first_ltl = false;
    }
    emit_ltl(name, body);
  }

  out << "\n"
      << "active proctype Workflow() {\n";
  out << "  /* instantiation: one token per start event */\n";
  for (const auto& n : model.nodes) {
    if (n.kind.tag != NodeKind::Tag::StartEvent) continue;
    for (std::size_t f : model.outgoing(n.id))
      out << "  /* " << n.kind.keyword() << " " << display_label(n) << " */ "
          << tok[f] << " = 1;\n";
  }
  out << "  do\n";

  const auto guard = [&](std::size_t f) { return tok[f] + " > 0"; };
  const auto consume = [&](std::size_t f) { return tok[f] + "--"; };
  const auto produce = [&](std::size_t f) {
    return "assert(" + tok[f] + " < " + std::to_string(bound) + "); " + tok[f] + "++";
  };

  for (const auto& n : model.nodes) {
    const auto in = model.incoming(n.id);
    const auto ou = model.outgoing(n.id);
    const std::string fired_update = "lastFired = " + std::to_string(node_code(n.id));
    const auto arm = [&](const std::string& comment_suffix, const std::string& g,
                        const std::vector<std::string>& effects) {
      out << "  /* " << n.kind.keyword() << " " << display_label(n) << comment_suffix
          << " */\n";
      out << "  :: atomic { " << g << " ->";
      for (const auto& e : effects) out << ' ' << e << ';';
      out << ' ' << fired_update << " }\n";
    };
    switch (n.kind.tag) {
      case NodeKind::Tag::StartEvent:
        break;  // fires implicitly at instantiation
      case NodeKind::Tag::Task:
        arm("", guard(in[0]), {consume(in[0]), produce(ou[0])});
        break;
      case NodeKind::Tag::EndEvent:
        for (std::size_t f : in)
          arm(in.size() > 1 ? " via " + model.flows[f].id : "", guard(f),
              {consume(f), "completed++"});
        break;
      case NodeKind::Tag::Gateway: {
        const bool parallel = n.kind.logic == GatewayLogic::Parallel;
        if (n.kind.direction == GatewayDirection::Diverging) {
          if (parallel) {
            std::vector<std::string> effects = {consume(in[0])};
            for (std::size_t f : ou) effects.push_back(produce(f));
            arm("", guard(in[0]), effects);
          } else {
            for (std::size_t f : ou)
              arm(" via " + model.flows[f].id, guard(in[0]),
                  {consume(in[0]), produce(f)});
          }
        } else {
          if (parallel) {
            std::string g;
            std::vector<std::string> effects;
            for (std::size_t f : in) {
              g += (g.empty() ? "" : " && ") + guard(f);
              effects.push_back(consume(f));
            }
            effects.push_back(produce(ou[0]));
            arm("", g, effects);
          } else {
            for (std::size_t f : in)
              arm(" via " + model.flows[f].id, guard(f), {consume(f), produce(ou[0])});
          }
        }
        break;
      }
    }
  }

  out << "  :: else -> break\n"
      << "  od;\n";
  out << "  assert(";
  for (const auto& t : tok) out << t << " == 0 && ";
  out << "completed > 0)\n";
  out << "}\n";

  prog.source = out.str();
  return prog;
}

}  // namespace bpmn
