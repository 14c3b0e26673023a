#include "bpmnverify/reconfig.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "bpmnverify/ingest.hpp"
#include "json.hpp"

namespace bpmn {

namespace {

NodeKind kind_from_keyword(const std::string& kw) {
  if (kw == "start") return NodeKind::start();
  if (kw == "end") return NodeKind::end();
  if (kw == "task") return NodeKind::task();
  if (kw == "xor-split") return NodeKind::xor_split();
  if (kw == "xor-join") return NodeKind::xor_join();
  if (kw == "and-split") return NodeKind::and_split();
  if (kw == "and-join") return NodeKind::and_join();
  throw std::invalid_argument("unknown node kind '" + kw + "'");
}

}  // namespace

WorkflowModel apply_patch(const WorkflowModel& model, const Patch& patch) {
  WorkflowModel result = model;
  for (std::size_t i = 0; i < patch.ops.size(); ++i) {
    const PatchOp& op = patch.ops[i];
    if (const auto* add = std::get_if<AddNode>(&op)) {
      if (result.find_node(add->node.id))
        throw PatchError(PatchError::Code::DuplicateId, i, add->node.id);
      result.nodes.push_back(add->node);
    } else if (const auto* rem = std::get_if<RemoveNode>(&op)) {
      auto idx = result.node_index(rem->id);
      if (!idx) throw PatchError(PatchError::Code::UnknownId, i, rem->id);
      // Replace-in-place: RemoveNode immediately followed by AddNode of
      // the same id swaps the node without cascading its flows.
      const AddNode* next =
          i + 1 < patch.ops.size() ? std::get_if<AddNode>(&patch.ops[i + 1]) : nullptr;
      if (next && next->node.id == rem->id) {
        result.nodes[*idx] = next->node;
        ++i;
        continue;
      }
      result.nodes.erase(result.nodes.begin() + static_cast<std::ptrdiff_t>(*idx));
      std::erase_if(result.flows, [&](const SequenceFlow& f) {
        return f.source == rem->id || f.target == rem->id;
      });
    } else if (const auto* add = std::get_if<AddFlow>(&op)) {
      if (result.find_flow(add->flow.id))
        throw PatchError(PatchError::Code::DuplicateId, i, add->flow.id);
      if (!result.find_node(add->flow.source))
        throw PatchError(PatchError::Code::UnknownId, i, add->flow.source);
      if (!result.find_node(add->flow.target))
        throw PatchError(PatchError::Code::UnknownId, i, add->flow.target);
      result.flows.push_back(add->flow);
    } else if (const auto* rem = std::get_if<RemoveFlow>(&op)) {
      auto idx = result.flow_index(rem->id);
      if (!idx) throw PatchError(PatchError::Code::UnknownId, i, rem->id);
      result.flows.erase(result.flows.begin() + static_cast<std::ptrdiff_t>(*idx));
    } else if (const auto* rr = std::get_if<RerouteFlow>(&op)) {
      auto idx = result.flow_index(rr->id);
      if (!idx) throw PatchError(PatchError::Code::UnknownId, i, rr->id);
      if (!result.find_node(rr->source))
        throw PatchError(PatchError::Code::UnknownId, i, rr->source);
      if (!result.find_node(rr->target))
        throw PatchError(PatchError::Code::UnknownId, i, rr->target);
      result.flows[*idx].source = rr->source;
      result.flows[*idx].target = rr->target;
    }
  }
  return result;
}

Patch diff(const WorkflowModel& old_model, const WorkflowModel& new_model) {
  Patch patch;

  std::map<std::string, const FlowNode*> old_nodes, new_nodes;
  for (const auto& n : old_model.nodes) old_nodes[n.id] = &n;
  for (const auto& n : new_model.nodes) new_nodes[n.id] = &n;
  std::map<std::string, const SequenceFlow*> old_flows, new_flows;
  for (const auto& f : old_model.flows) old_flows[f.id] = &f;
  for (const auto& f : new_model.flows) new_flows[f.id] = &f;

  // Additions first so reroutes and replacements can reference them,
  // then reroutes of persisting flows, then removals (cascade-safe by
  // then), then flow additions. Each group is sorted by id; maps
  // iterate sorted already.
  for (const auto& [id, n] : new_nodes)
    if (!old_nodes.count(id)) patch.ops.push_back(AddNode{*n});
  for (const auto& [id, n] : new_nodes) {
    auto it = old_nodes.find(id);
    if (it != old_nodes.end() && !(*it->second == *n)) {
      patch.ops.push_back(RemoveNode{id});
      patch.ops.push_back(AddNode{*n});
    }
  }
  for (const auto& [id, f] : new_flows) {
    auto it = old_flows.find(id);
    if (it != old_flows.end() &&
        (it->second->source != f->source || it->second->target != f->target))
      patch.ops.push_back(RerouteFlow{id, f->source, f->target});
  }
  for (const auto& [id, f] : old_flows)
    if (!new_flows.count(id)) patch.ops.push_back(RemoveFlow{id});
  for (const auto& [id, n] : old_nodes)
    if (!new_nodes.count(id)) patch.ops.push_back(RemoveNode{id});
  for (const auto& [id, f] : new_flows)
    if (!old_flows.count(id)) patch.ops.push_back(AddFlow{*f});

  return patch;
}

std::string emit_patch(const Patch& patch) {
  std::ostringstream out;
  if (!patch.description.empty()) out << "# description: " << patch.description << '\n';
  for (const auto& op : patch.ops) {
    if (const auto* add = std::get_if<AddNode>(&op)) {
      out << "add-node " << add->node.kind.keyword() << ' ' << add->node.id;
      if (!add->node.name.empty()) out << " \"" << add->node.name << '"';
      out << '\n';
    } else if (const auto* rem = std::get_if<RemoveNode>(&op)) {
      out << "remove-node " << rem->id << '\n';
    } else if (const auto* add = std::get_if<AddFlow>(&op)) {
      out << "add-flow " << add->flow.id << ' ' << add->flow.source << " -> "
          << add->flow.target << '\n';
    } else if (const auto* rem = std::get_if<RemoveFlow>(&op)) {
      out << "remove-flow " << rem->id << '\n';
    } else if (const auto* rr = std::get_if<RerouteFlow>(&op)) {
      out << "reroute-flow " << rr->id << ' ' << rr->source << " -> " << rr->target
          << '\n';
    }
  }
  return out.str();
}

Patch parse_patch(std::string_view text) {
  Patch patch;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  const std::string desc_prefix = "# description: ";
  while (std::getline(in, line)) {
    ++lineno;
    if (line.rfind(desc_prefix, 0) == 0 && patch.description.empty()) {
      patch.description = line.substr(desc_prefix.size());
      continue;
    }
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string verb;
    if (!(ls >> verb)) continue;
    const auto fail = [&](const std::string& msg) {
      throw ParseError("patch syntax error: " + msg, lineno);
    };
    const auto word = [&]() {
      std::string w;
      if (!(ls >> w)) fail("unexpected end of line");
      return w;
    };
    const auto arrow_pair = [&](std::string& src, std::string& tgt) {
      src = word();
      std::string arrow = word();
      if (arrow != "->") fail("expected '->', found '" + arrow + "'");
      tgt = word();
    };
    if (verb == "add-node") {
      FlowNode node;
      std::string kw = word();
      try {
        node.kind = kind_from_keyword(kw);
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
      node.id = word();
      std::string rest;
      std::getline(ls, rest);
      auto open = rest.find('"');
      if (open != std::string::npos) {
        auto close = rest.rfind('"');
        if (close == open) fail("unterminated name string");
        node.name = rest.substr(open + 1, close - open - 1);
      }
      patch.ops.push_back(AddNode{std::move(node)});
    } else if (verb == "remove-node") {
      patch.ops.push_back(RemoveNode{word()});
    } else if (verb == "add-flow") {
      SequenceFlow flow;
      flow.id = word();
      arrow_pair(flow.source, flow.target);
      patch.ops.push_back(AddFlow{std::move(flow)});
    } else if (verb == "remove-flow") {
      patch.ops.push_back(RemoveFlow{word()});
    } else if (verb == "reroute-flow") {
      RerouteFlow rr;
      rr.id = word();
      arrow_pair(rr.source, rr.target);
      patch.ops.push_back(std::move(rr));
    } else {
      fail("unknown patch op '" + verb + "'");
    }
  }
  return patch;
}

Patch parse_patch_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("patch JSON error: ") + e.what(),
                     static_cast<int>(e.byte));
  }
  Patch patch;
  patch.description = doc.value("description", "");
  for (const auto& op : doc.value("ops", nlohmann::json::array())) {
    const std::string verb = op.at("op").get<std::string>();
    if (verb == "add-node") {
      FlowNode node;
      node.kind = kind_from_keyword(op.at("kind").get<std::string>());
      node.id = op.at("id").get<std::string>();
      node.name = op.value("name", "");
      patch.ops.push_back(AddNode{std::move(node)});
    } else if (verb == "remove-node") {
      patch.ops.push_back(RemoveNode{op.at("id").get<std::string>()});
    } else if (verb == "add-flow") {
      patch.ops.push_back(AddFlow{{op.at("id").get<std::string>(),
                                   op.at("source").get<std::string>(),
                                   op.at("target").get<std::string>()}});
    } else if (verb == "remove-flow") {
      patch.ops.push_back(RemoveFlow{op.at("id").get<std::string>()});
    } else if (verb == "reroute-flow") {
      patch.ops.push_back(RerouteFlow{op.at("id").get<std::string>(),
                                      op.at("source").get<std::string>(),
                                      op.at("target").get<std::string>()});
    } else {
      throw ParseError("patch JSON error: unknown op '" + verb + "'", 0);
    }
  }
  return patch;
}

std::string emit_patch_json(const Patch& patch) {
  nlohmann::json doc;
  doc["description"] = patch.description;
  auto& ops = doc["ops"] = nlohmann::json::array();
  for (const auto& op : patch.ops) {
    nlohmann::json j;
    if (const auto* add = std::get_if<AddNode>(&op)) {
      j["op"] = "add-node";
      j["kind"] = add->node.kind.keyword();
      j["id"] = add->node.id;
      if (!add->node.name.empty()) j["name"] = add->node.name;
    } else if (const auto* rem = std::get_if<RemoveNode>(&op)) {
      j["op"] = "remove-node";
      j["id"] = rem->id;
    } else if (const auto* add = std::get_if<AddFlow>(&op)) {
      j["op"] = "add-flow";
      j["id"] = add->flow.id;
      j["source"] = add->flow.source;
      j["target"] = add->flow.target;
    } else if (const auto* rem = std::get_if<RemoveFlow>(&op)) {
      j["op"] = "remove-flow";
      j["id"] = rem->id;
    } else if (const auto* rr = std::get_if<RerouteFlow>(&op)) {
      j["op"] = "reroute-flow";
      j["id"] = rr->id;
      j["source"] = rr->source;
      j["target"] = rr->target;
    }
    ops.push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

}  // namespace bpmn
