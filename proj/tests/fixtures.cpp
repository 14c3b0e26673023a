#include "fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bpmnverify/ingest.hpp"

namespace testutil {

using namespace bpmn;

std::string fixture_path(const std::string& name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

WorkflowModel load_fixture(const std::string& name) {
  return parse_file(fixture_path(name)).model;
}

const std::vector<std::string>& corpus_names() {
  static const std::vector<std::string> names = {
      "m1.wf",       "m2.wf",         "m3.wf",       "m4.wf",
      "unsafe.wf",   "multistart.wf", "multiend.wf", "r1.wf",
      "r2.wf",       "r3.wf",         "r4.wf",       "r5.wf",
  };
  return names;
}

std::vector<WorkflowModel> load_corpus() {
  std::vector<WorkflowModel> out;
  for (const auto& name : corpus_names()) out.push_back(load_fixture(name));
  return out;
}

WorkflowModel random_wellformed_model(std::mt19937& rng, int refinements) {
  WorkflowModel m;
  m.id = "random";
  int fresh = 0;
  const auto next_id = [&](const char* prefix) {
    return std::string(prefix) + std::to_string(fresh++);
  };

  m.nodes.push_back({"S", "", NodeKind::start()});
  m.nodes.push_back({"T_init", "", NodeKind::task()});
  m.nodes.push_back({"E", "", NodeKind::end()});
  m.flows.push_back({"S__T_init", "S", "T_init"});
  m.flows.push_back({"T_init__E", "T_init", "E"});

  // Each refinement splices a structure into one existing flow, which
  // preserves every degree rule and start-to-end reachability.
  for (int step = 0; step < refinements; ++step) {
    const std::size_t fi = std::uniform_int_distribution<std::size_t>(
        0, m.flows.size() - 1)(rng);
    const std::string tail = m.flows[fi].target;
    const int op = std::uniform_int_distribution<int>(0, 3)(rng);
    const auto splice_to = [&](const std::string& head) {
      m.flows[fi].target = head;
    };
    const auto add_flow = [&](const std::string& src, const std::string& tgt) {
      m.flows.push_back({src + "__" + tgt, src, tgt});
    };
    if (op == 0) {
      const std::string t = next_id("T");
      m.nodes.push_back({t, "", NodeKind::task()});
      splice_to(t);
      add_flow(t, tail);
    } else if (op == 1 || op == 2) {
      const bool exclusive = op == 1;
      const std::string split = next_id(exclusive ? "XS" : "PS");
      const std::string join = next_id(exclusive ? "XJ" : "PJ");
      m.nodes.push_back({split, "", exclusive ? NodeKind::xor_split()
                                              : NodeKind::and_split()});
      m.nodes.push_back({join, "", exclusive ? NodeKind::xor_join()
                                             : NodeKind::and_join()});
      const int branches = std::uniform_int_distribution<int>(2, 3)(rng);
      for (int b = 0; b < branches; ++b) {
        const std::string t = next_id("T");
        m.nodes.push_back({t, "", NodeKind::task()});
        add_flow(split, t);
        add_flow(t, join);
      }
      splice_to(split);
      add_flow(join, tail);
    } else {
      const std::string join = next_id("LJ");
      const std::string body = next_id("T");
      const std::string split = next_id("LX");
      m.nodes.push_back({join, "", NodeKind::xor_join()});
      m.nodes.push_back({body, "", NodeKind::task()});
      m.nodes.push_back({split, "", NodeKind::xor_split()});
      splice_to(join);
      add_flow(join, body);
      add_flow(body, split);
      add_flow(split, join);
      add_flow(split, tail);
    }
  }
  return m;
}

WorkflowModel random_junk_model(std::mt19937& rng) {
  WorkflowModel m;
  m.id = "junk";
  const int node_count = std::uniform_int_distribution<int>(0, 8)(rng);
  const auto pick_kind = [&]() {
    switch (std::uniform_int_distribution<int>(0, 6)(rng)) {
      case 0: return NodeKind::start();
      case 1: return NodeKind::end();
      case 2: return NodeKind::task();
      case 3: return NodeKind::xor_split();
      case 4: return NodeKind::xor_join();
      case 5: return NodeKind::and_split();
      default: return NodeKind::and_join();
    }
  };
  for (int i = 0; i < node_count; ++i) {
    // Occasionally reuse an id to exercise DuplicateId.
    const int id_num = std::uniform_int_distribution<int>(0, node_count)(rng);
    m.nodes.push_back({"n" + std::to_string(id_num), "", pick_kind()});
  }
  const int flow_count = std::uniform_int_distribution<int>(0, 12)(rng);
  for (int i = 0; i < flow_count; ++i) {
    const auto endpoint = [&]() {
      // Sometimes dangling.
      return "n" + std::to_string(std::uniform_int_distribution<int>(
                       0, node_count + 2)(rng));
    };
    const int id_num = std::uniform_int_distribution<int>(0, flow_count)(rng);
    m.flows.push_back({"f" + std::to_string(id_num), endpoint(), endpoint()});
  }
  return m;
}

}  // namespace testutil
