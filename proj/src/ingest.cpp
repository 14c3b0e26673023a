#include "bpmnverify/ingest.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace bpmn {

namespace {

// ---------------------------------------------------------------------------
// Minimal XML reader: elements, attributes, comments, PIs, CDATA and
// character data (discarded). Enough for the BPMN interchange subset;
// no DTD or entity definitions beyond the five predefined ones.
// ---------------------------------------------------------------------------

struct XmlElement {
  std::string local_name;
  std::unordered_map<std::string, std::string> attrs;
  std::vector<XmlElement> children;
  int line = 0;
  int column = 0;

  std::string attr(const std::string& key) const {
    auto it = attrs.find(key);
    return it == attrs.end() ? std::string() : it->second;
  }
};

class XmlReader {
 public:
  explicit XmlReader(std::string_view text) : text_(text) {}

  // Returns the document element.
  XmlElement parse() {
    skip_misc();
    if (eof() || peek() != '<') fail("expected document element");
    XmlElement root = parse_element();
    skip_misc();
    if (!eof()) fail("content after document element");
    return root;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("XML parse error: " + msg, line_, col_);
  }

  bool starts_with(std::string_view prefix) const {
    return text_.substr(pos_, prefix.size()) == prefix;
  }

  void expect(char c) {
    if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
    advance();
  }

  void consume(std::string_view s) {
    for (char c : s) expect(c);
  }

  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }

  void skip_until(std::string_view terminator) {
    while (!eof() && !starts_with(terminator)) advance();
    if (eof()) fail("unterminated construct, expected '" + std::string(terminator) + "'");
    consume(terminator);
  }

  // Skips whitespace, comments, PIs and a doctype between elements.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<!--")) {
        consume("<!--");
        skip_until("-->");
      } else if (starts_with("<?")) {
        consume("<?");
        skip_until("?>");
      } else if (starts_with("<!DOCTYPE")) {
        skip_until(">");
      } else {
        return;
      }
    }
  }

  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '-' || c == '.' || c == ':';
  }

  std::string read_name() {
    if (eof() || !is_name_char(peek())) fail("expected name");
    std::string name;
    while (!eof() && is_name_char(peek())) name += advance();
    return name;
  }

  std::string decode_entities(const std::string& raw) {
    std::string out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out += raw[i];
        continue;
      }
      auto end = raw.find(';', i);
      if (end == std::string::npos) fail("unterminated entity reference");
      std::string ent = raw.substr(i + 1, end - i - 1);
      if (ent == "lt")
        out += '<';
      else if (ent == "gt")
        out += '>';
      else if (ent == "amp")
        out += '&';
      else if (ent == "quot")
        out += '"';
      else if (ent == "apos")
        out += '\'';
      else if (!ent.empty() && ent[0] == '#')
        out += static_cast<char>(std::stoi(ent.substr(ent[1] == 'x' ? 2 : 1),
                                           nullptr, ent[1] == 'x' ? 16 : 10));
      else
        fail("unknown entity '&" + ent + ";'");
      i = end;
    }
    return out;
  }

  std::string read_attr_value() {
    if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
    const char quote = advance();
    std::string raw;
    while (!eof() && peek() != quote) {
      if (peek() == '<') fail("'<' in attribute value");
      raw += advance();
    }
    if (eof()) fail("unterminated attribute value");
    advance();
    return decode_entities(raw);
  }

  static std::string local_of(const std::string& qname) {
    auto colon = qname.rfind(':');
    return colon == std::string::npos ? qname : qname.substr(colon + 1);
  }

  XmlElement parse_element() {
    XmlElement el;
    el.line = line_;
    el.column = col_;
    expect('<');
    el.local_name = local_of(read_name());
    for (;;) {
      skip_ws();
      if (eof()) fail("unterminated start tag");
      if (peek() == '/') {
        consume("/>");
        return el;
      }
      if (peek() == '>') {
        advance();
        break;
      }
      std::string key = local_of(read_name());
      skip_ws();
      expect('=');
      skip_ws();
      el.attrs.emplace(std::move(key), read_attr_value());
    }
    // Content until the matching end tag.
    for (;;) {
      if (eof()) fail("unterminated element <" + el.local_name + ">");
      if (starts_with("</")) {
        consume("</");
        std::string closing = local_of(read_name());
        if (closing != el.local_name)
          fail("mismatched end tag </" + closing + ">, expected </" +
               el.local_name + ">");
        skip_ws();
        expect('>');
        return el;
      }
      if (starts_with("<!--")) {
        consume("<!--");
        skip_until("-->");
      } else if (starts_with("<![CDATA[")) {
        consume("<![CDATA[");
        skip_until("]]>");
      } else if (starts_with("<?")) {
        consume("<?");
        skip_until("?>");
      } else if (peek() == '<') {
        el.children.push_back(parse_element());
      } else {
        advance();  // character data, ignored
      }
    }
  }
};

const XmlElement* find_descendant(const XmlElement& el, const std::string& local) {
  if (el.local_name == local) return &el;
  for (const auto& c : el.children)
    if (const XmlElement* hit = find_descendant(c, local)) return hit;
  return nullptr;
}

}  // namespace

SourceFormat detect_format(const std::string& path) {
  auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == "bpmn" || ext == "xml") return SourceFormat::BpmnXml;
  if (ext == "wf") return SourceFormat::WorkflowDsl;
  throw std::invalid_argument("cannot detect format of '" + path +
                              "' (expected .bpmn, .xml or .wf)");
}

ParseOutcome parse_bpmn_xml(std::string_view input) {
  XmlReader reader(input);
  XmlElement root = reader.parse();

  const XmlElement* process = find_descendant(root, "process");
  if (!process)
    throw ParseError("no <process> element found", root.line, root.column);

  ParseOutcome out;
  out.model.id = process->attr("id");
  out.model.name = process->attr("name");
  if (out.model.id.empty()) out.model.id = "process";

  struct PendingGateway {
    std::size_t node_index;
    GatewayLogic logic;
    int line;
    int column;
  };
  std::vector<PendingGateway> gateways;
  struct PendingFlow {
    XmlElement el;
  };
  std::vector<const XmlElement*> flow_elements;

  for (const auto& child : process->children) {
    const std::string& tag = child.local_name;
    const std::string id = child.attr("id");
    const std::string name = child.attr("name");
    if (tag == "startEvent") {
      out.model.nodes.push_back({id, name, NodeKind::start()});
    } else if (tag == "endEvent") {
      out.model.nodes.push_back({id, name, NodeKind::end()});
    } else if (tag == "task") {
      out.model.nodes.push_back({id, name, NodeKind::task()});
    } else if (tag == "exclusiveGateway" || tag == "parallelGateway") {
      const auto logic = tag == "exclusiveGateway" ? GatewayLogic::Exclusive
                                                   : GatewayLogic::Parallel;
      gateways.push_back({out.model.nodes.size(), logic, child.line, child.column});
      out.model.nodes.push_back(
          {id, name, NodeKind::gateway(logic, GatewayDirection::Diverging)});
    } else if (tag == "sequenceFlow") {
      flow_elements.push_back(&child);
    } else {
      out.warnings.push_back("ignoring unknown element <" + tag + "> at line " +
                             std::to_string(child.line));
    }
  }

  for (const XmlElement* el : flow_elements) {
    SequenceFlow flow;
    flow.id = el->attr("id");
    flow.source = el->attr("sourceRef");
    flow.target = el->attr("targetRef");
    if (!out.model.find_node(flow.source))
      throw ParseError("sequenceFlow '" + flow.id + "' references unknown node '" +
                           flow.source + "'",
                       el->line, el->column);
    if (!out.model.find_node(flow.target))
      throw ParseError("sequenceFlow '" + flow.id + "' references unknown node '" +
                           flow.target + "'",
                       el->line, el->column);
    if (flow.id.empty()) flow.id = flow.source + "__" + flow.target;
    out.model.flows.push_back(std::move(flow));
  }

  // Gateway direction is not part of the interchange subset; infer it
  // from the degree. in>=2 and out>=2 is a mixed gateway, rejected here
  // so the rest of the pipeline never sees one from this path.
  for (const auto& g : gateways) {
    FlowNode& node = out.model.nodes[g.node_index];
    const int in = static_cast<int>(out.model.incoming(node.id).size());
    const int ou = static_cast<int>(out.model.outgoing(node.id).size());
    if (in >= 2 && ou >= 2)
      throw ParseError("gateway '" + node.id + "' is both converging and diverging",
                       g.line, g.column);
    const auto dir = in >= 2 ? GatewayDirection::Converging : GatewayDirection::Diverging;
    node.kind = NodeKind::gateway(g.logic, dir);
  }

  return out;
}

// ---------------------------------------------------------------------------
// Workflow DSL
// ---------------------------------------------------------------------------

namespace {

struct DslToken {
  enum class Kind { Word, String, Arrow, Colon, Semi };
  Kind kind;
  std::string text;
  int line;
};

std::vector<DslToken> tokenize_dsl(std::string_view text) {
  std::vector<DslToken> tokens;
  int line = 1;
  std::size_t i = 0;
  const auto fail = [&](const std::string& msg) {
    throw ParseError("DSL syntax error: " + msg, line);
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == ';') {
      tokens.push_back({DslToken::Kind::Semi, ";", line});
      ++i;
    } else if (c == ':') {
      tokens.push_back({DslToken::Kind::Colon, ":", line});
      ++i;
    } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      tokens.push_back({DslToken::Kind::Arrow, "->", line});
      i += 2;
    } else if (c == '"') {
      std::string s;
      ++i;
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\n') fail("unterminated string");
        s += text[i++];
      }
      if (i >= text.size()) fail("unterminated string");
      ++i;
      tokens.push_back({DslToken::Kind::String, std::move(s), line});
    } else {
      std::string word;
      while (i < text.size()) {
        const char w = text[i];
        if (std::isspace(static_cast<unsigned char>(w)) || w == ';' ||
            w == ':' || w == '"' || w == '#')
          break;
        if (w == '-' && i + 1 < text.size() && text[i + 1] == '>') break;
        word += w;
        ++i;
      }
      if (word.empty()) fail(std::string("unexpected character '") + c + "'");
      tokens.push_back({DslToken::Kind::Word, std::move(word), line});
    }
  }
  return tokens;
}

}  // namespace

WorkflowModel parse_dsl(std::string_view text) {
  const std::vector<DslToken> tokens = tokenize_dsl(text);
  WorkflowModel model;
  model.id = "workflow";

  std::unordered_set<std::string> declared;
  std::size_t i = 0;
  const auto fail = [&](int line, const std::string& msg) {
    throw ParseError("DSL syntax error: " + msg, line);
  };
  const auto need = [&](DslToken::Kind kind, const char* what) -> const DslToken& {
    if (i >= tokens.size())
      fail(tokens.empty() ? 1 : tokens.back().line,
           std::string("expected ") + what + ", found end of input");
    if (tokens[i].kind != kind)
      fail(tokens[i].line,
           std::string("expected ") + what + ", found '" + tokens[i].text + "'");
    return tokens[i++];
  };

  while (i < tokens.size()) {
    const DslToken& head = need(DslToken::Kind::Word, "statement keyword");
    const int line = head.line;
    const std::string& kw = head.text;
    if (kw == "flow") {
      // flow [<id>:] <src> -> <tgt>
      SequenceFlow flow;
      const DslToken& first = need(DslToken::Kind::Word, "flow id or source");
      if (i < tokens.size() && tokens[i].kind == DslToken::Kind::Colon) {
        ++i;
        flow.id = first.text;
        flow.source = need(DslToken::Kind::Word, "flow source").text;
      } else {
        flow.source = first.text;
      }
      need(DslToken::Kind::Arrow, "'->'");
      flow.target = need(DslToken::Kind::Word, "flow target").text;
      if (flow.id.empty()) flow.id = flow.source + "__" + flow.target;
      if (!declared.count(flow.source))
        fail(line, "flow references undeclared node '" + flow.source + "'");
      if (!declared.count(flow.target))
        fail(line, "flow references undeclared node '" + flow.target + "'");
      model.flows.push_back(std::move(flow));
    } else {
      NodeKind kind;
      if (kw == "start")
        kind = NodeKind::start();
      else if (kw == "end")
        kind = NodeKind::end();
      else if (kw == "task")
        kind = NodeKind::task();
      else if (kw == "xor-split")
        kind = NodeKind::xor_split();
      else if (kw == "xor-join")
        kind = NodeKind::xor_join();
      else if (kw == "and-split")
        kind = NodeKind::and_split();
      else if (kw == "and-join")
        kind = NodeKind::and_join();
      else
        fail(line, "unknown statement '" + kw + "'");
      FlowNode node;
      node.id = need(DslToken::Kind::Word, "node id").text;
      node.kind = kind;
      if (i < tokens.size() && tokens[i].kind == DslToken::Kind::String)
        node.name = tokens[i++].text;
      if (!declared.insert(node.id).second)
        fail(line, "duplicate node declaration '" + node.id + "'");
      model.nodes.push_back(std::move(node));
    }
    need(DslToken::Kind::Semi, "';'");
  }
  return model;
}

std::string emit_dsl(const WorkflowModel& model) {
  std::ostringstream out;
  for (const auto& n : model.nodes) {
    out << n.kind.keyword() << ' ' << n.id;
    if (!n.name.empty()) out << " \"" << n.name << '"';
    out << ";\n";
  }
  for (const auto& f : model.flows) {
    out << "flow ";
    if (f.id != f.source + "__" + f.target) out << f.id << ": ";
    out << f.source << " -> " << f.target << ";\n";
  }
  return out.str();
}

ParseOutcome parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (detect_format(path) == SourceFormat::BpmnXml) return parse_bpmn_xml(text);
  ParseOutcome out;
  out.model = parse_dsl(text);
  return out;
}

}  // namespace bpmn
