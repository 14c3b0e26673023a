#include "bpmnverify/property.hpp"

#include <stdexcept>

namespace bpmn {

std::string Property::display() const {
  switch (kind) {
    case Kind::DeadlockFree:
      return "deadlock-free";
    case Kind::ProperCompletion:
      return "proper-completion";
    case Kind::Reachable:
      return "reach:" + a;
    case Kind::NoDeadActivity:
      return "no-dead-activity";
    case Kind::NeverFires:
      return "never:" + a;
    case Kind::Precedence:
      return "prec:" + a + "," + b;
    case Kind::Response:
      return "resp:" + a + "," + b;
    case Kind::RawLtl:
      return "ltl:" + raw_name;
  }
  return "?";
}

std::vector<std::string> Property::targets() const {
  switch (kind) {
    case Kind::Reachable:
    case Kind::NeverFires:
      return {a};
    case Kind::Precedence:
    case Kind::Response:
      return {a, b};
    default:
      return {};
  }
}

Property parse_property_flag(const std::string& flag) {
  const auto arg = [&](const std::string& prefix) {
    return flag.substr(prefix.size());
  };
  const auto pair_args = [&](const std::string& prefix, Property (*make)(std::string, std::string)) {
    const std::string rest = flag.substr(prefix.size());
    auto comma = rest.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == rest.size())
      throw std::invalid_argument("property '" + flag + "' needs two node ids: " +
                                  prefix + "<a>,<b>");
    return make(rest.substr(0, comma), rest.substr(comma + 1));
  };
  if (flag == "deadlock-free") return Property::deadlock_free();
  if (flag == "proper-completion") return Property::proper_completion();
  if (flag == "no-dead-activity") return Property::no_dead_activity();
  if (flag.rfind("reach:", 0) == 0) return Property::reachable(arg("reach:"));
  if (flag.rfind("never:", 0) == 0) return Property::never_fires(arg("never:"));
  if (flag.rfind("prec:", 0) == 0)
    return pair_args("prec:", [](std::string a, std::string b) {
      return Property::precedence(std::move(a), std::move(b));
    });
  if (flag.rfind("resp:", 0) == 0)
    return pair_args("resp:", [](std::string a, std::string b) {
      return Property::response(std::move(a), std::move(b));
    });
  if (flag.rfind("ltl:", 0) == 0) {
    // ltl:<file> — the caller resolves the file; here we accept an
    // inline formula for programmatic use.
    return Property::raw_ltl(arg("ltl:"));
  }
  throw std::invalid_argument("unknown property flag '" + flag + "'");
}

}  // namespace bpmn
