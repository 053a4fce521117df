#include "stocs/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "stocs/error.hpp"

namespace stocs {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void shape_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SyntaxError, what + " at " + (path.empty() ? "/" : path));
}

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

class Reader {
 public:
  explicit Reader(const ParseOptions& options) : options_(options) {}

  std::vector<std::string> warnings;

  InstanceSpec instance(const json& doc) {
    if (!doc.is_object()) shape_error("", "instance document must be a JSON object");
    warn_unknown(doc, "", {"name", "theta", "variables", "constraints", "objective"});
    InstanceSpec spec;
    if (doc.contains("name")) spec.name = string(doc["name"], "/name");
    if (!doc.contains("theta")) shape_error("/theta", "missing required key");
    spec.theta = number(doc["theta"], "/theta");
    if (!doc.contains("variables")) shape_error("/variables", "missing required key");
    const json& vars = array(doc["variables"], "/variables");
    for (std::size_t i = 0; i < vars.size(); ++i) {
      spec.variables.push_back(variable(vars[i], "/variables/" + std::to_string(i)));
    }
    if (doc.contains("constraints")) {
      const json& cons = array(doc["constraints"], "/constraints");
      for (std::size_t i = 0; i < cons.size(); ++i) {
        spec.constraints.push_back(constraint(cons[i], "/constraints/" + std::to_string(i)));
      }
    }
    if (doc.contains("objective")) spec.objective = objective(doc["objective"], "/objective");
    return spec;
  }

 private:
  VariableSpec variable(const json& v, const std::string& path) {
    if (!v.is_object()) shape_error(path, "variable must be an object");
    warn_unknown(v, path, {"name", "kind", "domain", "probabilities", "cpt"});
    VariableSpec spec;
    spec.name = string(required(v, "name", path), path + "/name");
    std::string kind = string(required(v, "kind", path), path + "/kind");
    if (kind == "decision") spec.kind = VarKind::Decision;
    else if (kind == "stochastic") spec.kind = VarKind::Stochastic;
    else shape_error(path + "/kind", "kind must be \"decision\" or \"stochastic\", got \"" + kind + "\"");
    spec.domain = integers(required(v, "domain", path), path + "/domain", true);
    if (v.contains("probabilities")) {
      spec.probabilities = distribution(v["probabilities"], path + "/probabilities");
    }
    if (v.contains("cpt")) spec.cpt = cpt(v["cpt"], path + "/cpt");
    return spec;
  }

  CptSpec cpt(const json& c, const std::string& path) {
    if (!c.is_object()) shape_error(path, "cpt must be an object");
    warn_unknown(c, path, {"parents", "rows"});
    CptSpec spec;
    const json& parents = array(required(c, "parents", path), path + "/parents");
    for (std::size_t i = 0; i < parents.size(); ++i) {
      spec.parents.push_back(string(parents[i], path + "/parents/" + std::to_string(i)));
    }
    const json& rows = array(required(c, "rows", path), path + "/rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string rp = path + "/rows/" + std::to_string(i);
      if (!rows[i].is_object()) shape_error(rp, "row must be an object");
      warn_unknown(rows[i], rp, {"given", "probabilities"});
      spec.rows.push_back({integers(required(rows[i], "given", rp), rp + "/given", false),
                           distribution(required(rows[i], "probabilities", rp), rp + "/probabilities")});
    }
    return spec;
  }

  ConstraintSpec constraint(const json& c, const std::string& path) {
    if (!c.is_object()) shape_error(path, "constraint must be an object");
    std::string type = string(required(c, "type", path), path + "/type");
    if (type == "expr") {
      warn_unknown(c, path, {"type", "text"});
      std::string text = string(required(c, "text", path), path + "/text");
      try {
        return parse_expression(text);
      } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + " in " + path + "/text");
      }
    }
    if (type == "table") {
      warn_unknown(c, path, {"type", "scope", "tuples"});
      TableRelation table;
      const json& scope = array(required(c, "scope", path), path + "/scope");
      for (std::size_t i = 0; i < scope.size(); ++i) {
        table.scope.push_back(string(scope[i], path + "/scope/" + std::to_string(i)));
      }
      const json& tuples = array(required(c, "tuples", path), path + "/tuples");
      for (std::size_t i = 0; i < tuples.size(); ++i) {
        table.tuples.push_back(integers(tuples[i], path + "/tuples/" + std::to_string(i), false));
      }
      return table;
    }
    shape_error(path + "/type", "constraint type must be \"expr\" or \"table\", got \"" + type + "\"");
  }

  ObjectiveSpec objective(const json& o, const std::string& path) {
    if (!o.is_object()) shape_error(path, "objective must be an object");
    warn_unknown(o, path, {"text", "violation_value"});
    ObjectiveSpec spec;
    std::string text = string(required(o, "text", path), path + "/text");
    try {
      spec.expression = parse_expression(text);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " in " + path + "/text");
    }
    if (o.contains("violation_value")) spec.violation_value = number(o["violation_value"], path + "/violation_value");
    return spec;
  }

  std::vector<double> distribution(const json& j, const std::string& path) {
    const json& arr = array(j, path);
    std::vector<double> out;
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(number(arr[i], path + "/" + std::to_string(i)));
    if (options_.renormalize) {
      double sum = std::accumulate(out.begin(), out.end(), 0.0);
      if (sum > 0.0) {
        for (auto& p : out) p /= sum;
      }
    }
    return out;
  }

  std::vector<int> integers(const json& j, const std::string& path, bool is_domain) {
    const json& arr = array(j, path);
    std::vector<int> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const json& x = arr[i];
      if (!x.is_number_integer()) {
        if (is_domain) {
          throw Error(ErrorCode::NonIntegerDomain,
                      "domain values must be integers at " + path + "/" + std::to_string(i));
        }
        shape_error(path + "/" + std::to_string(i), "expected an integer");
      }
      auto v = x.get<std::int64_t>();
      if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        shape_error(path + "/" + std::to_string(i), "integer out of range");
      }
      out.push_back(static_cast<int>(v));
    }
    return out;
  }

  static const json& required(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) shape_error(path + "/" + key, "missing required key");
    return obj[key];
  }

  static const json& array(const json& j, const std::string& path) {
    if (!j.is_array()) shape_error(path, "expected an array");
    return j;
  }

  static std::string string(const json& j, const std::string& path) {
    if (!j.is_string()) shape_error(path, "expected a string");
    return j.get<std::string>();
  }

  static double number(const json& j, const std::string& path) {
    if (!j.is_number()) shape_error(path, "expected a number");
    return j.get<double>();
  }

  void warn_unknown(const json& obj, const std::string& path, std::initializer_list<std::string_view> known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
        warnings.push_back("ignoring unknown key '" + it.key() + "' at " + (path.empty() ? "/" : path));
      }
    }
  }

  ParseOptions options_;
};

ordered_json policy_json(const PolicyNode& node) {
  ordered_json j;
  switch (node.kind) {
    case PolicyNode::Kind::Leaf:
      j["kind"] = "leaf";
      break;
    case PolicyNode::Kind::Decision:
      j["kind"] = "decision";
      j["variable"] = node.variable;
      j["value"] = node.value;
      j["child"] = policy_json(node.children.at(0));
      break;
    case PolicyNode::Kind::Chance: {
      j["kind"] = "chance";
      j["variable"] = node.variable;
      ordered_json children = ordered_json::array();
      for (const auto& c : node.children) children.push_back(policy_json(c));
      j["children"] = std::move(children);
      break;
    }
  }
  return j;
}

[[noreturn]] void bad_policy(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::MalformedPolicy, what + " at " + (path.empty() ? "/" : path));
}

PolicyNode policy_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) bad_policy(path, "policy node must be an object");
  if (!j.contains("kind") || !j["kind"].is_string()) bad_policy(path, "missing \"kind\"");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "leaf") return PolicyNode::leaf();
  if (!j.contains("variable") || !j["variable"].is_string()) bad_policy(path, "missing \"variable\"");
  std::string variable = j["variable"].get<std::string>();
  if (kind == "decision") {
    if (!j.contains("value") || !j["value"].is_number_integer()) bad_policy(path, "missing integer \"value\"");
    if (!j.contains("child")) bad_policy(path, "missing \"child\"");
    return PolicyNode::decision(std::move(variable), j["value"].get<int>(),
                                policy_from_json(j["child"], path + "/child"));
  }
  if (kind == "chance") {
    if (!j.contains("children") || !j["children"].is_array()) bad_policy(path, "missing \"children\"");
    std::vector<PolicyNode> children;
    const json& arr = j["children"];
    for (std::size_t i = 0; i < arr.size(); ++i) {
      children.push_back(policy_from_json(arr[i], path + "/children/" + std::to_string(i)));
    }
    return PolicyNode::chance(std::move(variable), std::move(children));
  }
  bad_policy(path, "unknown kind \"" + kind + "\"");
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, "invalid JSON at " + line_column(text, e.byte == 0 ? 0 : e.byte - 1));
  }
}

}  // namespace

ParsedInstance parse_instance(std::string_view text, const ParseOptions& options) {
  json doc = parse_json(text);
  Reader reader(options);
  InstanceSpec spec = reader.instance(doc);
  return {validate_instance(std::move(spec)), std::move(reader.warnings)};
}

std::string serialize_instance(const Instance& instance) {
  InstanceSpec spec = instance.to_spec();
  ordered_json doc;
  doc["name"] = spec.name;
  doc["theta"] = spec.theta;
  ordered_json vars = ordered_json::array();
  for (const auto& v : spec.variables) {
    ordered_json jv;
    jv["name"] = v.name;
    jv["kind"] = std::string(to_string(v.kind));
    jv["domain"] = v.domain;
    if (!v.probabilities.empty()) jv["probabilities"] = v.probabilities;
    if (v.cpt) {
      ordered_json rows = ordered_json::array();
      for (const auto& r : v.cpt->rows) {
        ordered_json jr;
        jr["given"] = r.given;
        jr["probabilities"] = r.probabilities;
        rows.push_back(std::move(jr));
      }
      jv["cpt"] = {{"parents", v.cpt->parents}, {"rows", std::move(rows)}};
    }
    vars.push_back(std::move(jv));
  }
  doc["variables"] = std::move(vars);
  ordered_json cons = ordered_json::array();
  for (const auto& c : spec.constraints) {
    ordered_json jc;
    if (const auto* expr = std::get_if<Expr>(&c)) {
      jc["type"] = "expr";
      jc["text"] = to_string(*expr);
    } else {
      const auto& t = std::get<TableRelation>(c);
      jc["type"] = "table";
      jc["scope"] = t.scope;
      jc["tuples"] = t.tuples;
    }
    cons.push_back(std::move(jc));
  }
  doc["constraints"] = std::move(cons);
  if (spec.objective) {
    doc["objective"] = {{"text", to_string(spec.objective->expression)},
                        {"violation_value", spec.objective->violation_value}};
  }
  return doc.dump(2) + "\n";
}

std::string serialize_policy(const PolicyNode& policy) { return policy_json(policy).dump(); }

PolicyNode parse_policy(std::string_view text) { return policy_from_json(parse_json(text), ""); }

std::string format_probability(double p) {
  if (p < 0.0 && p > -5e-10) p = 0.0;  // no "-0.000000000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", p);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << contents;
  if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

}  // namespace stocs
