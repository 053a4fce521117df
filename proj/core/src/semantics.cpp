#include "stocs/semantics.hpp"

#include <algorithm>
#include <limits>

#include "stocs/error.hpp"

namespace stocs {

PolicyNode PolicyNode::decision(std::string variable, int value, PolicyNode child) {
  PolicyNode n;
  n.kind = Kind::Decision;
  n.variable = std::move(variable);
  n.value = value;
  n.children.push_back(std::move(child));
  return n;
}

PolicyNode PolicyNode::chance(std::string variable, std::vector<PolicyNode> children) {
  PolicyNode n;
  n.kind = Kind::Chance;
  n.variable = std::move(variable);
  n.children = std::move(children);
  return n;
}

std::size_t policy_size(const PolicyNode& policy) {
  std::size_t n = 1;
  for (const auto& c : policy.children) n += policy_size(c);
  return n;
}

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedPolicy, what); }

class PolicyWalker {
 public:
  PolicyWalker(const Instance& instance, const std::function<double(std::span<const int>)>* leaf_value)
      : inst_(instance), leaf_value_(leaf_value), values_(instance.size(), 0) {}

  double walk(std::size_t depth, const PolicyNode& node) {
    if (depth == inst_.size()) {
      if (node.kind != PolicyNode::Kind::Leaf) malformed("expected a leaf after the last variable");
      return leaf_value_ ? (*leaf_value_)(values_) : 0.0;
    }
    const Variable& var = inst_.variable(depth);
    if (node.kind == PolicyNode::Kind::Leaf) malformed("leaf reached before variable '" + var.name + "'");
    if (node.variable != var.name) {
      malformed("expected a node for '" + var.name + "', found '" + node.variable + "'");
    }
    if (var.kind == VarKind::Decision) {
      if (node.kind != PolicyNode::Kind::Decision) malformed("'" + var.name + "' must be a decision node");
      if (node.children.size() != 1) malformed("decision node '" + var.name + "' needs exactly one child");
      if (!var.position_of(node.value)) {
        malformed("value " + std::to_string(node.value) + " not in domain of '" + var.name + "'");
      }
      values_[depth] = node.value;
      return walk(depth + 1, node.children.front());
    }
    if (node.kind != PolicyNode::Kind::Chance) malformed("'" + var.name + "' must be a chance node");
    if (node.children.size() != var.domain.size()) {
      malformed("chance node '" + var.name + "' needs one child per domain value");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < var.domain.size(); ++i) {
      values_[depth] = var.domain[i];
      // Weights depend only on earlier variables, which are already set.
      double w = inst_.distribution(depth, values_)[i];
      sum += w * walk(depth + 1, node.children[i]);
    }
    return sum;
  }

 private:
  const Instance& inst_;
  const std::function<double(std::span<const int>)>* leaf_value_;
  std::vector<int> values_;
};

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b, std::uint64_t ceiling) {
  if (a == 0 || b == 0) return 0;
  if (a > ceiling / b) return ceiling;
  return std::min(a * b, ceiling);
}

using Emit = std::function<bool(const PolicyNode&)>;

class PolicyGenerator {
 public:
  explicit PolicyGenerator(const Instance& instance) : inst_(instance) {}

  bool generate(std::size_t depth, const Emit& emit) {
    if (depth == inst_.size()) return emit(PolicyNode::leaf());
    const Variable& var = inst_.variable(depth);
    if (var.kind == VarKind::Decision) {
      for (int v : var.domain) {
        bool more = generate(depth + 1, [&](const PolicyNode& child) {
          return emit(PolicyNode::decision(var.name, v, child));
        });
        if (!more) return false;
      }
      return true;
    }
    std::vector<PolicyNode> acc;
    return generate_branches(depth, 0, acc, emit);
  }

 private:
  // The first branch's sub-policy varies slowest.
  bool generate_branches(std::size_t depth, std::size_t branch, std::vector<PolicyNode>& acc,
                         const Emit& emit) {
    const Variable& var = inst_.variable(depth);
    if (branch == var.domain.size()) return emit(PolicyNode::chance(var.name, acc));
    return generate(depth + 1, [&](const PolicyNode& child) {
      acc.push_back(child);
      bool more = generate_branches(depth, branch + 1, acc, emit);
      acc.pop_back();
      return more;
    });
  }

  const Instance& inst_;
};

std::vector<int> total_values(const Instance& instance, const Assignment& assignment) {
  std::vector<int> values(instance.size());
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const Variable& v = instance.variable(i);
    auto it = assignment.find(v.name);
    if (it == assignment.end()) throw Error(ErrorCode::PartialAssignment, "no value for '" + v.name + "'");
    if (!v.position_of(it->second)) {
      throw Error(ErrorCode::OutOfDomainValue,
                  "value " + std::to_string(it->second) + " not in domain of '" + v.name + "'");
    }
    values[i] = it->second;
  }
  return values;
}

}  // namespace

double scenario_probability(const Instance& instance, const Scenario& scenario) {
  if (instance.has_conditional_tables()) {
    throw Error(ErrorCode::ConditionalTablesPresent,
                "instance has conditional tables; use conditional_scenario_probability");
  }
  double p = 1.0;
  for (const auto& v : instance.variables()) {
    if (!v.is_stochastic()) continue;
    auto it = scenario.find(v.name);
    if (it == scenario.end()) throw Error(ErrorCode::MissingAssignment, "scenario has no value for '" + v.name + "'");
    auto pos = v.position_of(it->second);
    if (!pos) {
      throw Error(ErrorCode::OutOfDomainValue,
                  "value " + std::to_string(it->second) + " not in domain of '" + v.name + "'");
    }
    p *= v.probabilities[*pos];
  }
  return p;
}

bool check_assignment(const Instance& instance, const Assignment& assignment) {
  auto values = total_values(instance, assignment);
  return std::all_of(instance.constraints().begin(), instance.constraints().end(),
                     [&](const Constraint& c) { return c.holds(values); });
}

double policy_expectation(const Instance& instance, const PolicyNode& policy,
                          const std::function<double(std::span<const int>)>& leaf_value) {
  return PolicyWalker(instance, &leaf_value).walk(0, policy);
}

double policy_satisfaction(const Instance& instance, const PolicyNode& policy) {
  auto constraints = instance.constraints();
  double p = policy_expectation(instance, policy, [&](std::span<const int> values) {
    for (const auto& c : constraints) {
      if (!c.holds(values)) return 0.0;
    }
    return 1.0;
  });
  return std::clamp(p, 0.0, 1.0);
}

void check_policy(const Instance& instance, const PolicyNode& policy) {
  PolicyWalker(instance, nullptr).walk(0, policy);
}

std::uint64_t count_policies(const Instance& instance, std::uint64_t limit) {
  const std::uint64_t ceiling = limit == std::numeric_limits<std::uint64_t>::max() ? limit : limit + 1;
  // The policy space below a variable does not depend on earlier values, so
  // one count per depth suffices.
  std::uint64_t count = 1;
  for (std::size_t d = instance.size(); d-- > 0;) {
    const Variable& v = instance.variable(d);
    if (v.kind == VarKind::Decision) {
      count = saturating_mul(count, v.domain.size(), ceiling);
    } else {
      std::uint64_t power = 1;
      for (std::size_t k = 0; k < v.domain.size(); ++k) power = saturating_mul(power, count, ceiling);
      count = power;
    }
  }
  return std::min(count, ceiling);
}

void enumerate_policies(const Instance& instance, const std::function<bool(const PolicyNode&)>& visit,
                        std::uint64_t cap) {
  std::uint64_t count = count_policies(instance, cap);
  if (count > cap) {
    throw Error(ErrorCode::OracleCapExceeded,
                "more than " + std::to_string(cap) + " policies", static_cast<double>(count));
  }
  PolicyGenerator(instance).generate(0, visit);
}

PolicyNode first_policy(const Instance& instance, std::size_t from) {
  if (from >= instance.size()) return PolicyNode::leaf();
  const Variable& v = instance.variable(from);
  PolicyNode below = first_policy(instance, from + 1);
  if (v.kind == VarKind::Decision) return PolicyNode::decision(v.name, v.domain.front(), std::move(below));
  return PolicyNode::chance(v.name, std::vector<PolicyNode>(v.domain.size(), below));
}

PolicyNode rigid_policy(const Instance& instance, const Assignment& decisions) {
  PolicyNode node = PolicyNode::leaf();
  for (std::size_t d = instance.size(); d-- > 0;) {
    const Variable& v = instance.variable(d);
    if (v.kind == VarKind::Decision) {
      auto it = decisions.find(v.name);
      if (it == decisions.end()) throw Error(ErrorCode::MissingAssignment, "no decision for '" + v.name + "'");
      if (!v.position_of(it->second)) {
        throw Error(ErrorCode::OutOfDomainValue,
                    "value " + std::to_string(it->second) + " not in domain of '" + v.name + "'");
      }
      node = PolicyNode::decision(v.name, it->second, std::move(node));
    } else {
      node = PolicyNode::chance(v.name, std::vector<PolicyNode>(v.domain.size(), node));
    }
  }
  return node;
}

SatisfactionResult oracle_max_satisfaction(const Instance& instance, std::uint64_t cap) {
  SatisfactionResult best;
  best.probability = -1.0;
  enumerate_policies(
      instance,
      [&](const PolicyNode& policy) {
        ++best.stats.nodes_visited;
        double p = policy_satisfaction(instance, policy);
        if (p > best.probability) {
          best.probability = p;
          best.policy = policy;
        }
        return true;
      },
      cap);
  return best;
}

bool is_satisfiable_oracle(const Instance& instance, std::uint64_t cap) {
  return oracle_max_satisfaction(instance, cap).probability >= instance.theta() - kThresholdSlack;
}

}  // namespace stocs
