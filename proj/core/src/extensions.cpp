#include "stocs/extensions.hpp"

#include <algorithm>
#include <limits>

#include "stocs/error.hpp"

namespace stocs {

namespace {

const Objective& require_objective(const Instance& instance) {
  if (!instance.objective()) throw Error(ErrorCode::NoObjective, "instance '" + instance.name() + "' has no objective");
  return *instance.objective();
}

double leaf_value(const Instance& instance, const Objective& objective, std::span<const int> values) {
  for (const auto& c : instance.constraints()) {
    if (!c.holds(values)) return objective.violation_value;
  }
  return static_cast<double>(evaluate(objective.expression, values));
}

class ExpectationSearch {
 public:
  ExpectationSearch(const Instance& instance, const Objective& objective)
      : inst_(instance), objective_(objective), values_(instance.size(), 0),
        check_on_entry_(instance.size() + 1) {
    const auto constraints = inst_.constraints();
    for (std::size_t c = 0; c < constraints.size(); ++c) {
      auto scope = constraints[c].ordered_scope();
      check_on_entry_[scope.empty() ? 0 : scope.back() + 1].push_back(c);
    }
  }

  double node(std::size_t depth, PolicyNode& out) {
    const auto constraints = inst_.constraints();
    for (std::size_t c : check_on_entry_[depth]) {
      // Every leaf below is a violation; any sub-policy attains exactly that.
      if (!constraints[c].holds(values_)) {
        out = first_policy(inst_, depth);
        return objective_.violation_value;
      }
    }
    if (depth == inst_.size()) {
      out = PolicyNode::leaf();
      return static_cast<double>(evaluate(objective_.expression, values_));
    }
    const Variable& var = inst_.variable(depth);
    if (var.kind == VarKind::Decision) {
      double best = -std::numeric_limits<double>::infinity();
      for (int v : var.domain) {
        values_[depth] = v;
        PolicyNode child;
        double value = node(depth + 1, child);
        if (value > best) {
          best = value;
          out = PolicyNode::decision(var.name, v, std::move(child));
        }
      }
      return best;
    }
    const auto weights = inst_.distribution(depth, values_);
    std::vector<PolicyNode> children(var.domain.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < var.domain.size(); ++i) {
      values_[depth] = var.domain[i];
      sum += weights[i] * node(depth + 1, children[i]);
    }
    out = PolicyNode::chance(var.name, std::move(children));
    return sum;
  }

 private:
  const Instance& inst_;
  const Objective& objective_;
  std::vector<int> values_;
  std::vector<std::vector<std::size_t>> check_on_entry_;
};

struct Range {
  double lo;
  double hi;
};

Range expression_range(const Expr& e, const Instance& instance) {
  auto arg = [&](std::size_t i) { return expression_range(e.children[i], instance); };
  switch (e.op) {
    case ExprOp::IntLiteral: return {double(e.literal), double(e.literal)};
    case ExprOp::VariableRef: {
      const auto& dom = instance.variable(static_cast<std::size_t>(e.slot)).domain;
      return {double(dom.front()), double(dom.back())};
    }
    case ExprOp::Add: {
      auto a = arg(0), b = arg(1);
      return {a.lo + b.lo, a.hi + b.hi};
    }
    case ExprOp::Sub: {
      auto a = arg(0), b = arg(1);
      return {a.lo - b.hi, a.hi - b.lo};
    }
    case ExprOp::Mul: {
      auto a = arg(0), b = arg(1);
      double c[] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
      return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
    }
    case ExprOp::Neg: {
      auto a = arg(0);
      return {-a.hi, -a.lo};
    }
    default:
      return {0.0, 1.0};
  }
}

}  // namespace

double conditional_scenario_probability(const Instance& instance, const Scenario& scenario,
                                        const Assignment& decisions) {
  std::vector<int> values(instance.size(), 0);
  std::vector<char> known(instance.size(), 0);
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const Variable& v = instance.variable(i);
    const auto& source = v.is_stochastic() ? scenario : decisions;
    auto it = source.find(v.name);
    if (it == source.end()) continue;
    if (!v.position_of(it->second)) {
      throw Error(ErrorCode::OutOfDomainValue,
                  "value " + std::to_string(it->second) + " not in domain of '" + v.name + "'");
    }
    values[i] = it->second;
    known[i] = 1;
  }
  double p = 1.0;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const Variable& v = instance.variable(i);
    if (!v.is_stochastic()) continue;
    if (!known[i]) throw Error(ErrorCode::MissingAssignment, "scenario has no value for '" + v.name + "'");
    if (v.cpt) {
      for (std::size_t parent : v.cpt->parents()) {
        if (!known[parent]) {
          throw Error(ErrorCode::MissingParentValue, "no value for parent '" + instance.variable(parent).name +
                                                         "' of '" + v.name + "'");
        }
      }
    }
    p *= instance.distribution(i, values)[*v.position_of(values[i])];
  }
  return p;
}

SatisfactionResult bt_max_conditional(const Instance& instance, SearchOptions options) {
  return bt_max(instance, options);
}

double policy_expected_value(const Instance& instance, const PolicyNode& policy) {
  const Objective& objective = require_objective(instance);
  return policy_expectation(instance, policy, [&](std::span<const int> values) {
    return leaf_value(instance, objective, values);
  });
}

ExpectedOptimum optimize_expected(const Instance& instance) {
  const Objective& objective = require_objective(instance);
  ExpectedOptimum out;
  out.expected_value = ExpectationSearch(instance, objective).node(0, out.policy);
  out.satisfaction = policy_satisfaction(instance, out.policy);
  return out;
}

std::optional<ExpectedOptimum> optimize_expected_chance_constrained(const Instance& instance,
                                                                    std::uint64_t cap) {
  require_objective(instance);
  std::optional<ExpectedOptimum> best;
  enumerate_policies(
      instance,
      [&](const PolicyNode& policy) {
        double sat = policy_satisfaction(instance, policy);
        if (sat < instance.theta() - kThresholdSlack) return true;
        double value = policy_expected_value(instance, policy);
        if (!best || value > best->expected_value) best = ExpectedOptimum{policy, value, sat};
        return true;
      },
      cap);
  return best;
}

double objective_lower_bound(const Instance& instance) {
  return expression_range(require_objective(instance).expression, instance).lo;
}

}  // namespace stocs
