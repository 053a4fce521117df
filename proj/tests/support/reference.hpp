#pragma once

// Straightforward reference computations used as test oracles. They share no
// code with the library's search, enumeration or policy walking.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "stocs/expression.hpp"
#include "stocs/model.hpp"
#include "stocs/semantics.hpp"

namespace stocs::testing {

inline bool all_hold(const Instance& inst, const std::vector<int>& values) {
  for (const auto& c : inst.constraints()) {
    if (!c.holds(values)) return false;
  }
  return true;
}

inline double leaf_objective(const Instance& inst, const std::vector<int>& values) {
  if (!all_hold(inst, values)) return inst.objective()->violation_value;
  return static_cast<double>(evaluate(inst.objective()->expression, values));
}

/// Max at decisions, weighted sum at chance variables, leaf scored by `leaf`.
inline double expectimax(const Instance& inst, const std::function<double(const std::vector<int>&)>& leaf) {
  std::vector<int> values(inst.size(), 0);
  std::function<double(std::size_t)> rec = [&](std::size_t depth) -> double {
    if (depth == inst.size()) return leaf(values);
    const Variable& v = inst.variable(depth);
    if (v.kind == VarKind::Decision) {
      double best = -1e300;
      for (int x : v.domain) {
        values[depth] = x;
        best = std::max(best, rec(depth + 1));
      }
      return best;
    }
    std::vector<double> w(inst.distribution(depth, values).begin(), inst.distribution(depth, values).end());
    double sum = 0.0;
    for (std::size_t i = 0; i < v.domain.size(); ++i) {
      values[depth] = v.domain[i];
      sum += w[i] * rec(depth + 1);
    }
    return sum;
  };
  return rec(0);
}

inline double reference_max(const Instance& inst) {
  return expectimax(inst, [&](const std::vector<int>& values) { return all_hold(inst, values) ? 1.0 : 0.0; });
}

inline double reference_max_expected(const Instance& inst) {
  return expectimax(inst, [&](const std::vector<int>& values) { return leaf_objective(inst, values); });
}

/// Closed-form policy count: a decision multiplies the count of its subtree
/// by the domain size, a chance node raises it to the domain size.
inline double reference_policy_count(const Instance& inst, std::size_t depth = 0) {
  if (depth == inst.size()) return 1.0;
  const double below = reference_policy_count(inst, depth + 1);
  const auto size = static_cast<double>(inst.variable(depth).domain.size());
  if (inst.variable(depth).kind == VarKind::Decision) return size * below;
  double out = 1.0;
  for (std::size_t i = 0; i < inst.variable(depth).domain.size(); ++i) out *= below;
  return out;
}

/// Every scenario as a full value vector with stochastic slots filled and
/// decision slots zero, together with its unconditional probability.
inline void for_each_scenario(const Instance& inst,
                              const std::function<void(const std::vector<int>&, double)>& visit) {
  std::vector<int> values(inst.size(), 0);
  std::function<void(std::size_t, double)> rec = [&](std::size_t depth, double p) {
    if (depth == inst.size()) {
      visit(values, p);
      return;
    }
    const Variable& v = inst.variable(depth);
    if (v.kind == VarKind::Decision) {
      rec(depth + 1, p);
      return;
    }
    for (std::size_t i = 0; i < v.domain.size(); ++i) {
      values[depth] = v.domain[i];
      rec(depth + 1, p * v.probabilities[i]);
    }
  };
  rec(0, 1.0);
}

/// Completes a scenario with the decisions the policy takes along it.
inline std::vector<int> induced_assignment(const Instance& inst, const PolicyNode& policy,
                                           std::vector<int> values) {
  const PolicyNode* node = &policy;
  for (std::size_t depth = 0; depth < inst.size(); ++depth) {
    const Variable& v = inst.variable(depth);
    if (node->kind == PolicyNode::Kind::Decision) {
      values[depth] = node->value;
      node = &node->children[0];
    } else {
      auto it = std::find(v.domain.begin(), v.domain.end(), values[depth]);
      node = &node->children[static_cast<std::size_t>(it - v.domain.begin())];
    }
  }
  return values;
}

/// Σ over scenarios of P(scenario) × [induced assignment satisfies all].
inline double scenario_sum_satisfaction(const Instance& inst, const PolicyNode& policy) {
  double total = 0.0;
  for_each_scenario(inst, [&](const std::vector<int>& scenario, double p) {
    if (all_hold(inst, induced_assignment(inst, policy, scenario))) total += p;
  });
  return total;
}

inline double scenario_sum_expected(const Instance& inst, const PolicyNode& policy) {
  double total = 0.0;
  for_each_scenario(inst, [&](const std::vector<int>& scenario, double p) {
    total += p * leaf_objective(inst, induced_assignment(inst, policy, scenario));
  });
  return total;
}

inline Scenario to_scenario(const Instance& inst, const std::vector<int>& values) {
  Scenario s;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (inst.variable(i).is_stochastic()) s[inst.variable(i).name] = values[i];
  }
  return s;
}

inline Assignment to_assignment(const Instance& inst, const std::vector<int>& values) {
  Assignment a;
  for (std::size_t i = 0; i < inst.size(); ++i) a[inst.variable(i).name] = values[i];
  return a;
}

}  // namespace stocs::testing
