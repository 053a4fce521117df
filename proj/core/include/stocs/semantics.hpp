#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stocs/model.hpp"

namespace stocs {

/// A node of a policy tree. Decision nodes fix one value and have exactly
/// one child; chance nodes have one child per domain value, in domain order.
struct PolicyNode {
  enum class Kind { Leaf, Decision, Chance };

  Kind kind = Kind::Leaf;
  std::string variable;
  int value = 0;  // decision nodes only
  std::vector<PolicyNode> children;

  static PolicyNode leaf() { return {}; }
  static PolicyNode decision(std::string variable, int value, PolicyNode child);
  static PolicyNode chance(std::string variable, std::vector<PolicyNode> children);

  bool operator==(const PolicyNode&) const = default;
};

/// Number of nodes in the tree, leaves included.
std::size_t policy_size(const PolicyNode& policy);

using Scenario = std::map<std::string, int>;
using Assignment = std::map<std::string, int>;

struct SearchStats {
  std::uint64_t nodes_visited = 0;
  std::uint64_t chance_prunes = 0;
  std::uint64_t decision_prunes = 0;
  std::uint64_t fc_wipeouts = 0;
  std::uint64_t fc_mass_prunes = 0;

  bool operator==(const SearchStats&) const = default;
};

struct SatisfactionResult {
  double probability = 0.0;
  std::optional<PolicyNode> policy;
  SearchStats stats;
};

inline constexpr double kThresholdSlack = 1e-9;
inline constexpr std::uint64_t kDefaultOracleCap = 1'000'000;

/// Product of the scenario's branch probabilities. Instances with
/// conditional tables are rejected; see conditional_scenario_probability.
double scenario_probability(const Instance& instance, const Scenario& scenario);

/// True iff every constraint holds on a complete assignment.
bool check_assignment(const Instance& instance, const Assignment& assignment);

/// Probability mass of the satisfying leaves of `policy`.
double policy_satisfaction(const Instance& instance, const PolicyNode& policy);

/// Walks the policy tree and returns the probability-weighted sum of
/// `leaf_value` over its leaves. The span passed to `leaf_value` holds the
/// complete assignment indexed by variable. Chance-node weights come from the
/// (conditional) distributions. Throws MalformedPolicy on structural errors.
double policy_expectation(const Instance& instance, const PolicyNode& policy,
                          const std::function<double(std::span<const int>)>& leaf_value);

/// Throws MalformedPolicy unless `policy` is a structurally valid policy tree
/// for `instance`.
void check_policy(const Instance& instance, const PolicyNode& policy);

/// Number of distinct policies, saturating at `limit + 1`.
std::uint64_t count_policies(const Instance& instance, std::uint64_t limit = kDefaultOracleCap);

/// Streams every distinct policy once, in domain-order depth-first order.
/// `visit` returns false to stop early. Throws OracleCapExceeded when the
/// policy count exceeds `cap`.
void enumerate_policies(const Instance& instance, const std::function<bool(const PolicyNode&)>& visit,
                        std::uint64_t cap = kDefaultOracleCap);

/// The policy taking every decision variable's first domain value, from
/// variable `from` onwards.
PolicyNode first_policy(const Instance& instance, std::size_t from = 0);

/// A policy whose decisions ignore observations.
PolicyNode rigid_policy(const Instance& instance, const Assignment& decisions);

/// Exhaustive maximum over all policies. Ties keep the first policy in
/// enumeration order.
SatisfactionResult oracle_max_satisfaction(const Instance& instance,
                                           std::uint64_t cap = kDefaultOracleCap);

bool is_satisfiable_oracle(const Instance& instance, std::uint64_t cap = kDefaultOracleCap);

}  // namespace stocs
