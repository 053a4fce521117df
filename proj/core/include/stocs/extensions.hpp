#pragma once

#include <cstdint>
#include <optional>

#include "stocs/model.hpp"
#include "stocs/semantics.hpp"
#include "stocs/solver.hpp"

namespace stocs {

/// Chain-rule probability of a scenario: the product, in instance order, of
/// P(value | parent values). Parent values come from `scenario` or
/// `decisions`. Variables without a table use their own distribution.
double conditional_scenario_probability(const Instance& instance, const Scenario& scenario,
                                        const Assignment& decisions);

/// Maximal satisfaction under conditional tables. The search reads branch
/// weights from the table row selected by the partial assignment, so this is
/// bt_max; it exists as the named entry point for dependent instances.
SatisfactionResult bt_max_conditional(const Instance& instance, SearchOptions options = {});

struct ExpectedOptimum {
  PolicyNode policy;
  double expected_value = 0.0;
  double satisfaction = 0.0;
};

/// Maximizes E[objective on satisfying leaves, violation_value elsewhere]
/// over all policies. Throws NoObjective when the instance has none.
ExpectedOptimum optimize_expected(const Instance& instance);

/// Expected penalized objective of a given policy.
double policy_expected_value(const Instance& instance, const PolicyNode& policy);

/// Best expected value among policies whose satisfaction reaches theta.
/// This problem does not decompose over the tree, so it enumerates every
/// policy and is exponential in the size of the policy space. Returns
/// nullopt when no policy reaches theta.
std::optional<ExpectedOptimum> optimize_expected_chance_constrained(
    const Instance& instance, std::uint64_t cap = kDefaultOracleCap);

/// Smallest value the objective expression can take over the domains
/// (interval arithmetic, so possibly lower than the true minimum).
double objective_lower_bound(const Instance& instance);

}  // namespace stocs
