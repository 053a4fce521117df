#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>

#include "stocs/model.hpp"
#include "stocs/semantics.hpp"

namespace stocs {

struct Interval {
  double lb = 0.0;
  double ub = 1.0;
};

/// Expand only chance branches whose probability is at least `epsilon`.
struct MinBranchProbability {
  double epsilon = 0.0;
};

/// Expand only the `k` most probable chance branches (ties by domain order).
struct TopK {
  std::size_t k = 1;
};

using Restriction = std::variant<MinBranchProbability, TopK>;

/// Bounds on the maximal satisfaction probability from a search that skips
/// low-probability chance branches. Skipped mass counts 0 towards the lower
/// bound and fully towards the upper bound.
Interval restricted_tree_bounds(const Instance& instance, const Restriction& restriction);

struct HeuristicPolicy {
  PolicyNode policy;
  double exact_satisfaction = 0.0;
};

/// Fixes every stochastic variable to its most probable value, solves the
/// remaining deterministic problem and lifts the decisions into a rigid
/// policy. Throws NoHeuristicPolicy if that problem has no solution.
HeuristicPolicy most_probable_scenario_policy(const Instance& instance);

struct SampleEstimate {
  double estimate = 0.0;
  std::uint64_t n = 0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::uint64_t seed = 0;

  bool operator==(const SampleEstimate&) const = default;
};

inline constexpr double kWilsonZ95 = 1.959964;

/// Wilson score interval for `successes` out of `n` trials.
Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z = kWilsonZ95);

/// Estimates a policy's satisfaction from `n` sampled scenarios.
///
/// Sampling uses std::mt19937_64 seeded with `seed`. Each chance node draws
/// u = (next() >> 11) * 2^-53 and takes the first domain value whose
/// cumulative probability exceeds u. Scenarios are drawn sequentially, so a
/// given seed always reproduces the same stream.
SampleEstimate monte_carlo_policy_eval(const Instance& instance, const PolicyNode& policy,
                                       std::uint64_t n, std::uint64_t seed);

}  // namespace stocs
