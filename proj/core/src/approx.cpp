#include "stocs/approx.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "stocs/error.hpp"

namespace stocs {

namespace {

class BoundSearch {
 public:
  BoundSearch(const Instance& instance, const Restriction& restriction)
      : inst_(instance), restriction_(restriction), values_(instance.size(), 0),
        check_on_entry_(instance.size() + 1) {
    const auto constraints = inst_.constraints();
    for (std::size_t c = 0; c < constraints.size(); ++c) {
      auto scope = constraints[c].ordered_scope();
      check_on_entry_[scope.empty() ? 0 : scope.back() + 1].push_back(c);
    }
  }

  Interval run() { return node(0); }

 private:
  Interval node(std::size_t depth) {
    const auto constraints = inst_.constraints();
    for (std::size_t c : check_on_entry_[depth]) {
      if (!constraints[c].holds(values_)) return {0.0, 0.0};
    }
    if (depth == inst_.size()) return {1.0, 1.0};

    const Variable& var = inst_.variable(depth);
    if (var.kind == VarKind::Decision) {
      Interval best{0.0, 0.0};
      for (int v : var.domain) {
        values_[depth] = v;
        Interval child = node(depth + 1);
        best.lb = std::max(best.lb, child.lb);
        best.ub = std::max(best.ub, child.ub);
      }
      return best;
    }

    const auto weights = inst_.distribution(depth, values_);
    const auto expand = expanded(weights);
    Interval sum{0.0, 0.0};
    for (std::size_t i = 0; i < var.domain.size(); ++i) {
      if (!expand[i]) {
        sum.ub += weights[i];
        continue;
      }
      values_[depth] = var.domain[i];
      Interval child = node(depth + 1);
      sum.lb += weights[i] * child.lb;
      sum.ub += weights[i] * child.ub;
    }
    sum.lb = std::clamp(sum.lb, 0.0, 1.0);
    sum.ub = std::clamp(sum.ub, sum.lb, 1.0);
    return sum;
  }

  std::vector<char> expanded(std::span<const double> weights) const {
    std::vector<char> keep(weights.size(), 0);
    if (const auto* eps = std::get_if<MinBranchProbability>(&restriction_)) {
      for (std::size_t i = 0; i < weights.size(); ++i) keep[i] = weights[i] >= eps->epsilon;
      return keep;
    }
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
    const std::size_t k = std::min(std::get<TopK>(restriction_).k, order.size());
    for (std::size_t i = 0; i < k; ++i) keep[order[i]] = 1;
    return keep;
  }

  const Instance& inst_;
  Restriction restriction_;
  std::vector<int> values_;
  std::vector<std::vector<std::size_t>> check_on_entry_;
};

// Plain backtracking over the deterministic core. Stochastic variables are
// fixed to their most probable value given the values chosen before them.
class MostProbableCore {
 public:
  explicit MostProbableCore(const Instance& instance)
      : inst_(instance), values_(instance.size(), 0), check_on_entry_(instance.size() + 1) {
    const auto constraints = inst_.constraints();
    for (std::size_t c = 0; c < constraints.size(); ++c) {
      auto scope = constraints[c].ordered_scope();
      check_on_entry_[scope.empty() ? 0 : scope.back() + 1].push_back(c);
    }
  }

  bool solve(std::size_t depth = 0) {
    const auto constraints = inst_.constraints();
    for (std::size_t c : check_on_entry_[depth]) {
      if (!constraints[c].holds(values_)) return false;
    }
    if (depth == inst_.size()) return true;
    const Variable& var = inst_.variable(depth);
    if (var.kind == VarKind::Stochastic) {
      const auto weights = inst_.distribution(depth, values_);
      // max_element returns the first maximum, i.e. the smallest value.
      auto it = std::max_element(weights.begin(), weights.end());
      values_[depth] = var.domain[static_cast<std::size_t>(it - weights.begin())];
      return solve(depth + 1);
    }
    for (int v : var.domain) {
      values_[depth] = v;
      if (solve(depth + 1)) return true;
    }
    return false;
  }

  Assignment decisions() const {
    Assignment out;
    for (std::size_t i = 0; i < inst_.size(); ++i) {
      if (inst_.variable(i).kind == VarKind::Decision) out[inst_.variable(i).name] = values_[i];
    }
    return out;
  }

 private:
  const Instance& inst_;
  std::vector<int> values_;
  std::vector<std::vector<std::size_t>> check_on_entry_;
};

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t sample_index(std::span<const double> weights, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cumulative += weights[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  // Rounding left the cumulative sum just below 1.
  return last_positive;
}

}  // namespace

Interval restricted_tree_bounds(const Instance& instance, const Restriction& restriction) {
  if (const auto* eps = std::get_if<MinBranchProbability>(&restriction)) {
    if (!(eps->epsilon >= 0.0 && eps->epsilon <= 1.0)) {
      throw Error(ErrorCode::BadEpsilon, "epsilon " + std::to_string(eps->epsilon) + " outside [0,1]",
                  eps->epsilon);
    }
  } else if (std::get<TopK>(restriction).k < 1) {
    throw Error(ErrorCode::BadK, "k must be at least 1");
  }
  return BoundSearch(instance, restriction).run();
}

HeuristicPolicy most_probable_scenario_policy(const Instance& instance) {
  MostProbableCore core(instance);
  if (!core.solve()) {
    throw Error(ErrorCode::NoHeuristicPolicy, "the most-probable-scenario problem has no solution");
  }
  HeuristicPolicy out;
  out.policy = rigid_policy(instance, core.decisions());
  out.exact_satisfaction = policy_satisfaction(instance, out.policy);
  return out;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) throw Error(ErrorCode::BadSampleCount, "no samples");
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (phat + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn));
  Interval ci{std::clamp(centre - half, 0.0, 1.0), std::clamp(centre + half, 0.0, 1.0)};
  ci.lb = std::min(ci.lb, phat);
  ci.ub = std::max(ci.ub, phat);
  return ci;
}

SampleEstimate monte_carlo_policy_eval(const Instance& instance, const PolicyNode& policy,
                                       std::uint64_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::BadSampleCount, "sample count must be at least 1");
  check_policy(instance, policy);

  std::mt19937_64 rng(seed);
  std::vector<int> values(instance.size(), 0);
  const auto constraints = instance.constraints();
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < n; ++s) {
    const PolicyNode* node = &policy;
    for (std::size_t depth = 0; depth < instance.size(); ++depth) {
      const Variable& var = instance.variable(depth);
      if (node->kind == PolicyNode::Kind::Decision) {
        values[depth] = node->value;
        node = &node->children.front();
      } else {
        std::size_t i = sample_index(instance.distribution(depth, values), unit_uniform(rng));
        values[depth] = var.domain[i];
        node = &node->children[i];
      }
    }
    bool ok = std::all_of(constraints.begin(), constraints.end(),
                          [&](const Constraint& c) { return c.holds(values); });
    if (ok) ++hits;
  }

  SampleEstimate est;
  est.n = n;
  est.seed = seed;
  est.estimate = static_cast<double>(hits) / static_cast<double>(n);
  Interval ci = wilson_interval(hits, n);
  est.ci_low = ci.lb;
  est.ci_high = ci.ub;
  return est;
}

}  // namespace stocs
