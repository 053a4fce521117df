#include "stocs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stocs/error.hpp"

namespace stocs {

SearchState::SearchState(const Instance& instance)
    : values(instance.size(), 0), alive_count_(instance.size()), pruned_mass_(instance.size(), 0.0) {
  alive_.reserve(instance.size());
  for (std::size_t i = 0; i < instance.size(); ++i) {
    auto n = instance.variable(i).domain.size();
    alive_.emplace_back(n, true);
    alive_count_[i] = n;
  }
}

void SearchState::prune(std::size_t var, std::size_t position, double mass) {
  alive_[var][position] = false;
  --alive_count_[var];
  pruned_mass_[var] += mass;
  trail_.push_back({var, position, mass});
}

void SearchState::undo_to(std::size_t mark) {
  while (trail_.size() > mark) {
    const Removal& r = trail_.back();
    alive_[r.var][r.position] = true;
    ++alive_count_[r.var];
    pruned_mass_[r.var] -= r.mass;
    trail_.pop_back();
  }
  // Removing the last removal must restore exactly zero.
  for (std::size_t v = 0; v < alive_count_.size(); ++v) {
    if (alive_count_[v] == alive_[v].size()) pruned_mass_[v] = 0.0;
  }
}

bool SearchState::same_domains(const SearchState& other) const {
  return alive_ == other.alive_ && alive_count_ == other.alive_count_ &&
         pruned_mass_ == other.pruned_mass_ && trail_.size() == other.trail_.size();
}

double required_threshold(double parent_required, const BranchContext& context) {
  if (std::holds_alternative<DecisionBranch>(context)) return parent_required;
  const auto& c = std::get<ChanceBranch>(context);
  if (!(c.probability > 0.0)) {
    throw Error(ErrorCode::NonpositiveBranchProbability,
                "branch probability " + std::to_string(c.probability));
  }
  return std::clamp((parent_required - c.accumulated - c.remaining) / c.probability, 0.0, 1.0);
}

namespace {

constexpr double kUnbounded = std::numeric_limits<double>::infinity();

// A search result for one subtree, relative to thresholds (low, high):
//   value >= high          -> the policy scores at least `value`;
//   low <= value < high    -> `value` is the exact subtree maximum;
//   value < low            -> the subtree cannot reach `low`; no policy.
struct Outcome {
  double value = 0.0;
  std::optional<PolicyNode> policy;
};

enum class Entry { Alive, Dead, Bounded };

}  // namespace

class PolicySearch::Impl {
 public:
  Impl(const Instance& instance, SearchOptions options)
      : inst_(instance),
        opt_(options),
        state_(instance),
        check_on_entry_(instance.size() + 1),
        forward_on_entry_(instance.size() + 1),
        defaults_(instance.size() + 1) {
    const auto constraints = inst_.constraints();
    for (std::size_t c = 0; c < constraints.size(); ++c) {
      auto scope = constraints[c].ordered_scope();
      // Checked on entering the node right after its last variable is set.
      check_on_entry_[scope.empty() ? 0 : scope.back() + 1].push_back(c);
      // Forward checked once exactly one scope variable remains unassigned.
      if (!scope.empty()) {
        std::size_t trigger = scope.size() == 1 ? 0 : scope[scope.size() - 2] + 1;
        forward_on_entry_[trigger].push_back({c, scope.back()});
      }
    }
    for (std::size_t i = 0; i < inst_.size(); ++i) {
      if (inst_.variable(i).is_stochastic()) stochastic_.push_back(i);
    }
    mass_bound_ = opt_.forward_checking && opt_.mass_pruning && !inst_.has_conditional_tables();
  }

  SatisfactionResult maximize() {
    stats_ = {};
    Outcome out = node(0, 0.0, kUnbounded);
    SatisfactionResult r;
    r.probability = std::clamp(out.value, 0.0, 1.0);
    r.policy = std::move(out.policy);
    r.stats = stats_;
    return r;
  }

  DecideResult decide(double theta) {
    stats_ = {};
    const double low = std::clamp(theta - kThresholdSlack, 0.0, 1.0);
    Outcome out = node(0, low, low);
    DecideResult r;
    r.satisfiable = out.value >= low && out.policy.has_value();
    if (r.satisfiable) r.policy = std::move(out.policy);
    r.stats = stats_;
    return r;
  }

  const SearchState& state() const { return state_; }

 private:
  struct ForwardCheck {
    std::size_t constraint;
    std::size_t future;
  };

  Outcome node(std::size_t depth, double low, double high) {
    ++stats_.nodes_visited;
    state_.depth = depth;
    if (high <= 0.0) return {0.0, default_policy(depth)};

    const std::size_t mark = state_.mark();
    double bound = 1.0;
    Entry entry = enter(depth, low, bound, true);
    Outcome out;
    if (entry == Entry::Dead) {
      out = {0.0, default_policy(depth)};
    } else if (entry == Entry::Bounded) {
      out = {bound, std::nullopt};
    } else if (depth == inst_.size()) {
      out = {1.0, PolicyNode::leaf()};
    } else if (inst_.variable(depth).kind == VarKind::Decision) {
      out = decision_node(depth, low, high);
    } else {
      out = chance_node(depth, low, high);
    }
    state_.undo_to(mark);
    if (out.value < low) out.policy.reset();
    return out;
  }

  // Runs the constraint checks and forward checks due once variable
  // depth-1 has been assigned.
  Entry enter(std::size_t depth, double low, double& bound, bool record) {
    const auto constraints = inst_.constraints();
    auto& values = state_.values;
    for (std::size_t c : check_on_entry_[depth]) {
      if (!constraints[c].holds(values)) return Entry::Dead;
    }
    if (!opt_.forward_checking) return Entry::Alive;

    touched_.clear();
    for (const ForwardCheck& fc : forward_on_entry_[depth]) {
      const Variable& var = inst_.variable(fc.future);
      const bool weighted = var.is_stochastic() && !var.cpt;
      for (std::size_t pos = 0; pos < var.domain.size(); ++pos) {
        if (!state_.alive(fc.future, pos)) continue;
        values[fc.future] = var.domain[pos];
        if (!constraints[fc.constraint].holds(values)) {
          state_.prune(fc.future, pos, weighted ? var.probabilities[pos] : 0.0);
          touched_.push_back(fc.future);
        }
      }
    }

    if (opt_.wipeout_pruning) {
      for (std::size_t f : touched_) {
        if (wiped_out(f)) {
          if (record) ++stats_.fc_wipeouts;
          return Entry::Dead;
        }
      }
    }
    if (mass_bound_) {
      bound = mass_bound(depth);
      if (bound < low) {
        if (record) ++stats_.fc_mass_prunes;
        return Entry::Bounded;
      }
    }
    return Entry::Alive;
  }

  bool wiped_out(std::size_t var) const {
    if (state_.alive_count(var) == 0) return true;
    const Variable& v = inst_.variable(var);
    if (!v.is_stochastic() || v.cpt) return false;
    for (std::size_t pos = 0; pos < v.domain.size(); ++pos) {
      if (state_.alive(var, pos) && v.probabilities[pos] > 0.0) return false;
    }
    return true;
  }

  // Upper bound on the satisfaction of any subtree below `depth`: every
  // pruned stochastic value surely violates a constraint.
  double mass_bound(std::size_t depth) const {
    double bound = 1.0;
    auto first = std::lower_bound(stochastic_.begin(), stochastic_.end(), depth);
    for (auto it = first; it != stochastic_.end(); ++it) {
      bound *= std::max(0.0, 1.0 - state_.pruned_mass(*it));
    }
    return bound;
  }

  std::vector<std::size_t> candidate_values(std::size_t depth) {
    const Variable& var = inst_.variable(depth);
    std::vector<std::size_t> order;
    for (std::size_t pos = 0; pos < var.domain.size(); ++pos) {
      if (!opt_.forward_checking || state_.alive(depth, pos)) order.push_back(pos);
    }
    if (opt_.forward_checking && opt_.order_values_by_bound && order.size() > 1) {
      std::vector<double> bounds(var.domain.size(), 0.0);
      for (std::size_t pos : order) {
        state_.values[depth] = var.domain[pos];
        const std::size_t mark = state_.mark();
        double bound = 1.0;
        Entry e = enter(depth + 1, 0.0, bound, false);
        bounds[pos] = e == Entry::Dead ? 0.0 : (mass_bound_ ? mass_bound(depth + 1) : 1.0);
        state_.undo_to(mark);
      }
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return bounds[a] > bounds[b]; });
    }
    return order;
  }

  Outcome decision_node(std::size_t depth, double low, double high) {
    const Variable& var = inst_.variable(depth);
    const auto order = candidate_values(depth);
    if (order.empty()) return {0.0, default_policy(depth)};

    double best = -1.0;
    std::optional<PolicyNode> best_policy;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const int value = var.domain[order[k]];
      state_.values[depth] = value;
      const double child_low = opt_.decision_pruning ? std::max(low, best) : low;
      Outcome child = node(depth + 1, child_low, std::max(high, child_low));
      if (child.value > best) {
        best = child.value;
        if (child.policy) {
          best_policy = PolicyNode::decision(var.name, value, std::move(*child.policy));
        } else {
          best_policy.reset();
        }
      }
      if (opt_.decision_pruning && best >= high) {
        if (k + 1 < order.size()) ++stats_.decision_prunes;
        break;
      }
    }
    return {best, std::move(best_policy)};
  }

  Outcome chance_node(std::size_t depth, double low, double high) {
    const Variable& var = inst_.variable(depth);
    const auto weights = inst_.distribution(depth, state_.values);
    const std::size_t n = var.domain.size();

    std::vector<char> explore(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (opt_.forward_checking && !state_.alive(depth, i)) continue;
      if (weights[i] == 0.0 && opt_.skip_zero_probability) continue;
      explore[i] = 1;
    }
    // from[i]: explorable mass of branches i..n-1, summed from the back so
    // it never goes negative and is exactly 0 past the last branch.
    std::vector<double> from(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) from[i] = from[i + 1] + (explore[i] ? weights[i] : 0.0);

    std::vector<PolicyNode> children(n);
    auto fill_defaults = [&](std::size_t start) {
      for (std::size_t j = start; j < n; ++j) children[j] = default_policy(depth + 1);
    };

    double secured = 0.0;
    bool failed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!explore[i]) {
        children[i] = default_policy(depth + 1);
        continue;
      }
      state_.values[depth] = var.domain[i];
      const double p = weights[i];
      if (p == 0.0) {
        // Kept in the tree; weighs nothing, so only max mode searches it.
        Outcome child = node(depth + 1, 0.0, high == kUnbounded ? kUnbounded : 0.0);
        children[i] = child.policy ? std::move(*child.policy) : default_policy(depth + 1);
        continue;
      }
      if (secured + from[i] < low) {
        failed = true;
        if (opt_.chance_pruning) {
          ++stats_.chance_prunes;
          return {secured + from[i], std::nullopt};
        }
      }
      const double remaining = from[i + 1];
      const double child_low = required_threshold(low, ChanceBranch{p, secured, remaining});
      const double child_high = std::max(child_low, (high - secured) / p);
      Outcome child = node(depth + 1, child_low, child_high);
      secured += p * child.value;
      if (child.value < child_low || !child.policy) {
        failed = true;
        if (opt_.chance_pruning) {
          ++stats_.chance_prunes;
          return {std::min(secured + remaining, std::nextafter(low, -1.0)), std::nullopt};
        }
        children[i] = default_policy(depth + 1);
      } else {
        children[i] = std::move(*child.policy);
      }
      if (opt_.chance_pruning && !failed && secured >= high) {
        if (remaining > 0.0) ++stats_.chance_prunes;
        fill_defaults(i + 1);
        return {secured, PolicyNode::chance(var.name, std::move(children))};
      }
    }
    if (failed) return {std::min(secured, std::nextafter(low, -1.0)), std::nullopt};
    return {std::min(secured, 1.0), PolicyNode::chance(var.name, std::move(children))};
  }

  const PolicyNode& default_policy(std::size_t depth) {
    if (!defaults_[depth]) defaults_[depth] = first_policy(inst_, depth);
    return *defaults_[depth];
  }

  const Instance& inst_;
  SearchOptions opt_;
  SearchState state_;
  SearchStats stats_;
  std::vector<std::vector<std::size_t>> check_on_entry_;
  std::vector<std::vector<ForwardCheck>> forward_on_entry_;
  std::vector<std::size_t> stochastic_;
  std::vector<std::size_t> touched_;
  std::vector<std::optional<PolicyNode>> defaults_;
  bool mass_bound_ = false;
};

PolicySearch::PolicySearch(const Instance& instance, SearchOptions options)
    : impl_(std::make_unique<Impl>(instance, options)) {}

PolicySearch::~PolicySearch() = default;

SatisfactionResult PolicySearch::maximize() { return impl_->maximize(); }

DecideResult PolicySearch::decide(double theta) { return impl_->decide(theta); }

const SearchState& PolicySearch::state() const { return impl_->state(); }

namespace {

SearchOptions with_fc(SearchOptions options, bool fc) {
  options.forward_checking = fc;
  return options;
}

}  // namespace

SatisfactionResult bt_max(const Instance& instance, SearchOptions options) {
  return PolicySearch(instance, with_fc(options, false)).maximize();
}

SatisfactionResult fc_max(const Instance& instance, SearchOptions options) {
  return PolicySearch(instance, with_fc(options, true)).maximize();
}

DecideResult bt_decide(const Instance& instance, std::optional<double> theta, SearchOptions options) {
  return PolicySearch(instance, with_fc(options, false)).decide(theta.value_or(instance.theta()));
}

DecideResult fc_decide(const Instance& instance, std::optional<double> theta, SearchOptions options) {
  return PolicySearch(instance, with_fc(options, true)).decide(theta.value_or(instance.theta()));
}

}  // namespace stocs
