#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "stocs/model.hpp"
#include "stocs/semantics.hpp"

namespace stocs {

/// Knobs for the complete search algorithms. Every pruning rule can be
/// switched off on its own; doing so changes statistics, never verdicts.
struct SearchOptions {
  bool forward_checking = false;
  /// Abandon a chance node once accumulated plus unexplored mass cannot
  /// reach the required threshold.
  bool chance_pruning = true;
  /// Stop trying values at a decision node once one meets the threshold.
  bool decision_pruning = true;
  /// Forward checking: a future variable with no consistent value (or, for
  /// a stochastic variable, no remaining mass) makes the branch worth 0.
  bool wipeout_pruning = true;
  /// Forward checking: abandon a branch whose product bound over pruned
  /// stochastic mass falls below the required threshold. Ignored when the
  /// instance has conditional tables.
  bool mass_pruning = true;
  /// Forward checking: try decision values in descending bound order.
  bool order_values_by_bound = false;
  /// Skip zero-probability chance branches instead of searching them.
  bool skip_zero_probability = false;
};

struct DecideResult {
  bool satisfiable = false;
  std::optional<PolicyNode> policy;
  SearchStats stats;
};

/// Mutable bookkeeping of one search: the partial assignment, the live
/// values of every variable, pruned stochastic mass and an undo trail.
class SearchState {
 public:
  explicit SearchState(const Instance& instance);

  std::size_t depth = 0;
  std::vector<int> values;

  bool alive(std::size_t var, std::size_t position) const { return alive_[var][position]; }
  std::size_t alive_count(std::size_t var) const { return alive_count_[var]; }
  double pruned_mass(std::size_t var) const { return pruned_mass_[var]; }

  /// Removes a value; `mass` is its probability (0 for decision variables).
  void prune(std::size_t var, std::size_t position, double mass);

  std::size_t mark() const { return trail_.size(); }
  void undo_to(std::size_t mark);

  /// Domains and masses only; the assignment is scratch space.
  bool same_domains(const SearchState& other) const;

 private:
  struct Removal {
    std::size_t var;
    std::size_t position;
    double mass;
  };

  std::vector<std::vector<bool>> alive_;
  std::vector<std::size_t> alive_count_;
  std::vector<double> pruned_mass_;
  std::vector<Removal> trail_;
};

/// Depth-first policy search in instance order. One object owns one
/// SearchState; run it once per query.
class PolicySearch {
 public:
  PolicySearch(const Instance& instance, SearchOptions options);
  ~PolicySearch();
  PolicySearch(const PolicySearch&) = delete;
  PolicySearch& operator=(const PolicySearch&) = delete;

  /// Exact maximal satisfaction probability and an argmax policy.
  SatisfactionResult maximize();

  /// Whether some policy reaches `theta` (with kThresholdSlack), and a
  /// witness when one does.
  DecideResult decide(double theta);

  const SearchState& state() const;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

SatisfactionResult bt_max(const Instance& instance, SearchOptions options = {});
SatisfactionResult fc_max(const Instance& instance, SearchOptions options = {});
DecideResult bt_decide(const Instance& instance, std::optional<double> theta = std::nullopt,
                       SearchOptions options = {});
DecideResult fc_decide(const Instance& instance, std::optional<double> theta = std::nullopt,
                       SearchOptions options = {});

struct DecisionBranch {};

struct ChanceBranch {
  double probability = 0.0;  // weight of the branch being entered
  double accumulated = 0.0;  // mass already secured by earlier branches
  double remaining = 0.0;    // mass of the other unexplored branches
};

using BranchContext = std::variant<DecisionBranch, ChanceBranch>;

/// Threshold a child must reach for its parent to still meet
/// `parent_required`, clamped to [0, 1].
double required_threshold(double parent_required, const BranchContext& context);

}  // namespace stocs
