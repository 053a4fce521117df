#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "stocs/expression.hpp"

namespace stocs {

enum class VarKind { Decision, Stochastic };

std::string_view to_string(VarKind kind);

// ---------------------------------------------------------------------------
// Unvalidated input. These mirror the instance file and are what callers
// build by hand; validate_instance turns them into an Instance.
// ---------------------------------------------------------------------------

struct CptRowSpec {
  std::vector<int> given;
  std::vector<double> probabilities;

  bool operator==(const CptRowSpec&) const = default;
};

struct CptSpec {
  std::vector<std::string> parents;
  std::vector<CptRowSpec> rows;

  bool operator==(const CptSpec&) const = default;
};

struct VariableSpec {
  std::string name;
  VarKind kind = VarKind::Decision;
  std::vector<int> domain;
  std::vector<double> probabilities;
  std::optional<CptSpec> cpt;

  bool operator==(const VariableSpec&) const = default;
};

struct TableRelation {
  std::vector<std::string> scope;
  std::vector<std::vector<int>> tuples;

  bool operator==(const TableRelation&) const = default;
};

using ConstraintSpec = std::variant<Expr, TableRelation>;

struct ObjectiveSpec {
  Expr expression;
  double violation_value = 0.0;

  bool operator==(const ObjectiveSpec&) const = default;
};

struct InstanceSpec {
  std::string name;
  double theta = 0.0;
  std::vector<VariableSpec> variables;
  std::vector<ConstraintSpec> constraints;
  std::optional<ObjectiveSpec> objective;

  bool operator==(const InstanceSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Validated model.
// ---------------------------------------------------------------------------

/// Distribution of a stochastic variable conditioned on earlier variables.
/// Rows are stored in mixed-radix order over the parents' domain positions,
/// first parent most significant.
class ConditionalTable {
 public:
  ConditionalTable() = default;
  ConditionalTable(std::vector<std::size_t> parents, std::vector<std::size_t> radices,
                   std::vector<std::vector<double>> rows);

  std::span<const std::size_t> parents() const { return parents_; }
  std::size_t row_count() const { return rows_.size(); }
  std::span<const double> row(std::size_t index) const { return rows_[index]; }

  /// Row selected by the parents' domain positions.
  std::span<const double> row_for(std::span<const std::size_t> parent_positions) const;

  bool operator==(const ConditionalTable&) const = default;

 private:
  std::vector<std::size_t> parents_;
  std::vector<std::size_t> radices_;
  std::vector<std::vector<double>> rows_;
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::Decision;
  std::vector<int> domain;
  std::vector<double> probabilities;  // unconditional stochastic variables only
  std::optional<ConditionalTable> cpt;

  bool is_stochastic() const { return kind == VarKind::Stochastic; }
  std::optional<std::size_t> position_of(int value) const;

  bool operator==(const Variable&) const = default;
};

/// A constraint whose scope has been resolved to variable indices.
class Constraint {
 public:
  Constraint(ConstraintSpec relation, std::vector<std::size_t> scope);

  /// Scope in the order the relation refers to it (table column order, or
  /// first appearance in the expression).
  std::span<const std::size_t> scope() const { return scope_; }

  /// Scope indices sorted by instance order.
  std::span<const std::size_t> ordered_scope() const { return ordered_scope_; }

  const ConstraintSpec& relation() const { return relation_; }

  /// `values` is indexed by variable index; only the scope is read.
  bool holds(std::span<const int> values) const;

  bool operator==(const Constraint& other) const { return relation_ == other.relation_; }

 private:
  ConstraintSpec relation_;
  std::vector<std::size_t> scope_;
  std::vector<std::size_t> ordered_scope_;
  std::vector<std::vector<int>> sorted_tuples_;
};

struct Objective {
  Expr expression;
  double violation_value = 0.0;

  bool operator==(const Objective&) const = default;
};

/// A validated SCSP: variables in observation/decision order, constraints,
/// a global threshold and optional conditional tables and objective.
/// Immutable once built.
class Instance {
 public:
  const std::string& name() const { return name_; }
  double theta() const { return theta_; }
  std::span<const Variable> variables() const { return variables_; }
  const Variable& variable(std::size_t index) const { return variables_[index]; }
  std::size_t size() const { return variables_.size(); }
  std::span<const Constraint> constraints() const { return constraints_; }
  const std::optional<Objective>& objective() const { return objective_; }

  std::optional<std::size_t> find(std::string_view name) const;
  bool has_conditional_tables() const { return has_cpts_; }

  /// Branch weights of stochastic variable `index` given the values of the
  /// variables before it (`values` indexed by variable index).
  std::span<const double> distribution(std::size_t index, std::span<const int> values) const;

  Instance with_theta(double theta) const;
  InstanceSpec to_spec() const;

  bool operator==(const Instance& other) const;

 private:
  friend Instance validate_instance(InstanceSpec spec);
  Instance() = default;

  std::string name_;
  double theta_ = 0.0;
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::optional<Objective> objective_;
  std::unordered_map<std::string, std::size_t> index_;
  bool has_cpts_ = false;
};

inline constexpr double kProbabilityTolerance = 1e-9;

/// Checks every structural invariant and binds names to indices.
Instance validate_instance(InstanceSpec spec);

struct StageBlock {
  VarKind kind;
  std::vector<std::string> variables;

  bool operator==(const StageBlock&) const = default;
};

struct StageStructure {
  std::vector<StageBlock> blocks;
  std::size_t stage_count = 0;
};

/// Maximal runs of same-kind variables; stage_count counts decision blocks.
StageStructure stage_blocks(const Instance& instance);

}  // namespace stocs
