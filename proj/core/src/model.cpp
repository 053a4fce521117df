#include "stocs/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "stocs/error.hpp"

namespace stocs {

std::string_view to_string(VarKind kind) {
  return kind == VarKind::Decision ? "decision" : "stochastic";
}

ConditionalTable::ConditionalTable(std::vector<std::size_t> parents,
                                   std::vector<std::size_t> radices,
                                   std::vector<std::vector<double>> rows)
    : parents_(std::move(parents)), radices_(std::move(radices)), rows_(std::move(rows)) {}

std::span<const double> ConditionalTable::row_for(
    std::span<const std::size_t> parent_positions) const {
  std::size_t index = 0;
  for (std::size_t i = 0; i < radices_.size(); ++i) index = index * radices_[i] + parent_positions[i];
  return rows_[index];
}

std::optional<std::size_t> Variable::position_of(int value) const {
  auto it = std::lower_bound(domain.begin(), domain.end(), value);
  if (it == domain.end() || *it != value) return std::nullopt;
  return static_cast<std::size_t>(it - domain.begin());
}

namespace {

void bind_slots(Expr& e, const std::unordered_map<std::string, std::size_t>& index) {
  if (e.op == ExprOp::VariableRef) {
    auto it = index.find(e.name);
    if (it == index.end()) {
      throw Error(ErrorCode::UnknownScopeVariable, "unknown variable '" + e.name + "'");
    }
    e.slot = static_cast<int>(it->second);
    return;
  }
  for (auto& c : e.children) bind_slots(c, index);
}

std::vector<std::size_t> expression_scope(const Expr& e,
                                          const std::unordered_map<std::string, std::size_t>& index) {
  std::vector<std::size_t> scope;
  for (const auto& n : referenced_names(e)) scope.push_back(index.at(n));
  return scope;
}

void check_distribution(std::span<const double> probs, const std::string& where) {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::NegativeProbability, where + ": probability " + std::to_string(p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    throw Error(ErrorCode::BadProbabilitySum, where + ": probabilities sum to " + std::to_string(sum),
                sum);
  }
}

ConditionalTable build_table(const VariableSpec& child, std::size_t child_index,
                             const CptSpec& cpt,
                             const std::unordered_map<std::string, std::size_t>& index,
                             std::span<const Variable> earlier) {
  const std::string where = "conditional table of '" + child.name + "'";
  std::vector<std::size_t> parents;
  std::vector<std::size_t> radices;
  for (const auto& p : cpt.parents) {
    auto it = index.find(p);
    if (it == index.end()) throw Error(ErrorCode::UnknownScopeVariable, where + ": unknown parent '" + p + "'");
    if (it->second >= child_index) {
      throw Error(ErrorCode::BadConditionalTable, where + ": parent '" + p + "' does not precede the child");
    }
    if (std::find(parents.begin(), parents.end(), it->second) != parents.end()) {
      throw Error(ErrorCode::DuplicateScopeVariable, where + ": parent '" + p + "' repeated");
    }
    parents.push_back(it->second);
    radices.push_back(earlier[it->second].domain.size());
  }
  std::size_t row_count = 1;
  for (auto r : radices) row_count *= r;

  std::vector<std::vector<double>> rows(row_count);
  std::vector<bool> seen(row_count, false);
  for (const auto& row : cpt.rows) {
    if (row.given.size() != parents.size()) {
      throw Error(ErrorCode::ArityMismatch, where + ": row has " + std::to_string(row.given.size()) +
                                                " parent values, expected " + std::to_string(parents.size()));
    }
    std::size_t flat = 0;
    for (std::size_t i = 0; i < parents.size(); ++i) {
      auto pos = earlier[parents[i]].position_of(row.given[i]);
      if (!pos) {
        throw Error(ErrorCode::OutOfDomainValue, where + ": value " + std::to_string(row.given[i]) +
                                                     " not in domain of '" + cpt.parents[i] + "'");
      }
      flat = flat * radices[i] + *pos;
    }
    if (seen[flat]) throw Error(ErrorCode::BadConditionalTable, where + ": duplicate row");
    if (row.probabilities.size() != child.domain.size()) {
      throw Error(ErrorCode::ArityMismatch, where + ": row distribution has wrong length");
    }
    check_distribution(row.probabilities, where);
    seen[flat] = true;
    rows[flat] = row.probabilities;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw Error(ErrorCode::BadConditionalTable, where + ": rows do not cover every parent combination");
  }
  return ConditionalTable(std::move(parents), std::move(radices), std::move(rows));
}

}  // namespace

Constraint::Constraint(ConstraintSpec relation, std::vector<std::size_t> scope)
    : relation_(std::move(relation)), scope_(std::move(scope)), ordered_scope_(scope_) {
  std::sort(ordered_scope_.begin(), ordered_scope_.end());
  if (const auto* table = std::get_if<TableRelation>(&relation_)) {
    sorted_tuples_ = table->tuples;
    std::sort(sorted_tuples_.begin(), sorted_tuples_.end());
    sorted_tuples_.erase(std::unique(sorted_tuples_.begin(), sorted_tuples_.end()), sorted_tuples_.end());
  }
}

bool Constraint::holds(std::span<const int> values) const {
  if (const auto* expr = std::get_if<Expr>(&relation_)) return evaluate(*expr, values) != 0;
  // Lexicographic search without materializing the scope tuple.
  auto less_than_current = [&](const std::vector<int>& tuple) {
    for (std::size_t i = 0; i < scope_.size(); ++i) {
      int v = values[scope_[i]];
      if (tuple[i] != v) return tuple[i] < v;
    }
    return false;
  };
  auto it = std::partition_point(sorted_tuples_.begin(), sorted_tuples_.end(), less_than_current);
  if (it == sorted_tuples_.end()) return false;
  for (std::size_t i = 0; i < scope_.size(); ++i) {
    if ((*it)[i] != values[scope_[i]]) return false;
  }
  return true;
}

std::optional<std::size_t> Instance::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> Instance::distribution(std::size_t index, std::span<const int> values) const {
  const Variable& v = variables_[index];
  if (!v.cpt) return v.probabilities;
  auto parents = v.cpt->parents();
  std::size_t positions[16];
  std::vector<std::size_t> spill;
  std::span<std::size_t> pos(positions, parents.size());
  if (parents.size() > 16) {
    spill.resize(parents.size());
    pos = spill;
  }
  for (std::size_t i = 0; i < parents.size(); ++i) {
    auto p = variables_[parents[i]].position_of(values[parents[i]]);
    if (!p) {
      throw Error(ErrorCode::MissingParentValue,
                  "parent '" + variables_[parents[i]].name + "' of '" + v.name + "' has no valid value");
    }
    pos[i] = *p;
  }
  return v.cpt->row_for(pos);
}

Instance Instance::with_theta(double theta) const {
  InstanceSpec spec = to_spec();
  spec.theta = theta;
  return validate_instance(std::move(spec));
}

InstanceSpec Instance::to_spec() const {
  InstanceSpec spec;
  spec.name = name_;
  spec.theta = theta_;
  for (const auto& v : variables_) {
    VariableSpec vs{v.name, v.kind, v.domain, v.probabilities, std::nullopt};
    if (v.cpt) {
      CptSpec cpt;
      auto parents = v.cpt->parents();
      for (auto p : parents) cpt.parents.push_back(variables_[p].name);
      // Decode mixed-radix row indices back into parent value tuples.
      for (std::size_t r = 0; r < v.cpt->row_count(); ++r) {
        std::vector<int> given(parents.size());
        std::size_t rest = r;
        for (std::size_t i = parents.size(); i-- > 0;) {
          const auto& dom = variables_[parents[i]].domain;
          given[i] = dom[rest % dom.size()];
          rest /= dom.size();
        }
        auto row = v.cpt->row(r);
        cpt.rows.push_back({std::move(given), std::vector<double>(row.begin(), row.end())});
      }
      vs.cpt = std::move(cpt);
    }
    spec.variables.push_back(std::move(vs));
  }
  for (const auto& c : constraints_) spec.constraints.push_back(c.relation());
  if (objective_) spec.objective = ObjectiveSpec{objective_->expression, objective_->violation_value};
  return spec;
}

bool Instance::operator==(const Instance& other) const {
  return name_ == other.name_ && theta_ == other.theta_ && variables_ == other.variables_ &&
         constraints_ == other.constraints_ && objective_ == other.objective_;
}

Instance validate_instance(InstanceSpec spec) {
  Instance inst;
  inst.name_ = std::move(spec.name);

  if (!(spec.theta >= 0.0 && spec.theta <= 1.0)) {
    throw Error(ErrorCode::ThetaOutOfRange, "theta " + std::to_string(spec.theta) + " outside [0,1]",
                spec.theta);
  }
  inst.theta_ = spec.theta;

  for (std::size_t i = 0; i < spec.variables.size(); ++i) {
    VariableSpec& vs = spec.variables[i];
    if (vs.name.empty()) throw Error(ErrorCode::EmptyName, "variable " + std::to_string(i) + " has no name");
    if (!inst.index_.emplace(vs.name, i).second) {
      throw Error(ErrorCode::DuplicateName, "variable '" + vs.name + "' declared twice");
    }
    if (vs.domain.empty()) throw Error(ErrorCode::EmptyDomain, "variable '" + vs.name + "' has an empty domain");
    if (std::adjacent_find(vs.domain.begin(), vs.domain.end(), std::greater_equal<>()) != vs.domain.end()) {
      throw Error(ErrorCode::UnsortedDomain,
                  "domain of '" + vs.name + "' must be strictly increasing");
    }

    Variable v{vs.name, vs.kind, vs.domain, {}, std::nullopt};
    if (vs.kind == VarKind::Decision) {
      if (!vs.probabilities.empty() || vs.cpt) {
        throw Error(ErrorCode::ProbabilitiesOnDecision,
                    "decision variable '" + vs.name + "' cannot carry probabilities");
      }
    } else if (vs.cpt) {
      if (!vs.probabilities.empty()) {
        throw Error(ErrorCode::BadConditionalTable,
                    "'" + vs.name + "' has both probabilities and a conditional table");
      }
      v.cpt = build_table(vs, i, *vs.cpt, inst.index_, inst.variables_);
      inst.has_cpts_ = true;
    } else {
      if (vs.probabilities.empty()) {
        throw Error(ErrorCode::MissingProbabilities, "stochastic variable '" + vs.name + "' has no distribution");
      }
      if (vs.probabilities.size() != vs.domain.size()) {
        throw Error(ErrorCode::ArityMismatch,
                    "'" + vs.name + "' has " + std::to_string(vs.probabilities.size()) +
                        " probabilities for " + std::to_string(vs.domain.size()) + " values");
      }
      check_distribution(vs.probabilities, "variable '" + vs.name + "'");
      v.probabilities = std::move(vs.probabilities);
    }
    inst.variables_.push_back(std::move(v));
  }

  for (auto& cs : spec.constraints) {
    if (auto* table = std::get_if<TableRelation>(&cs)) {
      std::vector<std::size_t> scope;
      for (const auto& n : table->scope) {
        auto idx = inst.find(n);
        if (!idx) throw Error(ErrorCode::UnknownScopeVariable, "unknown variable '" + n + "'");
        if (std::find(scope.begin(), scope.end(), *idx) != scope.end()) {
          throw Error(ErrorCode::DuplicateScopeVariable, "'" + n + "' repeated in a table scope");
        }
        scope.push_back(*idx);
      }
      for (const auto& tuple : table->tuples) {
        if (tuple.size() != scope.size()) {
          throw Error(ErrorCode::ArityMismatch, "table tuple of arity " + std::to_string(tuple.size()) +
                                                    " for scope of arity " + std::to_string(scope.size()));
        }
        for (std::size_t k = 0; k < tuple.size(); ++k) {
          if (!inst.variables_[scope[k]].position_of(tuple[k])) {
            throw Error(ErrorCode::OutOfDomainValue, "table value " + std::to_string(tuple[k]) +
                                                         " not in domain of '" + table->scope[k] + "'");
          }
        }
      }
      inst.constraints_.emplace_back(std::move(cs), std::move(scope));
    } else {
      Expr& expr = std::get<Expr>(cs);
      bind_slots(expr, inst.index_);
      if (type_of(expr) != ExprType::Boolean) {
        throw Error(ErrorCode::TypeError, "constraint '" + to_string(expr) + "' is not a condition");
      }
      auto scope = expression_scope(expr, inst.index_);
      inst.constraints_.emplace_back(std::move(cs), std::move(scope));
    }
  }

  if (spec.objective) {
    Expr expr = std::move(spec.objective->expression);
    bind_slots(expr, inst.index_);
    if (type_of(expr) != ExprType::Integer) {
      throw Error(ErrorCode::TypeError, "objective '" + to_string(expr) + "' is not integer-valued");
    }
    inst.objective_ = Objective{std::move(expr), spec.objective->violation_value};
  }
  return inst;
}

StageStructure stage_blocks(const Instance& instance) {
  StageStructure s;
  for (const auto& v : instance.variables()) {
    if (s.blocks.empty() || s.blocks.back().kind != v.kind) {
      s.blocks.push_back({v.kind, {}});
      if (v.kind == VarKind::Decision) ++s.stage_count;
    }
    s.blocks.back().variables.push_back(v.name);
  }
  return s;
}

}  // namespace stocs
