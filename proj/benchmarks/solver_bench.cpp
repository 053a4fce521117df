#include <benchmark/benchmark.h>

#include <string>

#include "stocs/expression.hpp"
#include "stocs/model.hpp"
#include "stocs/solver.hpp"

namespace {

using namespace stocs;

// Multi-stage inventory: produce x_i, then demand s_i arrives; cumulative
// production must cover cumulative demand after every stage.
Instance inventory(int stages, int levels, double theta) {
  InstanceSpec spec;
  spec.name = "inventory";
  spec.theta = theta;
  std::vector<int> domain;
  std::vector<double> uniform;
  for (int k = 1; k <= levels; ++k) {
    domain.push_back(k);
    uniform.push_back(1.0 / levels);
  }
  std::string produced;
  std::string demanded;
  for (int i = 1; i <= stages; ++i) {
    const std::string x = "x" + std::to_string(i);
    const std::string s = "s" + std::to_string(i);
    spec.variables.push_back({x, VarKind::Decision, domain, {}, std::nullopt});
    spec.variables.push_back({s, VarKind::Stochastic, domain, uniform, std::nullopt});
    produced += (i > 1 ? " + " : "") + x;
    demanded += (i > 1 ? " + " : "") + s;
    spec.constraints.push_back(parse_expression(produced + " >= " + demanded));
  }
  return validate_instance(spec);
}

// Alternating decision and stochastic variables where each decision must
// avoid the next outcome and the previous decision.
Instance avoidance(int pairs, int size, double theta) {
  InstanceSpec spec;
  spec.name = "avoidance";
  spec.theta = theta;
  std::vector<int> domain;
  std::vector<double> skewed;
  double total = 0.0;
  for (int k = 0; k < size; ++k) {
    domain.push_back(k);
    skewed.push_back(k + 1.0);
    total += k + 1.0;
  }
  for (auto& w : skewed) w /= total;
  for (int i = 0; i < pairs; ++i) {
    const std::string x = "x" + std::to_string(i);
    const std::string s = "s" + std::to_string(i);
    spec.variables.push_back({x, VarKind::Decision, domain, {}, std::nullopt});
    spec.variables.push_back({s, VarKind::Stochastic, domain, skewed, std::nullopt});
    spec.constraints.push_back(parse_expression(x + " != " + s));
    if (i > 0) spec.constraints.push_back(parse_expression(x + " != x" + std::to_string(i - 1)));
  }
  return validate_instance(spec);
}

void report(benchmark::State& state, const SearchStats& stats) {
  state.counters["nodes"] = static_cast<double>(stats.nodes_visited);
  state.counters["prunes"] = static_cast<double>(stats.chance_prunes + stats.decision_prunes + stats.fc_wipeouts +
                                                 stats.fc_mass_prunes);
}

template <bool ForwardChecking>
void BM_InventoryDecide(benchmark::State& state) {
  const Instance inst = inventory(static_cast<int>(state.range(0)), 4, 0.8);
  DecideResult r;
  for (auto _ : state) {
    r = ForwardChecking ? fc_decide(inst) : bt_decide(inst);
    benchmark::DoNotOptimize(r.satisfiable);
  }
  report(state, r.stats);
}

template <bool ForwardChecking>
void BM_InventoryMax(benchmark::State& state) {
  const Instance inst = inventory(static_cast<int>(state.range(0)), 3, 0.0);
  SatisfactionResult r;
  for (auto _ : state) {
    r = ForwardChecking ? fc_max(inst) : bt_max(inst);
    benchmark::DoNotOptimize(r.probability);
  }
  report(state, r.stats);
}

template <bool ForwardChecking>
void BM_AvoidanceDecide(benchmark::State& state) {
  const Instance inst = avoidance(static_cast<int>(state.range(0)), 3, 0.3);
  DecideResult r;
  for (auto _ : state) {
    r = ForwardChecking ? fc_decide(inst) : bt_decide(inst);
    benchmark::DoNotOptimize(r.satisfiable);
  }
  report(state, r.stats);
}

}  // namespace

BENCHMARK(BM_InventoryDecide<false>)->Name("inventory_decide/bt")->DenseRange(2, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InventoryDecide<true>)->Name("inventory_decide/fc")->DenseRange(2, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InventoryMax<false>)->Name("inventory_max/bt")->DenseRange(2, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InventoryMax<true>)->Name("inventory_max/fc")->DenseRange(2, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AvoidanceDecide<false>)->Name("avoidance_decide/bt")->DenseRange(3, 6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AvoidanceDecide<true>)->Name("avoidance_decide/fc")->DenseRange(3, 6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
