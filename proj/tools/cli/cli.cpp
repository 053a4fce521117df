#include "cli/cli.hpp"

#include <CLI11.hpp>

#include "stocs/approx.hpp"
#include "stocs/error.hpp"
#include "stocs/extensions.hpp"
#include "stocs/io.hpp"
#include "stocs/solver.hpp"

namespace stocs::cli {

namespace {

struct CommonArgs {
  std::string instance_path;
  bool renormalize = false;
};

struct SolveArgs {
  std::string algorithm = "fc";
  std::string mode = "decide";
  std::optional<double> theta;
  std::string policy_out;
  bool no_prune_chance = false;
  bool no_prune_decision = false;
  bool no_prune_wipeout = false;
  bool no_prune_mass = false;
  bool order_by_bound = false;
  bool skip_zero = false;
  bool stats = false;
};

struct EvalArgs {
  std::string policy_path;
  std::optional<std::uint64_t> samples;
  std::uint64_t seed = 0;
};

struct ApproxArgs {
  std::optional<double> epsilon;
  std::optional<std::size_t> top_k;
  bool heuristic = false;
  std::string policy_out;
};

struct OptimizeArgs {
  bool chance_constrained = false;
  std::uint64_t cap = kDefaultOracleCap;
  std::string policy_out;
};

Instance load(const CommonArgs& common, std::ostream& err) {
  ParsedInstance parsed = parse_instance(read_file(common.instance_path), {common.renormalize});
  for (const auto& w : parsed.warnings) err << "warning: " << w << "\n";
  return std::move(parsed.instance);
}

void print_stats(std::ostream& out, const SearchStats& s) {
  out << "stats nodes=" << s.nodes_visited << " chance_prunes=" << s.chance_prunes
      << " decision_prunes=" << s.decision_prunes << " fc_wipeouts=" << s.fc_wipeouts
      << " fc_mass_prunes=" << s.fc_mass_prunes << "\n";
}

void maybe_write_policy(const std::string& path, const std::optional<PolicyNode>& policy) {
  if (path.empty() || !policy) return;
  write_file(path, serialize_policy(*policy) + "\n");
}

int run_solve(const CommonArgs& common, const SolveArgs& a, std::ostream& out, std::ostream& err) {
  Instance inst = load(common, err);
  SearchOptions opt;
  opt.forward_checking = a.algorithm == "fc";
  opt.chance_pruning = !a.no_prune_chance;
  opt.decision_pruning = !a.no_prune_decision;
  opt.wipeout_pruning = !a.no_prune_wipeout;
  opt.mass_pruning = !a.no_prune_mass;
  opt.order_values_by_bound = a.order_by_bound;
  opt.skip_zero_probability = a.skip_zero;

  if (a.mode == "max") {
    SatisfactionResult r = PolicySearch(inst, opt).maximize();
    out << "MAX p=" << format_probability(r.probability) << "\n";
    if (a.stats) print_stats(out, r.stats);
    maybe_write_policy(a.policy_out, r.policy);
    return kSolved;
  }

  const double theta = a.theta.value_or(inst.theta());
  if (!(theta >= 0.0 && theta <= 1.0)) {
    err << "error: --theta must lie in [0,1]\n";
    return kUsageError;
  }
  DecideResult r = PolicySearch(inst, opt).decide(theta);
  if (r.satisfiable) {
    out << "SAT p>=" << format_probability(policy_satisfaction(inst, *r.policy)) << "\n";
    if (a.stats) print_stats(out, r.stats);
    maybe_write_policy(a.policy_out, r.policy);
    return kSolved;
  }
  SatisfactionResult best = PolicySearch(inst, opt).maximize();
  out << "UNSAT max=" << format_probability(best.probability) << "\n";
  if (a.stats) print_stats(out, r.stats);
  return kUnsatisfiable;
}

int run_oracle(const CommonArgs& common, std::uint64_t cap, std::ostream& out, std::ostream& err) {
  Instance inst = load(common, err);
  SatisfactionResult r = oracle_max_satisfaction(inst, cap);
  const bool sat = r.probability >= inst.theta() - kThresholdSlack;
  out << (sat ? "SAT" : "UNSAT") << " max=" << format_probability(r.probability)
      << " policies=" << r.stats.nodes_visited << "\n";
  return sat ? kSolved : kUnsatisfiable;
}

int run_eval(const CommonArgs& common, const EvalArgs& a, std::ostream& out, std::ostream& err) {
  Instance inst = load(common, err);
  PolicyNode policy = parse_policy(read_file(a.policy_path));
  out << "EXACT p=" << format_probability(policy_satisfaction(inst, policy)) << "\n";
  if (a.samples) {
    SampleEstimate est = monte_carlo_policy_eval(inst, policy, *a.samples, a.seed);
    out << "MC estimate=" << format_probability(est.estimate) << " ci=[" << format_probability(est.ci_low)
        << ", " << format_probability(est.ci_high) << "] n=" << est.n << " seed=" << est.seed << "\n";
  }
  return kSolved;
}

int run_approx(const CommonArgs& common, const ApproxArgs& a, std::ostream& out, std::ostream& err) {
  Instance inst = load(common, err);
  if (a.heuristic) {
    HeuristicPolicy h = most_probable_scenario_policy(inst);
    out << "HEURISTIC p=" << format_probability(h.exact_satisfaction) << "\n";
    maybe_write_policy(a.policy_out, h.policy);
    return kSolved;
  }
  Restriction restriction = a.epsilon ? Restriction{MinBranchProbability{*a.epsilon}}
                                      : Restriction{TopK{*a.top_k}};
  Interval bounds = restricted_tree_bounds(inst, restriction);
  out << "BOUNDS lb=" << format_probability(bounds.lb) << " ub=" << format_probability(bounds.ub) << "\n";
  return kSolved;
}

int run_optimize(const CommonArgs& common, const OptimizeArgs& a, std::ostream& out, std::ostream& err) {
  Instance inst = load(common, err);
  if (inst.objective() && inst.objective()->violation_value > objective_lower_bound(inst)) {
    err << "warning: violation_value " << inst.objective()->violation_value
        << " exceeds the objective's lower bound " << objective_lower_bound(inst)
        << "; violating leaves may be preferred\n";
  }
  std::optional<ExpectedOptimum> best;
  if (a.chance_constrained) {
    best = optimize_expected_chance_constrained(inst, a.cap);
    if (!best) {
      out << "INFEASIBLE theta=" << format_probability(inst.theta()) << "\n";
      return kUnsatisfiable;
    }
  } else {
    best = optimize_expected(inst);
  }
  out << "OPTIMUM expected=" << format_probability(best->expected_value)
      << " p=" << format_probability(best->satisfaction) << "\n";
  maybe_write_policy(a.policy_out, best->policy);
  return kSolved;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoHeuristicPolicy:
      return kUnsatisfiable;
    case ErrorCode::MismatchBetweenAlgorithms:
      return kInternalError;
    default:
      return kUsageError;
  }
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic constraint satisfaction solver", "stocs"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  CommonArgs common;
  auto add_instance = [&](CLI::App* sub) {
    sub->add_option("instance", common.instance_path, "Instance file (.scsp)")->required();
    sub->add_flag("--renormalize", common.renormalize, "Rescale distributions to sum to 1");
  };

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Decide or maximize satisfaction with bt or fc");
  add_instance(solve_cmd);
  solve_cmd->add_option("--algorithm", solve.algorithm, "bt or fc")
      ->check(CLI::IsMember({"bt", "fc"}))
      ->capture_default_str();
  solve_cmd->add_option("--mode", solve.mode, "decide or max")
      ->check(CLI::IsMember({"decide", "max"}))
      ->capture_default_str();
  solve_cmd->add_option("--theta", solve.theta, "Override the instance threshold");
  solve_cmd->add_option("--policy-out", solve.policy_out, "Write the witness/argmax policy here");
  solve_cmd->add_flag("--no-prune-chance", solve.no_prune_chance);
  solve_cmd->add_flag("--no-prune-decision", solve.no_prune_decision);
  solve_cmd->add_flag("--no-prune-wipeout", solve.no_prune_wipeout);
  solve_cmd->add_flag("--no-prune-mass", solve.no_prune_mass);
  solve_cmd->add_flag("--order-by-bound", solve.order_by_bound, "fc: try values by descending bound");
  solve_cmd->add_flag("--skip-zero-probability", solve.skip_zero, "Do not search zero-probability branches");
  solve_cmd->add_flag("--stats", solve.stats, "Print search statistics");

  std::uint64_t cap = kDefaultOracleCap;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive policy enumeration");
  add_instance(oracle_cmd);
  oracle_cmd->add_option("--cap", cap, "Maximum number of policies")->capture_default_str();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score a policy exactly and by sampling");
  add_instance(eval_cmd);
  eval_cmd->add_option("--policy", eval.policy_path, "Policy JSON file")->required();
  auto* samples_opt = eval_cmd->add_option("--samples", eval.samples, "Monte Carlo sample count");
  eval_cmd->add_option("--seed", eval.seed, "Sampling seed")->capture_default_str()->needs(samples_opt);

  ApproxArgs approx;
  auto* approx_cmd = app.add_subcommand("approx", "Approximation procedures");
  add_instance(approx_cmd);
  auto* eps_opt = approx_cmd->add_option("--epsilon", approx.epsilon, "Expand branches with p >= epsilon");
  auto* k_opt = approx_cmd->add_option("--top-k", approx.top_k, "Expand the k most probable branches");
  auto* h_opt = approx_cmd->add_flag("--heuristic", approx.heuristic, "Most-probable-scenario policy");
  eps_opt->excludes(k_opt)->excludes(h_opt);
  k_opt->excludes(h_opt);
  approx_cmd->add_option("--policy-out", approx.policy_out, "Write the heuristic policy here");

  OptimizeArgs optimize;
  auto* optimize_cmd = app.add_subcommand("optimize", "Maximize the expected objective");
  add_instance(optimize_cmd);
  optimize_cmd->add_flag("--chance-constrained", optimize.chance_constrained,
                         "Require satisfaction >= theta (exhaustive enumeration)");
  optimize_cmd->add_option("--cap", optimize.cap, "Maximum number of policies")->capture_default_str();
  optimize_cmd->add_option("--policy-out", optimize.policy_out, "Write the optimal policy here");

  std::string bench_dir, bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "Run bt and fc over a directory of instances");
  bench_cmd->add_option("directory", bench_dir, "Directory of .scsp files")->required();
  bench_cmd->add_option("--out", bench_out, "CSV output path")->required();

  std::vector<std::string> argv_storage{"stocs"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSolved;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSolved;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kSolved;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (*solve_cmd) return run_solve(common, solve, out, err);
    if (*oracle_cmd) return run_oracle(common, cap, out, err);
    if (*eval_cmd) return run_eval(common, eval, out, err);
    if (*approx_cmd) {
      if (!approx.epsilon && !approx.top_k && !approx.heuristic) {
        err << "error: approx needs one of --epsilon, --top-k or --heuristic\n";
        return kUsageError;
      }
      return run_approx(common, approx, out, err);
    }
    if (*optimize_cmd) return run_optimize(common, optimize, out, err);
    if (*bench_cmd) return run_bench(bench_dir, bench_out, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kUsageError;
}

}  // namespace stocs::cli
