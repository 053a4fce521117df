#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "cli/cli.hpp"
#include "stocs/error.hpp"
#include "stocs/io.hpp"
#include "stocs/solver.hpp"

namespace stocs::cli {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

RunRecord solve_once(const Instance& inst, const std::string& label, bool fc) {
  SearchOptions opt;
  opt.forward_checking = fc;
  RunRecord rec;
  rec.instance = label;
  rec.algorithm = fc ? "fc" : "bt";
  rec.mode = "decide";
  rec.theta = inst.theta();

  auto start = std::chrono::steady_clock::now();
  DecideResult r = PolicySearch(inst, opt).decide(inst.theta());
  auto stop = std::chrono::steady_clock::now();

  rec.ms = std::chrono::duration<double, std::milli>(stop - start).count();
  rec.stats = r.stats;
  rec.verdict = r.satisfiable ? "SAT" : "UNSAT";
  rec.probability = r.satisfiable ? policy_satisfaction(inst, *r.policy)
                                  : PolicySearch(inst, opt).maximize().probability;
  return rec;
}

}  // namespace

std::string_view csv_header() {
  return "instance,algorithm,mode,theta,verdict,probability,nodes,chance_prunes,decision_prunes,"
         "fc_wipeouts,fc_mass_prunes,ms,version,seed";
}

std::string RunRecord::csv_row() const {
  char ms_buf[32];
  std::snprintf(ms_buf, sizeof ms_buf, "%.3f", ms);
  std::ostringstream row;
  row << csv_field(instance) << ',' << algorithm << ',' << mode << ',' << format_probability(theta) << ','
      << verdict << ',' << format_probability(probability) << ',' << stats.nodes_visited << ','
      << stats.chance_prunes << ',' << stats.decision_prunes << ',' << stats.fc_wipeouts << ','
      << stats.fc_mass_prunes << ',' << ms_buf << ',' << version << ',';
  if (seed) row << *seed;
  return row.str();
}

int run_bench(const std::string& directory, const std::string& out_path, std::ostream& out,
              std::ostream& err) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) {
    err << "error: '" << directory << "' is not a directory\n";
    return kUsageError;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".scsp") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::string csv = std::string(csv_header()) + "\n";
  bool malformed = false;
  bool mismatch = false;
  std::size_t solved = 0;
  for (const auto& path : files) {
    std::optional<Instance> inst;
    try {
      ParsedInstance parsed = parse_instance(read_file(path.string()));
      for (const auto& w : parsed.warnings) err << "warning: " << path.filename().string() << ": " << w << "\n";
      inst = std::move(parsed.instance);
    } catch (const Error& e) {
      err << "error: " << path.filename().string() << ": " << e.what() << "\n";
      malformed = true;
      continue;
    }
    const std::string label = inst->name().empty() ? path.stem().string() : inst->name();
    RunRecord bt = solve_once(*inst, label, false);
    RunRecord fc = solve_once(*inst, label, true);
    csv += bt.csv_row() + "\n" + fc.csv_row() + "\n";
    ++solved;
    if (bt.verdict != fc.verdict) {
      err << "error: " << to_string(ErrorCode::MismatchBetweenAlgorithms) << ": bt says " << bt.verdict
          << " but fc says " << fc.verdict << " on " << path.filename().string() << "\n";
      mismatch = true;
    }
  }

  try {
    write_file(out_path, csv);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  out << "bench: " << solved << " instance(s), " << 2 * solved << " row(s) written to " << out_path << "\n";
  if (mismatch) return kInternalError;
  if (malformed) return kUsageError;
  return kSolved;
}

}  // namespace stocs::cli
