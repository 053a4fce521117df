#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stocs/semantics.hpp"

namespace stocs::cli {

inline constexpr std::string_view kToolVersion = STOCS_VERSION;

enum ExitCode : int {
  kSolved = 0,
  kUnsatisfiable = 1,
  kUsageError = 2,
  kInternalError = 3,
};

/// Entry point shared by the `stocs` binary and the tests. `args` excludes
/// the program name. Results go to `out`, diagnostics to `err`.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// One solve, as recorded by the bench harness.
struct RunRecord {
  std::string instance;
  std::string algorithm;
  std::string mode;
  double theta = 0.0;
  std::string verdict;
  double probability = 0.0;
  SearchStats stats;
  double ms = 0.0;
  std::string version{kToolVersion};
  std::optional<std::uint64_t> seed;

  std::string csv_row() const;
};

std::string_view csv_header();

/// Solves every `.scsp` file in `directory` (sorted by file name) with bt and
/// fc in decide mode and writes one CSV row per solve to `out_path`.
/// Returns 3 if the two algorithms ever disagree, 2 if a file could not be
/// read or parsed, 0 otherwise.
int run_bench(const std::string& directory, const std::string& out_path, std::ostream& out,
              std::ostream& err);

}  // namespace stocs::cli
