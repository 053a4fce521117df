#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "stocs/model.hpp"
#include "stocs/semantics.hpp"

namespace stocs {

struct ParseOptions {
  /// Divide every distribution by its sum instead of rejecting sums != 1.
  bool renormalize = false;
};

struct ParsedInstance {
  Instance instance;
  /// Unknown keys and similar forward-compatibility notes.
  std::vector<std::string> warnings;
};

/// Reads the `.scsp` JSON document and validates it. Syntax errors report
/// line and column; semantic errors name the JSON path of the culprit.
ParsedInstance parse_instance(std::string_view text, const ParseOptions& options = {});

/// Pretty-printed `.scsp` document, LF line endings, trailing newline.
std::string serialize_instance(const Instance& instance);

/// Compact JSON: {"kind":"leaf"}, {"kind":"decision","variable":..,"value":..,"child":..},
/// {"kind":"chance","variable":..,"children":[..]}.
std::string serialize_policy(const PolicyNode& policy);
PolicyNode parse_policy(std::string_view text);

/// Fixed-point with nine decimals, as every probability is printed.
std::string format_probability(double p);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace stocs
