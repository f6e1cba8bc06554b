#pragma once

// Flat key/value run configuration:
//
//   [suite]            optional; name, seed, tol
//   [job <id>]         one table per job; `kind` selects the job type
//   key = value        '#' or ';' starts a comment
//
// The grammar is written out in docs/config_grammar.md.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace varineq::cli {

struct JobSpec {
  std::string id;
  std::string kind;  ///< verify | sweep | dual | evolve | spectrum
  std::map<std::string, std::string> values;
  int line = 0;      ///< line of the [job] header

  bool has(const std::string& key) const { return values.count(key) > 0; }
  /// Throws ParseError when missing.
  const std::string& str(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  double num(const std::string& key) const;
  double num(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  /// "a,b,c" or "start:stop:step" (inclusive); empty string gives an empty list.
  std::vector<double> list(const std::string& key) const;
};

struct RunConfig {
  std::string name = "suite";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::vector<JobSpec> jobs;
  std::string source;  ///< raw text, hashed into the report
};

/// Throws ParseError with "<origin>:<line>: ..." messages.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

/// Parses "a,b,c" or "start:stop:step".
std::vector<double> parse_grid(const std::string& s);

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace varineq::cli
