#pragma once

// Execution of single configured jobs.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "varineq/cli/config.hpp"

namespace varineq::cli {

struct RunOptions {
  bool strict = false;
  std::optional<std::uint64_t> seed;  ///< overrides [suite] seed
  std::optional<double> tol;          ///< overrides [suite] tol
  std::string out_dir = "out";
  int threads = 0;                    ///< 0: VARINEQ_THREADS or the hardware count
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const;
};

/// Job-level status: holds, violated, inconclusive, skipped,
/// invalid-parameters or error.
struct JobResult {
  std::string id, kind, status = "holds";
  std::string error_code, error_message;
  std::vector<nlohmann::json> reports;
  std::optional<Table> table;
};

/// Checks that every job's kind, family, tag, generator and potential
/// strings are known. Throws ParseError.
void validate_jobs(const RunConfig& cfg);

/// Never throws for numerical failures: they become the job status.
JobResult run_job(const JobSpec& job, const RunConfig& cfg, const RunOptions& opt);

/// True when the status makes the run exit with 1.
bool is_failure(const std::string& status);

}  // namespace varineq::cli
