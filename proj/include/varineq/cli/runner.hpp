#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "varineq/cli/jobs.hpp"

namespace varineq::cli {

inline constexpr int kReportSchemaVersion = 1;

/// Jobs of `cfg` whose kind matches the command ("run" selects all),
/// executed on a pool; results ordered by id.
std::vector<JobResult> execute(const RunConfig& cfg, const std::string& command, const RunOptions& opt);

/// Full report document. `with_timestamp` = false leaves the field out.
nlohmann::json assemble_report(const RunConfig& cfg, const std::string& command, const std::vector<JobResult>& results,
                               const RunOptions& opt, bool with_timestamp = true);

/// Writes via a temporary file and rename.
void write_atomic(const std::string& path, const std::string& content);

/// Loads, executes, writes report.json and the CSV tables into opt.out_dir.
/// Returns the exit code: 0 ok, 1 violation or invalid job, 2 usage or parse.
int run_command(const std::string& command, const std::string& config_path, const RunOptions& opt,
                std::ostream& log);

/// Pool size from opt.threads, VARINEQ_THREADS and the hardware.
int pool_size(const RunOptions& opt, std::size_t jobs);

}  // namespace varineq::cli
