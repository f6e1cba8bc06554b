#include "varineq/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "varineq/battery.hpp"
#include "varineq/errors.hpp"

namespace varineq::cli {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool selected(const std::string& command, const std::string& kind) { return command == "run" || command == kind; }

}  // namespace

int pool_size(const RunOptions& opt, std::size_t jobs) {
  int n = opt.threads;
  if (n <= 0) {
    n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("VARINEQ_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end != env && *end == '\0' && v > 0) n = std::min<long>(n, v);
    }
  }
  return static_cast<int>(std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(n), jobs)));
}

std::vector<JobResult> execute(const RunConfig& cfg, const std::string& command, const RunOptions& opt) {
  std::vector<const JobSpec*> todo;
  for (const auto& j : cfg.jobs)
    if (selected(command, j.kind)) todo.push_back(&j);
  std::vector<JobResult> out(todo.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < todo.size(); k = next++) out[k] = run_job(*todo[k], cfg, opt);
  };
  const int n = pool_size(opt, todo.size());
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::sort(out.begin(), out.end(), [](const JobResult& a, const JobResult& b) { return a.id < b.id; });
  return out;
}

nlohmann::json assemble_report(const RunConfig& cfg, const std::string& command, const std::vector<JobResult>& results,
                               const RunOptions& opt, bool with_timestamp) {
  nlohmann::json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["tool"] = {{"name", "varineq"},
                 {"version", "0.1.0"},
                 {"compiler", __VERSION__},
                 {"cxx_standard", static_cast<long>(__cplusplus)},
                 {"battery_version", kBatteryVersion}};
  doc["config"] = {{"name", cfg.name}, {"hash", "fnv1a64:" + fnv1a_hex(cfg.source)}};
  doc["command"] = command;
  if (with_timestamp) doc["timestamp"] = utc_now();
  std::uint64_t seed = 1;
  if (cfg.seed) seed = *cfg.seed;
  if (opt.seed) seed = *opt.seed;
  doc["seed"] = seed;
  doc["strict"] = opt.strict;

  nlohmann::json summary = {{"jobs", results.size()}, {"holds", 0},   {"violated", 0},
                            {"inconclusive", 0},      {"skipped", 0}, {"invalid-parameters", 0},
                            {"error", 0}};
  nlohmann::json jobs = nlohmann::json::array();
  int code = 0;
  for (const auto& r : results) {
    summary[r.status] = summary[r.status].get<int>() + 1;
    if (is_failure(r.status)) code = 1;
    nlohmann::json j = {{"id", r.id}, {"kind", r.kind}, {"status", r.status}, {"reports", r.reports}};
    if (!r.error_code.empty()) j["error"] = {{"code", r.error_code}, {"message", r.error_message}};
    if (r.table) j["csv"] = r.id + ".csv";
    jobs.push_back(std::move(j));
  }
  summary["exit_code"] = code;
  doc["summary"] = summary;
  doc["jobs"] = jobs;
  return doc;
}

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("cannot write '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

int run_command(const std::string& command, const std::string& config_path, const RunOptions& opt,
                std::ostream& log) {
  static const char* kCommands[] = {"run", "sweep", "dual", "evolve", "spectrum"};
  if (std::find(std::begin(kCommands), std::end(kCommands), command) == std::end(kCommands)) {
    log << "varineq: unknown command '" << command << "'\n";
    return 2;
  }
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
    validate_jobs(cfg);
    if (opt.tol && !(*opt.tol > 0.0)) throw ParseError("--tol must be positive");
  } catch (const ParseError& e) {
    log << "varineq: " << e.what() << "\n";
    return 2;
  }

  const auto results = execute(cfg, command, opt);
  const auto doc = assemble_report(cfg, command, results, opt);
  try {
    fs::create_directories(opt.out_dir);
    for (const auto& r : results)
      if (r.table) write_atomic((fs::path(opt.out_dir) / (r.id + ".csv")).string(), r.table->csv());
    write_atomic((fs::path(opt.out_dir) / "report.json").string(), doc.dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "varineq: " << e.what() << "\n";
    return 1;
  }
  for (const auto& r : results) {
    log << r.status << "  " << r.kind << "  " << r.id << "  (" << r.reports.size() << " reports)";
    if (!r.error_message.empty()) log << "  " << r.error_code << ": " << r.error_message;
    log << "\n";
  }
  const int code = doc["summary"]["exit_code"].get<int>();
  log << "summary: " << results.size() << " jobs, exit " << code << ", report " << (fs::path(opt.out_dir) / "report.json").string()
      << "\n";
  return code;
}

}  // namespace varineq::cli
