#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "varineq/cli/config.hpp"
#include "varineq/cli/factory.hpp"
#include "varineq/cli/jobs.hpp"
#include "varineq/cli/runner.hpp"
#include "varineq/errors.hpp"

using namespace varineq;
using namespace varineq::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("varineq_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const char* kSmall = R"(
[suite]
name = small   # trailing comment
seed = 7

; a verify job
[job b-cor16]
kind = verify
tag = cor16
family = halfsphere
beta = 2
f = lin-x1

[job a-cr]
kind = sweep
target = c_r
grid = 1:2:0.01

[job c-spec]
kind = spectrum
family = halfsphere
beta = 2
m = 400
)";

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config(kSmall);
  CHECK(cfg.name == "small");
  REQUIRE(cfg.seed.has_value());
  CHECK(*cfg.seed == 7);
  REQUIRE(cfg.jobs.size() == 3);
  CHECK(cfg.jobs[0].id == "b-cor16");
  CHECK(cfg.jobs[0].kind == "verify");
  CHECK(cfg.jobs[0].num("beta") == 2.0);
  CHECK(cfg.jobs[0].str("f") == "lin-x1");
  CHECK(cfg.jobs[0].integer("n", 1) == 1);
  CHECK_THROWS_AS(cfg.jobs[0].str("missing"), ParseError);
  CHECK_NOTHROW(validate_jobs(cfg));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("[job a]\nkind = verify\n[job a]\nkind = verify\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[jobs a]\n"), ParseError);
  CHECK_THROWS_AS(parse_config("kind = verify\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[job a]\nkind = conquer\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[job a]\ntag = thm1\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[job a]\nkind = verify\nkind = dual\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[job a b]\nkind = verify\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[suite]\nseed = -3\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[job a\nkind = verify\n"), ParseError);
  try {
    parse_config("\n\n[job a]\nnonsense\n", "x.cfg");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("x.cfg:4") != std::string::npos);
  }
}

TEST_CASE("job validation") {
  auto bad = [](const std::string& body) { return parse_config("[job j]\n" + body); };
  CHECK_THROWS_AS(validate_jobs(bad("kind = verify\ntag = thm1\nfamily = moebius\n")), ParseError);
  CHECK_THROWS_AS(validate_jobs(bad("kind = verify\ntag = thm99\nfamily = cauchy\nbeta = 3\n")), ParseError);
  CHECK_THROWS_AS(validate_jobs(bad("kind = verify\ntag = thm1\nfamily = cauchy\nbeta = 3\ncolour = red\n")), ParseError);
  CHECK_THROWS_AS(validate_jobs(bad("kind = verify\ntag = thm1\nfamily = cauchy\nbeta = three\n")), ParseError);
  CHECK_THROWS_AS(validate_jobs(bad("kind = evolve\ngenerator = heat\nfamily = cauchy\nbeta = 3\n")), ParseError);
  CHECK_THROWS_AS(validate_jobs(bad("kind = dual\nbeta = 3\n")), ParseError);
  CHECK_THROWS_AS(validate_jobs(bad("kind = verify\ntag = thm1\nfamily = case1\npotential = spline:1\nbeta = 3\n")), ParseError);
  CHECK_THROWS_AS(validate_jobs(bad("kind = sweep\ntarget = c_r\ngrid = 2:1:0.1\n")), ParseError);
}

TEST_CASE("grids") {
  CHECK(parse_grid("1,2,3") == std::vector<double>{1, 2, 3});
  CHECK(parse_grid("1:2:0.25").size() == 5);
  CHECK(parse_grid("1:2:0.01").size() == 101);
  CHECK(parse_grid("").empty());
  CHECK(parse_grid("  ").empty());
  CHECK_THROWS_AS(parse_grid("1:2"), ParseError);
  CHECK_THROWS_AS(parse_grid("1:2:0"), ParseError);
  CHECK_THROWS_AS(parse_grid("1,x"), ParseError);
}

TEST_CASE("fnv1a") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("factory") {
  CHECK(parse_potential("quadratic:1,1", 1)(point({2.0})) == 5.0);
  CHECK(parse_potential("abs-linear:1,2", 1)(point({-1.0})) == 3.0);
  CHECK(parse_potential("polynomial:1,0,3", 1)(point({2.0})) == 13.0);
  CHECK_THROWS_AS(parse_potential("polynomial:1", 2), ParseError);
  CHECK_THROWS_AS(parse_potential("quadratic:1", 1), ParseError);
  CHECK(parse_domain("interval:-1,2", 1).b == 2.0);
  CHECK(parse_domain("ball:3", 2).sigma == 3.0);
  CHECK_THROWS_AS(parse_domain("interval:0,1", 2), ParseError);
  const auto cfg = parse_config("[job j]\nkind = verify\nfamily = case1\npotential = quadratic:1,1\nbeta = 3\n");
  const auto mu = build_measure(cfg.jobs[0], {});
  CHECK(mu.measure_case() == MeasureCase::kCase1);
  CHECK(mu.normalizer() == doctest::Approx(3.0 * M_PI / 8.0).epsilon(1e-9));
  CHECK(convexity_for(cfg.jobs[0]) == 0.0);
}

TEST_CASE("guard failures in strict and lenient mode") {
  const auto cfg = parse_config("[job j]\nkind = verify\ntag = thm1\nfamily = cauchy\nn = 2\nbeta = 5\nr = 2\nf = lin-x1\n");
  RunOptions opt;
  opt.strict = true;
  const auto s = run_job(cfg.jobs[0], cfg, opt);
  CHECK(s.status == "invalid-parameters");
  CHECK(s.error_code == "invalid-parameters");
  CHECK(is_failure(s.status));
  opt.strict = false;
  const auto l = run_job(cfg.jobs[0], cfg, opt);
  CHECK(l.status == "skipped");
  CHECK_FALSE(is_failure(l.status));
}

TEST_CASE("sweeps") {
  auto cfg = parse_config(kSmall);
  const auto cr = run_job(cfg.jobs[1], cfg, {});
  REQUIRE(cr.table.has_value());
  CHECK(cr.table->rows.size() == 101);
  REQUIRE(cr.reports.size() == 1);
  const auto& m = cr.reports[0]["meta"];
  CHECK(m["max"].get<double>() == 4.0);
  CHECK(m["argmax"].get<double>() == 1.0);
  CHECK(m["min"].get<double>() > 1.8);
  CHECK(m["min"].get<double>() <= 4.0);
  CHECK(cr.status == "holds");

  const auto psi = parse_config(
      "[job p]\nkind = sweep\ntarget = psi-curvature\nfamily = case1\npotential = abs-linear:1,1\nbeta = 3\ngrid = 3,4,5\n");
  const auto pr = run_job(psi.jobs[0], psi, {});
  REQUIRE(pr.reports.size() == 3);
  for (const auto& r : pr.reports) CHECK(std::abs(r["meta"]["ratio"].get<double>() - 1.0) < 1e-4);

  const auto empty = parse_config("[job e]\nkind = sweep\ntarget = c_r\ngrid =\n");
  const auto er = run_job(empty.jobs[0], empty, {});
  REQUIRE(er.table.has_value());
  CHECK(er.table->csv() == "parameter,lhs,rhs,margin,err\n");
  CHECK(er.reports.empty());
}

TEST_CASE("csv quoting") {
  Table t{{"a", "b"}, {{"x,y", "q\"r"}}};
  CHECK(t.csv() == "a,b\n\"x,y\",\"q\"\"r\"\n");
}

TEST_CASE("report assembly is deterministic and thread independent") {
  const auto cfg = parse_config(kSmall);
  RunOptions one;
  one.threads = 1;
  RunOptions four;
  four.threads = 4;
  const auto a = assemble_report(cfg, "run", execute(cfg, "run", one), one, false).dump(2);
  const auto b = assemble_report(cfg, "run", execute(cfg, "run", four), four, false).dump(2);
  CHECK(a == b);
  const auto doc = nlohmann::json::parse(a);
  CHECK(doc["schema_version"] == kReportSchemaVersion);
  CHECK(doc["jobs"][0]["id"] == "a-cr");
  CHECK(doc["jobs"][2]["id"] == "c-spec");
  CHECK(doc["summary"]["exit_code"] == 0);
  CHECK(doc["seed"] == 7);
  CHECK_FALSE(doc.contains("timestamp"));
  CHECK(assemble_report(cfg, "run", {}, one)["timestamp"].is_string());
  // command filters by kind
  const auto only = execute(cfg, "spectrum", one);
  REQUIRE(only.size() == 1);
  CHECK(only[0].kind == "spectrum");
}

TEST_CASE("pool size") {
  RunOptions opt;
  opt.threads = 3;
  CHECK(pool_size(opt, 10) == 3);
  CHECK(pool_size(opt, 2) == 2);
  CHECK(pool_size(opt, 0) == 1);
  opt.threads = 0;
  setenv("VARINEQ_THREADS", "1", 1);
  CHECK(pool_size(opt, 10) == 1);
  unsetenv("VARINEQ_THREADS");
}

TEST_CASE("run_command end to end") {
  const auto dir = scratch("cli");
  std::ostringstream log;
  RunOptions opt;
  opt.out_dir = (dir / "out").string();

  const auto small = write_file(dir / "small.cfg", kSmall);
  CHECK(run_command("run", small, opt, log) == 0);
  CHECK(fs::exists(dir / "out" / "report.json"));
  CHECK(fs::exists(dir / "out" / "a-cr.csv"));
  CHECK_FALSE(fs::exists(dir / "out" / "report.json.tmp"));
  auto strip = [](std::string s) {
    auto j = nlohmann::json::parse(s);
    j.erase("timestamp");
    return j.dump();
  };
  const auto first = strip(slurp(dir / "out" / "report.json"));
  CHECK(run_command("run", small, opt, log) == 0);
  CHECK(strip(slurp(dir / "out" / "report.json")) == first);

  const auto empty = write_file(dir / "empty.cfg", "# nothing\n");
  CHECK(run_command("run", empty, opt, log) == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "out" / "report.json"))["jobs"].empty());

  const auto bad = write_file(dir / "bad.cfg", "[job a]\nkind = verify\ntag = thm1\nfamily = cauchy\nn = 2\nbeta = 5\nr = 2\nf = lin-x1\n");
  opt.strict = true;
  CHECK(run_command("run", bad, opt, log) == 1);
  opt.strict = false;
  CHECK(run_command("run", bad, opt, log) == 0);

  CHECK(run_command("run", write_file(dir / "broken.cfg", "[job a]\nkind = verify\nfamily = unicorn\ntag = thm1\n"), opt, log) == 2);
  CHECK(run_command("run", (dir / "missing.cfg").string(), opt, log) == 2);
  CHECK(run_command("launch", small, opt, log) == 2);
  fs::remove_all(dir);
}
