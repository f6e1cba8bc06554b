#include "varineq/cli/jobs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "varineq/catalogue.hpp"
#include "varineq/cli/factory.hpp"
#include "varineq/dual.hpp"
#include "varineq/errors.hpp"
#include "varineq/evolve.hpp"

namespace varineq::cli {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

const std::set<std::string>& allowed_keys(const std::string& kind) {
  static const std::set<std::string> measure = {"kind", "family", "n", "beta", "sigma", "power",
                                                "potential", "domain", "vanishes", "convexity"};
  static const std::map<std::string, std::set<std::string>> extra = {
      {"verify", {"tag", "r", "f", "mode", "z0"}},
      {"sweep", {"tag", "r", "f", "axis", "grid", "target", "dbeta"}},
      {"dual", {"r", "f", "a", "b", "ms"}},
      {"evolve", {"generator", "m", "dt", "T", "f0", "rate", "tol", "stride"}},
      {"spectrum", {"weight", "m"}},
  };
  static std::map<std::string, std::set<std::string>> merged;
  auto it = merged.find(kind);
  if (it == merged.end()) {
    std::set<std::string> s = measure;
    s.insert(extra.at(kind).begin(), extra.at(kind).end());
    it = merged.emplace(kind, std::move(s)).first;
  }
  return it->second;
}

QuadratureSpec spec_for(const RunConfig& cfg, const RunOptions& opt) {
  QuadratureSpec q;
  if (cfg.seed) q.seed = *cfg.seed;
  if (cfg.tol) q.tolerance = *cfg.tol;
  if (opt.seed) q.seed = *opt.seed;
  if (opt.tol) q.tolerance = *opt.tol;
  q.validate();
  return q;
}

std::vector<TestFunction> functions_for(const JobSpec& job, const std::string& key, int dim,
                                        const std::string& fallback) {
  const std::string name = job.str(key, fallback);
  if (name == "battery") return battery(dim);
  return {battery_member(dim, name)};
}

double job_beta(const JobSpec& job, const WeightedMeasure& mu) {
  const auto c = mu.measure_case();
  if (c == MeasureCase::kCase1 || c == MeasureCase::kCase2) return job.num("beta", mu.beta());
  return job.num("beta", 0.0);
}

// Lenient mode records violations in asserted-only ranges without failing.
void apply_mode(InequalityReport& rep, const RunOptions& opt) {
  const bool asserted = rep.meta.contains("asserted_only") && rep.meta["asserted_only"].is_boolean() &&
                        rep.meta["asserted_only"].get<bool>();
  if (asserted && rep.status == Status::kViolated && !opt.strict) {
    rep.status = Status::kInconclusive;
    rep.meta["downgraded_from"] = "violated";
  }
}

struct Acc {
  JobResult& res;
  Status worst_status = Status::kHolds;

  void add(const InequalityReport& r) {
    worst_status = worst(worst_status, r.status);
    res.reports.push_back(to_json(r));
  }
};

Scenario scenario_for(const JobSpec& job, const WeightedMeasure& mu, const TestFunction& f, const QuadratureSpec& q,
                      double r_value) {
  const ParamTriple p{job.integer("n", 1), job_beta(job, mu), r_value};
  const std::string tag = job.str("tag");
  Scenario s{job.id + "/" + tag + "/" + f.name, tag, mu, p, f, q, job.num("convexity", 0.0)};
  return s;
}

void run_verify(const JobSpec& job, const QuadratureSpec& q, const RunOptions& opt, Acc& acc) {
  const auto mu = build_measure(job, q);
  const std::string mode = job.str("mode", "plain");
  const double r = job.num("r", 0.0);
  if (mode == "witness") {
    const ParamTriple p{job.integer("n", 1), job_beta(job, mu), r};
    std::vector<double> zs = job.has("z0") ? job.list("z0") : std::vector<double>{1.0, -1.0};
    for (double z : zs) {
      Vector z0 = Vector::Constant(mu.dim(), z);
      auto rep = equality_witness(mu, p, z0, q);
      rep.id = job.id + "/witness/z0=" + label(z);
      apply_mode(rep, opt);
      acc.add(rep);
    }
    return;
  }
  if (mode != "plain" && mode != "optimized") throw ParseError("job '" + job.id + "': unknown mode '" + mode + "'");
  for (const auto& f : functions_for(job, "f", mu.dim(), "battery")) {
    const Scenario s = scenario_for(job, mu, f, q, r);
    InequalityReport rep;
    if (mode == "optimized") {
      const auto om = optimized_margin(s);
      rep = om.report;
      rep.meta["R"] = om.R;
      rep.meta["S"] = om.S;
      rep.meta["R_phi"] = om.R_phi;
      rep.meta["plain_lhs"] = om.plain_lhs;
    } else {
      rep = verify(s);
    }
    rep.id = s.id;
    apply_mode(rep, opt);
    acc.add(rep);
  }
}

void run_sweep(const JobSpec& job, const QuadratureSpec& q, const RunOptions& opt, Acc& acc) {
  const std::string target = job.str("target", "verify");
  const std::vector<double> grid = job.list("grid");
  Table t;
  t.header = {"parameter", "lhs", "rhs", "margin", "err"};
  auto row = [&t](double p, double l, double r, double m, double e) {
    t.rows.push_back({fmt(p), fmt(l), fmt(r), fmt(m), fmt(e)});
  };

  if (target == "c_r") {
    double lo = 0.0, hi = 0.0, arg_lo = 0.0, arg_hi = 0.0;
    bool first = true;
    for (double r : grid) {
      const double v = c_r(r);
      row(r, v, 4.0, 4.0 - v, 0.0);
      if (first || v < lo) lo = v, arg_lo = r;
      if (first || v > hi) hi = v, arg_hi = r;
      first = false;
    }
    if (!grid.empty()) {
      InequalityReport rep;
      rep.id = job.id + "/c_r";
      rep.equation_tag = "prop11-constant";
      rep.lhs = hi;
      rep.rhs = 4.0;
      rep.margin = 4.0 - hi;
      rep.err = 4.0 * 1e-15;
      rep.status = hi <= 4.0 + rep.err && lo > 1.8 ? Status::kHolds : Status::kViolated;
      rep.meta = {{"min", lo}, {"argmin", arg_lo}, {"max", hi}, {"argmax", arg_hi}};
      acc.add(rep);
    }
  } else if (target == "psi-curvature") {
    const auto mu = build_measure(job, q);
    for (double beta : grid) {
      const auto pc = psi_curvature(mu.potential(), beta, job.num("dbeta", 1e-2), q);
      row(beta, pc.psi_dd, pc.bound, pc.bound - pc.psi_dd, pc.err);
      InequalityReport rep;
      rep.id = job.id + "/beta=" + label(beta);
      rep.equation_tag = "psi-curvature";
      rep.params = {mu.dim(), beta, 0.0};
      rep.lhs = pc.psi_dd;
      rep.rhs = pc.bound;
      rep.margin = pc.bound - pc.psi_dd;
      rep.err = pc.err;
      rep.status = classify(rep.margin, rep.err);
      rep.meta = {{"improved", std::isfinite(pc.improved) ? nlohmann::json(pc.improved) : nlohmann::json("inf")},
                  {"ratio", pc.psi_dd / pc.bound}};
      acc.add(rep);
    }
  } else if (target == "verify") {
    const std::string axis = job.str("axis");
    if (axis != "beta" && axis != "r") throw ParseError("job '" + job.id + "': axis must be beta or r");
    for (double v : grid) {
      JobSpec point = job;
      point.values[axis] = fmt(v);
      const auto mu = build_measure(point, q);
      const auto fs = functions_for(point, "f", mu.dim(), "lin-x1");
      if (fs.size() != 1) throw ParseError("job '" + job.id + "': a sweep needs a single test function");
      Scenario s = scenario_for(point, mu, fs.front(), q, point.num("r", 0.0));
      s.id = job.id + "/" + axis + "=" + label(v);
      InequalityReport rep;
      try {
        rep = verify(s);
      } catch (const InvalidParametersError&) {
        if (opt.strict) throw;
        continue;  // outside the guard: point skipped
      }
      rep.id = s.id;
      apply_mode(rep, opt);
      row(v, rep.lhs, rep.rhs, rep.margin, rep.err);
      acc.add(rep);
    }
  } else {
    throw ParseError("job '" + job.id + "': unknown sweep target '" + target + "'");
  }
  acc.res.table = std::move(t);
}

void run_dual(const JobSpec& job, const QuadratureSpec& q, Acc& acc) {
  (void)q;
  const ScalarField phi = parse_potential(job.str("potential"), 1);
  const double a = job.num("a", -1.0), b = job.num("b", 1.0);
  const double beta = job.num("beta"), r = job.num("r", 0.0);
  const auto fs = functions_for(job, "f", 1, "lin-x1");
  std::vector<int> ms;
  for (double m : job.has("ms") ? job.list("ms") : std::vector<double>{251, 501, 1001, 2001})
    ms.push_back(static_cast<int>(m));
  if (ms.empty()) throw ParseError("job '" + job.id + "': ms must not be empty");

  Table t;
  t.header = {"function", "term", "value", "level", "residual"};
  for (const auto& f : fs) {
    const DualProblem p{phi, beta, r, f.f};
    const auto st = refine_decomposition(p, a, b, ms);
    for (const auto& row : st.rows) {
      for (const auto& term : row.d.terms)
        t.rows.push_back({f.name, term.name, fmt(term.value), std::to_string(row.m), fmt(row.d.residual)});
      t.rows.push_back({f.name, "lhs", fmt(row.d.lhs), std::to_string(row.m), fmt(row.d.residual)});
      t.rows.push_back({f.name, "chain_bound", fmt(row.d.chain_bound), std::to_string(row.m), fmt(row.d.residual)});
    }
    const auto& fin = st.rows.back().d;
    InequalityReport rep;
    rep.id = job.id + "/" + f.name;
    rep.equation_tag = "dual-decomposition";
    rep.params = {1, beta, r};
    rep.lhs = fin.lhs;
    rep.rhs = fin.chain_bound;
    rep.margin = fin.chain_bound - fin.lhs;
    rep.err = fin.residual + 1e-12 * std::abs(fin.lhs);
    rep.status = classify(rep.margin, rep.err);
    // the identity's residual must fall at second order; meaningless once it hits rounding
    nlohmann::json orders = nlohmann::json::array();
    for (std::size_t k = 0; k < st.orders.size(); ++k) {
      orders.push_back(std::isfinite(st.orders[k]) ? nlohmann::json(st.orders[k]) : nlohmann::json("nan"));
      const bool resolved = st.rows[k + 1].d.residual > 1e-11 * (1.0 + std::abs(fin.lhs));
      if (!resolved) continue;
      const double dev = std::abs(st.orders[k] - 2.0);
      ReportPart part{"order-" + std::to_string(st.rows[k].m) + "-" + std::to_string(st.rows[k + 1].m), dev, 0.3,
                      0.3 - dev, 0.0, dev <= 0.3 ? Status::kHolds : Status::kInconclusive};
      rep.parts.push_back(part);
      rep.status = worst(rep.status, part.status);
    }
    if (fin.pointwise_excess > 1e-12) {
      rep.parts.push_back({"pointwise", fin.pointwise_excess, 0.0, -fin.pointwise_excess, 0.0, Status::kViolated});
      rep.status = Status::kViolated;
    }
    rep.meta["orders"] = orders;
    rep.meta["pointwise_excess"] = fin.pointwise_excess;
    rep.meta["variance_from_dual"] = variance_from_dual(p, Grid1D{a, b, ms.back()});
    rep.meta["alpha"] = dual_alpha(beta, r);
    acc.add(rep);
  }
  acc.res.table = std::move(t);
}

EvolutionProblem evolution_for(const JobSpec& job, const QuadratureSpec& q) {
  const Generator g = parse_generator(job.str("generator"));
  const int m = job.integer("m", 2000);
  const auto mu = build_measure(job, q);
  Grid1D grid = default_grid(mu, m);
  EvolutionProblem p{g, mu, grid, job.num("dt", 0.0), job.num("T", 1.0)};
  p.validate();
  return p;
}

void run_evolve(const JobSpec& job, const QuadratureSpec& q, Acc& acc) {
  const auto p = evolution_for(job, q);
  double rate = 0.0;
  if (job.has("rate")) {
    rate = job.num("rate");
  } else {
    const double C = convexity_for(job);
    if (!(C > 0.0)) throw InvalidParametersError("job '" + job.id + "': set rate or convexity for this generator");
    rate = decay_rate(p, C);
  }
  const auto op = evolution_operator(p);
  Table t;
  t.header = {"function", "t", "Var", "bound"};
  for (const auto& f : functions_for(job, "f0", 1, "lin-x1")) {
    const auto dc = variance_decay_check(p, op.sample(f.f), rate, job.num("tol", 1e-3), job.integer("stride", 1));
    InequalityReport rep = dc.report;
    rep.id = job.id + "/" + f.name;
    rep.meta["f0"] = f.name;
    for (const auto& row : dc.rows) t.rows.push_back({f.name, fmt(row.t), fmt(row.var), fmt(row.bound)});
    acc.add(rep);
  }
  acc.res.table = std::move(t);
}

void run_spectrum(const JobSpec& job, const QuadratureSpec& q, Acc& acc) {
  const auto mu = build_measure(job, q);
  if (mu.dim() != 1) throw UnsupportedDimensionError("spectrum jobs are one-dimensional");
  const auto c = mu.measure_case();
  const std::string wname = job.str("weight", c == MeasureCase::kCase1 || c == MeasureCase::kCase2 ? "phi" : "constant:1");
  const ScalarField w = wname == "phi" ? mu.field() : parse_potential(wname, 1);
  const int m = job.integer("m", 2000);
  const Grid1D grid = default_grid(mu, m);
  const SpectralProblem sp{w, mu, grid};
  const auto res = spectral_gap(sp);
  const auto coarse = spectral_gap(SpectralProblem{w, mu, Grid1D{grid.a, grid.b, m / 2}});
  double err = std::abs(res.constant - coarse.constant) / 3.0 + 1e-12 * res.constant;
  const bool truncated = !mu.domain().bounded() && mu.domain().kind == DomainSpec::Kind::kFullSpace;
  double trunc = 0.0;
  if (truncated) {
    trunc = truncation_sensitivity(sp);
    err += trunc * res.constant;
  }

  InequalityReport rep;
  rep.id = job.id + "/spectral-gap";
  rep.equation_tag = "spectral-gap";
  rep.params = {1, job_beta(job, mu), 1.0};
  rep.lhs = res.constant;
  rep.err = err;
  const double C = convexity_for(job);
  bool compared = false;
  if (C > 0.0 && (wname == "phi" || c == MeasureCase::kLogConcave)) {
    const double beta = mu.beta();
    if (c == MeasureCase::kCase1) rep.rhs = 1.0 / (C * (beta - 1.0)), compared = true;
    if (c == MeasureCase::kCase2) rep.rhs = 1.0 / (C * (beta + 1.0)), compared = true;
    if (c == MeasureCase::kLogConcave && w.dim() == 1) rep.rhs = 1.0 / C, compared = true;
  }
  if (!compared) rep.rhs = rep.lhs;
  rep.margin = rep.rhs - rep.lhs;
  rep.status = compared ? classify(rep.margin, rep.err) : Status::kHolds;
  rep.meta = {{"lambda1", res.lambda1},
              {"iterations", res.iterations},
              {"residual", res.residual},
              {"compared", compared},
              {"weight", wname},
              {"grid", {grid.a, grid.b, grid.m}}};
  if (truncated) rep.meta["truncation_sensitivity"] = trunc;
  if (mu.family() == "cauchy") {
    const double beta = mu.beta();
    const double s = std::sqrt(1.0 + 2.0 / (beta - 1.0)) + std::sqrt(2.0 / (beta + 1.0));
    rep.meta["bobkov_ledoux_constant"] = s * s / (2.0 * (beta - 1.0));
  }
  acc.add(rep);

  Table t;
  t.header = {"node", "eigenvector"};
  for (std::size_t i = 0; i < res.nodes.size(); ++i) t.rows.push_back({fmt(res.nodes[i]), fmt(res.eigenvector[i])});
  acc.res.table = std::move(t);
}

}  // namespace

std::string Table::csv() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      const std::string& c = cells[i];
      if (c.find_first_of(",\"\n") == std::string::npos) {
        out += c;
        continue;
      }
      out += '"';
      for (char ch : c) {
        if (ch == '"') out += '"';
        out += ch;
      }
      out += '"';
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

void validate_jobs(const RunConfig& cfg) {
  for (const auto& j : cfg.jobs) {
    const auto& allowed = allowed_keys(j.kind);
    for (const auto& [k, v] : j.values)
      if (!allowed.count(k)) throw ParseError("job '" + j.id + "': unknown key '" + k + "' for kind " + j.kind);
    const int n = j.integer("n", 1);
    if (n < 1 || n > kMaxDim) throw ParseError("job '" + j.id + "': n out of range");
    const bool needs_family = !(j.kind == "dual" || (j.kind == "sweep" && j.str("target", "verify") == "c_r"));
    if (needs_family) {
      if (!j.has("family")) throw ParseError("job '" + j.id + "': missing key 'family'");
      if (!known_family(j.str("family"))) throw ParseError("job '" + j.id + "': unknown family '" + j.str("family") + "'");
    }
    if (j.has("potential")) parse_potential(j.str("potential"), j.kind == "dual" ? 1 : n);
    if (j.has("domain")) parse_domain(j.str("domain"), n);
    if (j.kind == "verify" || (j.kind == "sweep" && j.str("target", "verify") == "verify")) {
      const auto& tags = registered_tags();
      if (std::find(tags.begin(), tags.end(), j.str("tag")) == tags.end())
        throw ParseError("job '" + j.id + "': unknown tag '" + j.str("tag") + "'");
    }
    if (j.kind == "evolve") {
      try {
        parse_generator(j.str("generator"));
      } catch (const InvalidParametersError& e) {
        throw ParseError("job '" + j.id + "': " + e.what());
      }
    }
    if (j.kind == "sweep") j.list("grid");
    if (j.kind == "verify") {
      const std::string mode = j.str("mode", "plain");
      if (mode != "plain" && mode != "optimized" && mode != "witness")
        throw ParseError("job '" + j.id + "': unknown mode '" + mode + "'");
    }
    if (j.kind == "dual" && !j.has("potential")) throw ParseError("job '" + j.id + "': missing key 'potential'");
    for (const char* key : {"beta", "r", "sigma", "power", "convexity", "a", "b", "dt", "T", "rate", "tol", "dbeta"})
      if (j.has(key)) j.num(key);
  }
}

bool is_failure(const std::string& status) {
  return status == "violated" || status == "invalid-parameters" || status == "error";
}

JobResult run_job(const JobSpec& job, const RunConfig& cfg, const RunOptions& opt) {
  JobResult res;
  res.id = job.id;
  res.kind = job.kind;
  Acc acc{res};
  try {
    const QuadratureSpec q = spec_for(cfg, opt);
    if (job.kind == "verify") run_verify(job, q, opt, acc);
    else if (job.kind == "sweep") run_sweep(job, q, opt, acc);
    else if (job.kind == "dual") run_dual(job, q, acc);
    else if (job.kind == "evolve") run_evolve(job, q, acc);
    else if (job.kind == "spectrum") run_spectrum(job, q, acc);
    res.status = to_string(acc.worst_status);
  } catch (const InvalidParametersError& e) {
    res.status = opt.strict ? "invalid-parameters" : "skipped";
    res.error_code = e.code();
    res.error_message = e.what();
    res.reports.clear();
    res.table.reset();
  } catch (const Error& e) {
    res.status = "error";
    res.error_code = e.code();
    res.error_message = e.what();
    res.reports.clear();
    res.table.reset();
  } catch (const std::exception& e) {
    res.status = "error";
    res.error_code = "internal";
    res.error_message = e.what();
    res.reports.clear();
    res.table.reset();
  }
  return res;
}

}  // namespace varineq::cli
