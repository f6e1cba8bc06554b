#include "varineq/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "varineq/errors.hpp"

namespace varineq {

namespace {

using LD = long double;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Thomas for a tridiagonal system; lo[0] and up[n−1] are ignored.
std::vector<LD> thomas(const std::vector<LD>& lo, const std::vector<LD>& di, const std::vector<LD>& up,
                       std::vector<LD> rhs) {
  const std::size_t n = di.size();
  std::vector<LD> c(n, 0.0L);
  LD piv = di[0];
  if (piv == 0.0L) throw DiscretizationError("zero pivot in tridiagonal solve");
  c[0] = n > 1 ? up[0] / piv : 0.0L;
  rhs[0] /= piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = di[i] - lo[i] * c[i - 1];
    if (piv == 0.0L || !std::isfinite(static_cast<double>(piv)))
      throw DiscretizationError("zero pivot in tridiagonal solve");
    c[i] = i + 1 < n ? up[i] / piv : 0.0L;
    rhs[i] = (rhs[i] - lo[i] * rhs[i - 1]) / piv;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

// S u with S the symmetric positive semidefinite stiffness.
std::vector<LD> stiffness_apply(const CellOperator& op, const std::vector<LD>& u) {
  const int m = op.size();
  std::vector<LD> s(m, 0.0L);
  for (int i = 0; i + 1 < m; ++i) {
    const LD fl = static_cast<LD>(op.face[i]) * (u[i + 1] - u[i]);
    s[i] -= fl;
    s[i + 1] += fl;
  }
  return s;
}

// Solves S u = b for b with Σb = 0. The heaviest cell is pinned and each
// side is eliminated starting from its free end, so no pivot is formed by
// cancelling large conductances against a small one.
std::vector<LD> stiffness_solve(const CellOperator& op, const std::vector<LD>& b) {
  const int m = op.size();
  const int p = static_cast<int>(std::max_element(op.weights.begin(), op.weights.end()) - op.weights.begin());
  std::vector<LD> u(m, 0.0L);
  // cells `idx` in elimination order; face between idx[k] and idx[k+1], last one to the pin
  auto chain = [&](const std::vector<int>& idx) {
    const std::size_t n = idx.size();
    if (n == 0) return;
    auto face_between = [&](int i, int j) { return static_cast<LD>(op.face[std::min(i, j)]); };
    std::vector<LD> lo(n, 0.0L), di(n), up(n, 0.0L), rhs(n);
    for (std::size_t k = 0; k < n; ++k) {
      const LD prev = k > 0 ? face_between(idx[k - 1], idx[k]) : 0.0L;
      const LD next = face_between(idx[k], k + 1 < n ? idx[k + 1] : p);
      di[k] = prev + next;
      if (k > 0) lo[k] = -prev;
      if (k + 1 < n) up[k] = -next;
      rhs[k] = b[idx[k]];
    }
    const auto y = thomas(lo, di, up, rhs);
    for (std::size_t k = 0; k < n; ++k) u[idx[k]] = y[k];
  };
  std::vector<int> left, right;
  for (int i = 0; i < p; ++i) left.push_back(i);
  for (int i = m - 1; i > p; --i) right.push_back(i);
  chain(left);
  chain(right);
  return u;
}

LD mean_ld(const CellOperator& op, const std::vector<LD>& u) {
  LD s = 0.0L, w = 0.0L;
  for (int i = 0; i < op.size(); ++i) {
    s += static_cast<LD>(op.weights[i]) * u[i];
    w += op.weights[i];
  }
  return s / w;
}

LD mnorm2(const CellOperator& op, const std::vector<LD>& u) {
  LD s = 0.0L;
  for (int i = 0; i < op.size(); ++i) s += static_cast<LD>(op.weights[i]) * u[i] * u[i];
  return s;
}

double interval_tail(const WeightedMeasure& mu, double lo, double hi) {
  QuadratureSpec q;
  q.tolerance = 1e-9;
  q.check_tails = false;
  auto dens = [&mu](double x) { return mu.density(point({x})); };
  try {
    return integrate_1d(dens, Interval{lo, hi}, q).value;
  } catch (const NonConvergentError& e) {
    return e.best().value;
  }
}

// Smallest X ≥ start with ∫_X^∞ dμ < tail (sign = +1) or ∫_{−∞}^{−X} (sign = −1).
double tail_point(const WeightedMeasure& mu, double tail, int sign) {
  auto mass = [&](double X) {
    return sign > 0 ? interval_tail(mu, X, kInf) : interval_tail(mu, -kInf, -X);
  };
  double hi = 1.0;
  while (mass(hi) >= tail) {
    hi *= 2.0;
    if (hi > 1e12) throw NonIntegrableError("tail mass does not fall below the truncation threshold");
  }
  double lo = 0.0;
  for (int it = 0; it < 60 && hi - lo > 1e-6 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) < tail ? hi : lo) = mid;
  }
  return hi;
}

double one_d_end(const DomainSpec& d, bool upper) {
  if (d.kind == DomainSpec::Kind::kCenteredBall) return upper ? d.sigma : -d.sigma;
  if (d.kind == DomainSpec::Kind::kInterval) return upper ? d.b : d.a;
  if (d.kind == DomainSpec::Kind::kBox) return upper ? d.hi(0) : d.lo(0);
  return upper ? kInf : -kInf;
}

}  // namespace

const char* to_string(Generator g) {
  switch (g) {
    case Generator::kCauchy: return "Lbeta-cauchy";
    case Generator::kSphere: return "Nbeta-sphere";
    case Generator::kGenericCase1: return "generic-case1";
    case Generator::kGenericCase2: return "generic-case2";
  }
  return "?";
}

Generator parse_generator(const std::string& s) {
  if (s == "Lbeta-cauchy" || s == "Lβ-cauchy" || s == "cauchy") return Generator::kCauchy;
  if (s == "Nbeta-sphere" || s == "Nβ-sphere" || s == "sphere") return Generator::kSphere;
  if (s == "generic-case1") return Generator::kGenericCase1;
  if (s == "generic-case2") return Generator::kGenericCase2;
  throw InvalidParametersError("unknown generator '" + s + "'");
}

GridFunction CellOperator::apply(const GridFunction& u) const {
  const int m = size();
  GridFunction out(m, 0.0);
  for (int i = 0; i + 1 < m; ++i) {
    const double fl = face[i] * (u[i + 1] - u[i]);
    out[i] += fl;
    out[i + 1] -= fl;
  }
  for (int i = 0; i < m; ++i) out[i] /= weights[i];
  return out;
}

double CellOperator::energy(const GridFunction& u) const {
  LD s = 0.0L;
  for (int i = 0; i + 1 < size(); ++i) {
    const LD d = static_cast<LD>(u[i + 1]) - u[i];
    s += face[i] * d * d;
  }
  return static_cast<double>(s);
}

double CellOperator::mean(const GridFunction& u) const {
  return static_cast<double>(mean_ld(*this, std::vector<LD>(u.begin(), u.end())));
}

double CellOperator::variance(const GridFunction& u) const {
  std::vector<LD> v(u.begin(), u.end());
  const LD m = mean_ld(*this, v);
  LD s = 0.0L, w = 0.0L;
  for (int i = 0; i < size(); ++i) {
    const LD d = v[i] - m;
    s += static_cast<LD>(weights[i]) * d * d;
    w += weights[i];
  }
  return static_cast<double>(s / w);
}

GridFunction CellOperator::sample(const ScalarField& f) const {
  GridFunction v(size());
  for (int i = 0; i < size(); ++i) v[i] = f(point({nodes[i]}));
  return v;
}

CellOperator build_cell_operator(const WeightedMeasure& mu, const ScalarField& weight, const Grid1D& g) {
  g.validate();
  if (mu.dim() != 1) throw UnsupportedDimensionError("cell operators are one-dimensional");
  const int m = g.m;
  CellOperator op;
  op.edges.resize(m + 1);
  const double h = (g.b - g.a) / m;
  for (int i = 0; i <= m; ++i) op.edges[i] = i == m ? g.b : g.a + i * h;

  const double lo_end = one_d_end(mu.domain(), false), hi_end = one_d_end(mu.domain(), true);
  QuadratureSpec q;
  q.tolerance = 1e-12;
  q.check_tails = false;
  auto dens = [&mu](double x) { return mu.density(point({x})); };
  const double bpow = mu.measure_case() == MeasureCase::kCase2 && mu.potential().vanishes_on_boundary
                          ? mu.beta()
                          : 0.0;
  op.nodes.resize(m);
  op.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    const double a = op.edges[i], b = op.edges[i + 1];
    EndpointHints hints;
    if (a == lo_end) hints.lo_power = bpow;
    if (b == hi_end) hints.hi_power = bpow;
    auto run = [&](const Integrand1D& F) {
      try {
        return integrate_1d(F, Interval{a, b}, q, hints).value;
      } catch (const NonConvergentError& e) {
        return e.best().value;
      }
    };
    const double w = run(dens);
    const double xw = run([&](double x) { return x * dens(x); });
    if (!(w > 0.0)) throw InvalidParametersError("cell without mass at [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    op.weights[i] = w;
    op.nodes[i] = xw / w;
  }
  op.face.resize(m - 1);
  for (int i = 0; i + 1 < m; ++i) {
    const Vector x = point({op.edges[i + 1]});
    const double wt = weight(x);
    if (!(wt > 0.0)) throw InvalidParametersError("weight must be positive at interior faces");
    op.face[i] = wt * mu.density(x) / (op.nodes[i + 1] - op.nodes[i]);
  }
  return op;
}

double truncation_radius(const WeightedMeasure& mu, double tail) {
  if (mu.dim() != 1) throw UnsupportedDimensionError("truncation is one-dimensional");
  if (!(tail > 0.0 && tail < 1.0)) throw InvalidParametersError("tail must lie in (0,1)");
  return std::max(tail_point(mu, 0.5 * tail, 1), tail_point(mu, 0.5 * tail, -1));
}

Grid1D default_grid(const WeightedMeasure& mu, int m) {
  if (mu.dim() != 1) throw UnsupportedDimensionError("grids are one-dimensional");
  double a = one_d_end(mu.domain(), false), b = one_d_end(mu.domain(), true);
  if (!std::isfinite(a) && !std::isfinite(b)) {
    const double X = truncation_radius(mu);
    a = -X;
    b = X;
  } else if (!std::isfinite(b)) {
    b = tail_point(mu, 1e-8, 1);
  } else if (!std::isfinite(a)) {
    a = -tail_point(mu, 1e-8, -1);
  }
  return Grid1D{a, b, m};
}

void EvolutionProblem::validate() const {
  grid.validate();
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw InvalidParametersError("dt must be nonnegative");
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidParametersError("horizon T must be positive");
  if (measure.dim() != 1) throw UnsupportedDimensionError("evolution is one-dimensional");
  const auto c = measure.measure_case();
  switch (generator) {
    case Generator::kCauchy:
      if (measure.family() != "cauchy") throw InvalidParametersError("Lbeta-cauchy needs the Cauchy measure");
      if (!(measure.beta() > 1.0)) throw InvalidParametersError("Lbeta-cauchy needs beta > 1");
      break;
    case Generator::kSphere:
      if (measure.family() != "halfsphere") throw InvalidParametersError("Nbeta-sphere needs the half-sphere measure");
      break;
    case Generator::kGenericCase1:
      if (c != MeasureCase::kCase1) throw InvalidParametersError("generic-case1 needs a Case 1 measure");
      break;
    case Generator::kGenericCase2:
      if (c != MeasureCase::kCase2) throw InvalidParametersError("generic-case2 needs a Case 2 measure");
      break;
  }
}

double EvolutionProblem::step() const { return dt > 0.0 ? dt : (grid.b - grid.a) / grid.m; }

EvolutionProblem make_cauchy_evolution(double beta, int m) {
  auto mu = make_cauchy(1, beta);
  Grid1D g = default_grid(mu, m);
  return EvolutionProblem{Generator::kCauchy, mu, g, 0.0, 1.0};
}

EvolutionProblem make_sphere_evolution(double sigma, double beta, int m) {
  auto mu = make_halfsphere(1, sigma, beta);
  return EvolutionProblem{Generator::kSphere, mu, Grid1D{-sigma, sigma, m}, 0.0, 1.0};
}

CellOperator evolution_operator(const EvolutionProblem& p) {
  p.validate();
  return build_cell_operator(p.measure, p.measure.field(), p.grid);
}

std::size_t TimeSeries::at(double time) const {
  std::size_t best = 0;
  for (std::size_t k = 1; k < t.size(); ++k)
    if (std::abs(t[k] - time) < std::abs(t[best] - time)) best = k;
  return best;
}

TimeSeries evolve(const EvolutionProblem& p, const GridFunction& f0, int stride) {
  const CellOperator op = evolution_operator(p);
  const int m = op.size();
  if (static_cast<int>(f0.size()) != m) throw InvalidParametersError("f0 has the wrong length");
  for (double v : f0)
    if (!std::isfinite(v)) throw InvalidParametersError("f0 must be finite");
  if (stride < 1) throw InvalidParametersError("stride must be positive");

  const long steps = std::max(1L, std::lround(std::ceil(p.T / p.step() - 1e-9)));
  const LD dt = static_cast<LD>(p.T) / steps;

  // (M + dt/2 S) u⁺ = (M − dt/2 S) u
  std::vector<LD> lo(m, 0.0L), di(m), up(m, 0.0L);
  for (int i = 0; i < m; ++i) {
    LD s = 0.0L;
    if (i > 0) {
      s += op.face[i - 1];
      lo[i] = -0.5L * dt * op.face[i - 1];
    }
    if (i + 1 < m) {
      s += op.face[i];
      up[i] = -0.5L * dt * op.face[i];
    }
    di[i] = static_cast<LD>(op.weights[i]) + 0.5L * dt * s;
  }

  TimeSeries ts;
  std::vector<LD> u(f0.begin(), f0.end());
  auto record = [&](long k) {
    ts.t.push_back(static_cast<double>(dt * k));
    GridFunction g(u.begin(), u.end());
    ts.mean.push_back(op.mean(g));
    ts.var.push_back(op.variance(g));
    ts.u.push_back(std::move(g));
  };
  record(0);
  for (long k = 1; k <= steps; ++k) {
    const auto su = stiffness_apply(op, u);
    std::vector<LD> rhs(m);
    for (int i = 0; i < m; ++i) rhs[i] = static_cast<LD>(op.weights[i]) * u[i] - 0.5L * dt * su[i];
    u = thomas(lo, di, up, std::move(rhs));
    if (k % stride == 0 || k == steps) record(k);
  }
  return ts;
}

double decay_rate(const EvolutionProblem& p, double C) {
  const double beta = p.measure.beta();
  const bool case2 = p.generator == Generator::kSphere || p.generator == Generator::kGenericCase2;
  return case2 ? 2.0 * C * (beta + 1.0) : 2.0 * C * (beta - 1.0);
}

DecayCheck variance_decay_check(const EvolutionProblem& p, const GridFunction& f0, double rate, double tol,
                                int stride) {
  const TimeSeries ts = evolve(p, f0, stride);
  DecayCheck out;
  const double v0 = ts.var.front();
  out.monotone = true;
  const double slack = 1e-13 * std::max(v0, 1e-300);
  InequalityReport& rep = out.report;
  rep.id = std::string("decay-") + to_string(p.generator);
  rep.equation_tag = "semigroup-decay";
  rep.params = ParamTriple{1, p.measure.beta(), 1.0};
  // rounding in the long-double sums and solves
  rep.err = 1e-12 * v0;
  bool first = true;
  for (std::size_t k = 0; k < ts.t.size(); ++k) {
    const double bound = std::exp(-rate * ts.t[k]) * v0 * (1.0 + tol);
    out.rows.push_back({ts.t[k], ts.var[k], bound});
    if (k > 0 && ts.var[k] > ts.var[k - 1] + slack) out.monotone = false;
    const double margin = bound - ts.var[k];
    if (first || margin < rep.margin) {
      rep.lhs = ts.var[k];
      rep.rhs = bound;
      rep.margin = margin;
      rep.meta["worst_t"] = ts.t[k];
      first = false;
    }
  }
  // constant data: 0 ≤ 0 at every t
  rep.status = v0 == 0.0 && rep.margin >= 0.0 ? Status::kHolds : classify(rep.margin, rep.err);
  if (!out.monotone) {
    rep.parts.push_back({"monotone-variance", 1.0, 0.0, -1.0, 0.0, Status::kViolated});
    rep.status = Status::kViolated;
  }
  rep.meta["rate"] = rate;
  rep.meta["tol"] = tol;
  rep.meta["generator"] = to_string(p.generator);
  rep.meta["var0"] = v0;
  rep.meta["monotone"] = out.monotone;
  rep.meta["T"] = p.T;
  rep.meta["cells"] = p.grid.m;
  return out;
}

SpectralResult spectral_gap(const SpectralProblem& sp, int max_iter, double tol) {
  const CellOperator op = build_cell_operator(sp.measure, sp.weight, sp.grid);
  const int m = op.size();

  auto project = [&](std::vector<LD>& v) {
    const LD mu = mean_ld(op, v);
    for (auto& x : v) x -= mu;
    const LD nrm = std::sqrt(mnorm2(op, v));
    if (!(nrm > 0.0L)) throw SpectralError("inverse iteration collapsed onto the constants");
    for (auto& x : v) x /= nrm;
  };
  auto rayleigh = [&](const std::vector<LD>& v) {
    const auto s = stiffness_apply(op, v);
    LD num = 0.0L;
    for (int i = 0; i < m; ++i) num += v[i] * s[i];
    return num / mnorm2(op, v);
  };

  // odd and even parts, so neither symmetry class is missed
  const double mid = 0.5 * (sp.grid.a + sp.grid.b), half = 0.5 * (sp.grid.b - sp.grid.a);
  std::vector<LD> v(m);
  for (int i = 0; i < m; ++i) {
    const double y = (op.nodes[i] - mid) / half;
    v[i] = y + 0.3 * y * y + 0.05 * y * y * y;
  }
  project(v);
  LD lam = rayleigh(v);
  SpectralResult res;
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<LD> b(m);
    for (int i = 0; i < m; ++i) b[i] = static_cast<LD>(op.weights[i]) * v[i];  // Σb = 0 as v ⟂ 1
    v = stiffness_solve(op, b);
    project(v);
    const LD next = rayleigh(v);
    const bool done = std::abs(static_cast<double>(next - lam)) <= tol * std::abs(static_cast<double>(next));
    lam = next;
    if (done) {
      res.iterations = it;
      break;
    }
    if (it == max_iter)
      throw SpectralError("inverse iteration did not settle after " + std::to_string(max_iter) + " iterations");
  }
  const auto s = stiffness_apply(op, v);
  LD rn = 0.0L, bn = 0.0L;
  for (int i = 0; i < m; ++i) {
    const LD mv = static_cast<LD>(op.weights[i]) * v[i];
    rn += (s[i] - lam * mv) * (s[i] - lam * mv);
    bn += mv * mv;
  }
  res.lambda1 = static_cast<double>(lam);
  res.constant = 1.0 / res.lambda1;
  res.residual = static_cast<double>(std::sqrt(rn / bn));
  res.eigenvector.assign(v.begin(), v.end());
  res.nodes = op.nodes;
  return res;
}

double truncation_sensitivity(const SpectralProblem& sp) {
  const double l1 = spectral_gap(sp).lambda1;
  const double mid = 0.5 * (sp.grid.a + sp.grid.b), half = 0.5 * (sp.grid.b - sp.grid.a);
  SpectralProblem wide{sp.weight, sp.measure, Grid1D{mid - 2.0 * half, mid + 2.0 * half, 2 * sp.grid.m}};
  const double l2 = spectral_gap(wide).lambda1;
  return std::abs(l1 - l2) / l1;
}

}  // namespace varineq
