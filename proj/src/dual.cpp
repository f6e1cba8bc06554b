#include "varineq/dual.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "varineq/measures.hpp"

namespace varineq {

namespace {

using LD = long double;
using LDVec = std::vector<LD>;

struct NodeData {
  std::vector<double> phi, dphi, ddphi;
};

NodeData node_data(const ScalarField& phi, const Grid1D& g) {
  NodeData d;
  d.phi.resize(g.m);
  d.dphi.resize(g.m);
  d.ddphi.resize(g.m);
  for (int i = 0; i < g.m; ++i) {
    const Vector x = point({g.x(i)});
    const FieldProbe pr = probe(phi, x, true);
    d.phi[i] = pr.value;
    d.dphi[i] = pr.grad(0);
    d.ddphi[i] = pr.hess(0, 0);
  }
  return d;
}

// flux-balance form; exact telescoping keeps Σ mass·Lu = 0 to rounding
LDVec flux_ld(const DiscreteOperator& op, const LDVec& u) {
  const int m = op.grid.m;
  LDVec out(m, 0.0L);
  for (int i = 0; i < m - 1; ++i) {
    const LD q = static_cast<LD>(op.face[i]) * (u[i + 1] - u[i]);
    out[i] += q;
    out[i + 1] -= q;
  }
  return out;
}

LDVec apply_ld(const DiscreteOperator& op, const LDVec& u) {
  LDVec out = flux_ld(op, u);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= static_cast<LD>(op.mass[i]);
  return out;
}

LDVec solve_ld(const DualProblem& p, const Grid1D& g, const DiscreteOperator& op, const GridFunction& f) {
  const int m = g.m;
  LD fm = 0.0L;
  for (int i = 0; i < m; ++i) fm += static_cast<LD>(op.weights[i]) * f[i];
  LDVec rhs(m);
  for (int i = 0; i < m; ++i) rhs[i] = f[i] - fm;

  // S u = M·rhs with S the symmetric flux matrix; pin u_0 = 0 and drop
  // row 0, which follows from the column sums of S vanishing
  const int k = m - 1;
  LDVec c(k), d(k);
  for (int j = 0; j < k; ++j) {
    const int i = j + 1;
    const LD kl = op.face[i - 1];
    const LD kr = i < m - 1 ? static_cast<LD>(op.face[i]) : 0.0L;
    const LD a = j > 0 ? kl : 0.0L;  // coupling to the pinned u_0 drops out
    const LD bb = -(kl + kr);
    const LD denom = j > 0 ? bb - a * c[j - 1] : bb;
    if (denom == 0.0L || !std::isfinite(static_cast<double>(denom))) {
      throw DiscretizationError("zero pivot in the dual solve beyond the constant kernel");
    }
    const LD bi = static_cast<LD>(op.mass[i]) * rhs[i];
    c[j] = kr / denom;
    d[j] = (bi - (j > 0 ? a * d[j - 1] : 0.0L)) / denom;
  }
  LDVec u(m, 0.0L);
  for (int j = k - 1; j >= 0; --j) u[j + 1] = d[j] - (j < k - 1 ? c[j] * u[j + 2] : 0.0L);
  LD um = 0.0L;
  for (int i = 0; i < m; ++i) um += static_cast<LD>(op.weights[i]) * u[i];
  for (auto& v : u) v -= um;

  const LDVec lu = apply_ld(op, u);
  LD res = 0.0L, fmax = 0.0L;
  for (int i = 0; i < m; ++i) {
    res = std::max(res, std::abs(lu[i] - rhs[i]));
    fmax = std::max(fmax, static_cast<LD>(std::abs(f[i])));
  }
  if (res > 1e-10L * std::max(fmax, static_cast<LD>(1e-300))) {
    std::ostringstream os;
    os << "dual solve residual " << static_cast<double>(res) << " exceeds 1e-10*|f|";
    throw DiscretizationError(os.str());
  }
  (void)p;
  return u;
}

// Simpson weights (odd m) or trapezoid, normalized against ρ.
std::vector<double> simpson_masses(const Grid1D& g, const std::vector<double>& rho) {
  const int m = g.m;
  std::vector<double> w(m);
  const double h = g.h();
  if (m % 2 == 1) {
    for (int i = 0; i < m; ++i) w[i] = (i == 0 || i == m - 1) ? h / 3.0 : (i % 2 == 1 ? 4.0 * h / 3.0 : 2.0 * h / 3.0);
  } else {
    for (int i = 0; i < m; ++i) w[i] = (i == 0 || i == m - 1) ? 0.5 * h : h;
  }
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    w[i] *= rho[i];
    s += w[i];
  }
  for (auto& v : w) v /= s;
  return w;
}

// Central first and second differences; Neumann ends: u′ = 0, u″ = 2(u_1−u_0)/h².
void differences(const Grid1D& g, const GridFunction& u, std::vector<double>& du, std::vector<double>& ddu) {
  const int m = g.m;
  const double h = g.h();
  du.assign(m, 0.0);
  ddu.assign(m, 0.0);
  for (int i = 1; i < m - 1; ++i) {
    du[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
    ddu[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
  }
  ddu[0] = 2.0 * (u[1] - u[0]) / (h * h);
  ddu[m - 1] = 2.0 * (u[m - 2] - u[m - 1]) / (h * h);
}

// Second-order one-sided differences at the ends, central inside.
std::vector<double> first_difference(const Grid1D& g, const GridFunction& v) {
  const int m = g.m;
  const double h = g.h();
  std::vector<double> d(m);
  for (int i = 1; i < m - 1; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  d[m - 1] = (3.0 * v[m - 1] - 4.0 * v[m - 2] + v[m - 3]) / (2.0 * h);
  return d;
}

}  // namespace

void Grid1D::validate() const {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw InvalidParametersError("grid needs finite a < b");
  if (m < 16) throw InvalidParametersError("grid needs at least 16 nodes");
}

GridFunction sample_on(const ScalarField& f, const Grid1D& g) {
  GridFunction out(g.m);
  for (int i = 0; i < g.m; ++i) out[i] = f(point({g.x(i)}));
  return out;
}

void DualProblem::validate(const Grid1D& g) const {
  g.validate();
  if (phi.dim() != 1 || f.dim() != 1) throw InvalidParametersError("dual problems are one-dimensional");
  const GuardResult gr = case1_guard({1, beta, r});
  if (!gr.valid) {
    std::ostringstream os;
    os << "dual problem: beta=" << beta << ", r=" << r << " fails the guard (threshold " << gr.threshold << ")";
    throw InvalidParametersError(os.str());
  }
  if (!(beta > 2.0 * r)) throw InvalidParametersError("dual problem needs beta > 2r");
  for (int i = 0; i < g.m; ++i) {
    if (!(phi(point({g.x(i)})) > 0.0)) throw InvalidParametersError("phi must be positive on the grid");
  }
}

GridFunction DiscreteOperator::apply(const GridFunction& u) const {
  LDVec v(u.begin(), u.end());
  const LDVec r = apply_ld(*this, v);
  return GridFunction(r.begin(), r.end());
}

double DiscreteOperator::inner(const GridFunction& u, const GridFunction& v) const {
  LD s = 0.0L;
  for (std::size_t i = 0; i < u.size(); ++i) s += static_cast<LD>(weights[i]) * u[i] * v[i];
  return static_cast<double>(s);
}

double DiscreteOperator::mean(const GridFunction& u) const {
  LD s = 0.0L;
  for (std::size_t i = 0; i < u.size(); ++i) s += static_cast<LD>(weights[i]) * u[i];
  return static_cast<double>(s);
}

DiscreteOperator build_operator(const DualProblem& p, const Grid1D& g) {
  p.validate(g);
  const int m = g.m;
  const double h = g.h();
  DiscreteOperator op;
  op.grid = g;
  op.lower.assign(m, 0.0);
  op.diag.assign(m, 0.0);
  op.upper.assign(m, 0.0);
  op.weights.assign(m, 0.0);
  std::vector<double> rho(m);
  op.face.assign(m - 1, 0.0);
  op.mass.assign(m, 0.0);
  for (int i = 0; i < m; ++i) rho[i] = std::pow(p.phi(point({g.x(i)})), -p.beta);
  for (int i = 0; i < m - 1; ++i) {
    const double xm = 0.5 * (g.x(i) + g.x(i + 1));
    op.face[i] = std::pow(p.phi(point({xm})), p.r - p.beta) / h;
  }
  double tot = 0.0;
  for (int i = 0; i < m; ++i) {
    // half cells at the ends: the ghost reflection in flux form
    op.mass[i] = ((i == 0 || i == m - 1) ? 0.5 * h : h) * rho[i];
    tot += op.mass[i];
  }
  for (int i = 0; i < m; ++i) {
    op.weights[i] = op.mass[i] / tot;
    op.lower[i] = i > 0 ? op.face[i - 1] / op.mass[i] : 0.0;
    op.upper[i] = i < m - 1 ? op.face[i] / op.mass[i] : 0.0;
    op.diag[i] = -(op.lower[i] + op.upper[i]);
  }
  return op;
}

GridFunction solve_dual(const DualProblem& p, const Grid1D& g) {
  const DiscreteOperator op = build_operator(p, g);
  const LDVec u = solve_ld(p, g, op, sample_on(p.f, g));
  return GridFunction(u.begin(), u.end());
}

double check_ibp(const DualProblem& p, const Grid1D& g, const GridFunction& u, const GridFunction& v) {
  p.validate(g);
  if (static_cast<int>(u.size()) != g.m || static_cast<int>(v.size()) != g.m) {
    throw InvalidParametersError("grid function length differs from the grid");
  }
  const NodeData nd = node_data(p.phi, g);
  const DiscreteOperator op = build_operator(p, g);  // for the masses
  std::vector<double> du, ddu;
  differences(g, u, du, ddu);
  const std::vector<double> dv = first_difference(g, v);
  LD a = 0.0L, b = 0.0L;
  for (int i = 0; i < g.m; ++i) {
    const double pr = std::pow(nd.phi[i], p.r);
    const double lu = pr * ddu[i] - (p.beta - p.r) * (pr / nd.phi[i]) * nd.dphi[i] * du[i];
    a += static_cast<LD>(op.weights[i]) * v[i] * lu;
    b += static_cast<LD>(op.weights[i]) * du[i] * dv[i] * pr;
  }
  return static_cast<double>(std::abs(a + b));
}

Decomposition check_decomposition(const DualProblem& p, const Grid1D& g) {
  const DiscreteOperator op = build_operator(p, g);
  const GridFunction f = sample_on(p.f, g);
  const LDVec uld = solve_ld(p, g, op, f);
  const GridFunction u(uld.begin(), uld.end());
  const NodeData nd = node_data(p.phi, g);
  std::vector<double> du, ddu;
  differences(g, u, du, ddu);

  const double beta = p.beta, r = p.r;
  const double mf = op.mean(f);
  LD t1 = 0, t2 = 0, t3 = 0, t4 = 0, var = 0, chain = 0;
  double excess = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.m; ++i) {
    const Vector x = point({g.x(i)});
    const double ph = nd.phi[i];
    const double fp = eval_grad(p.f, x)(0);
    const double gp = fp * std::pow(ph, 1.0 - r) + (1.0 - r) * f[i] * std::pow(ph, -r) * nd.dphi[i];
    const double w2 = std::pow(ph, 2.0 * r - 1.0);
    const LD w = op.weights[i];
    t1 += w * (-2.0 * (beta - r) * du[i] * gp * w2);
    t2 += w * (-(beta - r) * (beta - r) * nd.ddphi[i] * du[i] * du[i] * w2);
    t3 += w * (-(beta - 1.0) * ddu[i] * ddu[i] * std::pow(ph, 2.0 * r));
    t4 += w * (-2.0 * (r - 1.0) * mf * std::pow(ph, r) * ddu[i]);
    var += w * (f[i] - mf) * (f[i] - mf);
    if (nd.ddphi[i] > 0.0) {
      chain += w * gp * gp / nd.ddphi[i] * w2;
      const double lhs_pt = -2.0 * (beta - r) * du[i] * gp - (beta - r) * (beta - r) * nd.ddphi[i] * du[i] * du[i];
      const double rhs_pt = gp * gp / nd.ddphi[i];
      excess = std::max(excess, (lhs_pt - rhs_pt) / (1.0 + std::abs(rhs_pt)));
    }
  }
  Decomposition d;
  d.terms = {{"T1=-2(beta-r)int u'g'phi^(2r-1)", static_cast<double>(t1)},
             {"T2=-(beta-r)^2 int phi'' u'^2 phi^(2r-1)", static_cast<double>(t2)},
             {"T3=-(beta-1) int u''^2 phi^(2r)", static_cast<double>(t3)},
             {"T4=-2(r-1)mu(f) int phi^r u''", static_cast<double>(t4)}};
  d.lhs = static_cast<double>((beta - 2.0 * r + 1.0) * var);
  d.residual = static_cast<double>(std::abs(t1 + t2 + t3 + t4 - (beta - 2.0 * r + 1.0) * var));
  d.chain_bound = static_cast<double>(chain) + (1.0 - r) * (1.0 - r) * mf * mf / (beta - 1.0);
  d.pointwise_excess = excess;
  return d;
}

double variance_from_dual(const DualProblem& p, const Grid1D& g) {
  const DiscreteOperator op = build_operator(p, g);
  const GridFunction f = sample_on(p.f, g);
  const LDVec u = solve_ld(p, g, op, f);
  const LDVec lu = apply_ld(op, u);
  std::vector<double> rho(g.m);
  for (int i = 0; i < g.m; ++i) rho[i] = std::pow(p.phi(point({g.x(i)})), -p.beta);
  const std::vector<double> w = simpson_masses(g, rho);
  LD mf = 0.0L;
  for (int i = 0; i < g.m; ++i) mf += static_cast<LD>(w[i]) * f[i];
  const LD alpha = dual_alpha(p.beta, p.r);
  LD a = 0.0L, b = 0.0L;
  for (int i = 0; i < g.m; ++i) {
    a += static_cast<LD>(w[i]) * (f[i] - mf) * lu[i];
    b += static_cast<LD>(w[i]) * lu[i] * lu[i];
  }
  return static_cast<double>((1.0L + alpha) * a - alpha * b);
}

RefinementStudy refine_decomposition(const DualProblem& p, double a, double b, const std::vector<int>& ms) {
  RefinementStudy s;
  for (int m : ms) {
    Grid1D g{a, b, m};
    s.rows.push_back({m, g.h(), check_decomposition(p, g)});
  }
  for (std::size_t k = 1; k < s.rows.size(); ++k) {
    const double r0 = s.rows[k - 1].d.residual, r1 = s.rows[k].d.residual;
    s.orders.push_back(std::log(r0 / r1) / std::log(s.rows[k - 1].h / s.rows[k].h));
  }
  return s;
}

}  // namespace varineq
