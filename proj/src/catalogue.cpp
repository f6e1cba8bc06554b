#include "varineq/catalogue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace varineq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Val {
  double v = 0.0;
  double e = 0.0;
};

Val as_val(const IntegralEstimate& est) { return {est.value, est.error_bound}; }

Vector grad_of(const TestFunction& t, const Vector& x) {
  return t.f.has_gradient() ? t.f.gradient_fn()(x) : eval_grad(t.f, x);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

[[noreturn]] void guard_fail(const std::string& tag, const ParamTriple& p, const std::string& why) {
  std::ostringstream os;
  os << tag << ": parameters (n=" << p.n << ", beta=" << p.beta << ", r=" << p.r << ") rejected: " << why;
  throw InvalidParametersError(os.str());
}

double total_err(double lhs, double lhs_err, double rhs, double rhs_err) {
  return lhs_err + rhs_err + 1e-12 * (std::abs(lhs) + std::abs(rhs));
}

void set_main(InequalityReport& r, Val lhs, Val rhs) {
  r.lhs = lhs.v;
  r.rhs = rhs.v;
  r.margin = rhs.v - lhs.v;
  r.err = total_err(lhs.v, lhs.e, rhs.v, rhs.e);
  r.status = classify(r.margin, r.err);
}

void add_part(InequalityReport& r, const std::string& name, Val lhs, Val rhs) {
  ReportPart p;
  p.name = name;
  p.lhs = lhs.v;
  p.rhs = rhs.v;
  p.margin = rhs.v - lhs.v;
  p.err = total_err(lhs.v, lhs.e, rhs.v, rhs.e);
  p.status = classify(p.margin, p.err);
  r.parts.push_back(p);
  r.status = worst(r.status, p.status);
}

// Integrands that cancel to rounding noise (e.g. ∇g ≡ 0) never meet a
// relative tolerance; accept the estimate when its absolute error is at
// noise level.
Val integrate_or_noise(const WeightedMeasure& mu, const IntegrandND& F, const QuadratureSpec& spec, double extra) {
  try {
    return as_val(mu.integrate(F, spec, extra));
  } catch (const NonConvergentError& e) {
    if (e.best().error_bound <= 1e-14) return as_val(e.best());
    throw;
  }
}

// Evaluation context shared by the tag handlers.
struct Ctx {
  const Scenario& s;
  const WeightedMeasure& mu;
  const ScalarField& phi;
  const QuadratureSpec& spec;
  int n;
  double beta;
  double r;

  Val E(const IntegrandND& F, double extra = 0.0) const { return integrate_or_noise(mu, F, spec, extra); }

  Val mean() const {
    const auto& f = s.f.f;
    return E([&f](const Vector& x) { return f(x); });
  }
  Val var() const {
    const auto& f = s.f.f;
    return as_val(variance(mu, [&f](const Vector& x) { return f(x); }, spec));
  }
};

void require_case(const Ctx& c, MeasureCase mc, const char* tag) {
  if (c.mu.measure_case() != mc) {
    std::ostringstream os;
    os << tag << " needs a " << to_string(mc) << " measure, got " << to_string(c.mu.measure_case());
    throw InvalidParametersError(os.str());
  }
}

// inf_c ∫(f−c)² w dμ at c* = ∫fw/∫w.
struct InfC {
  Val value;
  double c = 0.0;
};

InfC inf_c(const Ctx& c, const std::function<double(const Vector&)>& w, double extra) {
  const auto& f = c.s.f.f;
  const Val a = c.E(w, extra);
  const Val b = c.E([&](const Vector& x) { return f(x) * w(x); }, extra);
  const double cs = b.v / a.v;
  Val l = c.E(
      [&](const Vector& x) {
        const double d = f(x) - cs;
        return d * d * w(x);
      },
      extra);
  // c* enters only at second order
  const double dc = (b.e + std::abs(cs) * a.e) / a.v;
  l.e += a.v * dc * dc;
  return {l, cs};
}

// Weighted variance bounds thm1/thm2; sign = +1 for Case 1 (D²φ), −1 for Case 2 (−D²φ).
void weighted_bound(const Ctx& c, InequalityReport& rep, double sign) {
  const ParamTriple& p = c.s.params;
  const GuardResult g = sign > 0 ? case1_guard(p) : case2_guard(p);
  if (!g.valid) guard_fail(rep.equation_tag, p, "beta must exceed " + fmt(g.threshold));
  const double r = c.r;
  const auto& tf = c.s.f;
  const Val m = c.mean();
  const Val v = c.var();
  // ∇g·φ^{r−1/2} = φ^{−1/2}(φ∇f + (1−r)f∇φ)
  const Val I = c.E(
      [&](const Vector& x) {
        const FieldProbe pr = probe(c.phi, x, true);
        const Vector w = pr.value * grad_of(tf, x) + (1.0 - r) * tf.f(x) * pr.grad;
        return hess_inv_quadform(sign * pr.hess, w) / pr.value;
      },
      (sign < 0 && r != 1.0) ? -1.0 : 0.0);
  const double coef = sign > 0 ? c.beta - 2.0 * r + 1.0 : c.beta + 2.0 * r - 1.0;
  const double k = (1.0 - r) * (1.0 - r) / g.constant;
  set_main(rep, {coef * v.v, std::abs(coef) * v.e}, {I.v + k * m.v * m.v, I.e + k * 2.0 * std::abs(m.v) * m.e + k * m.e * m.e});
  rep.meta[sign > 0 ? "A" : "B"] = g.constant;
  rep.meta["threshold"] = g.threshold;
}

// bl-dim-1 / bl-dim-2: g = φf, constant n/(β∓n)
void bl_dimensional(const Ctx& c, InequalityReport& rep, double sign) {
  const auto& tf = c.s.f;
  const double n = c.n;
  const Val m = c.mean();
  const Val v = c.var();
  const Val I = c.E(
      [&](const Vector& x) {
        const FieldProbe pr = probe(c.phi, x, true);
        const Vector w = pr.value * grad_of(tf, x) + tf.f(x) * pr.grad;
        return hess_inv_quadform(sign * pr.hess, w) / pr.value;
      },
      sign < 0 ? -1.0 : 0.0);
  const double coef = sign > 0 ? c.beta + 1.0 : c.beta - 1.0;
  const double k = sign > 0 ? n / (c.beta - n) : n / (n + c.beta);
  set_main(rep, {coef * v.v, std::abs(coef) * v.e}, {I.v + k * m.v * m.v, I.e + k * 2.0 * std::abs(m.v) * m.e + k * m.e * m.e});
}

IntegrandND weighted_quad(const Ctx& c, double sign, double phi_power) {
  const auto& tf = c.s.f;
  return [&c, &tf, sign, phi_power](const Vector& x) {
    const FieldProbe pr = probe(c.phi, x, true);
    const double q = hess_inv_quadform(sign * pr.hess, grad_of(tf, x));
    return phi_power == 0.0 ? q : q * std::pow(pr.value, phi_power);
  };
}

double convexity_of(const Ctx& c) {
  if (c.s.convexity > 0.0) return c.s.convexity;
  const std::string& fam = c.mu.family();
  if (fam == "cauchy" || fam == "halfsphere") return 2.0;
  throw InvalidParametersError("scenario '" + c.s.id + "' needs an explicit convexity constant");
}

double phi_inv(const Ctx& c, const Vector& x) { return 1.0 / c.phi(x); }

Val grad_sq_weighted(const Ctx& c, double phi_power, double extra) {
  const auto& tf = c.s.f;
  return c.E(
      [&](const Vector& x) {
        const double g2 = grad_of(tf, x).squaredNorm();
        return phi_power == 0.0 ? g2 : g2 * std::pow(c.phi(x), phi_power);
      },
      extra);
}

double bobkov_ledoux_constant(double beta) {
  const double a = std::sqrt(1.0 + 2.0 / (beta - 1.0)) + std::sqrt(2.0 / (beta + 1.0));
  return a * a;
}

void moments_power(const Ctx& c, double p, Val& out, double extra) {
  out = c.E([&c, p](const Vector& x) { return std::pow(c.phi(x), p); }, extra);
}

double log_prod(int n, double beta, double sign) {
  double s = 0.0;
  for (int i = 1; i <= n; ++i) s += std::log(beta + sign * i);
  return s;
}

bool is_finite_bound(const IntegralEstimate& e) { return std::isfinite(e.value) && e.value > 0.0; }

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::kHolds:
      return "holds";
    case Status::kViolated:
      return "violated";
    case Status::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

Status classify(double margin, double err) {
  const double band = err + 10.0 * err;
  if (!std::isfinite(margin) || !std::isfinite(err)) return Status::kInconclusive;
  if (margin < -band) return Status::kViolated;
  if (std::abs(margin) <= band) return Status::kInconclusive;
  return Status::kHolds;
}

Status worst(Status a, Status b) {
  auto rank = [](Status s) { return s == Status::kViolated ? 2 : (s == Status::kInconclusive ? 1 : 0); };
  return rank(a) >= rank(b) ? a : b;
}

const std::vector<std::string>& registered_tags() {
  static const std::vector<std::string> tags = {
      "thm1",   "thm2",           "bl-dim-1", "bl-dim-2", "bl-classic",     "rev-holder-1", "psi-3pt",
      "rev-holder-2", "psibar-3pt", "cor6",   "thm8",     "rev-weighted-1", "thm9",         "rev-weighted-2",
      "prop10", "prop11",         "thm12",    "cor14",    "thm15",          "cor16",        "chi-n"};
  return tags;
}

IntegralEstimate power_mass(const Potential& phi, MeasureCase c, double beta, const QuadratureSpec& spec) {
  NdHints h;
  h.kinks = phi.field.kinks();
  const ScalarField& f = phi.field;
  const DomainSpec& d = phi.domain;
  if (c == MeasureCase::kCase1) {
    return integrate_nd(
        [&f, &d, beta](const Vector& x) {
          if (!d.contains(x)) return 0.0;
          const double v = f(x);
          if (!(v > 0.0)) throw DomainError("case 1 potential is not positive");
          return std::pow(v, -beta);
        },
        d, spec, h);
  }
  if (c != MeasureCase::kCase2) throw InvalidParametersError("power_mass needs a case 1 or case 2 potential");
  if (!d.bounded()) throw InvalidParametersError("case 2 potential needs a bounded domain");
  if (phi.vanishes_on_boundary) {
    if (beta <= -1.0) throw NonIntegrableError("phi^beta is not integrable for beta <= -1");
    h.boundary_power = beta;
  }
  return integrate_nd(
      [&f, &d, beta](const Vector& x) {
        if (!d.contains(x)) return 0.0;
        const double v = f(x);
        return v > 0.0 ? std::pow(v, beta) : 0.0;
      },
      d, spec, h);
}

double psi_big(const Potential& phi, double beta, const QuadratureSpec& spec) {
  const int n = phi.domain.dim;
  if (!(beta > n)) throw RangeError("Psi needs beta > n");
  const IntegralEstimate m = power_mass(phi, MeasureCase::kCase1, beta, spec);
  if (!is_finite_bound(m)) throw RangeError("integral of phi^-beta is not finite and positive");
  return log_prod(n, beta, -1.0) + std::log(m.value);
}

double psi_bar(const Potential& phi, double beta, const QuadratureSpec& spec) {
  const int n = phi.domain.dim;
  if (!(beta > -1.0)) throw RangeError("Psi-bar needs beta > -1");
  const IntegralEstimate m = power_mass(phi, MeasureCase::kCase2, beta, spec);
  if (!is_finite_bound(m)) throw RangeError("integral of phi^beta is not finite and positive");
  return log_prod(n, beta, +1.0) + std::log(m.value);
}

double phi_case1(const Potential& phi, double beta, const QuadratureSpec& spec) {
  const int n = phi.domain.dim;
  if (!(beta > n + 1)) throw RangeError("Phi needs beta > n+1");
  const IntegralEstimate m = power_mass(phi, MeasureCase::kCase1, beta, spec);
  if (!is_finite_bound(m)) throw RangeError("integral of phi^-beta is not finite and positive");
  double out = std::log((beta - 1.0) * m.value);
  if (n > 1) {
    // plus sign: with it Φ'' ≤ 0 is exactly ψ'' ≤ n(β−2)/((β−1)²(β−n−1))
    const double a = beta - 1.0, b = beta - n - 1.0;
    out += (n - 1.0) / n * (a * std::log(a) - b * std::log(b));
  }
  return out;
}

double phi_case2(const Potential& phi, double beta, const QuadratureSpec& spec) {
  const int n = phi.domain.dim;
  if (!(beta > -1.0)) throw RangeError("Phi-bar needs beta > -1");
  const IntegralEstimate m = power_mass(phi, MeasureCase::kCase2, beta, spec);
  if (!is_finite_bound(m)) throw RangeError("integral of phi^beta is not finite and positive");
  double out = std::log((beta + 1.0) * m.value);
  if (n > 1) {
    const double a = beta + 1.0, b = beta + n + 1.0;
    out -= (n - 1.0) / n * (a * std::log(a) - b * std::log(b));
  }
  return out;
}

InequalityReport verify(const Scenario& s) {
  const WeightedMeasure& mu = s.measure;
  const ParamTriple& p = s.params;
  const std::string& tag = s.equation_tag;
  if (std::find(registered_tags().begin(), registered_tags().end(), tag) == registered_tags().end()) {
    throw InvalidParametersError("unknown equation tag '" + tag + "'");
  }
  s.spec.validate();
  if (tag != "chi-n" && p.n != mu.dim()) guard_fail(tag, p, "n differs from the measure dimension");
  const MeasureCase mc = mu.measure_case();
  if ((mc == MeasureCase::kCase1 || mc == MeasureCase::kCase2) && p.beta != mu.beta()) {
    guard_fail(tag, p, "beta differs from the measure exponent " + fmt(mu.beta()));
  }
  if (s.f.f.dim() != mu.dim()) guard_fail(tag, p, "test function dimension differs from the measure");

  Ctx c{s, mu, mu.field(), s.spec, p.n, p.beta, p.r};
  InequalityReport rep;
  rep.id = s.id;
  rep.equation_tag = tag;
  rep.params = p;
  rep.meta["family"] = mu.family();
  rep.meta["measure_case"] = to_string(mc);
  rep.meta["test_function"] = s.f.name;
  const double n = p.n, beta = p.beta, r = p.r;

  if (tag == "thm1") {
    require_case(c, MeasureCase::kCase1, "thm1");
    weighted_bound(c, rep, +1.0);
  } else if (tag == "thm2") {
    require_case(c, MeasureCase::kCase2, "thm2");
    weighted_bound(c, rep, -1.0);
  } else if (tag == "bl-dim-1") {
    require_case(c, MeasureCase::kCase1, "bl-dim-1");
    if (!(beta > n)) guard_fail(tag, p, "beta must exceed n");
    bl_dimensional(c, rep, +1.0);
  } else if (tag == "bl-dim-2") {
    require_case(c, MeasureCase::kCase2, "bl-dim-2");
    if (!(beta >= 0.0)) guard_fail(tag, p, "beta must be nonnegative");
    bl_dimensional(c, rep, -1.0);
  } else if (tag == "bl-classic") {
    require_case(c, MeasureCase::kLogConcave, "bl-classic");
    set_main(rep, c.var(), c.E(weighted_quad(c, +1.0, 0.0)));
  } else if (tag == "rev-holder-1") {
    require_case(c, MeasureCase::kCase1, "rev-holder-1");
    const GuardResult g = case1_guard(p);
    if (!g.valid) guard_fail(tag, p, "beta must exceed " + fmt(g.threshold));
    const double K = 1.0 + (1.0 - r) * (1.0 - r) / ((beta - 2.0 * r + 1.0) * g.constant);
    Val a, b;
    moments_power(c, 2.0 * r - 2.0, a, 0.0);
    moments_power(c, r - 1.0, b, 0.0);
    set_main(rep, a, {K * b.v * b.v, K * (2.0 * std::abs(b.v) * b.e + b.e * b.e)});
    rep.meta["K"] = K;
    rep.meta["normalization"] = "both sides divided by (integral of phi^-beta)^2";
  } else if (tag == "rev-holder-2") {
    require_case(c, MeasureCase::kCase2, "rev-holder-2");
    const GuardResult g = case2_guard(p);
    if (!g.valid) guard_fail(tag, p, "beta must exceed " + fmt(g.threshold));
    if (!(beta > 1.0 - 2.0 * r)) guard_fail(tag, p, "beta must exceed 1-2r");
    const double K = 1.0 + (1.0 - r) * (1.0 - r) / ((beta + 2.0 * r - 1.0) * g.constant);
    Val a, b;
    moments_power(c, 2.0 * r - 2.0, a, 2.0 * r - 2.0);
    moments_power(c, r - 1.0, b, r - 1.0);
    set_main(rep, a, {K * b.v * b.v, K * (2.0 * std::abs(b.v) * b.e + b.e * b.e)});
    rep.meta["K"] = K;
    rep.meta["normalization"] = "both sides divided by (integral of phi^beta)^2";
  } else if (tag == "psi-3pt" || tag == "psibar-3pt") {
    const bool one = tag == "psi-3pt";
    require_case(c, one ? MeasureCase::kCase1 : MeasureCase::kCase2, tag.c_str());
    if (one && !(beta > n)) guard_fail(tag, p, "beta must exceed n");
    if (!one && !(beta > -1.0)) guard_fail(tag, p, "beta must exceed -1");
    const MeasureCase pc = one ? MeasureCase::kCase1 : MeasureCase::kCase2;
    double val[3], rel[3];
    for (int k = 0; k < 3; ++k) {
      const IntegralEstimate m = power_mass(mu.potential(), pc, beta + k, s.spec);
      if (!is_finite_bound(m)) throw NonIntegrableError("power integral is not finite");
      val[k] = log_prod(p.n, beta + k, one ? -1.0 : 1.0) + std::log(m.value);
      rel[k] = m.error_bound / m.value;
    }
    set_main(rep, {val[0] + val[2], rel[0] + rel[2]}, {2.0 * val[1], 2.0 * rel[1]});
    rep.meta["second_difference"] = val[0] + val[2] - 2.0 * val[1];
  } else if (tag == "cor6") {
    require_case(c, MeasureCase::kLogConcave, "cor6");
    const ScalarField& V = mu.field();
    set_main(rep, as_val(variance(mu, [&V](const Vector& x) { return V(x); }, s.spec)), {n, 0.0});
    rep.meta["estimator"] = mu.integrate([](const Vector&) { return 0.0; }, s.spec).method;
  } else if (tag == "thm8") {
    require_case(c, MeasureCase::kCase1, "thm8");
    if (!(beta >= n + 1.0)) guard_fail(tag, p, "beta must be at least n+1");
    const Val I = c.E(weighted_quad(c, +1.0, 1.0));
    set_main(rep, c.var(), {I.v / (beta - 1.0), I.e / (beta - 1.0)});
  } else if (tag == "rev-weighted-1") {
    require_case(c, MeasureCase::kCase1, "rev-weighted-1");
    if (!(beta >= n)) guard_fail(tag, p, "beta must be at least n");
    const InfC l = inf_c(c, [&c](const Vector& x) { return phi_inv(c, x); }, 0.0);
    const Val I = c.E(weighted_quad(c, +1.0, 0.0));
    set_main(rep, l.value, {I.v / beta, I.e / beta});
    rep.meta["c_star"] = l.c;
    rep.meta["asserted_only"] = beta < n + 1.0;
  } else if (tag == "thm9") {
    require_case(c, MeasureCase::kCase2, "thm9");
    if (!(beta > -1.0)) guard_fail(tag, p, "beta must exceed -1");
    const Val I = c.E(weighted_quad(c, -1.0, 1.0), 1.0);
    set_main(rep, c.var(), {I.v / (beta + 1.0), I.e / (beta + 1.0)});
  } else if (tag == "rev-weighted-2") {
    require_case(c, MeasureCase::kCase2, "rev-weighted-2");
    if (!(beta > 0.0)) guard_fail(tag, p, "beta must be positive");
    const InfC l = inf_c(c, [&c](const Vector& x) { return phi_inv(c, x); }, -1.0);
    const Val I = c.E(weighted_quad(c, -1.0, 0.0));
    set_main(rep, l.value, {I.v / beta, I.e / beta});
    rep.meta["c_star"] = l.c;
  } else if (tag == "prop10") {
    require_case(c, MeasureCase::kLogConcave, "prop10");
    if (!(beta >= n + 1.0)) guard_fail(tag, p, "beta must be at least n+1");
    const ScalarField& V = mu.field();
    const auto& tf = s.f;
    const Val I = c.E([&](const Vector& x) {
      return hess_inv_quadform(modified_hessian(V, x, beta), grad_of(tf, x));
    });
    const double k = beta / (beta - 1.0);
    set_main(rep, c.var(), {k * I.v, k * I.e});
    // same right side through the rank-one inverse, when D²V is invertible
    try {
      const Val J = c.E([&](const Vector& x) {
        const FieldProbe pr = probe(V, x, true);
        const Vector gf = grad_of(tf, x);
        const Eigen::LLT<Matrix> llt(pr.hess);
        if (!is_positive_definite(pr.hess)) throw SingularHessianError("D2V singular");
        const Vector hv = llt.solve(pr.grad);
        const double t = hv.dot(gf);
        return hess_inv_quadform(pr.hess, gf) - t * t / (beta + hv.dot(pr.grad));
      });
      rep.meta["rhs_rank_one"] = k * J.v;
      rep.meta["rhs_rank_one_err"] = k * J.e;
    } catch (const SingularHessianError&) {
      rep.meta["rhs_rank_one"] = nullptr;
    }
  } else if (tag == "prop11") {
    require_case(c, MeasureCase::kLogConcave, "prop11");
    const std::string& fam = mu.family();
    if (fam != "gaussian" && fam != "laplace" && fam != "exp-power") {
      guard_fail(tag, p, "needs an exponential-power measure");
    }
    if (!(r >= 1.0 && r <= 2.0)) guard_fail(tag, p, "r must lie in [1,2]");
    const auto& tf = s.f;
    auto weight = [r](double t) {
      if (r == 1.0) return 1.0;
      const double a = std::abs(t);
      return std::pow(a, 2.0 - r) / (std::pow(a, r) + 2.0 * (r - 1.0));
    };
    const Val mid = c.E([&](const Vector& x) {
      const Vector g = grad_of(tf, x);
      double acc = 0.0;
      for (int i = 0; i < x.size(); ++i) acc += weight(x(i)) * g(i) * g(i);
      return 4.0 * acc;
    });
    const Val g2 = grad_sq_weighted(c, 0.0, 0.0);
    const double C = c_r(r);
    const Val v = c.var();
    const Val top{C * g2.v, C * g2.e};
    set_main(rep, v, top);
    add_part(rep, "variance<=weighted", v, mid);
    add_part(rep, "weighted<=C_r", mid, top);
    rep.meta["C_r"] = C;
  } else if (tag == "thm12" || tag == "cor14") {
    require_case(c, MeasureCase::kCase1, tag.c_str());
    if (tag == "cor14" && mu.family() != "cauchy") guard_fail(tag, p, "needs the Cauchy family");
    if (!(beta >= n + 1.0)) guard_fail(tag, p, "beta must be at least n+1");
    const double C = tag == "cor14" ? 2.0 : convexity_of(c);
    const Val I = grad_sq_weighted(c, 1.0, 0.0);
    const double k = 1.0 / (C * (beta - 1.0));
    set_main(rep, c.var(), {k * I.v, k * I.e});
    const InfC l = inf_c(c, [&c](const Vector& x) { return phi_inv(c, x); }, 0.0);
    const Val J = grad_sq_weighted(c, 0.0, 0.0);
    add_part(rep, "reverse-weighted", l.value, {J.v / (C * beta), J.e / (C * beta)});
    rep.meta["C"] = C;
    rep.meta["c_star"] = l.c;
    if (tag == "cor14") {
      const double bl = bobkov_ledoux_constant(beta);
      rep.meta["bobkov_ledoux_constant"] = bl;
      rep.meta["rhs_bobkov_ledoux"] = bl * k * I.v;
    }
  } else if (tag == "thm15" || tag == "cor16") {
    require_case(c, MeasureCase::kCase2, tag.c_str());
    if (tag == "cor16" && mu.family() != "halfsphere") guard_fail(tag, p, "needs the half-sphere family");
    if (!(beta > -1.0)) guard_fail(tag, p, "beta must exceed -1");
    const double C = tag == "cor16" ? 2.0 : convexity_of(c);
    const Val I = grad_sq_weighted(c, 1.0, 1.0);
    const double k = 1.0 / (C * (beta + 1.0));
    set_main(rep, c.var(), {k * I.v, k * I.e});
    if (beta > 0.0) {
      const InfC l = inf_c(c, [&c](const Vector& x) { return phi_inv(c, x); }, -1.0);
      const Val J = grad_sq_weighted(c, 0.0, 0.0);
      add_part(rep, "reverse-weighted", l.value, {J.v / (C * beta), J.e / (C * beta)});
      rep.meta["c_star"] = l.c;
    }
    rep.meta["C"] = C;
  } else if (tag == "chi-n") {
    if (mu.family() != "chi") guard_fail(tag, p, "needs the chi family");
    if (p.n < 1) guard_fail(tag, p, "n must be at least 1");
    const auto& tf = s.f;
    const Val v = c.var();
    const Val mid = c.E([&](const Vector& x) {
      const double g = grad_of(tf, x)(0);
      return (n + 1.0) * (n + 1.0) / n * g * g / (n + 1.0 + x(0) * x(0));
    });
    const Val top = c.E([&](const Vector& x) {
      const double g = grad_of(tf, x)(0);
      return g * g * (n + 3.0) / (n + x(0) * x(0));
    });
    set_main(rep, v, top);
    add_part(rep, "variance<=middle", v, mid);
    add_part(rep, "middle<=outer", mid, top);
  }
  return rep;
}

OptimizedMargin optimized_margin(const Scenario& s) {
  const WeightedMeasure& mu = s.measure;
  const ParamTriple& p = s.params;
  const MeasureCase mc = mu.measure_case();
  if (mc != MeasureCase::kCase1 && mc != MeasureCase::kCase2) {
    throw InvalidParametersError("optimized margin needs a case 1 or case 2 measure");
  }
  if (p.n != mu.dim() || p.beta != mu.beta()) throw InvalidParametersError("parameters differ from the measure");
  const bool one = mc == MeasureCase::kCase1;
  const GuardResult g = one ? case1_guard(p) : case2_guard(p);
  if (!g.valid) guard_fail("optimized", p, "beta must exceed " + fmt(g.threshold));
  const double beta = p.beta, r = p.r;
  const double coef = one ? beta - 2.0 * r + 1.0 : beta + 2.0 * r - 1.0;
  const double K = 1.0 + (1.0 - r) * (1.0 - r) / (coef * g.constant);

  Ctx c{s, mu, mu.field(), s.spec, p.n, beta, r};
  const auto& f = s.f.f;
  const double e1 = one ? 0.0 : r - 1.0;
  const double e2 = one ? 0.0 : 2.0 * r - 2.0;
  const Val m = c.mean();
  const Val m2 = c.E([&f](const Vector& x) { return f(x) * f(x); });
  Val a, b;
  moments_power(c, r - 1.0, a, e1);
  moments_power(c, 2.0 * r - 2.0, b, e2);
  const Val fa = c.E([&](const Vector& x) { return f(x) * std::pow(c.phi(x), r - 1.0); }, e1);

  OptimizedMargin out;
  out.R = m2.v - K * m.v * m.v;
  const double eR = m2.e + K * (2.0 * std::abs(m.v) * m.e + m.e * m.e);
  out.R_phi = b.v - K * a.v * a.v;
  const double eRp = b.e + K * (2.0 * std::abs(a.v) * a.e + a.e * a.e) + 1e-12 * (std::abs(b.v) + K * a.v * a.v);
  out.S = fa.v - K * m.v * a.v;
  const double eS = fa.e + K * (std::abs(m.v) * a.e + std::abs(a.v) * m.e);
  if (std::abs(out.R_phi) <= eRp) {
    throw DegenerateDenominatorError("R(phi^(r-1)) = " + fmt(out.R_phi) + " is within its error " + fmt(eRp));
  }

  // same right side as thm1/thm2, minus the mean term
  const double sign = one ? 1.0 : -1.0;
  const auto& tf = s.f;
  const Val I = c.E(
      [&](const Vector& x) {
        const FieldProbe pr = probe(c.phi, x, true);
        const Vector w = pr.value * grad_of(tf, x) + (1.0 - r) * tf.f(x) * pr.grad;
        return hess_inv_quadform(sign * pr.hess, w) / pr.value;
      },
      (!one && r != 1.0) ? -1.0 : 0.0);

  const double corr = out.S * out.S / out.R_phi;
  const double ecorr = 2.0 * std::abs(out.S) * eS / std::abs(out.R_phi) + corr * corr / (out.S * out.S + 1e-300) * eRp;
  const double scale = one ? 1.0 : coef;
  const double rhs_scale = one ? 1.0 / coef : 1.0;
  out.plain_lhs = scale * out.R;
  InequalityReport& rep = out.report;
  rep.id = s.id;
  rep.equation_tag = one ? "thm1-optimized" : "thm2-optimized";
  rep.params = p;
  set_main(rep, {scale * (out.R - corr), scale * (eR + ecorr)}, {rhs_scale * I.v, rhs_scale * I.e});
  rep.meta["R"] = out.R;
  rep.meta["S"] = out.S;
  rep.meta["R_phi"] = out.R_phi;
  rep.meta["plain_lhs"] = out.plain_lhs;
  rep.meta["plain_margin"] = rhs_scale * I.v - out.plain_lhs;
  rep.meta["optimized_lhs_ge_plain"] = rep.lhs >= out.plain_lhs - rep.err;
  rep.meta["test_function"] = s.f.name;
  return out;
}

PsiCurvature psi_curvature(const Potential& phi, double beta, double rel_step, const QuadratureSpec& spec) {
  const int n = phi.domain.dim;
  if (!(beta > n + 1.0)) throw RangeError("psi curvature needs beta > n+1");
  if (!(rel_step > 0.0)) throw InvalidParametersError("step must be positive");
  const double h = rel_step * beta;
  if (!(beta - h > n)) throw RangeError("beta - step leaves the integrability range");
  double psi[5];
  double rel = 0.0;
  const double offs[5] = {-h, -0.5 * h, 0.0, 0.5 * h, h};
  for (int k = 0; k < 5; ++k) {
    IntegralEstimate m;
    try {
      m = power_mass(phi, MeasureCase::kCase1, beta + offs[k], spec);
    } catch (const NonIntegrableError& e) {
      throw RangeError(std::string("phi^-beta near beta is not integrable: ") + e.what());
    }
    if (!is_finite_bound(m)) throw RangeError("integral of phi^-beta is not finite and positive");
    psi[k] = std::log(m.value);
    rel = std::max(rel, m.error_bound / m.value);
  }
  const double d_h = (psi[4] - 2.0 * psi[2] + psi[0]) / (h * h);
  const double d_h2 = (psi[3] - 2.0 * psi[2] + psi[1]) / (0.25 * h * h);
  PsiCurvature out;
  out.psi_dd = (4.0 * d_h2 - d_h) / 3.0;
  out.err = 68.0 * rel / (3.0 * h * h) + 1e-12 * std::abs(out.psi_dd);
  out.bound = n * (beta - 2.0) / ((beta - 1.0) * (beta - 1.0) * (beta - n - 1.0));

  const ScalarField& f = phi.field;
  const DomainSpec& d = phi.domain;
  NdHints hints;
  hints.kinks = f.kinks();
  try {
    const IntegralEstimate num = integrate_nd(
        [&f, &d, beta](const Vector& x) {
          if (!d.contains(x)) return 0.0;
          const FieldProbe pr = probe(f, x, true);
          return hess_inv_quadform(pr.hess, pr.grad) * std::pow(pr.value, -beta - 1.0);
        },
        d, spec, hints);
    const IntegralEstimate den = power_mass(phi, MeasureCase::kCase1, beta, spec);
    out.W = (beta - 1.0) * (beta - n - 1.0) / (n * (beta - 2.0)) * num.value / den.value;
    out.improved = out.W / (1.0 + out.W) * out.bound;
  } catch (const SingularHessianError&) {
    out.W = kInf;
    out.improved = out.bound;
  }
  return out;
}

InequalityReport phi_concavity(const Potential& phi, MeasureCase c, const std::vector<double>& betas, double dbeta,
                               const QuadratureSpec& spec) {
  if (c != MeasureCase::kCase1 && c != MeasureCase::kCase2) {
    throw InvalidParametersError("phi concavity needs a case 1 or case 2 potential");
  }
  if (!(dbeta > 0.0)) throw InvalidParametersError("dbeta must be positive");
  const bool one = c == MeasureCase::kCase1;
  const int n = phi.domain.dim;
  InequalityReport rep;
  rep.id = one ? "phi-concavity" : "phibar-concavity";
  rep.equation_tag = one ? "phi-concavity" : "phibar-concavity";
  rep.params.n = n;
  rep.lhs = -kInf;
  double err = 0.0;
  for (double b : betas) {
    if (one && !(b - dbeta > n + 1.0)) throw RangeError("grid point " + fmt(b) + " leaves beta > n+1");
    if (!one && !(b - dbeta > -1.0)) throw RangeError("grid point " + fmt(b) + " leaves beta > -1");
    double v[3];
    double rel = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double bk = b + (k - 1) * dbeta;
      const IntegralEstimate m = power_mass(phi, c, bk, spec);
      rel = std::max(rel, m.error_bound / m.value);
      v[k] = one ? phi_case1(phi, bk, spec) : phi_case2(phi, bk, spec);
    }
    const double dd = v[0] + v[2] - 2.0 * v[1];
    const double e = 4.0 * rel + 1e-13;
    ReportPart part;
    part.name = "beta=" + fmt(b);
    part.lhs = dd;
    part.rhs = 0.0;
    part.margin = -dd;
    part.err = e;
    part.status = classify(part.margin, e);
    rep.parts.push_back(part);
    if (dd > rep.lhs) {
      rep.lhs = dd;
      err = e;
    }
  }
  if (betas.empty()) rep.lhs = 0.0;
  rep.rhs = 0.0;
  rep.margin = -rep.lhs;
  rep.err = err;
  rep.status = classify(rep.margin, rep.err);
  for (const auto& part : rep.parts) rep.status = worst(rep.status, part.status);
  rep.meta["dbeta"] = dbeta;
  return rep;
}

TestFunction witness_function(const ScalarField& phi, double r, const Vector& z0) {
  if (z0.size() != phi.dim()) throw InvalidParametersError("z0 dimension differs from phi");
  const ScalarField ph = phi;
  const Vector z = z0;
  return make_test_function(
      "witness", phi.dim(),
      [ph, z, r](const Vector& x) {
        const FieldProbe pr = probe(ph, x, false);
        return pr.grad.dot(z) * std::pow(pr.value, r - 1.0);
      },
      [ph, z, r](const Vector& x) {
        const FieldProbe pr = probe(ph, x, true);
        const double pw = std::pow(pr.value, r - 1.0);
        const double dz = pr.grad.dot(z);
        Vector g = pw * (pr.hess * z) + (r - 1.0) * pw / pr.value * dz * pr.grad;
        return g;
      });
}

InequalityReport equality_witness(const WeightedMeasure& mu, const ParamTriple& p, const Vector& z0,
                                  const QuadratureSpec& spec) {
  const MeasureCase mc = mu.measure_case();
  if (mc != MeasureCase::kCase1 && mc != MeasureCase::kCase2) {
    throw InvalidParametersError("equality witness needs a case 1 or case 2 measure");
  }
  Scenario s{"witness", mc == MeasureCase::kCase1 ? "thm1" : "thm2", mu, p, witness_function(mu.field(), p.r, z0),
             spec, 0.0};
  InequalityReport rep = verify(s);
  rep.id = "equality-witness";
  std::vector<double> z(z0.data(), z0.data() + z0.size());
  rep.meta["z0"] = z;
  return rep;
}

PrekopaCheck prekopa_local_check(const ScalarField& phi, const ScalarField& g, const DomainSpec& domain, double beta,
                                 double eps, const QuadratureSpec& spec) {
  domain.validate();
  if (!domain.bounded()) throw InvalidParametersError("prekopa check needs a bounded domain");
  if (!(eps > 0.0)) throw InvalidParametersError("eps must be positive");
  const int n = domain.dim;
  if (phi.dim() != n || g.dim() != n) throw InvalidParametersError("field dimensions differ from the domain");
  if (!(beta > n)) throw InvalidParametersError("beta must exceed n");

  QuadratureSpec sp = spec;
  sp.tolerance = std::min(spec.tolerance, 1e-13);
  sp.nd_tolerance = std::min(spec.nd_tolerance, 1e-10);
  NdHints hints;
  hints.kinks = phi.kinks();

  // q(x) = ⟨(D²φ)⁻¹∇g,∇g⟩
  auto q = [&phi, &g](const Vector& x) {
    const FieldProbe pr = probe(phi, x, true);
    return hess_inv_quadform(pr.hess, eval_grad(g, x));
  };
  auto F = [&](double t, const Vector& x) {
    const double v = phi(x) + t * g(x) + 0.5 * t * t * q(x) + 0.5 * eps * (x.squaredNorm() + t * t);
    if (!(v > 0.0)) throw RangeError("phi_eps is not positive on the domain");
    return v;
  };
  auto in = [&domain](const Vector& x) { return domain.contains(x); };

  // path a: local formula at t = 0
  auto moment = [&](const std::function<double(const Vector&)>& w) {
    return integrate_nd(
        [&](const Vector& x) {
          if (!in(x)) return 0.0;
          const double f0 = F(0.0, x);
          return std::pow(f0, -beta) * w(x);
        },
        domain, sp, hints);
  };
  const IntegralEstimate I0 = moment([](const Vector&) { return 1.0; });
  const IntegralEstimate Ma = moment([&](const Vector& x) { return g(x) / F(0.0, x); });
  const IntegralEstimate Ma2 = moment([&](const Vector& x) {
    const double a = g(x) / F(0.0, x);
    return a * a;
  });
  const IntegralEstimate Mb = moment([&](const Vector& x) { return (q(x) + eps) / F(0.0, x); });
  const double Ea = Ma.value / I0.value, Ea2 = Ma2.value / I0.value, Eb = Mb.value / I0.value;
  const double Phi0 = std::pow(I0.value, -1.0 / (beta - n));
  const double pre = beta / (beta - n) * Phi0;
  PrekopaCheck out;
  out.second_deriv_a = pre * (Eb + n / (beta - n) * Ea * Ea - (beta + 1.0) * (Ea2 - Ea * Ea));
  const double rel0 = I0.error_bound / I0.value;
  out.err_a = pre * (Mb.error_bound / I0.value + (n / (beta - n) * 2.0 * std::abs(Ea) + (beta + 1.0) * 2.0 * std::abs(Ea)) *
                                                     Ma.error_bound / I0.value +
                     (beta + 1.0) * Ma2.error_bound / I0.value) +
              std::abs(out.second_deriv_a) * 3.0 * rel0 + 1e-12 * std::abs(out.second_deriv_a);

  // path b: second difference of t ↦ (∫φ_ε(t,·)^{−β})^{−1/(β−n)}
  double rel = rel0;
  auto Phi = [&](double t) {
    const IntegralEstimate m = integrate_nd(
        [&](const Vector& x) {
          if (!in(x)) return 0.0;
          return std::pow(F(t, x), -beta);
        },
        domain, sp, hints);
    rel = std::max(rel, m.error_bound / m.value);
    return std::pow(m.value, -1.0 / (beta - n));
  };
  const double h = 1e-2;
  const double p0 = Phi0;
  const double d1 = (Phi(h) - 2.0 * p0 + Phi(-h)) / (h * h);
  const double d2 = (Phi(0.5 * h) - 2.0 * p0 + Phi(-0.5 * h)) / (0.25 * h * h);
  out.second_deriv_b = (4.0 * d2 - d1) / 3.0;
  out.err_b = 68.0 / 3.0 * Phi0 * rel / ((beta - n) * h * h) + 16.0 * std::numeric_limits<double>::epsilon() * Phi0 / (h * h) +
              1e-12 * std::abs(out.second_deriv_b);
  return out;
}

BlLimitTable bl_limit_sweep(const Potential& V, const std::vector<double>& betas, const TestFunction& f,
                            const QuadratureSpec& spec) {
  const int n = V.domain.dim;
  const ScalarField& vf = V.field;
  BlLimitTable out;

  // probe a few points for positivity of 1 + V/β
  std::vector<Vector> probes;
  for (double rad : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    for (int i = 0; i < n; ++i) {
      for (double sgn : {-1.0, 1.0}) {
        Vector x = Vector::Zero(n);
        x(i) = sgn * rad;
        if (V.domain.contains(x)) probes.push_back(x);
      }
    }
  }

  auto rhs_integrand = [&vf, &f](double beta) {
    return [&vf, &f, beta](const Vector& x) {
      const FieldProbe pr = probe(vf, x, true);
      const double q = hess_inv_quadform(pr.hess, grad_of(f, x));
      return std::isfinite(beta) ? q * (1.0 + pr.value / beta) : q;
    };
  };
  const auto& ff = f.f;
  auto fval = [&ff](const Vector& x) { return ff(x); };

  {
    const WeightedMeasure mu = WeightedMeasure::log_concave(V, spec);
    const IntegralEstimate var = variance(mu, fval, spec);
    const IntegralEstimate rhs = mu.integrate(rhs_integrand(kInf), spec);
    out.classical.beta = kInf;
    out.classical.lhs = var.value;
    out.classical.rhs = rhs.value;
    out.classical.margin = rhs.value - var.value;
    out.classical.err = total_err(var.value, var.error_bound, rhs.value, rhs.error_bound);
  }

  std::vector<double> sorted = betas;
  std::sort(sorted.begin(), sorted.end());
  for (double beta : sorted) {
    if (!(beta >= n + 1.0)) throw RangeError("beta " + fmt(beta) + " is below n+1");
    for (const auto& x : probes) {
      if (!(1.0 + vf(x) / beta > 0.0)) throw RangeError("1 + V/beta is not positive at beta = " + fmt(beta));
    }
    ScalarField pf(n, [&vf, beta](const Vector& x) { return 1.0 + vf(x) / beta; });
    pf = pf.with_gradient([&vf, beta](const Vector& x) { return Vector(eval_grad(vf, x) / beta); })
             .with_hessian([&vf, beta](const Vector& x) { return Matrix(eval_hess(vf, x) / beta); })
             .with_kinks(vf.kinks());
    Potential pp{pf, V.domain, false, "1+V/beta"};
    WeightedMeasure mu = [&]() {
      try {
        return WeightedMeasure::case1(pp, beta, spec);
      } catch (const DomainError& e) {
        throw RangeError(std::string("1 + V/beta is not positive: ") + e.what());
      }
    }();
    const IntegralEstimate var = variance(mu, fval, spec);
    const IntegralEstimate rhs = mu.integrate(rhs_integrand(beta), spec);
    BlLimitRow row;
    row.beta = beta;
    row.lhs = var.value;
    row.rhs = beta / (beta - 1.0) * rhs.value;
    row.margin = row.rhs - row.lhs;
    row.err = total_err(row.lhs, var.error_bound, row.rhs, beta / (beta - 1.0) * rhs.error_bound);
    out.rows.push_back(row);
  }
  out.monotone = true;
  for (std::size_t k = 1; k < out.rows.size(); ++k) {
    const double prev = std::abs(out.rows[k - 1].margin - out.classical.margin);
    const double cur = std::abs(out.rows[k].margin - out.classical.margin);
    const double tol = 10.0 * (out.rows[k - 1].err + out.rows[k].err + 2.0 * out.classical.err);
    if (cur > prev + tol) out.monotone = false;
  }
  return out;
}

double c_r(double r) {
  if (!(r > 0.0 && r <= 2.0)) throw InvalidParametersError("C_r needs r in (0,2]");
  if (r == 2.0) return 2.0;  // 0^0 = 1
  return 4.0 / r * std::pow(2.0 - r, (2.0 - r) / r);
}

nlohmann::json to_json(const InequalityReport& r) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  };
  nlohmann::json j;
  j["id"] = r.id;
  j["equation_tag"] = r.equation_tag;
  j["params"] = {{"n", r.params.n}, {"beta", num(r.params.beta)}, {"r", num(r.params.r)}};
  j["lhs"] = num(r.lhs);
  j["rhs"] = num(r.rhs);
  j["margin"] = num(r.margin);
  j["err"] = num(r.err);
  j["status"] = to_string(r.status);
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& p : r.parts) {
    parts.push_back({{"name", p.name},
                     {"lhs", num(p.lhs)},
                     {"rhs", num(p.rhs)},
                     {"margin", num(p.margin)},
                     {"err", num(p.err)},
                     {"status", to_string(p.status)}});
  }
  j["parts"] = parts;
  j["meta"] = r.meta;
  return j;
}

}  // namespace varineq
