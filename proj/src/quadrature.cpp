#include "varineq/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "varineq/special.hpp"

namespace varineq {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

// 15-point Kronrod nodes on [0,1] (symmetric), Kronrod weights, and the
// weights of the embedded 7-point Gauss rule (at odd indices).
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Integrand value paired with an error bound already carried by that value
// (nonzero only when the value is itself an inner integral).
struct Sample {
  double v = 0.0;
  double e = 0.0;
};
using SampleFn = std::function<Sample(double)>;

struct Segment {
  int piece = 0;
  double a = 0.0, b = 0.0;
  double value = 0.0;
  double err = 0.0;    // Gauss–Kronrod estimate, floored at roundoff
  double floor = 0.0;  // roundoff part of err
  double inner = 0.0;  // carried error of the integrand values
  double resabs = 0.0;
};

Sample checked(const SampleFn& g, double u) {
  const Sample s = g(u);
  if (!std::isfinite(s.v) || !std::isfinite(s.e)) {
    std::ostringstream os;
    os << "integrand is not finite at a quadrature node";
    throw NonIntegrableError(os.str());
  }
  return s;
}

void gk15(const SampleFn& g, Segment& s) {
  const double c = 0.5 * (s.a + s.b);
  const double hl = 0.5 * (s.b - s.a);
  double fv1[7], fv2[7];
  const Sample fc = checked(g, c);
  double resg = fc.v * kWg[3];
  double resk = fc.v * kWgk[7];
  double resabs = std::abs(resk);
  double inner = kWgk[7] * std::abs(fc.e);
  for (int j = 0; j < 7; ++j) {
    const double dx = hl * kXgk[j];
    const Sample f1 = checked(g, c - dx);
    const Sample f2 = checked(g, c + dx);
    fv1[j] = f1.v;
    fv2[j] = f2.v;
    resk += kWgk[j] * (f1.v + f2.v);
    resabs += kWgk[j] * (std::abs(f1.v) + std::abs(f2.v));
    inner += kWgk[j] * (std::abs(f1.e) + std::abs(f2.e));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1.v + f2.v);
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc.v - reskh);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  const double ahl = std::abs(hl);
  resasc *= ahl;
  resabs *= ahl;
  double err = std::abs((resk - resg) * hl);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double roundoff = 50.0 * kEps * resabs;
  s.value = resk * hl;
  s.err = std::max(err, roundoff);
  s.floor = roundoff;
  s.inner = inner * ahl;
  s.resabs = resabs;
}

struct Totals {
  double value, err, floor, inner, resabs;
};

Totals total(const std::vector<Segment>& segs) {
  special::NeumaierSum v, e, fl, in, ra;
  for (const auto& s : segs) {
    v.add(s.value);
    e.add(s.err);
    fl.add(s.floor);
    in.add(s.inner);
    ra.add(s.resabs);
  }
  return {v.value(), e.value(), fl.value(), in.value(), ra.value()};
}

// Globally adaptive bisection over a set of (piece, interval) segments.
IntegralEstimate adapt(const std::vector<SampleFn>& pieces, std::vector<Segment> segs, double tol,
                       int max_sub) {
  for (auto& s : segs) gk15(pieces[s.piece], s);
  long nodes = 15L * static_cast<long>(segs.size());
  IntegralEstimate best;
  best.method = "gauss-kronrod";
  best.error_bound = kInf;
  auto cmp = [](const Segment& x, const Segment& y) { return x.err < y.err; };
  std::make_heap(segs.begin(), segs.end(), cmp);
  for (int iter = 0;; ++iter) {
    const Totals t = total(segs);
    const double reported = t.err + t.inner;
    if (reported <= best.error_bound) {
      best.value = t.value;
      best.error_bound = reported;
      best.node_count = nodes;
    }
    const double target = tol * std::max(std::abs(t.value), 1e-3 * t.resabs);
    if (t.err <= target || t.err <= 1.0000001 * t.floor) {
      best.node_count = nodes;
      return best;
    }
    if (iter >= max_sub) {
      best.node_count = nodes;
      std::ostringstream os;
      os << "adaptive quadrature did not reach tolerance " << tol << " in " << max_sub
         << " subdivisions (estimate " << best.value << " +/- " << best.error_bound << ")";
      throw NonConvergentError(os.str(), best);
    }
    std::pop_heap(segs.begin(), segs.end(), cmp);
    Segment worst = segs.back();
    segs.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) < 1e3 * kEps * std::max(std::abs(worst.a), std::abs(worst.b))) {
      best.node_count = nodes;
      throw NonConvergentError("adaptive quadrature stalled on an interval of machine width",
                               best);
    }
    Segment left = worst, right = worst;
    left.b = mid;
    right.a = mid;
    gk15(pieces[left.piece], left);
    gk15(pieces[right.piece], right);
    nodes += 30;
    segs.push_back(left);
    std::push_heap(segs.begin(), segs.end(), cmp);
    segs.push_back(right);
    std::push_heap(segs.begin(), segs.end(), cmp);
  }
}

bool non_integer(double a) { return std::abs(a - std::round(a)) > 1e-12; }

void require_power(double alpha) {
  if (!(alpha > -1.0)) {
    std::ostringstream os;
    os << "endpoint singularity of order " << alpha << " is not integrable";
    throw NonIntegrableError(os.str());
  }
}

// Core 1-D integrator over a Sample-valued integrand.
// `scale` stretches the compactification of infinite ranges: x = a + scale·t/(1−t²).
IntegralEstimate integrate_samples(const SampleFn& f, Interval dom, double tol, int max_sub,
                                   const EndpointHints& hints, double scale = 1.0) {
  if (std::isnan(dom.lo) || std::isnan(dom.hi) || !(dom.lo < dom.hi)) {
    throw InvalidParametersError("integration interval must satisfy lo < hi");
  }
  const bool lo_fin = std::isfinite(dom.lo);
  const bool hi_fin = std::isfinite(dom.hi);
  if (lo_fin && hints.lo_power != 0.0) require_power(hints.lo_power);
  if (hi_fin && hints.hi_power != 0.0) require_power(hints.hi_power);

  // Map to a variable s on a finite range; x(s) and dx/ds.
  std::function<double(double)> x_of;
  std::function<double(double)> jac;
  std::function<double(double)> s_of;
  double s_lo, s_hi;
  // Powers of the integrand at the ends of the s-range.
  double p_at_slo = 0.0, p_at_shi = 0.0;
  const double a = dom.lo, b = dom.hi;
  if (lo_fin && hi_fin) {
    x_of = [](double s) { return s; };
    jac = [](double) { return 1.0; };
    s_of = x_of;
    s_lo = a;
    s_hi = b;
    p_at_slo = hints.lo_power;
    p_at_shi = hints.hi_power;
  } else if (!lo_fin && !hi_fin) {
    x_of = [scale](double t) { return scale * compactify_map(t); };
    jac = [scale](double t) {
      const double d = 1.0 - t * t;
      return scale * (1.0 + t * t) / (d * d);
    };
    s_of = [scale](double x) { return compactify_inverse(x / scale); };
    s_lo = -1.0;
    s_hi = 1.0;
  } else if (lo_fin) {
    x_of = [a, scale](double t) { return a + scale * compactify_map(t); };
    jac = [scale](double t) {
      const double d = 1.0 - t * t;
      return scale * (1.0 + t * t) / (d * d);
    };
    s_of = [a, scale](double x) { return compactify_inverse((x - a) / scale); };
    s_lo = 0.0;
    s_hi = 1.0;
    p_at_slo = hints.lo_power;
  } else {
    x_of = [b, scale](double t) { return b - scale * compactify_map(t); };
    jac = [scale](double t) {
      const double d = 1.0 - t * t;
      return scale * (1.0 + t * t) / (d * d);
    };
    s_of = [b, scale](double x) { return compactify_inverse((b - x) / scale); };
    s_lo = 0.0;
    s_hi = 1.0;
    p_at_slo = hints.hi_power;
  }

  std::vector<double> cuts;
  for (double k : hints.breakpoints) {
    if (k > a && k < b) {
      const double s = s_of(k);
      if (s > s_lo && s < s_hi) cuts.push_back(s);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> edges{s_lo};
  edges.insert(edges.end(), cuts.begin(), cuts.end());
  edges.push_back(s_hi);

  const bool map_lo = non_integer(p_at_slo);
  const bool map_hi = non_integer(p_at_shi);
  if (edges.size() == 2 && map_lo && map_hi) edges.insert(edges.begin() + 1, 0.5 * (s_lo + s_hi));

  auto plain = [f, x_of, jac](double s) {
    const double j = jac(s);
    Sample v = f(x_of(s));
    return Sample{v.v * j, v.e * std::abs(j)};
  };

  std::vector<SampleFn> pieces;
  std::vector<Segment> segs;
  const std::size_t npanels = edges.size() - 1;
  for (std::size_t i = 0; i < npanels; ++i) {
    const double c = edges[i], d = edges[i + 1];
    Segment seg;
    if (i == 0 && map_lo) {
      const double p = 1.0 / (p_at_slo + 1.0);
      pieces.push_back([plain, c, d, p](double u) {
        const double j = (d - c) * p * std::pow(u, p - 1.0);
        Sample v = plain(c + (d - c) * std::pow(u, p));
        return Sample{v.v * j, v.e * j};
      });
      seg.a = 0.0;
      seg.b = 1.0;
    } else if (i + 1 == npanels && map_hi) {
      const double p = 1.0 / (p_at_shi + 1.0);
      pieces.push_back([plain, c, d, p](double u) {
        const double j = (d - c) * p * std::pow(u, p - 1.0);
        Sample v = plain(d - (d - c) * std::pow(u, p));
        return Sample{v.v * j, v.e * j};
      });
      seg.a = 0.0;
      seg.b = 1.0;
    } else {
      pieces.push_back(plain);
      seg.a = c;
      seg.b = d;
    }
    seg.piece = static_cast<int>(pieces.size() - 1);
    segs.push_back(seg);
  }
  return adapt(pieces, std::move(segs), tol, max_sub);
}

struct Axis {
  double lo, hi;
  double power_lo, power_hi;
};

}  // namespace

void QuadratureSpec::validate() const {
  auto bad = [](const std::string& m) { throw InvalidParametersError("quadrature spec: " + m); };
  if (!(tolerance > 0.0 && tolerance < 1.0)) bad("tolerance must lie in (0,1)");
  if (!(nd_tolerance > 0.0 && nd_tolerance < 1.0)) bad("nd_tolerance must lie in (0,1)");
  if (max_subdivisions < 1) bad("max_subdivisions must be positive");
  if (mc_samples < 100) bad("mc_samples must be at least 100");
  if (!(mc_tail_dof > 0.0)) bad("mc_tail_dof must be positive");
}

IntegralEstimate integrate_1d(const Integrand1D& f, Interval domain, const QuadratureSpec& spec,
                              const EndpointHints& hints) {
  spec.validate();
  if (spec.check_tails && (!std::isfinite(domain.lo) || !std::isfinite(domain.hi))) {
    DomainSpec d = DomainSpec::interval(domain.lo, domain.hi);
    check_tail_decay([&f](const Vector& x) { return f(x(0)); }, d);
  }
  SampleFn g = [&f](double x) { return Sample{f(x), 0.0}; };
  return integrate_samples(g, domain, spec.tolerance, spec.max_subdivisions, hints);
}

DomainSpec DomainSpec::full_space(int n) {
  DomainSpec d;
  d.kind = Kind::kFullSpace;
  d.dim = n;
  return d;
}

DomainSpec DomainSpec::interval(double a, double b) {
  DomainSpec d;
  d.kind = Kind::kInterval;
  d.dim = 1;
  d.a = a;
  d.b = b;
  return d;
}

DomainSpec DomainSpec::ball(int n, double sigma) {
  DomainSpec d;
  d.kind = Kind::kCenteredBall;
  d.dim = n;
  d.sigma = sigma;
  return d;
}

DomainSpec DomainSpec::box(Vector lo, Vector hi) {
  DomainSpec d;
  d.kind = Kind::kBox;
  d.dim = static_cast<int>(lo.size());
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  return d;
}

bool DomainSpec::bounded() const {
  switch (kind) {
    case Kind::kFullSpace:
      return false;
    case Kind::kInterval:
      return std::isfinite(a) && std::isfinite(b);
    default:
      return true;
  }
}

bool DomainSpec::contains(const Vector& x) const {
  if (x.size() != dim) return false;
  switch (kind) {
    case Kind::kFullSpace:
      return x.allFinite();
    case Kind::kInterval:
      return x(0) > a && x(0) < b;
    case Kind::kCenteredBall:
      return x.squaredNorm() < sigma * sigma;
    case Kind::kBox:
      for (int i = 0; i < dim; ++i) {
        if (!(x(i) > lo(i) && x(i) < hi(i))) return false;
      }
      return true;
  }
  return false;
}

void DomainSpec::validate() const {
  if (dim < 1 || dim > kMaxDim) throw UnsupportedDimensionError("domain dimension out of range");
  switch (kind) {
    case Kind::kFullSpace:
      break;
    case Kind::kInterval:
      if (dim != 1) throw InvalidParametersError("interval domain must be one-dimensional");
      if (std::isnan(a) || std::isnan(b) || !(a < b)) {
        throw InvalidParametersError("interval domain needs a < b");
      }
      break;
    case Kind::kCenteredBall:
      if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InvalidParametersError("ball radius must be positive and finite");
      }
      break;
    case Kind::kBox:
      if (lo.size() != hi.size() || lo.size() != dim) {
        throw InvalidParametersError("box corners have mismatched dimensions");
      }
      for (int i = 0; i < dim; ++i) {
        if (!(lo(i) < hi(i)) || !std::isfinite(lo(i)) || !std::isfinite(hi(i))) {
          throw InvalidParametersError("box needs finite lo < hi on every axis");
        }
      }
      break;
  }
}

double compactify_map(double t) { return t / (1.0 - t * t); }

double compactify_inverse(double x) {
  if (std::isinf(x)) return x > 0 ? 1.0 : -1.0;
  return 2.0 * x / (1.0 + std::sqrt(1.0 + 4.0 * x * x));
}

Integrand1D compactify(const Integrand1D& f) {
  return [f](double t) {
    const double d = 1.0 - t * t;
    return f(compactify_map(t)) * (1.0 + t * t) / (d * d);
  };
}

double check_tail_decay(const IntegrandND& f, const DomainSpec& domain) {
  const int n = domain.dim;
  std::vector<Vector> dirs;
  std::vector<Vector> bases;
  if (domain.kind == DomainSpec::Kind::kFullSpace) {
    Vector e = Vector::Zero(n);
    e(0) = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
    if (n > 1) {
      Vector d = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
      dirs.push_back(d);
      dirs.push_back(-d);
    }
    bases.assign(dirs.size(), Vector::Zero(n));
  } else if (domain.kind == DomainSpec::Kind::kInterval) {
    if (!std::isfinite(domain.b)) {
      dirs.push_back(point({1.0}));
      bases.push_back(point({std::isfinite(domain.a) ? domain.a : 0.0}));
    }
    if (!std::isfinite(domain.a)) {
      dirs.push_back(point({-1.0}));
      bases.push_back(point({std::isfinite(domain.b) ? domain.b : 0.0}));
    }
  } else {
    return kInf;
  }
  double fitted = kInf;
  const double r1 = 1e3, r2 = 1e4;
  const double required = static_cast<double>(n) + 0.02;
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    double f1, f2;
    try {
      f1 = std::abs(f(bases[k] + r1 * dirs[k]));
      f2 = std::abs(f(bases[k] + r2 * dirs[k]));
    } catch (const Error&) {
      continue;
    }
    if (std::isnan(f1) || std::isnan(f2)) continue;
    if (std::isinf(f1) || std::isinf(f2)) {
      throw NonIntegrableError("integrand is unbounded far from the origin");
    }
    if (f1 == 0.0 || f2 == 0.0) continue;
    const double p = std::log(f1 / f2) / std::log(r2 / r1);
    if (!(p > required)) {
      std::ostringstream os;
      os << "integrand decays like |x|^-" << p << " which is not integrable in dimension " << n;
      throw NonIntegrableError(os.str());
    }
    fitted = std::min(fitted, p);
  }
  return fitted;
}

IntegralEstimate sample_mean(const std::vector<double>& values, const std::string& method) {
  IntegralEstimate est;
  est.method = method;
  est.node_count = static_cast<long>(values.size());
  if (values.empty()) throw InvalidParametersError("sample mean of an empty sample");
  special::NeumaierSum s;
  for (double v : values) s.add(v);
  const double n = static_cast<double>(values.size());
  const double mean = s.value() / n;
  special::NeumaierSum q;
  for (double v : values) q.add((v - mean) * (v - mean));
  const double var = values.size() > 1 ? q.value() / (n - 1.0) : 0.0;
  est.value = mean;
  est.error_bound = std::sqrt(var / n);
  if (!std::isfinite(est.value) || !std::isfinite(est.error_bound)) {
    throw NonIntegrableError("sample mean is not finite");
  }
  return est;
}

namespace {

IntegralEstimate monte_carlo(const IntegrandND& f, const DomainSpec& dom, const QuadratureSpec& spec) {
  const int n = dom.dim;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double nu = spec.mc_tail_dof;
  std::gamma_distribution<double> gam(0.5 * nu, 2.0);

  auto student = [&](int dim, Vector& x) {
    for (int i = 0; i < dim; ++i) x(i) = normal(rng);
    const double w = gam(rng);
    x *= std::sqrt(nu / w);
    const double lq = special::log_gamma(0.5 * (nu + dim)) - special::log_gamma(0.5 * nu) -
                      0.5 * dim * std::log(nu * M_PI) -
                      0.5 * (nu + dim) * std::log1p(x.squaredNorm() / nu);
    return std::exp(lq);
  };

  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(spec.mc_samples));
  Vector x(n);
  for (long k = 0; k < spec.mc_samples; ++k) {
    double q = 1.0;
    switch (dom.kind) {
      case DomainSpec::Kind::kFullSpace:
        q = student(n, x);
        break;
      case DomainSpec::Kind::kCenteredBall: {
        for (int i = 0; i < n; ++i) x(i) = normal(rng);
        const double r = dom.sigma * std::pow(unif(rng), 1.0 / n);
        x *= r / x.norm();
        const double vol = std::pow(M_PI, 0.5 * n) * std::pow(dom.sigma, n) / special::gamma(0.5 * n + 1.0);
        q = 1.0 / vol;
        break;
      }
      case DomainSpec::Kind::kBox: {
        double vol = 1.0;
        for (int i = 0; i < n; ++i) {
          x(i) = dom.lo(i) + (dom.hi(i) - dom.lo(i)) * unif(rng);
          vol *= dom.hi(i) - dom.lo(i);
        }
        q = 1.0 / vol;
        break;
      }
      case DomainSpec::Kind::kInterval: {
        const bool lf = std::isfinite(dom.a), hf = std::isfinite(dom.b);
        if (lf && hf) {
          x(0) = dom.a + (dom.b - dom.a) * unif(rng);
          q = 1.0 / (dom.b - dom.a);
        } else {
          const double qs = student(1, x);
          if (lf) {
            x(0) = dom.a + std::abs(x(0));
            q = 2.0 * qs;
          } else if (hf) {
            x(0) = dom.b - std::abs(x(0));
            q = 2.0 * qs;
          } else {
            q = qs;
          }
        }
        break;
      }
    }
    double v = 0.0;
    if (dom.contains(x)) v = f(x) / q;
    vals.push_back(v);
  }
  return sample_mean(vals, "monte-carlo");
}

Axis axis_of(const DomainSpec& dom, int level, const Vector& prefix, double bp) {
  const int n = dom.dim;
  switch (dom.kind) {
    case DomainSpec::Kind::kFullSpace:
      return {-kInf, kInf, 0.0, 0.0};
    case DomainSpec::Kind::kInterval:
      return {dom.a, dom.b, bp, bp};
    case DomainSpec::Kind::kBox:
      return {dom.lo(level), dom.hi(level), bp, bp};
    case DomainSpec::Kind::kCenteredBall: {
      double rest = dom.sigma * dom.sigma;
      for (int j = 0; j < level; ++j) rest -= prefix(j) * prefix(j);
      const double s = std::sqrt(std::max(rest, 0.0));
      const double p = bp + 0.5 * static_cast<double>(n - 1 - level);
      return {-s, s, p, p};
    }
  }
  return {-kInf, kInf, 0.0, 0.0};
}

// Nested Gauss–Kronrod over the first `level` coordinates fixed in x.
Sample nested(const IntegrandND& f, const DomainSpec& dom, const NdHints& hints, double tol,
              int max_sub, int level, Vector& x, long& nodes) {
  const int n = dom.dim;
  const Axis ax = axis_of(dom, level, x, hints.boundary_power);
  if (!(ax.lo < ax.hi)) return Sample{0.0, 0.0};
  EndpointHints eh;
  eh.breakpoints = hints.kinks;
  eh.lo_power = ax.power_lo;
  eh.hi_power = ax.power_hi;
  SampleFn g;
  if (level == n - 1) {
    g = [&f, &x, level](double t) {
      x(level) = t;
      return Sample{f(x), 0.0};
    };
  } else {
    g = [&, level](double t) {
      x(level) = t;
      Vector saved = x;
      Sample s = nested(f, dom, hints, tol, max_sub, level + 1, x, nodes);
      x = saved;
      return s;
    };
  }
  IntegralEstimate est;
  try {
    // On the full space the inner integrand's width grows with the outer radius.
    double scale = 1.0;
    if (dom.kind == DomainSpec::Kind::kFullSpace) scale = std::max(1.0, x.head(level).norm());
    est = integrate_samples(g, Interval{ax.lo, ax.hi}, tol, max_sub, eh, scale);
  } catch (const NonConvergentError& e) {
    if (level == 0) throw;
    est = e.best();
  }
  nodes += est.node_count;
  return Sample{est.value, est.error_bound};
}

}  // namespace

IntegralEstimate integrate_nd(const IntegrandND& f, const DomainSpec& domain, const QuadratureSpec& spec,
                              const NdHints& hints) {
  spec.validate();
  domain.validate();
  const int n = domain.dim;
  const NdHints& h = hints;
  if (spec.check_tails && !domain.bounded()) check_tail_decay(f, domain);

  if (spec.nd_strategy == NdStrategy::kMonteCarlo) return monte_carlo(f, domain, spec);

  if (n == 1) {
    const Axis ax = axis_of(domain, 0, Vector::Zero(1), h.boundary_power);
    EndpointHints eh{h.kinks, ax.power_lo, ax.power_hi};
    SampleFn g = [&f](double t) {
      Vector x(1);
      x(0) = t;
      return Sample{f(x), 0.0};
    };
    return integrate_samples(g, Interval{ax.lo, ax.hi}, spec.tolerance, spec.max_subdivisions, eh);
  }
  if (n > 3) throw UnsupportedDimensionError("tensor quadrature supports n <= 3; use monte-carlo");

  Vector x = Vector::Zero(n);
  long nodes = 0;
  // Inner integrals get a tighter tolerance so their noise stays below the
  // outer rule's resolution.
  const double inner_tol = 0.25 * spec.nd_tolerance;
  IntegrandND fx = f;
  IntegralEstimate out;
  const Axis ax = axis_of(domain, 0, x, h.boundary_power);
  EndpointHints eh{h.kinks, ax.power_lo, ax.power_hi};
  SampleFn g = [&](double t) {
    x(0) = t;
    return nested(fx, domain, h, inner_tol, spec.max_subdivisions, 1, x, nodes);
  };
  out = integrate_samples(g, Interval{ax.lo, ax.hi}, spec.nd_tolerance, spec.max_subdivisions, eh);
  out.method = "gauss-kronrod-tensor";
  out.node_count = nodes;
  return out;
}

}  // namespace varineq
