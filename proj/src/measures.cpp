#include "varineq/measures.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "varineq/special.hpp"

namespace varineq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double discriminant_root(const ParamTriple& p) {
  const double n = p.n;
  return std::sqrt(n * n + 4.0 * (p.r * p.r - p.r) * n);
}

// A proposal density on the measure's domain: draws x and returns q(x).
struct Proposal {
  enum class Kind { kUniform, kStudent, kFoldedStudent };
  Kind kind = Kind::kUniform;
  DomainSpec dom;
  double nu = 1.0;
  double shift = 0.0;  // folded: x = shift ± |t|
  double sign = 1.0;

  double student(std::mt19937_64& rng, int n, Vector& x) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::gamma_distribution<double> gam(0.5 * nu, 2.0);
    for (int i = 0; i < n; ++i) x(i) = normal(rng);
    const double w = gam(rng);
    x *= std::sqrt(nu / w);
    return std::exp(special::log_gamma(0.5 * (nu + n)) - special::log_gamma(0.5 * nu) -
                    0.5 * n * std::log(nu * M_PI) - 0.5 * (nu + n) * std::log1p(x.squaredNorm() / nu));
  }

  double draw(std::mt19937_64& rng, Vector& x) const {
    const int n = dom.dim;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    switch (kind) {
      case Kind::kStudent:
        return student(rng, n, x);
      case Kind::kFoldedStudent: {
        const double q = student(rng, 1, x);
        x(0) = shift + sign * std::abs(x(0));
        return 2.0 * q;
      }
      case Kind::kUniform:
        break;
    }
    switch (dom.kind) {
      case DomainSpec::Kind::kCenteredBall: {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int i = 0; i < n; ++i) x(i) = normal(rng);
        x *= dom.sigma * std::pow(unif(rng), 1.0 / n) / x.norm();
        return special::gamma(0.5 * n + 1.0) / (std::pow(M_PI, 0.5 * n) * std::pow(dom.sigma, n));
      }
      case DomainSpec::Kind::kBox: {
        double vol = 1.0;
        for (int i = 0; i < n; ++i) {
          x(i) = dom.lo(i) + (dom.hi(i) - dom.lo(i)) * unif(rng);
          vol *= dom.hi(i) - dom.lo(i);
        }
        return 1.0 / vol;
      }
      case DomainSpec::Kind::kInterval:
        x(0) = dom.a + (dom.b - dom.a) * unif(rng);
        return 1.0 / (dom.b - dom.a);
      case DomainSpec::Kind::kFullSpace:
        break;
    }
    return student(rng, n, x);
  }
};

Proposal choose_proposal(const DomainSpec& dom, double tail_nu) {
  Proposal p;
  p.dom = dom;
  p.nu = tail_nu;
  if (dom.bounded()) {
    p.kind = Proposal::Kind::kUniform;
  } else if (dom.kind == DomainSpec::Kind::kInterval) {
    const bool lf = std::isfinite(dom.a), hf = std::isfinite(dom.b);
    if (lf || hf) {
      p.kind = Proposal::Kind::kFoldedStudent;
      p.shift = lf ? dom.a : dom.b;
      p.sign = lf ? 1.0 : -1.0;
    } else {
      p.kind = Proposal::Kind::kStudent;
    }
  } else {
    p.kind = Proposal::Kind::kStudent;
  }
  return p;
}

WeightedMeasure::Sampler rejection_sampler(std::function<double(const Vector&)> p, Proposal prop) {
  return [p = std::move(p), prop](long count, std::uint64_t seed) {
    if (count < 0) throw InvalidParametersError("sample count must be nonnegative");
    const int n = prop.dom.dim;
    Vector x(n);
    // Envelope from a fixed-seed probe so it does not depend on the caller's seed.
    std::mt19937_64 probe_rng(0x5eedULL);
    double ratio_max = 0.0;
    for (int k = 0; k < 4000; ++k) {
      const double q = prop.draw(probe_rng, x);
      if (q > 0.0 && prop.dom.contains(x)) ratio_max = std::max(ratio_max, p(x) / q);
    }
    if (!(ratio_max > 0.0) || !std::isfinite(ratio_max)) {
      throw SamplerInefficiencyError("rejection envelope could not be established");
    }
    double M = 1.5 * ratio_max;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(count));
    long attempts = 0;
    while (static_cast<long>(out.size()) < count) {
      ++attempts;
      const double q = prop.draw(rng, x);
      if (!prop.dom.contains(x)) continue;
      const double px = p(x);
      const double ratio = px / q;
      if (ratio > M) M = 1.5 * ratio;
      if (unif(rng) * M < ratio) out.push_back(x);
      if (attempts % 10000 == 0 &&
          static_cast<double>(out.size()) < 1e-4 * static_cast<double>(attempts)) {
        std::ostringstream os;
        os << "rejection sampler acceptance rate " << static_cast<double>(out.size()) / attempts
           << " is below 1e-4";
        throw SamplerInefficiencyError(os.str());
      }
    }
    return out;
  };
}

std::vector<Vector> shape_probe_points(const DomainSpec& d) {
  const int n = d.dim;
  std::vector<Vector> pts;
  Vector c = Vector::Zero(n);
  std::vector<double> scales;
  Vector half = Vector::Ones(n);
  switch (d.kind) {
    case DomainSpec::Kind::kFullSpace:
      scales = {0.5, 2.0, 5.0};
      break;
    case DomainSpec::Kind::kCenteredBall:
      scales = {0.25 * d.sigma, 0.6 * d.sigma, 0.9 * d.sigma};
      break;
    case DomainSpec::Kind::kBox:
      c = 0.5 * (d.lo + d.hi);
      half = 0.5 * (d.hi - d.lo);
      scales = {0.25, 0.6, 0.9};
      break;
    case DomainSpec::Kind::kInterval:
      if (std::isfinite(d.a) && std::isfinite(d.b)) {
        c(0) = 0.5 * (d.a + d.b);
        half(0) = 0.5 * (d.b - d.a);
        scales = {0.25, 0.6, 0.9};
      } else if (std::isfinite(d.a) || std::isfinite(d.b)) {
        const double end = std::isfinite(d.a) ? d.a : d.b;
        const double s = std::isfinite(d.a) ? 1.0 : -1.0;
        for (double t : {0.3, 1.0, 2.5, 6.0}) pts.push_back(point({end + s * t}));
        return pts;
      } else {
        scales = {0.5, 2.0, 5.0};
      }
      break;
  }
  pts.push_back(c);
  for (double s : scales) {
    for (int i = 0; i < n; ++i) {
      for (double sg : {1.0, -1.0}) {
        Vector x = c;
        x(i) += sg * s * half(i);
        pts.push_back(x);
      }
    }
    if (n > 1) {
      Vector x = c;
      for (int i = 0; i < n; ++i) x(i) += 0.7 * s * half(i) / std::sqrt(static_cast<double>(n));
      pts.push_back(x);
    }
  }
  return pts;
}

// sign = +1 demands convexity, −1 concavity; positivity checked when `positive`.
void check_shape(const Potential& pot, int sign, bool positive, const char* what) {
  for (const Vector& x : shape_probe_points(pot.domain)) {
    if (!pot.domain.contains(x) || !pot.field.inside(x)) continue;
    const bool near_kink = pot.field.near_kink(x, 1e-3);
    const double v = pot.field(x);
    if (positive && !(v > 0.0)) {
      std::ostringstream os;
      os << what << " potential must be positive on the domain";
      throw InvalidParametersError(os.str());
    }
    if (near_kink) continue;
    Matrix H;
    try {
      H = eval_hess(pot.field, x);
    } catch (const DomainError&) {
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if ((sign > 0 && lo < -1e-6 * scale) || (sign < 0 && hi > 1e-6 * scale)) {
      std::ostringstream os;
      os << what << " potential must be " << (sign > 0 ? "convex" : "concave") << " on the domain";
      throw InvalidParametersError(os.str());
    }
  }
}

void require_dim(int n) {
  if (n < 1 || n > kMaxDim) throw UnsupportedDimensionError("dimension must lie in [1,10]");
}

}  // namespace

const char* to_string(MeasureCase c) {
  switch (c) {
    case MeasureCase::kCase1:
      return "case1";
    case MeasureCase::kCase2:
      return "case2";
    case MeasureCase::kLogConcave:
      return "log-concave";
    case MeasureCase::kDensity:
      return "density";
  }
  return "?";
}

GuardResult case1_guard(const ParamTriple& p) {
  GuardResult g;
  g.threshold = p.r + (p.n + discriminant_root(p)) / 2.0;
  if (p.n < 1 || !std::isfinite(p.beta) || !std::isfinite(p.r)) return g;
  g.valid = p.beta > g.threshold;
  if (g.valid) {
    const double n = p.n;
    g.constant = (p.beta - n) / n - (n - 1.0) * p.r * p.r / (n * (p.beta - 2.0 * p.r));
  }
  return g;
}

GuardResult case2_guard(const ParamTriple& p) {
  GuardResult g;
  g.threshold = -p.r + (-p.n + discriminant_root(p)) / 2.0;
  if (p.n < 1 || !std::isfinite(p.beta) || !std::isfinite(p.r)) return g;
  g.valid = p.beta > g.threshold;
  if (g.valid) {
    const double n = p.n;
    g.constant = (p.beta + n) / n - (n - 1.0) * p.r * p.r / (n * (p.beta + 2.0 * p.r));
  }
  return g;
}

WeightedMeasure WeightedMeasure::case1(Potential p, double beta, const QuadratureSpec& spec) {
  p.domain.validate();
  if (p.field.dim() != p.domain.dim) throw InvalidParametersError("potential and domain dimensions differ");
  if (!std::isfinite(beta)) throw InvalidParametersError("beta must be finite");
  check_shape(p, +1, true, "case 1");
  WeightedMeasure m;
  m.case_ = MeasureCase::kCase1;
  m.pot_ = std::move(p);
  m.beta_ = beta;
  m.family_ = "case1";
  m.compute_normalizer(spec);
  m.install_default_sampler();
  return m;
}

WeightedMeasure WeightedMeasure::case2(Potential p, double beta, const QuadratureSpec& spec) {
  p.domain.validate();
  if (!p.domain.bounded()) throw InvalidParametersError("case 2 measures need a bounded domain");
  if (p.field.dim() != p.domain.dim) throw InvalidParametersError("potential and domain dimensions differ");
  if (!(beta > -1.0)) throw NonIntegrableError("case 2 exponent must exceed -1");
  check_shape(p, -1, true, "case 2");
  WeightedMeasure m;
  m.case_ = MeasureCase::kCase2;
  m.pot_ = std::move(p);
  m.beta_ = beta;
  m.family_ = "case2";
  m.compute_normalizer(spec);
  m.install_default_sampler();
  return m;
}

WeightedMeasure WeightedMeasure::log_concave(Potential p, const QuadratureSpec& spec) {
  p.domain.validate();
  if (p.field.dim() != p.domain.dim) throw InvalidParametersError("potential and domain dimensions differ");
  check_shape(p, +1, false, "log-concave");
  WeightedMeasure m;
  m.case_ = MeasureCase::kLogConcave;
  m.pot_ = std::move(p);
  m.family_ = "log-concave";
  m.compute_normalizer(spec);
  m.install_default_sampler();
  return m;
}

WeightedMeasure WeightedMeasure::from_density(std::string family, ScalarField density, DomainSpec domain,
                                              NdHints hints, const QuadratureSpec& spec) {
  domain.validate();
  WeightedMeasure m;
  m.case_ = MeasureCase::kDensity;
  m.pot_ = Potential{std::move(density), std::move(domain), false, family};
  m.family_ = std::move(family);
  m.density_hints_ = std::move(hints);
  m.compute_normalizer(spec);
  m.install_default_sampler();
  return m;
}

WeightedMeasure WeightedMeasure::known(MeasureCase c, Potential p, double beta, std::string family, double z,
                                       NdHints density_hints) {
  p.domain.validate();
  if (!(z > 0.0) || !std::isfinite(z)) throw InvalidParametersError("normalizer must be positive and finite");
  WeightedMeasure m;
  m.case_ = c;
  m.pot_ = std::move(p);
  m.beta_ = beta;
  m.family_ = std::move(family);
  m.density_hints_ = std::move(density_hints);
  m.z_ = z;
  m.z_err_ = 0.0;
  m.closed_form_ = true;
  m.install_default_sampler();
  return m;
}

double WeightedMeasure::unnormalized(const Vector& x) const {
  if (!pot_.domain.contains(x)) return 0.0;
  switch (case_) {
    case MeasureCase::kCase1: {
      const double v = pot_.field(x);
      if (!(v > 0.0)) throw DomainError("case 1 potential is not positive");
      return std::pow(v, -beta_);
    }
    case MeasureCase::kCase2: {
      const double v = pot_.field(x);
      return v > 0.0 ? std::pow(v, beta_) : 0.0;
    }
    case MeasureCase::kLogConcave:
      return std::exp(-pot_.field(x));
    case MeasureCase::kDensity:
      return pot_.field(x);
  }
  return 0.0;
}

NdHints WeightedMeasure::hints(double extra_power) const {
  NdHints h;
  if (case_ == MeasureCase::kDensity) {
    h = density_hints_;
    return h;
  }
  h.kinks = pot_.field.kinks();
  if (case_ == MeasureCase::kCase2 && pot_.vanishes_on_boundary) h.boundary_power = beta_ + extra_power;
  return h;
}

IntegralEstimate WeightedMeasure::normalizer_by_quadrature(const QuadratureSpec& spec) const {
  return integrate_nd([this](const Vector& x) { return unnormalized(x); }, pot_.domain, spec, hints(0.0));
}

void WeightedMeasure::compute_normalizer(const QuadratureSpec& spec) {
  const IntegralEstimate z = normalizer_by_quadrature(spec);
  if (!(z.value > 0.0) || !std::isfinite(z.value)) {
    throw NonIntegrableError("measure normalizer is not a positive finite number");
  }
  z_ = z.value;
  z_err_ = z.error_bound;
  closed_form_ = false;
}

void WeightedMeasure::install_default_sampler() {
  const int n = dim();
  double nu = 1.0;
  if (case_ == MeasureCase::kCase1) {
    // Tail order at least β matches any convex φ, which grows at least linearly.
    nu = beta_ - n > 0.5 ? std::min(beta_ - n, 30.0) : std::max(2.0 * beta_ - n, 0.25);
  }
  if (case_ == MeasureCase::kCase2 && pot_.vanishes_on_boundary && beta_ < 0.0) {
    sampler_ = nullptr;  // unbounded density: no finite envelope
    return;
  }
  const Proposal prop = choose_proposal(pot_.domain, nu);
  const WeightedMeasure self = *this;
  sampler_ = rejection_sampler([self](const Vector& x) { return self.unnormalized(x); }, prop);
}

IntegralEstimate WeightedMeasure::integrate(const IntegrandND& F, const QuadratureSpec& spec,
                                            double extra_power) const {
  const bool mc = spec.nd_strategy == NdStrategy::kMonteCarlo || dim() > 3;
  if (mc && sampler_) {
    const auto pts = sampler_(spec.mc_samples, spec.seed);
    std::vector<double> vals;
    vals.reserve(pts.size());
    for (const auto& x : pts) vals.push_back(F(x));
    return sample_mean(vals, "monte-carlo-exact");
  }
  QuadratureSpec s = spec;
  if (mc) s.nd_strategy = NdStrategy::kMonteCarlo;
  const NdHints h = hints(extra_power);
  if (h.boundary_power <= -1.0 && pot_.domain.bounded()) {
    std::ostringstream os;
    os << "integrand behaves like dist^" << h.boundary_power << " at the boundary and is not integrable";
    throw NonIntegrableError(os.str());
  }
  IntegralEstimate raw = integrate_nd(
      [this, &F](const Vector& x) {
        const double p = unnormalized(x);
        return p == 0.0 ? 0.0 : F(x) * p;
      },
      pot_.domain, s, h);
  IntegralEstimate out = raw;
  out.value = raw.value / z_;
  out.error_bound = raw.error_bound / z_ + std::abs(out.value) * z_err_ / z_;
  return out;
}

WeightedMeasure WeightedMeasure::with_beta(double beta, const QuadratureSpec& spec) const {
  if (family_ == "cauchy") return make_cauchy(dim(), beta);
  if (family_ == "halfsphere") return make_halfsphere(dim(), pot_.domain.sigma, beta);
  switch (case_) {
    case MeasureCase::kCase1:
      return case1(pot_, beta, spec);
    case MeasureCase::kCase2:
      return case2(pot_, beta, spec);
    default:
      throw InvalidParametersError("measure family has no exponent parameter");
  }
}

WeightedMeasure make_cauchy(int n, double beta) {
  require_dim(n);
  if (!(beta > 0.5 * n)) {
    std::ostringstream os;
    os << "Cauchy measure needs beta > n/2 (beta=" << beta << ", n=" << n << ")";
    throw NonIntegrableError(os.str());
  }
  Potential p{field::quadratic(n, 1.0, 1.0), DomainSpec::full_space(n), false, "1+|x|^2"};
  WeightedMeasure m = WeightedMeasure::known(MeasureCase::kCase1, p, beta, "cauchy",
                                             std::pow(M_PI, 0.5 * n) * special::gamma(beta - 0.5 * n) / special::gamma(beta));
  const double nu = 2.0 * beta - n;
  m.set_sampler([n, nu](long count, std::uint64_t seed) {
    if (count < 0) throw InvalidParametersError("sample count must be nonnegative");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::gamma_distribution<double> gam(0.5 * nu, 2.0);
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long k = 0; k < count; ++k) {
      Vector x(n);
      for (int i = 0; i < n; ++i) x(i) = normal(rng);
      x /= std::sqrt(gam(rng));
      out.push_back(x);
    }
    return out;
  });
  return m;
}

WeightedMeasure make_halfsphere(int n, double sigma, double beta) {
  require_dim(n);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidParametersError("sigma must be positive");
  if (!(beta > -1.0)) throw NonIntegrableError("half-sphere measure needs beta > -1");
  const double s2 = sigma * sigma;
  ScalarField phi = field::quadratic(n, s2, -1.0).with_domain([s2](const Vector& x) {
    return x.squaredNorm() < s2;
  });
  Potential p{phi, DomainSpec::ball(n, sigma), true, "sigma^2-|x|^2"};
  WeightedMeasure m = WeightedMeasure::known(
      MeasureCase::kCase2, p, beta, "halfsphere",
      std::pow(sigma, 2.0 * beta + n) * std::pow(M_PI, 0.5 * n) * special::gamma(beta + 1.0) /
                    special::gamma(beta + 0.5 * n + 1.0));
  m.set_sampler([n, sigma, beta](long count, std::uint64_t seed) {
    if (count < 0) throw InvalidParametersError("sample count must be nonnegative");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::gamma_distribution<double> ga(0.5 * n, 1.0), gb(beta + 1.0, 1.0);
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long k = 0; k < count; ++k) {
      Vector x(n);
      for (int i = 0; i < n; ++i) x(i) = normal(rng);
      const double a = ga(rng), b = gb(rng);
      const double rad = sigma * std::sqrt(a / (a + b));
      x *= rad / x.norm();
      out.push_back(x);
    }
    return out;
  });
  return m;
}

WeightedMeasure make_exp_power(int n, double r, const QuadratureSpec& spec) {
  require_dim(n);
  if (!(r >= 1.0 && r <= 2.0)) {
    std::ostringstream os;
    os << "exponential-power measure needs r in [1,2], got " << r;
    throw UnsupportedParameterError(os.str());
  }
  EndpointHints h;
  h.breakpoints = {0.0};
  const IntegralEstimate z1 =
      integrate_1d([r](double x) { return std::exp(-std::pow(std::abs(x), r) / r); }, Interval{}, spec, h);
  Potential p{field::power_sum(n, r), DomainSpec::full_space(n), false, "sum|x_i|^r/r"};
  WeightedMeasure m = WeightedMeasure::known(MeasureCase::kLogConcave, p, 0.0, r == 2.0 ? "gaussian" : (r == 1.0 ? "laplace" : "exp-power"), std::pow(z1.value, n));
  m.set_sampler([n, r](long count, std::uint64_t seed) {
    if (count < 0) throw InvalidParametersError("sample count must be nonnegative");
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> gam(1.0 / r, 1.0);
    std::bernoulli_distribution coin(0.5);
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long k = 0; k < count; ++k) {
      Vector x(n);
      for (int i = 0; i < n; ++i) {
        const double a = std::pow(r * gam(rng), 1.0 / r);
        x(i) = coin(rng) ? a : -a;
      }
      out.push_back(x);
    }
    return out;
  });
  return m;
}

WeightedMeasure make_gaussian(int n) {
  require_dim(n);
  Potential p{field::quadratic(n, 0.0, 0.5), DomainSpec::full_space(n), false, "|x|^2/2"};
  WeightedMeasure m = WeightedMeasure::known(MeasureCase::kLogConcave, p, 0.0, "gaussian", std::pow(2.0 * M_PI, 0.5 * n));
  m.set_sampler([n](long count, std::uint64_t seed) {
    if (count < 0) throw InvalidParametersError("sample count must be nonnegative");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long k = 0; k < count; ++k) {
      Vector x(n);
      for (int i = 0; i < n; ++i) x(i) = normal(rng);
      out.push_back(x);
    }
    return out;
  });
  return m;
}

WeightedMeasure make_chi(int n) {
  if (n < 1) throw InvalidParametersError("chi family needs n >= 1");
  ScalarField dens(1, [n](const Vector& x) {
    const double r = x(0);
    return r > 0.0 ? std::pow(r, n - 1) * std::exp(-0.5 * r * r) : 0.0;
  });
  NdHints h;
  h.boundary_power = n - 1;
  Potential p{dens, DomainSpec::interval(0.0, kInf), false, "r^(n-1)exp(-r^2/2)"};
  WeightedMeasure m = WeightedMeasure::known(MeasureCase::kDensity, p, 0.0, "chi", std::pow(2.0, 0.5 * n - 1.0) * special::gamma(0.5 * n), h);
  m.set_sampler([n](long count, std::uint64_t seed) {
    if (count < 0) throw InvalidParametersError("sample count must be nonnegative");
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> gam(0.5 * n, 1.0);
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long k = 0; k < count; ++k) out.push_back(point({std::sqrt(2.0 * gam(rng))}));
    return out;
  });
  return m;
}

IntegralEstimate expectation(const WeightedMeasure& mu, const IntegrandND& f, const QuadratureSpec& spec) {
  return mu.integrate(f, spec);
}

IntegralEstimate variance(const WeightedMeasure& mu, const IntegrandND& f, const QuadratureSpec& spec) {
  const IntegralEstimate m = mu.integrate(f, spec);
  const double mean = m.value;
  IntegralEstimate v = mu.integrate(
      [&f, mean](const Vector& x) {
        const double d = f(x) - mean;
        return d * d;
      },
      spec);
  v.error_bound += m.error_bound * m.error_bound;
  v.node_count += m.node_count;
  return v;
}

std::vector<Vector> sample(const WeightedMeasure& mu, long count, std::uint64_t seed) {
  if (!mu.has_sampler()) {
    throw SamplerInefficiencyError("measure density is unbounded; no rejection envelope exists");
  }
  return mu.sampler()(count, seed);
}

}  // namespace varineq
