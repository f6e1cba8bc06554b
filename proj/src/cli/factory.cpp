#include "varineq/cli/factory.hpp"

#include <set>
#include <sstream>

#include "varineq/errors.hpp"

namespace varineq::cli {

namespace {

std::vector<double> args_of(const std::string& s, std::string& head) {
  const auto colon = s.find(':');
  head = s.substr(0, colon);
  if (colon == std::string::npos) return {};
  return parse_grid(s.substr(colon + 1));
}

void need(const std::string& what, const std::vector<double>& a, std::size_t lo, std::size_t hi) {
  if (a.size() < lo || a.size() > hi) throw ParseError(what + " has the wrong number of arguments");
}

}  // namespace

ScalarField parse_potential(const std::string& s, int dim) {
  std::string head;
  const auto a = args_of(s, head);
  if (head == "quadratic") {
    need(s, a, 2, 2);
    return field::quadratic(dim, a[0], a[1]);
  }
  if (head == "constant") {
    need(s, a, 1, 1);
    return field::constant(dim, a[0]);
  }
  if (head == "power-sum") {
    need(s, a, 1, 2);
    return field::power_sum(dim, a[0], a.size() > 1 ? a[1] : 0.0);
  }
  if (head == "abs-linear" || head == "polynomial") {
    if (dim != 1) throw ParseError("potential '" + head + "' is one-dimensional");
    if (head == "abs-linear") {
      need(s, a, 2, 2);
      return field::abs_linear(a[0], a[1]);
    }
    need(s, a, 1, 64);
    return field::polynomial(a);
  }
  throw ParseError("unknown potential '" + s + "'");
}

DomainSpec parse_domain(const std::string& s, int dim) {
  std::string head;
  const auto a = args_of(s, head);
  if (head == "full") return DomainSpec::full_space(dim);
  if (head == "interval") {
    need(s, a, 2, 2);
    if (dim != 1) throw ParseError("interval domains are one-dimensional");
    return DomainSpec::interval(a[0], a[1]);
  }
  if (head == "ball") {
    need(s, a, 1, 1);
    return DomainSpec::ball(dim, a[0]);
  }
  throw ParseError("unknown domain '" + s + "'");
}

bool known_family(const std::string& family) {
  static const std::set<std::string> f = {"cauchy", "halfsphere", "gaussian", "laplace", "exp-power",
                                          "chi",    "case1",      "case2",    "log-concave"};
  return f.count(family) > 0;
}

WeightedMeasure build_measure(const JobSpec& job, const QuadratureSpec& spec) {
  const std::string family = job.str("family");
  if (!known_family(family)) throw ParseError("job '" + job.id + "': unknown family '" + family + "'");
  const int n = job.integer("n", 1);
  if (family == "cauchy") return make_cauchy(n, job.num("beta"));
  if (family == "halfsphere") return make_halfsphere(n, job.num("sigma", 1.0), job.num("beta"));
  if (family == "gaussian") return make_gaussian(n);
  if (family == "laplace") return make_exp_power(n, 1.0, spec);
  if (family == "exp-power") return make_exp_power(n, job.num("power"), spec);
  if (family == "chi") return make_chi(n);
  const std::string pot = job.str("potential");
  Potential p{parse_potential(pot, n), parse_domain(job.str("domain", "full"), n), false, pot};
  if (family == "case1") return WeightedMeasure::case1(p, job.num("beta"), spec);
  if (family == "case2") {
    p.vanishes_on_boundary = job.str("vanishes", "false") == "true";
    return WeightedMeasure::case2(p, job.num("beta"), spec);
  }
  return WeightedMeasure::log_concave(p, spec);
}

double convexity_for(const JobSpec& job) {
  if (job.has("convexity")) return job.num("convexity");
  const std::string f = job.str("family", "");
  if (f == "cauchy" || f == "halfsphere") return 2.0;
  if (f == "gaussian") return 1.0;
  return 0.0;
}

}  // namespace varineq::cli
