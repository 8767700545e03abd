#include "tailsum/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tailsum/errors.hpp"

namespace tailsum {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2 = std::numbers::ln2;

// Chi law with d degrees of freedom, x = r^2/2. Both tail and density carry a
// factor exp(-x); the helpers below return log(exp(x) * tail) and
// log(exp(x) * density) so b() is formed without cancellation at large r.
double chi_log_scaled_tail(int d, double r) {
  const double x = 0.5 * r * r;
  const double lx = std::log(x);
  std::vector<double> terms;
  if (d % 2 == 0) {
    const int k = d / 2;
    for (int m = 0; m < k; ++m) terms.push_back(m * lx - std::lgamma(m + 1.0));
  } else {
    const int k = (d - 1) / 2;
    // erfc(sqrt x) exp(x) = 2 Mills(r) / sqrt(2 pi)
    terms.push_back(kLog2 + std::log(normal_mills_ratio(r)) - kLogSqrt2Pi);
    for (int m = 0; m < k; ++m) terms.push_back((m + 0.5) * lx - std::lgamma(m + 1.5));
  }
  return log_sum_exp(terms);
}

double chi_log_scaled_density(int d, double r) {
  return (d - 1) * std::log(r) - (0.5 * d - 1.0) * kLog2 - std::lgamma(0.5 * d);
}

}  // namespace

std::string to_string(RadialKind kind) {
  switch (kind) {
    case RadialKind::chi:
      return "chi";
    case RadialKind::weibull_tail:
      return "weibull_tail";
    case RadialKind::lognormal_log_radius:
      return "lognormal_log_radius";
  }
  return "unknown";
}

RadialKind radial_kind_from_string(const std::string& name) {
  if (name == "chi") return RadialKind::chi;
  if (name == "weibull_tail" || name == "weibull") return RadialKind::weibull_tail;
  if (name == "lognormal_log_radius") return RadialKind::lognormal_log_radius;
  throw InvalidParams("unknown radial kind '" + name + "'");
}

RadialLaw RadialLaw::chi(int dim) {
  if (dim < 1) throw InvalidParams("chi radial law needs d >= 1");
  return {RadialKind::chi, dim, 0.0, 0.0};
}

RadialLaw RadialLaw::weibull(double tau, double scale) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidParams("weibull_tail needs tau > 0");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidParams("weibull_tail needs scale > 0");
  return {RadialKind::weibull_tail, 0, tau, scale};
}

RadialLaw RadialLaw::lognormal_log_radius(double mu, double sigma) {
  if (!std::isfinite(mu)) throw InvalidParams("lognormal_log_radius needs finite mu");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw InvalidParams("lognormal_log_radius needs sigma > 0");
  // The sampler rejects draws below zero; keep its acceptance rate sane.
  if (mu / sigma < -3.0) throw InvalidParams("lognormal_log_radius needs mu/sigma >= -3");
  return {RadialKind::lognormal_log_radius, 0, mu, sigma};
}

RadialLaw make_radial(RadialKind kind, std::span<const double> params) {
  switch (kind) {
    case RadialKind::chi: {
      if (params.size() != 1) throw InvalidParams("chi radial law takes exactly {d}");
      const double d = params[0];
      if (d != std::floor(d)) throw InvalidParams("chi radial law needs integer d");
      return RadialLaw::chi(static_cast<int>(d));
    }
    case RadialKind::weibull_tail:
      if (params.size() == 1) return RadialLaw::weibull(params[0]);
      if (params.size() == 2) return RadialLaw::weibull(params[0], params[1]);
      throw InvalidParams("weibull_tail takes {tau} or {tau, scale}");
    case RadialKind::lognormal_log_radius:
      if (params.size() != 2) throw InvalidParams("lognormal_log_radius takes {mu, sigma}");
      return RadialLaw::lognormal_log_radius(params[0], params[1]);
  }
  throw InvalidParams("unknown radial kind");
}

std::vector<double> RadialLaw::params() const {
  switch (kind_) {
    case RadialKind::chi:
      return {static_cast<double>(dim_)};
    case RadialKind::weibull_tail:
    case RadialKind::lognormal_log_radius:
      return {p1_, p2_};
  }
  return {};
}

double RadialLaw::log_tail(double r) const {
  if (!(r > 0.0)) return 0.0;
  switch (kind_) {
    case RadialKind::chi:
      return -0.5 * r * r + chi_log_scaled_tail(dim_, r);
    case RadialKind::weibull_tail:
      return -std::pow(r / p2_, p1_);
    case RadialKind::lognormal_log_radius:
      return log_std_normal_tail((r - p1_) / p2_) - log_std_normal_tail(-p1_ / p2_);
  }
  return 0.0;
}

double RadialLaw::tail(double r) const { return std::exp(log_tail(r)); }

double RadialLaw::log_density(double r) const {
  if (!(r > 0.0)) {
    if (r == 0.0 && kind_ == RadialKind::chi && dim_ == 1) return 0.5 * kLog2 - 0.5 * std::log(kPi);
    return kNegInf;
  }
  switch (kind_) {
    case RadialKind::chi:
      return -0.5 * r * r + chi_log_scaled_density(dim_, r);
    case RadialKind::weibull_tail: {
      const double z = r / p2_;
      return std::log(p1_ / p2_) + (p1_ - 1.0) * std::log(z) - std::pow(z, p1_);
    }
    case RadialKind::lognormal_log_radius: {
      const double z = (r - p1_) / p2_;
      return -0.5 * z * z - kLogSqrt2Pi - std::log(p2_) - log_std_normal_tail(-p1_ / p2_);
    }
  }
  return kNegInf;
}

double RadialLaw::density(double r) const { return std::exp(log_density(r)); }

double RadialLaw::b(double r) const {
  if (!(r > 0.0)) throw DomainError("RadialLaw::b: r must be positive");
  switch (kind_) {
    case RadialKind::chi:
      if (dim_ == 2) return 1.0 / r;
      return std::exp(chi_log_scaled_tail(dim_, r) - chi_log_scaled_density(dim_, r));
    case RadialKind::weibull_tail:
      return p2_ / p1_ * std::pow(r / p2_, 1.0 - p1_);
    case RadialKind::lognormal_log_radius:
      return p2_ * normal_mills_ratio((r - p1_) / p2_);
  }
  return 0.0;
}

double RadialLaw::draw(Engine& eng) const {
  switch (kind_) {
    case RadialKind::chi:
      return std::sqrt(std::chi_squared_distribution<double>(dim_)(eng));
    case RadialKind::weibull_tail:
      return p2_ * std::pow(std::exponential_distribution<double>(1.0)(eng), 1.0 / p1_);
    case RadialKind::lognormal_log_radius: {
      std::normal_distribution<double> normal(p1_, p2_);
      for (;;) {
        const double r = normal(eng);
        if (r > 0.0) return r;
      }
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

double e_of(double u, const RadialLaw& law) {
  if (!(u > 1.0)) throw DomainError("e_of: u must exceed 1");
  return u * law.b(std::log(u));
}

double e_star(std::size_t j, double u, const ScalingBundle& bundle) {
  if (j >= bundle.margins()) throw DomainError("e_star: margin index out of range");
  const double scale = bundle.beta[j] * bundle.gamma;
  const double log_v = (std::log(u) - std::log(bundle.lambda[j])) / scale;
  if (!(u > 0.0) || !(log_v > 0.0))
    throw DomainError("e_star: needs (u/lambda_j)^(1/(beta_j gamma)) > 1");
  // e(v)/v = b(log v)
  return scale * u * bundle.law.b(log_v);
}

double c_limit(std::size_t j, const ScalingBundle& bundle) {
  if (j >= bundle.margins()) throw DomainError("c_limit: margin index out of range");
  const double scale = bundle.beta[j] * bundle.gamma;
  if (bundle.law.kind() == RadialKind::chi) return scale * scale;

  // log(u) e_j*(u)/u = L * scale * b((L - log lambda_j)/scale) with L = log u,
  // so the probe runs on log u directly and reaches far beyond double range u.
  const double log_lambda = std::log(bundle.lambda[j]);
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int k = 1; k <= 15; ++k) {
    const double big_l = std::pow(10.0, k);
    const double arg = (big_l - log_lambda) / scale;
    if (!(arg > 0.0)) continue;
    const double q = big_l * scale * bundle.law.b(arg);
    if (!std::isfinite(q)) break;
    if (std::isfinite(prev)) {
      if (std::abs(q - prev) <= 1e-3 * std::abs(q)) return q;
      if (q < prev && q < 1e-10) return 0.0;
    }
    prev = q;
  }
  std::ostringstream os;
  os << "c_limit: log(u) e*_" << j << "(u)/u has no finite limit for the " << to_string(bundle.law.kind())
     << " radial law (last probe " << prev << ")";
  throw NoFiniteLimit(os.str());
}

double angular_log_tail(const RadialLaw& law, std::size_t dim, double lambda, double scale,
                        double u) {
  if (!(u > 0.0)) throw DomainError("angular_log_tail: u must be positive");
  const double t = std::log(u / lambda) / scale;
  if (dim == 1) {
    // theta = +1 or -1 with probability 1/2 each
    if (t >= 0.0) return -kLog2 + law.log_tail(t);
    return std::log(0.5 + 0.5 * (1.0 - law.tail(-t)));
  }
  const double a = std::abs(t);
  const double c = sphere_marginal_constant(static_cast<int>(dim));
  const double base = law.log_tail(a);
  const double power = static_cast<double>(dim) - 2.0;
  // theta = sin(phi) removes the (1 - theta^2)^(-1/2) endpoint singularity at d = 2:
  // h(theta) d theta = c cos(phi)^(d-2) d phi.
  auto integrand = [&](double phi) {
    const double s = std::sin(phi);
    if (!(s > 0.0)) return 0.0;
    const double w = power == 0.0 ? 1.0 : std::pow(std::cos(phi), power);
    return c * w * std::exp(law.log_tail(a / s) - base);
  };
  QuadratureOptions opts;
  opts.abs_tol = 0.0;
  opts.rel_tol = 1e-11;
  opts.max_intervals = 5000;
  const double scaled = integrate_or_throw(integrand, 0.0, 0.5 * kPi, opts);
  if (t >= 0.0) return base + std::log(scaled);
  return std::log1p(-std::exp(base) * scaled);
}

double margin_log_tail(const ScalingBundle& bundle, std::size_t j, double u) {
  if (!(u > 0.0)) throw DomainError("marginal tail: u must be positive");
  if (j >= bundle.margins()) throw DomainError("marginal tail: margin index out of range");
  const double scale = bundle.beta[j] * bundle.gamma;
  if (bundle.law.kind() == RadialKind::chi &&
      static_cast<std::size_t>(bundle.law.chi_dim()) == bundle.dim)
    return log_std_normal_tail(std::log(u / bundle.lambda[j]) / scale);
  return angular_log_tail(bundle.law, bundle.dim, bundle.lambda[j], scale, u);
}

double MdaProbeRow::rel_error() const { return std::abs(ratio / expected - 1.0); }

std::vector<MdaProbeRow> probe_mda_limit(const RadialLaw& law, std::span<const double> u_grid,
                                         std::span<const double> x_grid) {
  std::vector<MdaProbeRow> rows;
  for (double u : u_grid)
    for (double x : x_grid) {
      const double ratio = std::exp(law.log_tail(u + x * law.b(u)) - law.log_tail(u));
      rows.push_back({u, x, ratio, std::exp(-x)});
    }
  return rows;
}

std::vector<MdaProbeRow> probe_margin_mda(const ScalingBundle& bundle, std::size_t j,
                                          std::span<const double> u_grid,
                                          std::span<const double> x_grid) {
  std::vector<MdaProbeRow> rows;
  for (double u : u_grid) {
    const double base = margin_log_tail(bundle, j, u);
    const double es = e_star(j, u, bundle);
    for (double x : x_grid) {
      const double ratio = std::exp(margin_log_tail(bundle, j, u + x * es) - base);
      rows.push_back({u, x, ratio, std::exp(-x)});
    }
  }
  return rows;
}

std::vector<ConditionMargin> probe_condition_rho(const ScalingBundle& bundle,
                                                 const CorrelationMatrix& sigma, double u,
                                                 double c, double epsilon) {
  if (sigma.dim() != bundle.margins())
    throw DomainError("probe_condition_rho: sigma dimension does not match the margins");
  if (!(u > 1.0)) throw DomainError("probe_condition_rho: u must exceed 1");
  const double log_u = std::log(u);
  std::vector<ConditionMargin> out;
  for (std::size_t i = 0; i < bundle.margins(); ++i) {
    const double log_ei = std::log(epsilon * e_star(i, u, bundle));
    for (std::size_t j = 0; j < bundle.margins(); ++j) {
      if (i == j) continue;
      const double s = sigma(i, j);
      ConditionMargin m;
      m.i = i;
      m.j = j;
      m.lhs = s + c * std::sqrt((1.0 - s * s) / log_u);
      m.rhs = bundle.beta[j] / bundle.beta[i] * log_ei / log_u;
      out.push_back(m);
    }
  }
  return out;
}

double probe_oregular(const RadialLaw& law, std::span<const double> u_grid, double factor) {
  double worst = 0.0;
  for (double u : u_grid) worst = std::max(worst, std::abs(e_of(factor * u, law) / e_of(u, law) - 1.0));
  return worst;
}

}  // namespace tailsum
