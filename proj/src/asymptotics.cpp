#include "tailsum/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "tailsum/errors.hpp"

namespace tailsum {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_positive_u(double u) {
  if (!(u > 0.0) || !std::isfinite(u)) throw DomainError("threshold u must be positive and finite");
}

}  // namespace

std::string to_string(Variant v) { return v == Variant::limit_form ? "limit" : "density"; }

Variant variant_from_string(const std::string& name) {
  if (name == "limit" || name == "limit_form") return Variant::limit_form;
  if (name == "density" || name == "density_form") return Variant::density_form;
  throw InvalidParams("unknown variant '" + name + "' (expected limit or density)");
}

double log_first_order(const ModelSpec& spec, double u) {
  require_positive_u(u);
  std::vector<double> logs;
  for (std::size_t j = 0; j < spec.dim(); ++j) logs.push_back(log_marginal_tail(spec, j, u));
  return log_sum_exp(logs);
}

double first_order(const ModelSpec& spec, double u) { return std::exp(log_first_order(spec, u)); }

TailApproximation approximate(const ModelSpec& spec, double u, Variant variant) {
  require_positive_u(u);
  const std::size_t d = spec.dim();
  const ScalingBundle& bundle = spec.scaling();

  TailApproximation out;
  out.u = u;
  out.variant = variant;
  out.log_first_order = log_first_order(spec, u);
  out.first_order = std::exp(out.log_first_order);
  out.pair_terms = Matrix(d, d);
  out.log_pair_terms = Matrix(d, d, kNegInf);

  std::vector<double> all_logs;
  for (std::size_t j = 0; j < d && d > 1; ++j) {
    const double scale_j = spec.beta(j) * spec.gamma();
    const double c_j = c_limit(j, bundle);
    const double log_u_over_lambda = std::log(u / spec.lambda(j));
    const double log_quotient = variant == Variant::density_form
                                    ? log_marginal_pdf(spec, j, u)
                                    : log_marginal_tail(spec, j, u) - std::log(e_star(j, u, bundle));
    for (std::size_t i = 0; i < d; ++i) {
      if (i == j) continue;
      const double s = spec.sigma()(i, j);
      const double beta_ratio = spec.beta(i) / spec.beta(j);
      const double log_term = std::log(spec.lambda(i) / scale_j) +
                              c_j * (1.0 - s * s) * beta_ratio * beta_ratio / 2.0 +
                              beta_ratio * s * log_u_over_lambda + log_quotient;
      out.log_pair_terms(j, i) = log_term;
      out.pair_terms(j, i) = std::exp(log_term);
      all_logs.push_back(log_term);
    }
  }
  out.log_correction = log_sum_exp(all_logs);
  out.correction = std::exp(out.log_correction);
  out.log_second_order = log_add_exp(out.log_first_order, out.log_correction);
  out.second_order = out.first_order + out.correction;
  return out;
}

double second_order_correction(const ModelSpec& spec, double u, Variant variant) {
  return approximate(spec, u, variant).correction;
}

double log_lognormal_correction(const ModelSpec& spec, double u) {
  require_positive_u(u);
  if (!spec.is_lognormal())
    throw WrongRadialLaw("lognormal_correction requires a chi radius with d degrees of freedom");
  const std::size_t d = spec.dim();
  std::vector<double> logs;
  for (std::size_t j = 0; j < d; ++j) {
    const double scale_j = spec.beta(j) * spec.gamma();
    const double lu = std::log(u / spec.lambda(j));
    for (std::size_t i = 0; i < d; ++i) {
      if (i == j) continue;
      const double s = spec.sigma()(i, j);
      const double scale_i = spec.beta(i) * spec.gamma();
      logs.push_back(std::log(spec.lambda(i)) - 2.0 * std::log(scale_j) +
                     scale_i * scale_i * (1.0 - s * s) / 2.0 +
                     spec.beta(i) * s / spec.beta(j) * lu - lu * lu / (2.0 * scale_j * scale_j) -
                     std::log(u) - kLogSqrt2Pi);
    }
  }
  return log_sum_exp(logs);
}

double lognormal_correction(const ModelSpec& spec, double u) {
  return std::exp(log_lognormal_correction(spec, u));
}

double log_equicorrelated_correction(int d, double rho, double u) {
  if (d < 1) throw DomainError("equicorrelated_correction: d must be >= 1");
  if (!(rho > -1.0 && rho < 1.0)) throw DomainError("equicorrelated_correction: rho must lie in (-1, 1)");
  if (!(u > 1.0)) throw DomainError("equicorrelated_correction: u must exceed 1");
  if (d == 1) return kNegInf;
  const double lu = std::log(u);
  return std::log(static_cast<double>(d) * (d - 1)) + (1.0 - rho * rho) / 2.0 - kLogSqrt2Pi -
         (1.0 - rho) * lu - lu * lu / 2.0;
}

double equicorrelated_correction(int d, double rho, double u) {
  return std::exp(log_equicorrelated_correction(d, rho, u));
}

AngularCheck verify_angular_lemma(const RadialLaw& law, double lambda, double beta, double gamma,
                                  int d, double u) {
  if (d < 2) throw DomainError("verify_angular_lemma: d must be >= 2");
  if (!(u > lambda) || !(u > 1.0)) throw DomainError("verify_angular_lemma: u must exceed max(1, lambda)");
  const double scale = beta * gamma;
  ScalingBundle bundle{law, static_cast<std::size_t>(d), {lambda}, {beta}, gamma};

  AngularCheck out;
  out.log_integral = angular_log_tail(law, static_cast<std::size_t>(d), lambda, scale, u);
  const double es = e_star(0, u, bundle);
  const double log_prefactor = 0.5 * (d - 3) * std::numbers::ln2 + std::lgamma(0.5 * d) -
                               0.5 * std::log(kPi) +
                               0.5 * (d - 1) * std::log(es / (u * std::log(u)));
  out.log_asymptotic = log_prefactor + law.log_tail(std::log(u / lambda) / scale);
  out.integral = std::exp(out.log_integral);
  out.asymptotic = std::exp(out.log_asymptotic);
  out.ratio = std::exp(out.log_integral - out.log_asymptotic);
  return out;
}

}  // namespace tailsum
