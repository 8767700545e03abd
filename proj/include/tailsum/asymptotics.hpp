#pragma once

#include <string>
#include <vector>

#include "tailsum/model.hpp"

namespace tailsum {

/// How the quotient P(X_j > u) / e_j*(u) enters the second-order term.
enum class Variant {
  limit_form,    ///< the quotient as written
  density_form,  ///< replaced by the density of X_j at u
};

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

/// Second-order tail approximation of P(X_1 + ... + X_d > u). Every
/// probability is also kept as a natural log so values far below the double
/// range stay usable.
struct TailApproximation {
  double u = 0.0;
  Variant variant = Variant::density_form;
  double first_order = 0.0;
  double log_first_order = 0.0;
  /// pair_terms(j, i), i != j; the diagonal is zero.
  Matrix pair_terms;
  Matrix log_pair_terms;
  double correction = 0.0;
  double log_correction = 0.0;
  double second_order = 0.0;
  double log_second_order = 0.0;
};

/// sum_j P(X_j > u)
double first_order(const ModelSpec& spec, double u);
double log_first_order(const ModelSpec& spec, double u);

/// First-order value plus the pairwise second-order correction.
TailApproximation approximate(const ModelSpec& spec, double u,
                              Variant variant = Variant::density_form);

/// The correction term alone:
///   sum_j sum_{i != j} lambda_i/(beta_j gamma) exp(c_j (1 - s_ij^2) beta_i^2/(2 beta_j^2))
///                      (u/lambda_j)^(beta_i s_ij/beta_j) * Q_j(u)
/// with Q_j = P(X_j > u)/e_j*(u) (limit form) or the density of X_j (density form).
double second_order_correction(const ModelSpec& spec, double u,
                               Variant variant = Variant::density_form);

/// Closed form of the correction for log-normal margins (chi radius).
/// Throws WrongRadialLaw for other models.
double lognormal_correction(const ModelSpec& spec, double u);
double log_lognormal_correction(const ModelSpec& spec, double u);

/// d(d-1) exp((1-rho^2)/2) / (sqrt(2 pi) u^(1-rho)) exp(-(log u)^2/2): standard
/// log-normal margins with all correlations equal to rho.
double equicorrelated_correction(int d, double rho, double u);
double log_equicorrelated_correction(int d, double rho, double u);

struct AngularCheck {
  double log_integral = 0.0;
  double log_asymptotic = 0.0;
  double integral = 0.0;
  double asymptotic = 0.0;
  double ratio = 0.0;  ///< integral / asymptotic
};

/// Compares the exact angular integral for P(lambda exp(R theta beta gamma) > u)
/// with its large-u equivalent
///   2^((d-3)/2) Gamma(d/2)/sqrt(pi) (e*(u)/(u log u))^((d-1)/2) P(lambda exp(R beta gamma) > u).
AngularCheck verify_angular_lemma(const RadialLaw& law, double lambda, double beta, double gamma,
                                  int d, double u);

}  // namespace tailsum
