#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tailsum/numerics.hpp"

namespace tailsum {

using Engine = std::mt19937_64;

enum class RadialKind {
  chi,                   ///< R = sqrt(chi^2_d); makes exp(R A U) log-normal.
  weibull_tail,          ///< P(R > r) = exp(-(r/scale)^tau).
  lognormal_log_radius,  ///< R ~ N(mu, sigma^2) truncated to R > 0, so exp(R) is log-normal.
};

std::string to_string(RadialKind kind);
RadialKind radial_kind_from_string(const std::string& name);

/// Law of the positive radial variable R, assumed to lie in the Gumbel
/// max-domain of attraction with scaling function b(). Immutable value type.
class RadialLaw {
 public:
  static RadialLaw chi(int dim);
  static RadialLaw weibull(double tau, double scale = 1.0);
  static RadialLaw lognormal_log_radius(double mu, double sigma);

  RadialKind kind() const { return kind_; }
  /// Degrees of freedom of the chi law; 0 for the other kinds.
  int chi_dim() const { return kind_ == RadialKind::chi ? dim_ : 0; }
  /// Parameters in the order accepted by make_radial.
  std::vector<double> params() const;

  double tail(double r) const;
  double log_tail(double r) const;
  double density(double r) const;
  double log_density(double r) const;

  /// Gumbel scaling function: tail(r + x b(r)) / tail(r) -> exp(-x).
  double b(double r) const;

  double draw(Engine& eng) const;

  bool operator==(const RadialLaw&) const = default;

 private:
  RadialLaw(RadialKind kind, int dim, double p1, double p2)
      : kind_(kind), dim_(dim), p1_(p1), p2_(p2) {}

  RadialKind kind_;
  int dim_;    // chi
  double p1_;  // tau | mu
  double p2_;  // scale | sigma
};

/// Builds a law from a kind tag and its parameter list:
/// chi: {d}; weibull_tail: {tau[, scale]}; lognormal_log_radius: {mu, sigma}.
RadialLaw make_radial(RadialKind kind, std::span<const double> params);

/// Seeded stream of R draws. Not thread-safe; use with_seed() per thread.
class RadialSampler {
 public:
  RadialSampler(RadialLaw law, std::uint64_t seed) : law_(law), eng_(seed) {}
  double operator()() { return law_.draw(eng_); }
  RadialSampler with_seed(std::uint64_t seed) const { return {law_, seed}; }

 private:
  RadialLaw law_;
  Engine eng_;
};

/// e(u) = u b(log u), the scaling function of exp(R).
double e_of(double u, const RadialLaw& law);

/// Scaling functions of the margins X_j = lambda_j exp(beta_j gamma R theta_j).
struct ScalingBundle {
  RadialLaw law = RadialLaw::chi(1);
  std::size_t dim = 1;
  std::vector<double> lambda;
  std::vector<double> beta;
  double gamma = 1.0;

  std::size_t margins() const { return lambda.size(); }
};

/// e_j*(u) = beta_j gamma u e(v) / v with v = (u/lambda_j)^(1/(beta_j gamma)).
double e_star(std::size_t j, double u, const ScalingBundle& bundle);

/// c_j = lim log(u) e_j*(u) / u. Closed form (gamma beta_j)^2 for the chi law,
/// otherwise a numerical probe; throws NoFiniteLimit when it diverges.
double c_limit(std::size_t j, const ScalingBundle& bundle);

/// log P(X_j > u): closed-form log-normal tail for the chi law, otherwise the
/// angular integral over the sphere-marginal density.
double margin_log_tail(const ScalingBundle& bundle, std::size_t j, double u);

/// log P(lambda exp(R theta scale) > u) integrated against the marginal density
/// of theta on the sphere in R^dim (dim >= 2). Adaptive quadrature; throws
/// QuadratureError on failure.
double angular_log_tail(const RadialLaw& law, std::size_t dim, double lambda, double scale,
                        double u);

struct MdaProbeRow {
  double u = 0.0;
  double x = 0.0;
  double ratio = 0.0;     ///< tail(u + x s(u)) / tail(u)
  double expected = 0.0;  ///< exp(-x)
  double rel_error() const;
};

/// Radial MDA check: tail(u + x b(u)) / tail(u) on every (u, x) pair.
std::vector<MdaProbeRow> probe_mda_limit(const RadialLaw& law, std::span<const double> u_grid,
                                         std::span<const double> x_grid);

/// Margin MDA check: P(X_j > u + x e_j*(u)) / P(X_j > u).
std::vector<MdaProbeRow> probe_margin_mda(const ScalingBundle& bundle, std::size_t j,
                                          std::span<const double> u_grid,
                                          std::span<const double> x_grid);

struct ConditionMargin {
  std::size_t i = 0;
  std::size_t j = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin() const { return lhs - rhs; }  ///< negative: condition holds at this u
};

/// Finite-u evaluation of
///   sigma_ij + c sqrt((1 - sigma_ij^2)/log u) <= (beta_j/beta_i) log(eps e_i*(u)) / log u
/// for every ordered pair i != j.
std::vector<ConditionMargin> probe_condition_rho(const ScalingBundle& bundle,
                                                 const CorrelationMatrix& sigma, double u,
                                                 double c, double epsilon);

/// max over u in the grid of |e(factor u)/e(u) - 1|.
double probe_oregular(const RadialLaw& law, std::span<const double> u_grid, double factor = 1.01);

}  // namespace tailsum
