#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tailsum/numerics.hpp"
#include "tailsum/radial.hpp"

namespace tailsum {

/// Unvalidated model description, as read from a config file.
struct ModelParams {
  std::vector<double> lambda;
  std::vector<double> beta;
  double gamma = 1.0;
  CorrelationMatrix sigma;
  RadialLaw radial = RadialLaw::chi(1);

  std::size_t dim() const { return sigma.dim(); }
  bool operator==(const ModelParams&) const = default;
};

/// Every violated invariant of the log-elliptical model; empty means valid.
/// Index order is not checked here: ModelSpec::create() sorts margins.
std::vector<std::string> validate(const ModelParams& params);

/// The risk vector X = (lambda_i Z_i^(beta_i gamma)), Z = exp(R L U), with
/// L the lower Cholesky factor of sigma. Margins are stored with beta
/// non-increasing and, among the largest beta, the largest lambda first.
class ModelSpec {
 public:
  /// Validates and normalises index order. Throws InvalidParams listing all
  /// violations. In strict mode the radial MDA probe must also show
  /// convergence.
  static ModelSpec create(const ModelParams& params, bool strict = false);

  /// Standard log-normal margins with equicorrelation rho and chi(d) radius.
  static ModelSpec lognormal(std::size_t d, double rho);

  std::size_t dim() const { return lambda_.size(); }
  double lambda(std::size_t j) const { return lambda_[j]; }
  double beta(std::size_t j) const { return beta_[j]; }
  double gamma() const { return gamma_; }
  const CorrelationMatrix& sigma() const { return sigma_; }
  const RadialLaw& radial() const { return radial_; }
  const Matrix& cholesky() const { return chol_; }
  const ScalingBundle& scaling() const { return bundle_; }

  /// Position in the caller's original ordering of stored margin j.
  std::size_t original_index(std::size_t j) const { return perm_[j]; }
  /// Stored position of the caller's margin k.
  std::size_t stored_index(std::size_t k) const;

  /// True when log X is Gaussian (chi radius with d degrees of freedom).
  bool is_lognormal() const;

  /// Back to the stored (normalised) parameters.
  ModelParams params() const;

 private:
  ModelSpec() = default;

  std::vector<double> lambda_;
  std::vector<double> beta_;
  double gamma_ = 1.0;
  CorrelationMatrix sigma_;
  RadialLaw radial_ = RadialLaw::chi(1);
  Matrix chol_;
  ScalingBundle bundle_;
  std::vector<std::size_t> perm_;
};

/// P(X_j > u).
double marginal_tail(const ModelSpec& spec, std::size_t j, double u);
double log_marginal_tail(const ModelSpec& spec, std::size_t j, double u);

/// Density of X_j at u: closed form for log-normal models, otherwise a central
/// difference of marginal_tail with relative step 1e-5.
double marginal_pdf(const ModelSpec& spec, std::size_t j, double u);
double log_marginal_pdf(const ModelSpec& spec, std::size_t j, double u);

struct SampleBatch {
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  double u = 0.0;
  std::vector<double> values;  ///< row-major n x d

  std::span<const double> row(std::size_t i) const { return {values.data() + i * d, d}; }
};

/// Draws are generated in fixed-size chunks; chunk k uses an engine seeded by
/// chunk_seed(seed, k), so output does not depend on the worker count.
inline constexpr std::size_t kChunkSize = 16384;

std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk);

/// Per-stream sampling state: engine, Gaussian generator and scratch space.
struct DrawContext {
  DrawContext(std::uint64_t seed, std::size_t d) : eng(seed), work(d) {}
  Engine eng;
  std::normal_distribution<double> normal;
  std::vector<double> work;
};

/// Uniform point on the unit sphere (normalised Gaussian vector).
void draw_direction(DrawContext& ctx, std::span<double> out);

/// One draw of the log-scale vector y = R L U, so X_i = lambda_i exp(beta_i gamma y_i).
void draw_log_vector(const ModelSpec& spec, DrawContext& ctx, std::span<double> y);

/// n draws of X. workers == 0 picks the default (TAILSUM_THREADS or OpenMP).
SampleBatch sample(const ModelSpec& spec, std::size_t n, std::uint64_t seed, int workers = 0);

/// Worker count: explicit request, else TAILSUM_THREADS, else the OpenMP default.
int resolve_workers(int requested);

}  // namespace tailsum
